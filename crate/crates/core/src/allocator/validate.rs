//! Full solution audit: every placement invariant, every per-node capacity,
//! the active-set derivation, and the objective arithmetic. All violations
//! are reported, not just the first.

use std::collections::BTreeMap;
use std::fmt;

use crate::model::{penalty, AccelKind, NodeId, NodeKind};

use super::problem::Problem;
use super::{AccelProvider, Solution};

/// One broken constraint in a solution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    MissingPlacement { request: u32 },
    DuplicatePlacement { request: u32 },
    UnknownRequest { request: u32 },
    HostNotHostCapable { request: u32, node: NodeId },
    /// `local_mem` below the request's local-memory threshold.
    LocalThreshold { request: u32, have: u32, need: u32 },
    /// local + remote supply does not equal the memory demand.
    MemorySum { request: u32, supplied: u32, demanded: u32 },
    /// A referenced node lives outside the host's pool.
    ForeignPool { request: u32, node: NodeId },
    /// A standalone server host drew remote resources.
    StandaloneRemote { request: u32 },
    RemoteFromNonMemoryNode { request: u32, node: NodeId },
    EmptyRemoteSlice { request: u32, node: NodeId },
    MissingAccel { request: u32 },
    SpuriousAccel { request: u32 },
    AccelUnitsMismatch { request: u32, have: u32, need: u32 },
    AccelTypeMismatch { request: u32 },
    CoreOverflow { node: NodeId, used: u64, cap: u32 },
    LocalMemoryOverflow { node: NodeId, used: u64, cap: u32 },
    RemoteMemoryOverflow { node: NodeId, used: u64, cap: u32 },
    AccelOverflow { node: NodeId, used: u64, cap: u32 },
    ActiveSetMissing { node: NodeId },
    ActiveSetSpurious { node: NodeId },
    ObjectiveMismatch { field: &'static str, reported: u64, computed: u64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            MissingPlacement { request } => write!(f, "request {request} has no placement"),
            DuplicatePlacement { request } => write!(f, "request {request} placed twice"),
            UnknownRequest { request } => write!(f, "placement for unknown request {request}"),
            HostNotHostCapable { request, node } => {
                write!(f, "request {request}: node {node} cannot host")
            }
            LocalThreshold { request, have, need } => write!(
                f,
                "request {request}: local memory {have} GB below threshold {need} GB"
            ),
            MemorySum { request, supplied, demanded } => write!(
                f,
                "request {request}: supplied {supplied} GB of {demanded} GB demanded"
            ),
            ForeignPool { request, node } => write!(
                f,
                "request {request}: node {node} is outside the host's pool"
            ),
            StandaloneRemote { request } => write!(
                f,
                "request {request}: standalone server host drew remote resources"
            ),
            RemoteFromNonMemoryNode { request, node } => write!(
                f,
                "request {request}: remote memory from non-memory node {node}"
            ),
            EmptyRemoteSlice { request, node } => {
                write!(f, "request {request}: zero-GB slice on node {node}")
            }
            MissingAccel { request } => {
                write!(f, "request {request}: accelerator demand unserved")
            }
            SpuriousAccel { request } => {
                write!(f, "request {request}: accelerator assigned without demand")
            }
            AccelUnitsMismatch { request, have, need } => write!(
                f,
                "request {request}: {have} accelerator units assigned, {need} demanded"
            ),
            AccelTypeMismatch { request } => {
                write!(f, "request {request}: accelerator provider type mismatch")
            }
            CoreOverflow { node, used, cap } => {
                write!(f, "node {node}: {used} cores used of {cap}")
            }
            LocalMemoryOverflow { node, used, cap } => {
                write!(f, "node {node}: {used} GB local memory used of {cap}")
            }
            RemoteMemoryOverflow { node, used, cap } => {
                write!(f, "node {node}: {used} GB remote memory used of {cap}")
            }
            AccelOverflow { node, used, cap } => {
                write!(f, "node {node}: {used} accelerator units used of {cap}")
            }
            ActiveSetMissing { node } => {
                write!(f, "active set omits supplying node {node}")
            }
            ActiveSetSpurious { node } => {
                write!(f, "active set lists idle node {node}")
            }
            ObjectiveMismatch { field, reported, computed } => {
                write!(f, "objective {field}: reported {reported}, computed {computed}")
            }
        }
    }
}

/// Checks a solution against its problem instance and returns every
/// violation found; an empty list means the solution is valid.
pub fn validate(solution: &Solution, problem: &Problem) -> Vec<Violation> {
    let mut out = Vec::new();
    let deployment = problem.deployment();
    let requests = problem.requests();
    let by_id: BTreeMap<u32, usize> =
        requests.iter().enumerate().map(|(i, r)| (r.id, i)).collect();

    let mut placed: BTreeMap<u32, u32> = BTreeMap::new();
    let node_ok = |id: NodeId| id.index() < deployment.nodes.len();

    let mut core_used: BTreeMap<NodeId, u64> = BTreeMap::new();
    let mut local_used: BTreeMap<NodeId, u64> = BTreeMap::new();
    let mut remote_used: BTreeMap<NodeId, u64> = BTreeMap::new();
    let mut accel_used: BTreeMap<NodeId, u64> = BTreeMap::new();
    let mut supplying: BTreeMap<NodeId, bool> = BTreeMap::new();
    let mut computed_penalty = 0u64;

    for placement in &solution.placements {
        let count = placed.entry(placement.request).or_insert(0);
        *count += 1;
        if *count > 1 {
            out.push(Violation::DuplicatePlacement { request: placement.request });
            continue;
        }
        let Some(&req_idx) = by_id.get(&placement.request) else {
            out.push(Violation::UnknownRequest { request: placement.request });
            continue;
        };
        let request = &requests[req_idx];
        if !node_ok(placement.host) {
            out.push(Violation::HostNotHostCapable { request: request.id, node: placement.host });
            continue;
        }
        let host = deployment.node(placement.host);
        if !host.host_capable() {
            out.push(Violation::HostNotHostCapable { request: request.id, node: placement.host });
            continue;
        }
        let standalone = host.pool.is_none();

        if placement.local_mem < request.local_threshold {
            out.push(Violation::LocalThreshold {
                request: request.id,
                have: placement.local_mem,
                need: request.local_threshold,
            });
        }
        let remote_total: u64 = placement.remote_mem.iter().map(|(_, gb)| *gb as u64).sum();
        let supplied = placement.local_mem as u64 + remote_total;
        if supplied != request.demand.memory as u64 {
            out.push(Violation::MemorySum {
                request: request.id,
                supplied: supplied as u32,
                demanded: request.demand.memory,
            });
        }
        if standalone && (remote_total > 0) {
            out.push(Violation::StandaloneRemote { request: request.id });
        }
        for &(node_id, gb) in &placement.remote_mem {
            if gb == 0 {
                out.push(Violation::EmptyRemoteSlice { request: request.id, node: node_id });
                continue;
            }
            if !node_ok(node_id) {
                out.push(Violation::RemoteFromNonMemoryNode { request: request.id, node: node_id });
                continue;
            }
            let node = deployment.node(node_id);
            if node.kind != NodeKind::Memory {
                out.push(Violation::RemoteFromNonMemoryNode { request: request.id, node: node_id });
                continue;
            }
            if !standalone && node.pool != host.pool {
                out.push(Violation::ForeignPool { request: request.id, node: node_id });
            }
            *remote_used.entry(node_id).or_default() += gb as u64;
            *supplying.entry(node_id).or_default() = true;
        }

        match (&placement.accel, request.accel_kind()) {
            (None, None) => {}
            (None, Some(_)) => out.push(Violation::MissingAccel { request: request.id }),
            (Some(_), None) => out.push(Violation::SpuriousAccel { request: request.id }),
            (Some(assignment), Some(kind)) => {
                if assignment.units != request.accel_units() {
                    out.push(Violation::AccelUnitsMismatch {
                        request: request.id,
                        have: assignment.units,
                        need: request.accel_units(),
                    });
                }
                match assignment.provider {
                    AccelProvider::HostIntegrated => {
                        let cap = match kind {
                            AccelKind::Gpu => host.capacity.gpu,
                            AccelKind::Fpga => host.capacity.fpga,
                        };
                        if cap == 0 {
                            out.push(Violation::AccelTypeMismatch { request: request.id });
                        }
                        *accel_used.entry(placement.host).or_default() += assignment.units as u64;
                    }
                    AccelProvider::Node(node_id) => {
                        if standalone {
                            out.push(Violation::StandaloneRemote { request: request.id });
                        }
                        if !node_ok(node_id) {
                            out.push(Violation::AccelTypeMismatch { request: request.id });
                            continue;
                        }
                        let node = deployment.node(node_id);
                        let expected = match kind {
                            AccelKind::Gpu => NodeKind::Gpu,
                            AccelKind::Fpga => NodeKind::Fpga,
                        };
                        if node.kind != expected {
                            out.push(Violation::AccelTypeMismatch { request: request.id });
                        }
                        if !standalone && node.pool != host.pool {
                            out.push(Violation::ForeignPool { request: request.id, node: node_id });
                        }
                        *accel_used.entry(node_id).or_default() += assignment.units as u64;
                        *supplying.entry(node_id).or_default() = true;
                    }
                }
            }
        }

        *core_used.entry(placement.host).or_default() += request.demand.cores as u64;
        *local_used.entry(placement.host).or_default() += placement.local_mem as u64;
        *supplying.entry(placement.host).or_default() = true;
        computed_penalty += penalty(request.class, deployment.placement_class(placement.host));
    }

    for request in requests {
        if !placed.contains_key(&request.id) {
            out.push(Violation::MissingPlacement { request: request.id });
        }
    }

    for (&node_id, &used) in &core_used {
        let cap = deployment.node(node_id).capacity.cores;
        if used > cap as u64 {
            out.push(Violation::CoreOverflow { node: node_id, used, cap });
        }
    }
    for (&node_id, &used) in &local_used {
        let cap = deployment.node(node_id).capacity.memory;
        if used > cap as u64 {
            out.push(Violation::LocalMemoryOverflow { node: node_id, used, cap });
        }
    }
    for (&node_id, &used) in &remote_used {
        let cap = deployment.node(node_id).capacity.memory;
        if used > cap as u64 {
            out.push(Violation::RemoteMemoryOverflow { node: node_id, used, cap });
        }
    }
    for (&node_id, &used) in &accel_used {
        let node = deployment.node(node_id);
        let cap = node.capacity.accel_units();
        if used > cap as u64 {
            out.push(Violation::AccelOverflow { node: node_id, used, cap });
        }
    }

    let derived: Vec<NodeId> = supplying
        .iter()
        .filter_map(|(&node, &active)| active.then_some(node))
        .collect();
    for node in &derived {
        if !solution.active_nodes.contains(node) {
            out.push(Violation::ActiveSetMissing { node: *node });
        }
    }
    for node in &solution.active_nodes {
        if !derived.contains(node) {
            out.push(Violation::ActiveSetSpurious { node: *node });
        }
    }

    let computed_usage: u64 = derived
        .iter()
        .filter(|id| node_ok(**id))
        .map(|id| problem.weights().value(&deployment.node(*id).capacity))
        .sum();
    if solution.objective.penalty != computed_penalty {
        out.push(Violation::ObjectiveMismatch {
            field: "penalty",
            reported: solution.objective.penalty,
            computed: computed_penalty,
        });
    }
    if solution.objective.weighted_usage != computed_usage {
        out.push(Violation::ObjectiveMismatch {
            field: "weighted_usage",
            reported: solution.objective.weighted_usage,
            computed: computed_usage,
        });
    }
    out
}
