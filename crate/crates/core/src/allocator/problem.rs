//! Immutable problem instances: the deployment, the request list, and the
//! derived tables the solvers and the LP exporter share.

use crate::error::{Error, Result};
use crate::model::{
    penalty, AccelKind, NodeId, NodeKind, ObjectiveWeights, PoolClass, Request,
};
use crate::poolcfg::Deployment;

/// Host-capable node with the per-solve facts precomputed.
#[derive(Debug, Clone)]
pub(crate) struct HostInfo {
    pub node: NodeId,
    /// Pool index, or `None` for standalone servers.
    pub pool: Option<usize>,
    pub placement_class: PoolClass,
    pub cores: u32,
    pub local_mem: u32,
    pub gpu: u32,
    pub fpga: u32,
    pub weighted_cap: u64,
    /// Symmetry group: hosts with identical capacity, class, and pool are
    /// interchangeable while empty.
    pub group: usize,
    pub standalone: bool,
}

/// A pool's remote resources.
#[derive(Debug, Clone, Default)]
pub(crate) struct PoolMeta {
    pub mem_nodes: Vec<NodeId>,
    /// Uniform memory node size in this pool (GB); 0 when the pool has no
    /// memory nodes.
    pub mem_node_size: u32,
    pub remote_cap: u64,
    /// Indices into `Problem::accel_nodes`.
    pub gpu_nodes: Vec<usize>,
    pub fpga_nodes: Vec<usize>,
}

#[derive(Debug, Clone)]
pub(crate) struct AccelNodeInfo {
    pub node: NodeId,
    pub pool: usize,
    pub kind: AccelKind,
    pub cap: u32,
    pub weighted_cap: u64,
}

/// Static placement option of one request.
#[derive(Debug, Clone)]
pub(crate) struct HostCandidate {
    pub host: usize,
    pub penalty: u64,
    /// The host's own accelerators can serve this request.
    pub integrated_ok: bool,
    /// Some accelerator node in the host's pool can serve this request.
    pub pool_accel_ok: bool,
}

/// An immutable allocation problem instance.
#[derive(Debug, Clone)]
pub struct Problem {
    deployment: Deployment,
    requests: Vec<Request>,
    weights: ObjectiveWeights,
    pub(crate) hosts: Vec<HostInfo>,
    pub(crate) pools: Vec<PoolMeta>,
    pub(crate) accel_nodes: Vec<AccelNodeInfo>,
    /// Host indices per symmetry group, ascending node id.
    pub(crate) host_groups: Vec<Vec<usize>>,
    /// Static candidates per request index, ascending host node id.
    pub(crate) candidates: Vec<Vec<HostCandidate>>,
    /// Smallest static penalty per request index.
    pub(crate) min_penalty: Vec<u64>,
    /// Smallest weighted capacity over all hosts.
    pub(crate) min_host_cap: u64,
    /// Largest core capacity over all hosts.
    pub(crate) max_host_cores: u32,
}

impl Problem {
    pub fn deployment(&self) -> &Deployment {
        &self.deployment
    }

    pub fn requests(&self) -> &[Request] {
        &self.requests
    }

    pub fn weights(&self) -> &ObjectiveWeights {
        &self.weights
    }
}

/// Builds a problem instance, rejecting requests that no host could serve
/// even on an empty deployment.
pub fn build_problem(
    deployment: &Deployment,
    requests: &[Request],
    weights: &ObjectiveWeights,
) -> Result<Problem> {
    weights.validate()?;
    let mut seen = std::collections::BTreeSet::new();
    for r in requests {
        if !seen.insert(r.id) {
            return Err(Error::InvalidRequest { id: r.id, reason: "duplicate request id".into() });
        }
    }

    let mut hosts = Vec::new();
    let mut group_keys: Vec<(Option<usize>, NodeKind, u32, u32, u32, u32)> = Vec::new();
    let mut host_groups: Vec<Vec<usize>> = Vec::new();
    for node in &deployment.nodes {
        if !node.host_capable() {
            continue;
        }
        let pool = node.pool.map(|p| p.index());
        let cap = node.capacity;
        let key = (pool, node.kind, cap.cores, cap.memory, cap.gpu, cap.fpga);
        let group = match group_keys.iter().position(|k| *k == key) {
            Some(g) => g,
            None => {
                group_keys.push(key);
                host_groups.push(Vec::new());
                group_keys.len() - 1
            }
        };
        let index = hosts.len();
        host_groups[group].push(index);
        hosts.push(HostInfo {
            node: node.id,
            pool,
            placement_class: deployment.placement_class(node.id),
            cores: cap.cores,
            local_mem: cap.memory,
            gpu: cap.gpu,
            fpga: cap.fpga,
            weighted_cap: weights.value(&cap),
            group,
            standalone: pool.is_none(),
        });
    }

    let mut pools: Vec<PoolMeta> = vec![PoolMeta::default(); deployment.pools.len()];
    let mut accel_nodes = Vec::new();
    for node in &deployment.nodes {
        let Some(pool) = node.pool.map(|p| p.index()) else { continue };
        match node.kind {
            NodeKind::Memory => {
                let size = node.capacity.memory;
                let meta = &mut pools[pool];
                if meta.mem_nodes.is_empty() {
                    meta.mem_node_size = size;
                } else if meta.mem_node_size != size {
                    return Err(Error::Topology(format!(
                        "pool {} mixes memory node sizes {} and {}",
                        pool, meta.mem_node_size, size
                    )));
                }
                meta.mem_nodes.push(node.id);
                meta.remote_cap += size as u64;
            }
            NodeKind::Gpu | NodeKind::Fpga => {
                let kind =
                    if node.kind == NodeKind::Gpu { AccelKind::Gpu } else { AccelKind::Fpga };
                let cap = node.capacity.accel_units();
                let idx = accel_nodes.len();
                accel_nodes.push(AccelNodeInfo {
                    node: node.id,
                    pool,
                    kind,
                    cap,
                    weighted_cap: weights.value(&node.capacity),
                });
                match kind {
                    AccelKind::Gpu => pools[pool].gpu_nodes.push(idx),
                    AccelKind::Fpga => pools[pool].fpga_nodes.push(idx),
                }
            }
            _ => {}
        }
    }

    let max_host_cores = hosts.iter().map(|h| h.cores).max().unwrap_or(0);
    let min_host_cap = hosts.iter().map(|h| h.weighted_cap).min().unwrap_or(0);

    let mut candidates = Vec::with_capacity(requests.len());
    let mut min_penalty = Vec::with_capacity(requests.len());
    for r in requests {
        if r.demand.cores > max_host_cores {
            return Err(Error::InfeasibleRequest {
                id: r.id,
                reason: format!(
                    "demands {} cores but no host supplies more than {max_host_cores}",
                    r.demand.cores
                ),
            });
        }
        let units = r.accel_units();
        let mut list = Vec::new();
        for (hi, host) in hosts.iter().enumerate() {
            if r.demand.cores > host.cores || r.local_threshold > host.local_mem {
                continue;
            }
            let remote_cap = host.pool.map_or(0, |p| pools[p].remote_cap);
            if r.demand.memory as u64 > host.local_mem as u64 + remote_cap {
                continue;
            }
            let (integrated_ok, pool_accel_ok) = match r.accel_kind() {
                None => (false, false),
                Some(kind) => {
                    let own = match kind {
                        AccelKind::Gpu => host.gpu,
                        AccelKind::Fpga => host.fpga,
                    };
                    let pool_ok = host.pool.is_some_and(|p| {
                        let nodes = match kind {
                            AccelKind::Gpu => &pools[p].gpu_nodes,
                            AccelKind::Fpga => &pools[p].fpga_nodes,
                        };
                        nodes.iter().any(|&a| accel_nodes[a].cap >= units)
                    });
                    (own >= units, pool_ok)
                }
            };
            if units > 0 && !integrated_ok && !pool_accel_ok {
                continue;
            }
            list.push(HostCandidate {
                host: hi,
                penalty: penalty(r.class, host.placement_class),
                integrated_ok,
                pool_accel_ok,
            });
        }
        min_penalty.push(list.iter().map(|c| c.penalty).min().unwrap_or(0));
        candidates.push(list);
    }

    Ok(Problem {
        deployment: deployment.clone(),
        requests: requests.to_vec(),
        weights: *weights,
        hosts,
        pools,
        accel_nodes,
        host_groups,
        candidates,
        min_penalty,
        min_host_cap,
        max_host_cores,
    })
}
