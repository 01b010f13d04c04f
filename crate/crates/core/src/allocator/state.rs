//! Incremental assignment state shared by the exact and greedy solvers:
//! feasibility checks, objective deltas, aggregate cuts, and the final
//! materialization of placements.
//!
//! Memory is resolved analytically. Local memory at an active host is free
//! (the objective charges the host's full capacity either way), so supplying
//! as much of a request's memory locally as the host allows never hurts the
//! objective; what overflows becomes the pool's remote residual. Memory
//! nodes within a pool are equal-sized, so the minimum number of active
//! memory nodes is `ceil(residual / node_size)`.

use crate::model::{AccelKind, NodeId};

use super::problem::Problem;
use super::{AccelAssignment, AccelProvider, Objective, Placement, Solution};

/// Accelerator provider option for one request.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum AccelChoice {
    None,
    Integrated,
    /// Index into `Problem::accel_nodes`.
    PoolNode(usize),
}

/// One branching decision: a host plus an accelerator provider.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Choice {
    pub host: usize,
    pub accel: AccelChoice,
    pub penalty: u64,
}

/// A choice scored with its incremental cost, for candidate ordering.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ScoredChoice {
    pub choice: Choice,
    pub usage_delta: u64,
}

/// Demand remaining below some search depth, plus the static penalty floor.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Suffix {
    pub cores: u64,
    pub memory: u64,
    pub gpu: u64,
    pub fpga: u64,
    pub min_penalty: u64,
}

pub(crate) struct AssignState<'p> {
    pub p: &'p Problem,
    host_cores_used: Vec<u32>,
    host_thr_used: Vec<u32>,
    host_mem_demand: Vec<u64>,
    host_reqs: Vec<u32>,
    host_gpu_used: Vec<u32>,
    host_fpga_used: Vec<u32>,
    accel_used: Vec<u32>,
    pool_residual: Vec<u64>,
    pub penalty: u64,
    /// Weighted capacity of active hosts and accelerator nodes (memory nodes
    /// are accounted analytically from the residuals).
    usage_active: u64,
    free_cores_all: u64,
    free_active_cores: u64,
    free_local_all: u64,
    free_remote_all: u64,
    free_gpu_all: u64,
    free_fpga_all: u64,
    free_active_gpu: u64,
    free_active_fpga: u64,
    pub assigned: Vec<Option<Choice>>,
}

impl<'p> AssignState<'p> {
    pub fn new(p: &'p Problem) -> Self {
        let hosts = p.hosts.len();
        let free_cores_all = p.hosts.iter().map(|h| h.cores as u64).sum();
        let free_local_all = p.hosts.iter().map(|h| h.local_mem as u64).sum();
        let free_remote_all = p.pools.iter().map(|m| m.remote_cap).sum();
        let free_gpu_all = p.hosts.iter().map(|h| h.gpu as u64).sum::<u64>()
            + p.accel_nodes.iter().filter(|a| a.kind == AccelKind::Gpu).map(|a| a.cap as u64).sum::<u64>();
        let free_fpga_all = p.hosts.iter().map(|h| h.fpga as u64).sum::<u64>()
            + p.accel_nodes.iter().filter(|a| a.kind == AccelKind::Fpga).map(|a| a.cap as u64).sum::<u64>();
        AssignState {
            p,
            host_cores_used: vec![0; hosts],
            host_thr_used: vec![0; hosts],
            host_mem_demand: vec![0; hosts],
            host_reqs: vec![0; hosts],
            host_gpu_used: vec![0; hosts],
            host_fpga_used: vec![0; hosts],
            accel_used: vec![0; p.accel_nodes.len()],
            pool_residual: vec![0; p.pools.len()],
            penalty: 0,
            usage_active: 0,
            free_cores_all,
            free_active_cores: 0,
            free_local_all,
            free_remote_all,
            free_gpu_all,
            free_fpga_all,
            free_active_gpu: 0,
            free_active_fpga: 0,
            assigned: vec![None; p.requests().len()],
        }
    }

    fn mem_weight(&self) -> u64 {
        self.p.weights().memory
    }

    /// Weighted capacity of the memory nodes the current residuals activate.
    fn memory_usage(&self) -> u64 {
        let mut total = 0u64;
        for (pool, &res) in self.pool_residual.iter().enumerate() {
            if res > 0 {
                let size = self.p.pools[pool].mem_node_size as u64;
                total += res.div_ceil(size) * size;
            }
        }
        total * self.mem_weight()
    }

    pub fn usage(&self) -> u64 {
        self.usage_active + self.memory_usage()
    }

    fn residual_delta(&self, host: usize, memory: u64) -> u64 {
        let local = self.p.hosts[host].local_mem as u64;
        let before = self.host_mem_demand[host].saturating_sub(local);
        let after = (self.host_mem_demand[host] + memory).saturating_sub(local);
        after - before
    }

    /// Extra memory-node weight activating `delta` more GB of residual in
    /// the host's pool.
    fn memory_usage_delta(&self, host: usize, memory: u64) -> u64 {
        let Some(pool) = self.p.hosts[host].pool else { return 0 };
        let delta = self.residual_delta(host, memory);
        if delta == 0 {
            return 0;
        }
        let size = self.p.pools[pool].mem_node_size as u64;
        let before = self.pool_residual[pool].div_ceil(size.max(1));
        let after = (self.pool_residual[pool] + delta).div_ceil(size.max(1));
        (after - before) * size * self.mem_weight()
    }

    /// The host a request may open while empty: the lowest-id empty host of
    /// each symmetry group stands in for all of them.
    fn symmetry_ok(&self, host: usize) -> bool {
        if self.host_reqs[host] > 0 {
            return true;
        }
        let group = &self.p.host_groups[self.p.hosts[host].group];
        group.iter().find(|&&h| self.host_reqs[h] == 0) == Some(&host)
    }

    /// Enumerates all dynamically feasible choices for a request, scored and
    /// sorted for deterministic search: ties break by lowest host node id,
    /// then provider order (none, integrated, lowest accelerator node id).
    ///
    /// `phase_penalty_first` orders by (penalty, usage delta); otherwise by
    /// (usage delta, penalty).
    pub fn collect_choices(
        &self,
        req: usize,
        phase_penalty_first: bool,
        out: &mut Vec<ScoredChoice>,
    ) {
        out.clear();
        let r = &self.p.requests()[req];
        let units = r.accel_units();
        let kind = r.accel_kind();
        let memory = r.demand.memory as u64;
        for cand in &self.p.candidates[req] {
            let hi = cand.host;
            let host = &self.p.hosts[hi];
            if !self.symmetry_ok(hi) {
                continue;
            }
            if self.host_cores_used[hi] + r.demand.cores > host.cores {
                continue;
            }
            if self.host_thr_used[hi] + r.local_threshold > host.local_mem {
                continue;
            }
            if host.standalone {
                if self.host_mem_demand[hi] + memory > host.local_mem as u64 {
                    continue;
                }
            } else if let Some(pool) = host.pool {
                let delta = self.residual_delta(hi, memory);
                if self.pool_residual[pool] + delta > self.p.pools[pool].remote_cap {
                    continue;
                }
            }
            let host_open = if self.host_reqs[hi] == 0 { host.weighted_cap } else { 0 };
            let base = host_open + self.memory_usage_delta(hi, memory);
            let mut push = |accel: AccelChoice, extra: u64| {
                out.push(ScoredChoice {
                    choice: Choice { host: hi, accel, penalty: cand.penalty },
                    usage_delta: base + extra,
                });
            };
            match kind {
                None => push(AccelChoice::None, 0),
                Some(k) => {
                    if cand.integrated_ok {
                        let used = match k {
                            AccelKind::Gpu => self.host_gpu_used[hi],
                            AccelKind::Fpga => self.host_fpga_used[hi],
                        };
                        let cap = match k {
                            AccelKind::Gpu => host.gpu,
                            AccelKind::Fpga => host.fpga,
                        };
                        if used + units <= cap {
                            push(AccelChoice::Integrated, 0);
                        }
                    }
                    if cand.pool_accel_ok {
                        let pool = host.pool.expect("pooled accel requires a pool");
                        let nodes = match k {
                            AccelKind::Gpu => &self.p.pools[pool].gpu_nodes,
                            AccelKind::Fpga => &self.p.pools[pool].fpga_nodes,
                        };
                        let mut fresh_seen = false;
                        for &a in nodes {
                            let info = &self.p.accel_nodes[a];
                            if self.accel_used[a] > 0 {
                                if self.accel_used[a] + units <= info.cap {
                                    push(AccelChoice::PoolNode(a), 0);
                                }
                            } else if !fresh_seen {
                                // identical empty nodes are interchangeable
                                fresh_seen = true;
                                if units <= info.cap {
                                    push(AccelChoice::PoolNode(a), info.weighted_cap);
                                }
                            }
                        }
                    }
                }
            }
        }
        let accel_key = |c: &Choice| match c.accel {
            AccelChoice::None => (0u8, 0u32),
            AccelChoice::Integrated => (1, 0),
            AccelChoice::PoolNode(a) => (2, self.p.accel_nodes[a].node.0),
        };
        if phase_penalty_first {
            out.sort_by_key(|s| {
                (s.choice.penalty, s.usage_delta, self.p.hosts[s.choice.host].node.0, accel_key(&s.choice))
            });
        } else {
            out.sort_by_key(|s| {
                (s.usage_delta, s.choice.penalty, self.p.hosts[s.choice.host].node.0, accel_key(&s.choice))
            });
        }
    }

    pub fn apply(&mut self, req: usize, choice: Choice) {
        let r = &self.p.requests()[req];
        let hi = choice.host;
        let host = &self.p.hosts[hi];
        let memory = r.demand.memory as u64;
        if self.host_reqs[hi] == 0 {
            self.usage_active += host.weighted_cap;
            self.free_active_cores += (host.cores - self.host_cores_used[hi]) as u64;
            self.free_active_gpu += (host.gpu - self.host_gpu_used[hi]) as u64;
            self.free_active_fpga += (host.fpga - self.host_fpga_used[hi]) as u64;
        }
        self.host_reqs[hi] += 1;
        self.host_cores_used[hi] += r.demand.cores;
        self.free_cores_all -= r.demand.cores as u64;
        self.free_active_cores -= r.demand.cores as u64;
        self.host_thr_used[hi] += r.local_threshold;
        let local = host.local_mem as u64;
        let local_free_before = local.saturating_sub(self.host_mem_demand[hi]);
        let delta = self.residual_delta(hi, memory);
        self.host_mem_demand[hi] += memory;
        let local_free_after = local.saturating_sub(self.host_mem_demand[hi]);
        self.free_local_all -= local_free_before - local_free_after;
        if let Some(pool) = host.pool {
            self.pool_residual[pool] += delta;
            self.free_remote_all -= delta;
        }
        let units = r.accel_units();
        match choice.accel {
            AccelChoice::None => {}
            AccelChoice::Integrated => match r.accel_kind().expect("accel choice requires demand") {
                AccelKind::Gpu => {
                    self.host_gpu_used[hi] += units;
                    self.free_gpu_all -= units as u64;
                    self.free_active_gpu -= units as u64;
                }
                AccelKind::Fpga => {
                    self.host_fpga_used[hi] += units;
                    self.free_fpga_all -= units as u64;
                    self.free_active_fpga -= units as u64;
                }
            },
            AccelChoice::PoolNode(a) => {
                let info = &self.p.accel_nodes[a];
                if self.accel_used[a] == 0 {
                    self.usage_active += info.weighted_cap;
                    match info.kind {
                        AccelKind::Gpu => self.free_active_gpu += info.cap as u64,
                        AccelKind::Fpga => self.free_active_fpga += info.cap as u64,
                    }
                }
                self.accel_used[a] += units;
                match info.kind {
                    AccelKind::Gpu => {
                        self.free_gpu_all -= units as u64;
                        self.free_active_gpu -= units as u64;
                    }
                    AccelKind::Fpga => {
                        self.free_fpga_all -= units as u64;
                        self.free_active_fpga -= units as u64;
                    }
                }
            }
        }
        self.penalty += choice.penalty;
        self.assigned[req] = Some(choice);
    }

    pub fn undo(&mut self, req: usize, choice: Choice) {
        let r = &self.p.requests()[req];
        let hi = choice.host;
        let host = &self.p.hosts[hi];
        let memory = r.demand.memory as u64;
        self.assigned[req] = None;
        self.penalty -= choice.penalty;
        let units = r.accel_units();
        match choice.accel {
            AccelChoice::None => {}
            AccelChoice::Integrated => match r.accel_kind().expect("accel choice requires demand") {
                AccelKind::Gpu => {
                    self.host_gpu_used[hi] -= units;
                    self.free_gpu_all += units as u64;
                    self.free_active_gpu += units as u64;
                }
                AccelKind::Fpga => {
                    self.host_fpga_used[hi] -= units;
                    self.free_fpga_all += units as u64;
                    self.free_active_fpga += units as u64;
                }
            },
            AccelChoice::PoolNode(a) => {
                let info = &self.p.accel_nodes[a];
                match info.kind {
                    AccelKind::Gpu => {
                        self.free_gpu_all += units as u64;
                        self.free_active_gpu += units as u64;
                    }
                    AccelKind::Fpga => {
                        self.free_fpga_all += units as u64;
                        self.free_active_fpga += units as u64;
                    }
                }
                self.accel_used[a] -= units;
                if self.accel_used[a] == 0 {
                    self.usage_active -= info.weighted_cap;
                    match info.kind {
                        AccelKind::Gpu => self.free_active_gpu -= info.cap as u64,
                        AccelKind::Fpga => self.free_active_fpga -= info.cap as u64,
                    }
                }
            }
        }
        let local = host.local_mem as u64;
        let local_free_before = local.saturating_sub(self.host_mem_demand[hi]);
        self.host_mem_demand[hi] -= memory;
        let local_free_after = local.saturating_sub(self.host_mem_demand[hi]);
        self.free_local_all += local_free_after - local_free_before;
        if let Some(pool) = host.pool {
            let before = self.host_mem_demand[hi].saturating_sub(local);
            let after = (self.host_mem_demand[hi] + memory).saturating_sub(local);
            let delta = after - before;
            self.pool_residual[pool] -= delta;
            self.free_remote_all += delta;
        }
        self.host_thr_used[hi] -= r.local_threshold;
        self.host_cores_used[hi] -= r.demand.cores;
        self.free_cores_all += r.demand.cores as u64;
        self.free_active_cores += r.demand.cores as u64;
        self.host_reqs[hi] -= 1;
        if self.host_reqs[hi] == 0 {
            self.usage_active -= host.weighted_cap;
            self.free_active_cores -= (host.cores - self.host_cores_used[hi]) as u64;
            self.free_active_gpu -= (host.gpu - self.host_gpu_used[hi]) as u64;
            self.free_active_fpga -= (host.fpga - self.host_fpga_used[hi]) as u64;
        }
    }

    /// Aggregate infeasibility cut: remaining demand against remaining
    /// supply, per resource type. Necessary conditions only; true means the
    /// subtree holds no feasible completion.
    pub fn infeasible_by_aggregates(&self, suffix: &Suffix) -> bool {
        suffix.cores > self.free_cores_all
            || suffix.memory > self.free_local_all + self.free_remote_all
            || suffix.gpu > self.free_gpu_all
            || suffix.fpga > self.free_fpga_all
    }

    /// Lower bound on the final weighted usage of any completion of the
    /// current partial assignment.
    pub fn usage_lower_bound(&self, suffix: &Suffix) -> u64 {
        let current = self.usage();
        let weights = self.p.weights();
        // new hosts forced by the core deficit
        let host_term = match suffix.cores.checked_sub(self.free_active_cores) {
            Some(deficit) if deficit > 0 && self.p.max_host_cores > 0 => {
                deficit.div_ceil(self.p.max_host_cores as u64) * self.p.min_host_cap
            }
            _ => 0,
        };
        // new accelerator sources forced by unit deficits; GPU and FPGA
        // sources are disjoint node sets, so the two terms may add
        let accel_term = {
            let gpu_deficit = suffix.gpu.saturating_sub(self.free_active_gpu);
            let fpga_deficit = suffix.fpga.saturating_sub(self.free_active_fpga);
            let gpu_cost = self.min_source_cost(AccelKind::Gpu, gpu_deficit);
            let fpga_cost = self.min_source_cost(AccelKind::Fpga, fpga_deficit);
            gpu_cost + fpga_cost
        };
        // weight-density floor, valid even when one node covers several
        // deficits at once
        let linear_term = weights.cpu * suffix.cores.saturating_sub(self.free_active_cores)
            + weights.accel
                * (suffix.gpu.saturating_sub(self.free_active_gpu)
                    + suffix.fpga.saturating_sub(self.free_active_fpga));
        current + host_term.max(accel_term).max(linear_term)
    }

    fn min_source_cost(&self, kind: AccelKind, deficit: u64) -> u64 {
        if deficit == 0 {
            return 0;
        }
        let mut min_cap = 0u64;
        let mut min_cost = u64::MAX;
        for a in &self.p.accel_nodes {
            if a.kind == kind && a.cap > 0 {
                min_cap = min_cap.max(a.cap as u64);
                min_cost = min_cost.min(a.weighted_cap);
            }
        }
        for h in &self.p.hosts {
            let cap = match kind {
                AccelKind::Gpu => h.gpu,
                AccelKind::Fpga => h.fpga,
            };
            if cap > 0 {
                min_cap = min_cap.max(cap as u64);
                min_cost = min_cost.min(h.weighted_cap);
            }
        }
        if min_cap == 0 {
            return 0; // the aggregate cut already rules this out
        }
        deficit.div_ceil(min_cap) * min_cost
    }

    /// Builds the explicit solution from a complete assignment: local memory
    /// filled greedily per host (thresholds first, then top-ups in request-id
    /// order), remote residues split across memory nodes first-fit in node-id
    /// order.
    pub fn materialize(&self) -> Solution {
        let p = self.p;
        let requests = p.requests();
        debug_assert!(self.assigned.iter().all(|a| a.is_some()));

        let mut by_host: Vec<Vec<usize>> = vec![Vec::new(); p.hosts.len()];
        for (req, choice) in self.assigned.iter().enumerate() {
            if let Some(c) = choice {
                by_host[c.host].push(req);
            }
        }
        let mut local = vec![0u32; requests.len()];
        for (hi, reqs) in by_host.iter_mut().enumerate() {
            if reqs.is_empty() {
                continue;
            }
            reqs.sort_by_key(|&r| requests[r].id);
            let cap = p.hosts[hi].local_mem as u64;
            let total_demand: u64 = reqs.iter().map(|&r| requests[r].demand.memory as u64).sum();
            let total_thr: u64 = reqs.iter().map(|&r| requests[r].local_threshold as u64).sum();
            let mut budget = cap.min(total_demand) - total_thr;
            for &r in reqs.iter() {
                let extra = budget.min((requests[r].demand.memory - requests[r].local_threshold) as u64);
                local[r] = requests[r].local_threshold + extra as u32;
                budget -= extra;
            }
        }

        let mut remote: Vec<Vec<(NodeId, u32)>> = vec![Vec::new(); requests.len()];
        for (pool_idx, meta) in p.pools.iter().enumerate() {
            let mut overflow: Vec<usize> = (0..requests.len())
                .filter(|&r| {
                    self.assigned[r]
                        .map(|c| p.hosts[c.host].pool == Some(pool_idx))
                        .unwrap_or(false)
                        && local[r] < requests[r].demand.memory
                })
                .collect();
            overflow.sort_by_key(|&r| requests[r].id);
            let mut node_cursor = 0usize;
            let mut node_used = 0u64;
            for r in overflow {
                let mut need = (requests[r].demand.memory - local[r]) as u64;
                while need > 0 {
                    let node = meta.mem_nodes[node_cursor];
                    let room = meta.mem_node_size as u64 - node_used;
                    let take = need.min(room);
                    remote[r].push((node, take as u32));
                    node_used += take;
                    need -= take;
                    if node_used == meta.mem_node_size as u64 {
                        node_cursor += 1;
                        node_used = 0;
                    }
                }
            }
        }

        let mut order: Vec<usize> = (0..requests.len()).collect();
        order.sort_by_key(|&r| requests[r].id);
        let mut active: Vec<NodeId> = Vec::new();
        let mut placements = Vec::with_capacity(requests.len());
        for r in order {
            let choice = self.assigned[r].expect("complete assignment");
            let host = &p.hosts[choice.host];
            let accel = match choice.accel {
                AccelChoice::None => None,
                AccelChoice::Integrated => Some(AccelAssignment {
                    provider: AccelProvider::HostIntegrated,
                    units: requests[r].accel_units(),
                }),
                AccelChoice::PoolNode(a) => Some(AccelAssignment {
                    provider: AccelProvider::Node(p.accel_nodes[a].node),
                    units: requests[r].accel_units(),
                }),
            };
            placements.push(Placement {
                request: requests[r].id,
                host: host.node,
                local_mem: local[r],
                remote_mem: remote[r].clone(),
                accel,
            });
        }
        for (hi, host) in p.hosts.iter().enumerate() {
            if self.host_reqs[hi] > 0 {
                active.push(host.node);
            }
        }
        for (ai, info) in p.accel_nodes.iter().enumerate() {
            if self.accel_used[ai] > 0 {
                active.push(info.node);
            }
        }
        let mut mem_supply: std::collections::BTreeMap<NodeId, u32> = Default::default();
        for slices in &remote {
            for &(node, gb) in slices {
                *mem_supply.entry(node).or_default() += gb;
            }
        }
        for (&node, &gb) in &mem_supply {
            if gb > 0 {
                active.push(node);
            }
        }
        active.sort();

        let usage: u64 = active
            .iter()
            .map(|id| p.weights().value(&p.deployment().node(*id).capacity))
            .sum();
        debug_assert_eq!(usage, self.usage(), "incremental usage must match recomputation");

        Solution {
            placements,
            active_nodes: active,
            objective: Objective { penalty: self.penalty, weighted_usage: usage },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allocator::build_problem;
    use crate::model::{ObjectiveWeights, Request, ResourceVector};
    use crate::poolcfg::{Deployment, Policy, ServerMode};

    #[test]
    fn apply_undo_round_trip_restores_state() {
        let d = Deployment::build(Policy::C2, ServerMode::Mixed).unwrap();
        let requests = vec![
            Request::new(0, ResourceVector::new(8, 80, 0, 0), 20).unwrap(),
            Request::new(1, ResourceVector::new(4, 8, 6, 0), 2).unwrap(),
        ];
        let p = build_problem(&d, &requests, &ObjectiveWeights::default()).unwrap();
        let mut state = AssignState::new(&p);
        let before = (state.penalty, state.usage(), state.free_cores_all, state.free_local_all,
                      state.free_remote_all, state.free_gpu_all);
        let mut choices = Vec::new();
        state.collect_choices(0, true, &mut choices);
        assert!(!choices.is_empty());
        let c0 = choices[0].choice;
        state.apply(0, c0);
        state.collect_choices(1, true, &mut choices);
        assert!(!choices.is_empty());
        let c1 = choices[0].choice;
        state.apply(1, c1);
        state.undo(1, c1);
        state.undo(0, c0);
        let after = (state.penalty, state.usage(), state.free_cores_all, state.free_local_all,
                     state.free_remote_all, state.free_gpu_all);
        assert_eq!(before, after);
    }

    #[test]
    fn symmetry_admits_one_empty_host_per_group() {
        let d = Deployment::build(Policy::C1, ServerMode::Separate).unwrap();
        let r = Request::new(0, ResourceVector::new(2, 4, 0, 0), 0).unwrap();
        let p = build_problem(&d, &[r], &ObjectiveWeights::default()).unwrap();
        let state = AssignState::new(&p);
        let mut choices = Vec::new();
        state.collect_choices(0, true, &mut choices);
        // 4 pools x 1 representative CPU node + one representative server
        // per standalone class group
        let host_count = choices.len();
        assert_eq!(host_count, 4 + 5);
    }
}
