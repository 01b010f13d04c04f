//! Shared test infrastructure: an exhaustive-enumeration oracle for the
//! allocation problem and a seeded generator of small random instances.
//!
//! The oracle enumerates every (host, accelerator provider) assignment and
//! recomputes feasibility and the objective from scratch at each leaf. It
//! shares no code with the branch-and-bound search.

use poolsim::{
    penalty, AccelKind, Deployment, Node, NodeId, NodeKind, ObjectiveWeights, Pool, PoolClass,
    PoolId, Policy, Request, ResourceVector, ServerClass, ServerMode,
};

/// Accelerator option in an oracle assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleAccel {
    None,
    Integrated,
    Node(NodeId),
}

/// Lexicographic optimum (penalty, weighted usage) by brute force, or `None`
/// when no feasible assignment exists.
pub fn enumerate_optimum(
    deployment: &Deployment,
    requests: &[Request],
    weights: &ObjectiveWeights,
) -> Option<(u64, u64)> {
    let hosts: Vec<&Node> = deployment.nodes.iter().filter(|n| n.host_capable()).collect();
    if requests.is_empty() {
        return Some((0, 0));
    }
    if hosts.is_empty() {
        return None;
    }

    // all (host, accel) options per request, with only static sanity applied
    let mut options: Vec<Vec<(NodeId, OracleAccel)>> = Vec::new();
    for r in requests {
        let mut list = Vec::new();
        for host in &hosts {
            match r.accel_kind() {
                None => list.push((host.id, OracleAccel::None)),
                Some(kind) => {
                    let own = match kind {
                        AccelKind::Gpu => host.capacity.gpu,
                        AccelKind::Fpga => host.capacity.fpga,
                    };
                    if own >= r.accel_units() {
                        list.push((host.id, OracleAccel::Integrated));
                    }
                    if let Some(pool) = host.pool {
                        for id in &deployment.pool(pool).nodes {
                            let node = deployment.node(*id);
                            let matches = match kind {
                                AccelKind::Gpu => node.kind == NodeKind::Gpu,
                                AccelKind::Fpga => node.kind == NodeKind::Fpga,
                            };
                            if matches && node.capacity.accel_units() >= r.accel_units() {
                                list.push((host.id, OracleAccel::Node(*id)));
                            }
                        }
                    }
                }
            }
        }
        if list.is_empty() {
            return None;
        }
        options.push(list);
    }

    let mut best: Option<(u64, u64)> = None;
    let mut assignment: Vec<(NodeId, OracleAccel)> = Vec::new();
    enumerate(deployment, requests, weights, &options, &mut assignment, &mut best);
    best
}

fn enumerate(
    deployment: &Deployment,
    requests: &[Request],
    weights: &ObjectiveWeights,
    options: &[Vec<(NodeId, OracleAccel)>],
    assignment: &mut Vec<(NodeId, OracleAccel)>,
    best: &mut Option<(u64, u64)>,
) {
    if assignment.len() == requests.len() {
        if let Some(objective) = evaluate(deployment, requests, weights, assignment) {
            if best.map_or(true, |b| objective < b) {
                *best = Some(objective);
            }
        }
        return;
    }
    for option in &options[assignment.len()] {
        assignment.push(*option);
        enumerate(deployment, requests, weights, options, assignment, best);
        assignment.pop();
    }
}

/// From-scratch feasibility check and objective of a complete assignment.
fn evaluate(
    deployment: &Deployment,
    requests: &[Request],
    weights: &ObjectiveWeights,
    assignment: &[(NodeId, OracleAccel)],
) -> Option<(u64, u64)> {
    let n_nodes = deployment.nodes.len();
    let mut cores = vec![0u64; n_nodes];
    let mut mem_demand = vec![0u64; n_nodes];
    let mut thresholds = vec![0u64; n_nodes];
    let mut accel_node_used = vec![0u64; n_nodes];
    let mut integrated_used = vec![0u64; n_nodes];
    let mut hosted = vec![false; n_nodes];
    let mut total_penalty = 0u64;

    for (r, &(host_id, accel)) in requests.iter().zip(assignment) {
        let host = deployment.node(host_id);
        if !host.host_capable() {
            return None;
        }
        hosted[host_id.index()] = true;
        cores[host_id.index()] += r.demand.cores as u64;
        mem_demand[host_id.index()] += r.demand.memory as u64;
        thresholds[host_id.index()] += r.local_threshold as u64;
        match accel {
            OracleAccel::None => {
                if r.accel_units() > 0 {
                    return None;
                }
            }
            OracleAccel::Integrated => {
                let cap = match r.accel_kind()? {
                    AccelKind::Gpu => host.capacity.gpu,
                    AccelKind::Fpga => host.capacity.fpga,
                };
                if cap == 0 {
                    return None;
                }
                integrated_used[host_id.index()] += r.accel_units() as u64;
            }
            OracleAccel::Node(node_id) => {
                let node = deployment.node(node_id);
                if host.pool.is_none() || node.pool != host.pool {
                    return None;
                }
                accel_node_used[node_id.index()] += r.accel_units() as u64;
            }
        }
        total_penalty += penalty(r.class, deployment.placement_class(host_id));
    }

    for node in &deployment.nodes {
        let i = node.id.index();
        if cores[i] > node.capacity.cores as u64 {
            return None;
        }
        if thresholds[i] > node.capacity.memory as u64 {
            return None;
        }
        if integrated_used[i] > 0 {
            let kind_cap = node.capacity.gpu.max(node.capacity.fpga) as u64;
            if integrated_used[i] > kind_cap {
                return None;
            }
        }
        if accel_node_used[i] > node.capacity.accel_units() as u64 {
            return None;
        }
        // standalone servers must serve all memory locally
        if node.pool.is_none() && mem_demand[i] > node.capacity.memory as u64 {
            return None;
        }
    }

    let mut usage = 0u64;
    for node in &deployment.nodes {
        let i = node.id.index();
        if hosted[i] || accel_node_used[i] > 0 {
            usage += weights.value(&node.capacity);
        }
    }
    for pool in &deployment.pools {
        let mut residual = 0u64;
        let mut node_size = 0u64;
        let mut node_count = 0u64;
        for id in &pool.nodes {
            let node = deployment.node(*id);
            if node.host_capable() {
                residual += mem_demand[id.index()].saturating_sub(node.capacity.memory as u64);
            }
            if node.kind == NodeKind::Memory {
                node_size = node.capacity.memory as u64;
                node_count += 1;
            }
        }
        if residual > node_size * node_count {
            return None;
        }
        if residual > 0 {
            usage += residual.div_ceil(node_size) * node_size * weights.memory;
        }
    }
    Some((total_penalty, usage))
}

/// Small deterministic PRNG for instance generation (xorshift64*).
pub struct TestRng(u64);

impl TestRng {
    pub fn new(seed: u64) -> TestRng {
        TestRng(seed.max(1))
    }

    pub fn next(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.0 = x;
        x.wrapping_mul(0x2545_f491_4f6c_dd1d)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next() % n
    }

    pub fn range(&mut self, lo: u64, hi: u64) -> u64 {
        lo + self.below(hi - lo + 1)
    }

    pub fn chance(&mut self, percent: u64) -> bool {
        self.below(100) < percent
    }
}

/// A random deployment with at most 8 nodes and a request list with at most
/// 4 requests, exercising pooled and standalone hosts, memory nodes, and
/// both accelerator kinds.
pub fn random_instance(seed: u64) -> (Deployment, Vec<Request>) {
    let mut rng = TestRng::new(seed);
    let uniform = rng.chance(30);
    let policy = if uniform { Policy::C1 } else { Policy::C2 };
    let classes = [
        PoolClass::General,
        PoolClass::ComputeOptimized,
        PoolClass::MemoryOptimized,
        PoolClass::AcceleratorAssisted,
    ];

    let mut nodes: Vec<Node> = Vec::new();
    let mut pools: Vec<Pool> = Vec::new();
    let mut standalone: Vec<NodeId> = Vec::new();
    let n_pools = rng.range(1, 2);
    let mut budget = 8u64;

    for p in 0..n_pools {
        let pool_id = PoolId(p as u32);
        let class =
            if uniform { PoolClass::Uniform } else { classes[rng.below(4) as usize] };
        let mut members = Vec::new();
        let n_cpu = rng.range(1, 2).min(budget.saturating_sub(1).max(1));
        for _ in 0..n_cpu {
            if budget == 0 {
                break;
            }
            let id = NodeId(nodes.len() as u32);
            let cores = [8, 16, 32][rng.below(3) as usize];
            let local = [16, 32, 64][rng.below(3) as usize];
            nodes.push(Node {
                id,
                kind: NodeKind::Cpu,
                capacity: ResourceVector::new(cores, local, 0, 0),
                pool: Some(pool_id),
            });
            members.push(id);
            budget -= 1;
        }
        let n_mem = rng.below(3).min(budget);
        let size = [32, 64, 128][rng.below(3) as usize];
        for _ in 0..n_mem {
            let id = NodeId(nodes.len() as u32);
            nodes.push(Node {
                id,
                kind: NodeKind::Memory,
                capacity: ResourceVector::new(0, size, 0, 0),
                pool: Some(pool_id),
            });
            members.push(id);
            budget -= 1;
        }
        if budget > 0 && rng.chance(50) {
            let id = NodeId(nodes.len() as u32);
            let cap = [8, 16, 32][rng.below(3) as usize];
            let gpu = rng.chance(60);
            nodes.push(Node {
                id,
                kind: if gpu { NodeKind::Gpu } else { NodeKind::Fpga },
                capacity: if gpu {
                    ResourceVector::new(0, 0, cap, 0)
                } else {
                    ResourceVector::new(0, 0, 0, cap)
                },
                pool: Some(pool_id),
            });
            members.push(id);
            budget -= 1;
        }
        pools.push(Pool { id: pool_id, class, nodes: members });
    }

    let mixed = rng.chance(50);
    while budget > 0 && rng.chance(40) {
        let id = NodeId(nodes.len() as u32);
        let class = [ServerClass::S1, ServerClass::S2, ServerClass::S4][rng.below(3) as usize];
        let capacity = match class {
            ServerClass::S2 => ResourceVector::new(32, 64, 0, 0),
            ServerClass::S4 => ResourceVector::new(32, 128, 32, 0),
            _ => ResourceVector::new(32, 128, 0, 0),
        };
        let pool = if mixed { Some(PoolId(rng.below(n_pools) as u32)) } else { None };
        nodes.push(Node { id, kind: NodeKind::Server(class), capacity, pool });
        match pool {
            Some(pid) => pools[pid.index()].nodes.push(id),
            None => standalone.push(id),
        }
        budget -= 1;
    }

    let server_mode = if standalone.is_empty() { ServerMode::Mixed } else { ServerMode::Separate };
    let deployment = Deployment::custom(policy, server_mode, nodes, pools, standalone)
        .expect("generated deployment must be structurally valid");

    let max_cores = deployment
        .nodes
        .iter()
        .filter(|n| n.host_capable())
        .map(|n| n.capacity.cores)
        .max()
        .unwrap_or(1);
    let n_requests = rng.range(1, 4);
    let mut requests = Vec::new();
    for id in 0..n_requests {
        let cores = rng.range(1, (max_cores as u64).min(32)) as u32;
        let ratio = rng.range(1, 12) as u32;
        let memory = (cores * ratio).clamp(cores, 12 * cores);
        let threshold = rng.below((memory / 2 + 1) as u64) as u32;
        let (gpu, fpga) = if rng.chance(35) {
            let units = rng.range(1, 16) as u32;
            if rng.chance(60) {
                (units, 0)
            } else {
                (0, units)
            }
        } else {
            (0, 0)
        };
        requests.push(
            Request::new(id as u32, ResourceVector::new(cores, memory, gpu, fpga), threshold)
                .expect("generated request must satisfy the demand invariants"),
        );
    }
    (deployment, requests)
}
