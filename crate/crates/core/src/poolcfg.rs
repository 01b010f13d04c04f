//! Deployment construction: partitioning the node inventory into pools under
//! the three configuration policies, with servers kept standalone or mixed
//! into the pools.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Catalog, Node, NodeId, NodeKind, PoolClass, PoolId, ResourceVector};

/// Pool configuration policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Policy {
    /// Identical resource mix in every pool.
    C1,
    /// Function-specific pools (general, compute-, memory-optimized,
    /// accelerator-assisted).
    C2,
    /// Function-specific pools refined to the demand distribution.
    C3,
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Policy::C1 => "C1",
            Policy::C2 => "C2",
            Policy::C3 => "C3",
        })
    }
}

impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "C1" | "c1" => Ok(Policy::C1),
            "C2" | "c2" => Ok(Policy::C2),
            "C3" | "c3" => Ok(Policy::C3),
            other => Err(Error::config(format!("unknown policy {other:?}"))),
        }
    }
}

/// How conventional servers are treated relative to the pools.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ServerMode {
    /// Servers stay outside the pools and must serve requests from their own
    /// resources.
    Separate,
    /// Servers join the pools and may draw disaggregated resources.
    Mixed,
}

impl fmt::Display for ServerMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ServerMode::Separate => "separate",
            ServerMode::Mixed => "mixed",
        })
    }
}

impl FromStr for ServerMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "separate" | "S" | "s" => Ok(ServerMode::Separate),
            "mixed" | "M" | "m" => Ok(ServerMode::Mixed),
            other => Err(Error::config(format!("unknown server mode {other:?}"))),
        }
    }
}

/// One of the six test conditions, e.g. `C1_S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Condition {
    pub policy: Policy,
    pub server_mode: ServerMode,
}

impl Condition {
    pub const PAPER_ORDER: [Condition; 6] = [
        Condition { policy: Policy::C1, server_mode: ServerMode::Separate },
        Condition { policy: Policy::C1, server_mode: ServerMode::Mixed },
        Condition { policy: Policy::C2, server_mode: ServerMode::Separate },
        Condition { policy: Policy::C2, server_mode: ServerMode::Mixed },
        Condition { policy: Policy::C3, server_mode: ServerMode::Separate },
        Condition { policy: Policy::C3, server_mode: ServerMode::Mixed },
    ];

    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mode = match self.server_mode {
            ServerMode::Separate => "S",
            ServerMode::Mixed => "M",
        };
        write!(f, "{}_{}", self.policy, mode)
    }
}

impl FromStr for Condition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (policy, mode) = s
            .split_once('_')
            .ok_or_else(|| Error::config(format!("condition {s:?} is not of the form C1_S")))?;
        Ok(Condition { policy: policy.parse()?, server_mode: mode.parse()? })
    }
}

/// Per-policy split of the inventory across the four pools.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoolPlan {
    pub classes: [PoolClass; 4],
    pub cpu_counts: [u32; 4],
    /// GB per memory node in each pool; 0 means the pool has none.
    pub memory_node_sizes: [u32; 4],
    pub memory_node_counts: [u32; 4],
    pub gpu_counts: [u32; 4],
    pub fpga_counts: [u32; 4],
}

impl PoolPlan {
    pub fn for_policy(policy: Policy) -> PoolPlan {
        use PoolClass::*;
        match policy {
            Policy::C1 => PoolPlan {
                classes: [Uniform; 4],
                cpu_counts: [4; 4],
                memory_node_sizes: [160; 4],
                memory_node_counts: [2; 4],
                gpu_counts: [2; 4],
                fpga_counts: [1; 4],
            },
            Policy::C2 => PoolPlan {
                classes: [General, ComputeOptimized, MemoryOptimized, AcceleratorAssisted],
                cpu_counts: [4, 4, 4, 4],
                memory_node_sizes: [128, 0, 384, 128],
                memory_node_counts: [2, 0, 2, 2],
                gpu_counts: [0, 0, 0, 8],
                fpga_counts: [0, 0, 0, 4],
            },
            Policy::C3 => PoolPlan {
                classes: [General, ComputeOptimized, MemoryOptimized, AcceleratorAssisted],
                cpu_counts: [5, 4, 3, 4],
                memory_node_sizes: [197, 0, 283, 160],
                memory_node_counts: [2, 0, 2, 2],
                gpu_counts: [0, 0, 0, 8],
                fpga_counts: [0, 0, 0, 4],
            },
        }
    }

    fn validate_against(&self, policy: Policy, catalog: &Catalog) -> Result<()> {
        if policy == Policy::C1 {
            if self.classes.iter().any(|c| *c != PoolClass::Uniform) {
                return Err(Error::inventory("C1 pools must all be uniform"));
            }
        } else if self.classes.iter().any(|c| *c == PoolClass::Uniform) {
            return Err(Error::inventory("uniform pools are only valid under C1"));
        }
        let cpu: u32 = self.cpu_counts.iter().sum();
        if cpu != catalog.cpu_nodes {
            return Err(Error::inventory(format!(
                "{policy} plan places {cpu} CPU nodes, catalog has {}",
                catalog.cpu_nodes
            )));
        }
        let memory: u32 = (0..4).map(|i| self.memory_node_sizes[i] * self.memory_node_counts[i]).sum();
        if memory != catalog.memory_total {
            return Err(Error::inventory(format!(
                "{policy} plan provisions {memory} GB of pooled memory, catalog requires {}",
                catalog.memory_total
            )));
        }
        let gpu: u32 = self.gpu_counts.iter().sum();
        if gpu != catalog.gpu_nodes {
            return Err(Error::inventory(format!(
                "{policy} plan places {gpu} GPU nodes, catalog has {}",
                catalog.gpu_nodes
            )));
        }
        let fpga: u32 = self.fpga_counts.iter().sum();
        if fpga != catalog.fpga_nodes {
            return Err(Error::inventory(format!(
                "{policy} plan places {fpga} FPGA nodes, catalog has {}",
                catalog.fpga_nodes
            )));
        }
        for i in 0..4 {
            if self.cpu_counts[i] == 0 {
                return Err(Error::inventory(format!("{policy} pool {i} has no host-capable node")));
            }
            if (self.memory_node_sizes[i] == 0) != (self.memory_node_counts[i] == 0) {
                return Err(Error::inventory(format!(
                    "{policy} pool {i} memory node size/count disagree"
                )));
            }
        }
        Ok(())
    }
}

/// The three per-policy plans, overridable as a unit from the experiment
/// configuration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct PoolPlans {
    pub c1: PoolPlan,
    pub c2: PoolPlan,
    pub c3: PoolPlan,
}

impl Default for PoolPlans {
    fn default() -> Self {
        PoolPlans {
            c1: PoolPlan::for_policy(Policy::C1),
            c2: PoolPlan::for_policy(Policy::C2),
            c3: PoolPlan::for_policy(Policy::C3),
        }
    }
}

impl PoolPlans {
    pub fn plan(&self, policy: Policy) -> &PoolPlan {
        match policy {
            Policy::C1 => &self.c1,
            Policy::C2 => &self.c2,
            Policy::C3 => &self.c3,
        }
    }
}

/// An isolated group of nodes; a request's resources must all come from one
/// pool.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pool {
    pub id: PoolId,
    pub class: PoolClass,
    pub nodes: Vec<NodeId>,
}

/// The full inventory partitioned into pools, plus standalone servers in
/// separate mode. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Deployment {
    pub policy: Policy,
    pub server_mode: ServerMode,
    pub nodes: Vec<Node>,
    pub pools: Vec<Pool>,
    pub standalone_servers: Vec<NodeId>,
}

impl Deployment {
    /// Builds the deployment for one condition from the built-in inventory.
    pub fn build(policy: Policy, server_mode: ServerMode) -> Result<Deployment> {
        Deployment::build_with(policy, server_mode, &Catalog::default(), &PoolPlans::default())
    }

    /// Builds a deployment from an explicit catalog and pool plans, failing
    /// loudly on any inconsistency between the two.
    pub fn build_with(
        policy: Policy,
        server_mode: ServerMode,
        catalog: &Catalog,
        plans: &PoolPlans,
    ) -> Result<Deployment> {
        catalog.validate()?;
        let plan = plans.plan(policy);
        plan.validate_against(policy, catalog)?;

        let mut nodes = Vec::new();
        let mut pool_nodes: [Vec<NodeId>; 4] = Default::default();
        let mut push = |kind: NodeKind, capacity: ResourceVector, pool: Option<usize>| -> NodeId {
            let id = NodeId(nodes.len() as u32);
            nodes.push(Node { id, kind, capacity, pool: pool.map(|p| PoolId(p as u32)) });
            if let Some(p) = pool {
                pool_nodes[p].push(id);
            }
            id
        };

        for (pool, &count) in plan.cpu_counts.iter().enumerate() {
            for _ in 0..count {
                push(NodeKind::Cpu, catalog.cpu_node, Some(pool));
            }
        }
        for pool in 0..4 {
            let size = plan.memory_node_sizes[pool];
            for _ in 0..plan.memory_node_counts[pool] {
                push(NodeKind::Memory, ResourceVector::new(0, size, 0, 0), Some(pool));
            }
        }
        for (pool, &count) in plan.gpu_counts.iter().enumerate() {
            for _ in 0..count {
                push(NodeKind::Gpu, catalog.gpu_node, Some(pool));
            }
        }
        for (pool, &count) in plan.fpga_counts.iter().enumerate() {
            for _ in 0..count {
                push(NodeKind::Fpga, catalog.fpga_node, Some(pool));
            }
        }

        // Servers, in class order S1..S5. Separate mode keeps them outside
        // the pools. Mixed C1 deals them round-robin across pools 0..3;
        // mixed C2/C3 places each in the pool matching its class.
        let mut standalone = Vec::new();
        let mut dealt = 0usize;
        for spec in &catalog.servers {
            for _ in 0..spec.count {
                let target = match server_mode {
                    ServerMode::Separate => None,
                    ServerMode::Mixed => Some(match policy {
                        Policy::C1 => {
                            let pool = dealt % 4;
                            dealt += 1;
                            pool
                        }
                        Policy::C2 | Policy::C3 => plan
                            .classes
                            .iter()
                            .position(|c| *c == spec.class.pool_class())
                            .ok_or_else(|| {
                                Error::inventory(format!(
                                    "no pool of class {} for server {}",
                                    spec.class.pool_class(),
                                    spec.class
                                ))
                            })?,
                    }),
                };
                let id = push(NodeKind::Server(spec.class), spec.capacity, target);
                if target.is_none() {
                    standalone.push(id);
                }
            }
        }

        let pools = (0..4)
            .map(|i| Pool {
                id: PoolId(i as u32),
                class: plan.classes[i],
                nodes: std::mem::take(&mut pool_nodes[i]),
            })
            .collect();

        let deployment =
            Deployment { policy, server_mode, nodes, pools, standalone_servers: standalone };
        deployment.validate_structure()?;
        deployment.validate_inventory(catalog)?;
        Ok(deployment)
    }

    /// Assembles a deployment from explicit parts, applying the structural
    /// checks but not the catalog conformance checks. Intended for custom
    /// topologies (tests, scaled-down studies).
    pub fn custom(
        policy: Policy,
        server_mode: ServerMode,
        nodes: Vec<Node>,
        pools: Vec<Pool>,
        standalone_servers: Vec<NodeId>,
    ) -> Result<Deployment> {
        let deployment = Deployment { policy, server_mode, nodes, pools, standalone_servers };
        deployment.validate_structure()?;
        Ok(deployment)
    }

    fn validate_structure(&self) -> Result<()> {
        for (i, node) in self.nodes.iter().enumerate() {
            if node.id.index() != i {
                return Err(Error::inventory(format!(
                    "node id {} does not match its position {i}",
                    node.id
                )));
            }
        }
        let mut seen = vec![false; self.nodes.len()];
        for pool in &self.pools {
            let mut has_host = false;
            for id in &pool.nodes {
                let node = self
                    .nodes
                    .get(id.index())
                    .ok_or_else(|| Error::inventory(format!("pool {} references unknown node {id}", pool.id)))?;
                if node.pool != Some(pool.id) {
                    return Err(Error::inventory(format!(
                        "node {id} pool membership disagrees with pool {}",
                        pool.id
                    )));
                }
                if seen[id.index()] {
                    return Err(Error::inventory(format!("node {id} appears in two pools")));
                }
                seen[id.index()] = true;
                has_host |= node.host_capable();
            }
            if !has_host {
                return Err(Error::inventory(format!("pool {} has no host-capable node", pool.id)));
            }
        }
        for id in &self.standalone_servers {
            let node = self
                .nodes
                .get(id.index())
                .ok_or_else(|| Error::inventory(format!("standalone list references unknown node {id}")))?;
            if !matches!(node.kind, NodeKind::Server(_)) || node.pool.is_some() {
                return Err(Error::inventory(format!("node {id} cannot be standalone")));
            }
            if seen[id.index()] {
                return Err(Error::inventory(format!("node {id} is both pooled and standalone")));
            }
            seen[id.index()] = true;
        }
        for (i, claimed) in seen.iter().enumerate() {
            if !claimed && self.nodes[i].pool.is_some() {
                return Err(Error::inventory(format!(
                    "node {i} claims pool membership but no pool lists it"
                )));
            }
        }
        if self.server_mode == ServerMode::Mixed && !self.standalone_servers.is_empty() {
            return Err(Error::inventory("mixed mode must not leave servers standalone"));
        }
        if self.policy == Policy::C1 {
            if self.pools.iter().any(|p| p.class != PoolClass::Uniform) {
                return Err(Error::inventory("C1 pools must be uniform"));
            }
        } else if self.pools.iter().any(|p| p.class == PoolClass::Uniform) {
            return Err(Error::inventory("uniform pools are only valid under C1"));
        }
        Ok(())
    }

    fn validate_inventory(&self, catalog: &Catalog) -> Result<()> {
        let count = |pred: &dyn Fn(&Node) -> bool| self.nodes.iter().filter(|n| pred(n)).count() as u32;
        if count(&|n| n.kind == NodeKind::Cpu) != catalog.cpu_nodes {
            return Err(Error::inventory("CPU node count does not match the catalog"));
        }
        if count(&|n| n.kind == NodeKind::Gpu) != catalog.gpu_nodes {
            return Err(Error::inventory("GPU node count does not match the catalog"));
        }
        if count(&|n| n.kind == NodeKind::Fpga) != catalog.fpga_nodes {
            return Err(Error::inventory("FPGA node count does not match the catalog"));
        }
        let memory: u32 = self
            .nodes
            .iter()
            .filter(|n| n.kind == NodeKind::Memory)
            .map(|n| n.capacity.memory)
            .sum();
        if memory != catalog.memory_total {
            return Err(Error::inventory(format!(
                "memory nodes total {memory} GB, catalog requires {}",
                catalog.memory_total
            )));
        }
        for spec in &catalog.servers {
            let n = count(&|n| n.kind == NodeKind::Server(spec.class));
            if n != spec.count {
                return Err(Error::inventory(format!(
                    "{} server count {n} does not match the catalog ({})",
                    spec.class, spec.count
                )));
            }
        }
        Ok(())
    }

    pub fn condition(&self) -> Condition {
        Condition { policy: self.policy, server_mode: self.server_mode }
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.index()]
    }

    pub fn pool(&self, id: PoolId) -> &Pool {
        &self.pools[id.index()]
    }

    /// The class a placement on `host` is penalized against: the host pool's
    /// class, or for standalone servers the server's own class mapping —
    /// except under C1, which applies no function matching anywhere.
    pub fn placement_class(&self, host: NodeId) -> PoolClass {
        let node = self.node(host);
        match node.pool {
            Some(pool) => self.pool(pool).class,
            None => {
                if self.policy == Policy::C1 {
                    PoolClass::Uniform
                } else {
                    match node.kind {
                        NodeKind::Server(class) => class.pool_class(),
                        _ => PoolClass::Uniform,
                    }
                }
            }
        }
    }

    /// Installed capacity per resource type across every node, pooled or
    /// standalone, active or not.
    pub fn total_capacity(&self) -> ResourceVector {
        self.nodes
            .iter()
            .fold(ResourceVector::zero(), |acc, n| acc.add(&n.capacity))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("deployment serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Deployment> {
        let deployment: Deployment =
            serde_json::from_str(text).map_err(|e| Error::config(format!("deployment JSON: {e}")))?;
        deployment.validate_structure()?;
        Ok(deployment)
    }
}

/// Pool-level memory richness: (local GB of host-capable nodes + memory-node
/// GB) per core, over all cores in the pool.
pub fn per_core_memory(pool: &Pool, deployment: &Deployment) -> Result<f64> {
    let mut cores = 0u64;
    let mut memory = 0u64;
    for id in &pool.nodes {
        let node = deployment.node(*id);
        if node.host_capable() || node.kind == NodeKind::Memory {
            memory += node.capacity.memory as u64;
        }
        cores += node.capacity.cores as u64;
    }
    if cores == 0 {
        return Err(Error::domain(format!("pool {} has no cores", pool.id)));
    }
    Ok(memory as f64 / cores as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ServerClass;

    fn kind_counts(d: &Deployment) -> (u32, u32, u32, u32, u32) {
        let c = |k: NodeKind| d.nodes.iter().filter(|n| n.kind == k).count() as u32;
        let servers = d
            .nodes
            .iter()
            .filter(|n| matches!(n.kind, NodeKind::Server(_)))
            .count() as u32;
        (c(NodeKind::Cpu), c(NodeKind::Memory), c(NodeKind::Gpu), c(NodeKind::Fpga), servers)
    }

    #[test]
    fn c1_separate_layout() {
        let d = Deployment::build(Policy::C1, ServerMode::Separate).unwrap();
        assert_eq!(d.pools.len(), 4);
        assert_eq!(d.standalone_servers.len(), 12);
        for pool in &d.pools {
            assert_eq!(pool.class, PoolClass::Uniform);
            let cpus = pool.nodes.iter().filter(|id| d.node(**id).kind == NodeKind::Cpu).count();
            let mems: Vec<u32> = pool
                .nodes
                .iter()
                .filter(|id| d.node(**id).kind == NodeKind::Memory)
                .map(|id| d.node(*id).capacity.memory)
                .collect();
            let gpus = pool.nodes.iter().filter(|id| d.node(**id).kind == NodeKind::Gpu).count();
            let fpgas = pool.nodes.iter().filter(|id| d.node(**id).kind == NodeKind::Fpga).count();
            assert_eq!((cpus, gpus, fpgas), (4, 2, 1));
            assert_eq!(mems, vec![160, 160]);
        }
    }

    #[test]
    fn c3_mixed_accelerator_pool() {
        let d = Deployment::build(Policy::C3, ServerMode::Mixed).unwrap();
        assert!(d.standalone_servers.is_empty());
        let accel = d
            .pools
            .iter()
            .find(|p| p.class == PoolClass::AcceleratorAssisted)
            .unwrap();
        let mut cpus = 0;
        let mut mems = Vec::new();
        let mut gpus = 0;
        let mut fpgas = 0;
        let mut servers = Vec::new();
        for id in &accel.nodes {
            match d.node(*id).kind {
                NodeKind::Cpu => cpus += 1,
                NodeKind::Memory => mems.push(d.node(*id).capacity.memory),
                NodeKind::Gpu => gpus += 1,
                NodeKind::Fpga => fpgas += 1,
                NodeKind::Server(c) => servers.push(c),
            }
        }
        assert_eq!((cpus, gpus, fpgas), (4, 8, 4));
        assert_eq!(mems, vec![160, 160]);
        servers.sort();
        assert_eq!(servers, vec![ServerClass::S4, ServerClass::S4, ServerClass::S5]);
    }

    #[test]
    fn inventory_matches_catalog_for_all_conditions() {
        let catalog = Catalog::default();
        for condition in Condition::PAPER_ORDER {
            let d = Deployment::build(condition.policy, condition.server_mode).unwrap();
            let (cpu, _, gpu, fpga, servers) = kind_counts(&d);
            assert_eq!((cpu, gpu, fpga, servers), (16, 8, 4, 12), "{condition}");
            let memory: u32 = d
                .nodes
                .iter()
                .filter(|n| n.kind == NodeKind::Memory)
                .map(|n| n.capacity.memory)
                .sum();
            assert_eq!(memory, catalog.memory_total, "{condition}");
            assert_eq!(d.nodes.len(), d.pools.iter().map(|p| p.nodes.len()).sum::<usize>()
                + d.standalone_servers.len());
        }
    }

    #[test]
    fn per_core_memory_of_c2_pools() {
        let d = Deployment::build(Policy::C2, ServerMode::Separate).unwrap();
        let values: Vec<f64> =
            d.pools.iter().map(|p| per_core_memory(p, &d).unwrap()).collect();
        assert_eq!(values, vec![4.0, 2.0, 8.0, 4.0]);
    }

    #[test]
    fn per_core_memory_of_c3_accel_pool() {
        let d = Deployment::build(Policy::C3, ServerMode::Separate).unwrap();
        let accel = d
            .pools
            .iter()
            .find(|p| p.class == PoolClass::AcceleratorAssisted)
            .unwrap();
        assert_eq!(per_core_memory(accel, &d).unwrap(), 4.5);
    }

    #[test]
    fn mixed_c1_deals_three_servers_per_pool() {
        let d = Deployment::build(Policy::C1, ServerMode::Mixed).unwrap();
        for pool in &d.pools {
            let servers = pool
                .nodes
                .iter()
                .filter(|id| matches!(d.node(**id).kind, NodeKind::Server(_)))
                .count();
            assert_eq!(servers, 3, "pool {}", pool.id);
        }
    }

    #[test]
    fn build_is_deterministic() {
        for condition in Condition::PAPER_ORDER {
            let a = Deployment::build(condition.policy, condition.server_mode).unwrap();
            let b = Deployment::build(condition.policy, condition.server_mode).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn broken_plan_fails_loudly() {
        let catalog = Catalog::default();
        let mut plans = PoolPlans::default();
        plans.c1.memory_node_sizes = [100; 4]; // 800 GB != 1280 GB
        let err = Deployment::build_with(Policy::C1, ServerMode::Separate, &catalog, &plans);
        assert!(err.is_err());
        let mut plans = PoolPlans::default();
        plans.c3.cpu_counts = [5, 4, 3, 3];
        assert!(Deployment::build_with(Policy::C3, ServerMode::Mixed, &catalog, &plans).is_err());
    }

    #[test]
    fn placement_classes() {
        let sep = Deployment::build(Policy::C2, ServerMode::Separate).unwrap();
        let s2 = sep
            .standalone_servers
            .iter()
            .find(|id| sep.node(**id).kind == NodeKind::Server(ServerClass::S2))
            .copied()
            .unwrap();
        assert_eq!(sep.placement_class(s2), PoolClass::ComputeOptimized);
        // C1 applies no function matching, pooled or standalone
        let c1 = Deployment::build(Policy::C1, ServerMode::Separate).unwrap();
        let any_server = c1.standalone_servers[0];
        assert_eq!(c1.placement_class(any_server), PoolClass::Uniform);
        let any_cpu = c1.pools[0].nodes[0];
        assert_eq!(c1.placement_class(any_cpu), PoolClass::Uniform);
    }

    #[test]
    fn condition_labels_round_trip() {
        for c in Condition::PAPER_ORDER {
            let label = c.label();
            let parsed: Condition = label.parse().unwrap();
            assert_eq!(parsed, c);
        }
        assert!("C4_S".parse::<Condition>().is_err());
        assert!("C1".parse::<Condition>().is_err());
    }

    #[test]
    fn deployment_json_round_trip() {
        let d = Deployment::build(Policy::C2, ServerMode::Mixed).unwrap();
        let json = d.to_json();
        let back = Deployment::from_json(&json).unwrap();
        assert_eq!(d, back);
    }
}
