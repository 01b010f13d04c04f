//! Domain types shared by every other module: resource quantities, requests,
//! nodes, the built-in node catalog, workload classification, the mismatch
//! penalty matrix, objective weights, and unit costs.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Quantities of the four resource types. The universal currency for both
/// node capacities and request demands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct ResourceVector {
    /// CPU cores.
    pub cores: u32,
    /// Memory in GB.
    pub memory: u32,
    /// GPU accelerator units.
    pub gpu: u32,
    /// FPGA accelerator units.
    pub fpga: u32,
}

impl ResourceVector {
    pub const fn new(cores: u32, memory: u32, gpu: u32, fpga: u32) -> Self {
        ResourceVector { cores, memory, gpu, fpga }
    }

    pub const fn zero() -> Self {
        ResourceVector { cores: 0, memory: 0, gpu: 0, fpga: 0 }
    }

    pub fn accel_units(&self) -> u32 {
        self.gpu + self.fpga
    }

    pub fn add(&self, other: &ResourceVector) -> ResourceVector {
        ResourceVector {
            cores: self.cores + other.cores,
            memory: self.memory + other.memory,
            gpu: self.gpu + other.gpu,
            fpga: self.fpga + other.fpga,
        }
    }
}

/// Workload class of a request, derived from its per-core memory demand and
/// accelerator usage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WorkloadClass {
    ComputeIntensive,
    GeneralPurpose,
    MemoryIntensive,
    AcceleratorAssisted,
}

impl fmt::Display for WorkloadClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            WorkloadClass::ComputeIntensive => "compute_intensive",
            WorkloadClass::GeneralPurpose => "general_purpose",
            WorkloadClass::MemoryIntensive => "memory_intensive",
            WorkloadClass::AcceleratorAssisted => "accelerator_assisted",
        };
        f.write_str(s)
    }
}

impl FromStr for WorkloadClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "compute_intensive" => Ok(WorkloadClass::ComputeIntensive),
            "general_purpose" => Ok(WorkloadClass::GeneralPurpose),
            "memory_intensive" => Ok(WorkloadClass::MemoryIntensive),
            "accelerator_assisted" => Ok(WorkloadClass::AcceleratorAssisted),
            other => Err(Error::domain(format!("unknown workload class {other:?}"))),
        }
    }
}

/// Accelerator type carried by a request, when any.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AccelKind {
    Gpu,
    Fpga,
}

/// One composable-system demand.
///
/// Invariants enforced at construction:
/// - `1 <= demand.cores <= 32`
/// - `demand.cores <= demand.memory <= 12 * demand.cores`
/// - `0 <= local_threshold <= floor(0.5 * demand.memory)`
/// - at most one of `demand.gpu` / `demand.fpga` is nonzero, and when one is,
///   it lies in `1..=32`
/// - `class` agrees with [`classify`] applied to the stored demand
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Request {
    pub id: u32,
    pub demand: ResourceVector,
    /// Minimum GB of the memory demand that must be served by the host's
    /// local memory.
    pub local_threshold: u32,
    pub class: WorkloadClass,
}

impl Request {
    /// Builds a request, deriving its class from the demand.
    pub fn new(id: u32, demand: ResourceVector, local_threshold: u32) -> Result<Request> {
        let invalid = |reason: String| Error::InvalidRequest { id, reason };
        if demand.cores < 1 || demand.cores > 32 {
            return Err(invalid(format!("cores {} outside 1..=32", demand.cores)));
        }
        if demand.memory < demand.cores || demand.memory > 12 * demand.cores {
            return Err(invalid(format!(
                "memory {} outside [cores, 12*cores] = [{}, {}]",
                demand.memory,
                demand.cores,
                12 * demand.cores
            )));
        }
        if local_threshold > demand.memory / 2 {
            return Err(invalid(format!(
                "local threshold {} exceeds half the memory demand ({})",
                local_threshold,
                demand.memory / 2
            )));
        }
        if demand.gpu > 0 && demand.fpga > 0 {
            return Err(invalid("both gpu and fpga demand are nonzero".into()));
        }
        let accel = demand.accel_units();
        if accel > 32 {
            return Err(invalid(format!("accelerator demand {accel} exceeds 32 units")));
        }
        let ratio = demand.memory as f64 / demand.cores as f64;
        let class = classify(ratio, accel > 0)?;
        Ok(Request { id, demand, local_threshold, class })
    }

    /// Builds a request from an external record carrying an explicit class,
    /// rejecting records whose class disagrees with the demand.
    pub fn with_class(
        id: u32,
        demand: ResourceVector,
        local_threshold: u32,
        class: WorkloadClass,
    ) -> Result<Request> {
        let request = Request::new(id, demand, local_threshold)?;
        if request.class != class {
            return Err(Error::InvalidRequest {
                id,
                reason: format!("declared class {class} but demand implies {}", request.class),
            });
        }
        Ok(request)
    }

    pub fn accel_kind(&self) -> Option<AccelKind> {
        if self.demand.gpu > 0 {
            Some(AccelKind::Gpu)
        } else if self.demand.fpga > 0 {
            Some(AccelKind::Fpga)
        } else {
            None
        }
    }

    pub fn accel_units(&self) -> u32 {
        self.demand.accel_units()
    }
}

/// Conventional server classes S1..S5.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ServerClass {
    S1,
    S2,
    S3,
    S4,
    S5,
}

impl ServerClass {
    pub const ALL: [ServerClass; 5] =
        [ServerClass::S1, ServerClass::S2, ServerClass::S3, ServerClass::S4, ServerClass::S5];

    /// Pool class a server maps onto, by its per-core local memory and
    /// integrated accelerators: S1 at 4 GB/core is general, S2 at 2 GB/core
    /// compute-optimized, S3 at 8 GB/core memory-optimized, and S4/S5 carry
    /// accelerators.
    pub fn pool_class(&self) -> PoolClass {
        match self {
            ServerClass::S1 => PoolClass::General,
            ServerClass::S2 => PoolClass::ComputeOptimized,
            ServerClass::S3 => PoolClass::MemoryOptimized,
            ServerClass::S4 | ServerClass::S5 => PoolClass::AcceleratorAssisted,
        }
    }
}

impl fmt::Display for ServerClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ServerClass::S1 => "S1",
            ServerClass::S2 => "S2",
            ServerClass::S3 => "S3",
            ServerClass::S4 => "S4",
            ServerClass::S5 => "S5",
        };
        f.write_str(s)
    }
}

impl FromStr for ServerClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "S1" => Ok(ServerClass::S1),
            "S2" => Ok(ServerClass::S2),
            "S3" => Ok(ServerClass::S3),
            "S4" => Ok(ServerClass::S4),
            "S5" => Ok(ServerClass::S5),
            other => Err(Error::domain(format!("unknown server class {other:?}"))),
        }
    }
}

/// Kind of an allocatable node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Cpu,
    Memory,
    Gpu,
    Fpga,
    Server(ServerClass),
}

impl NodeKind {
    /// Only CPU nodes and servers can host a request.
    pub fn host_capable(&self) -> bool {
        matches!(self, NodeKind::Cpu | NodeKind::Server(_))
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeKind::Cpu => f.write_str("cpu"),
            NodeKind::Memory => f.write_str("memory"),
            NodeKind::Gpu => f.write_str("gpu"),
            NodeKind::Fpga => f.write_str("fpga"),
            NodeKind::Server(class) => write!(f, "server:{class}"),
        }
    }
}

/// Identifier of a node within a deployment. Equals the node's index in the
/// deployment's node list.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(&self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Identifier of a pool within a deployment. Equals the pool's index.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct PoolId(pub u32);

impl PoolId {
    pub fn index(&self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for PoolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One allocatable unit: a disaggregated node or a conventional server.
///
/// Memory of a CPU node or server is local to its hosted requests; memory of
/// a memory node is remote, reachable from any host in the same pool.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub kind: NodeKind,
    pub capacity: ResourceVector,
    /// Pool membership; absent only for standalone servers in separate mode.
    pub pool: Option<PoolId>,
}

impl Node {
    pub fn host_capable(&self) -> bool {
        self.kind.host_capable()
    }
}

/// Function class of a pool (or of a standalone server, for penalty purposes).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoolClass {
    /// No function matching at all; only appears under the uniform policy.
    Uniform,
    General,
    ComputeOptimized,
    MemoryOptimized,
    AcceleratorAssisted,
}

impl fmt::Display for PoolClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PoolClass::Uniform => "uniform",
            PoolClass::General => "general",
            PoolClass::ComputeOptimized => "compute_optimized",
            PoolClass::MemoryOptimized => "memory_optimized",
            PoolClass::AcceleratorAssisted => "accelerator_assisted",
        };
        f.write_str(s)
    }
}

/// Relative importance of each resource type in the usage objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ObjectiveWeights {
    /// Weight per CPU core.
    pub cpu: u64,
    /// Weight per GPU or FPGA unit.
    pub accel: u64,
    /// Weight per GB of memory.
    pub memory: u64,
}

impl Default for ObjectiveWeights {
    fn default() -> Self {
        ObjectiveWeights { cpu: 100, accel: 10, memory: 1 }
    }
}

impl ObjectiveWeights {
    pub fn validate(&self) -> Result<()> {
        if self.cpu == 0 || self.accel == 0 || self.memory == 0 {
            return Err(Error::domain("objective weights must all be positive"));
        }
        Ok(())
    }

    /// Weighted value of a full resource vector.
    pub fn value(&self, rv: &ResourceVector) -> u64 {
        self.cpu * rv.cores as u64
            + self.memory * rv.memory as u64
            + self.accel * rv.accel_units() as u64
    }
}

/// Normalized unit costs (relative to one GB of memory).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct UnitCosts {
    pub cpu_core: u64,
    pub memory_gb: u64,
    pub gpu_unit: u64,
    pub fpga_unit: u64,
}

impl Default for UnitCosts {
    fn default() -> Self {
        UnitCosts { cpu_core: 100, memory_gb: 1, gpu_unit: 300, fpga_unit: 100 }
    }
}

impl UnitCosts {
    pub fn validate(&self) -> Result<()> {
        if self.cpu_core == 0 || self.memory_gb == 0 || self.gpu_unit == 0 || self.fpga_unit == 0 {
            return Err(Error::domain("unit costs must all be positive"));
        }
        Ok(())
    }

    /// Cost of a full resource vector.
    pub fn value(&self, rv: &ResourceVector) -> u64 {
        self.cpu_core * rv.cores as u64
            + self.memory_gb * rv.memory as u64
            + self.gpu_unit * rv.gpu as u64
            + self.fpga_unit * rv.fpga as u64
    }
}

/// Classifies a request by per-core memory demand and accelerator usage.
///
/// The class boundaries are half-open — [1,3) compute-intensive, [3,6)
/// general-purpose, [6,12] memory-intensive — so the partition is total and
/// deterministic. Any accelerator demand takes precedence.
pub fn classify(memory_per_core: f64, has_accelerator: bool) -> Result<WorkloadClass> {
    if !(1.0..=12.0).contains(&memory_per_core) {
        return Err(Error::domain(format!(
            "memory per core {memory_per_core} outside [1, 12]"
        )));
    }
    if has_accelerator {
        return Ok(WorkloadClass::AcceleratorAssisted);
    }
    Ok(if memory_per_core < 3.0 {
        WorkloadClass::ComputeIntensive
    } else if memory_per_core < 6.0 {
        WorkloadClass::GeneralPurpose
    } else {
        WorkloadClass::MemoryIntensive
    })
}

/// Mismatch penalty for placing a request of one class under a pool class:
/// 0 for a perfect match, 1 for the general/specialized neighbour cases, and
/// 2 otherwise. Uniform pools apply no function matching, so the penalty is
/// always 0 there.
pub fn penalty(request: WorkloadClass, placement: PoolClass) -> u64 {
    use PoolClass as P;
    use WorkloadClass as W;
    match placement {
        P::Uniform => 0,
        P::General => match request {
            W::GeneralPurpose => 0,
            W::ComputeIntensive | W::MemoryIntensive => 1,
            W::AcceleratorAssisted => 2,
        },
        P::ComputeOptimized => match request {
            W::ComputeIntensive => 0,
            W::GeneralPurpose => 1,
            W::MemoryIntensive | W::AcceleratorAssisted => 2,
        },
        P::MemoryOptimized => match request {
            W::MemoryIntensive => 0,
            W::GeneralPurpose => 1,
            W::ComputeIntensive | W::AcceleratorAssisted => 2,
        },
        P::AcceleratorAssisted => match request {
            W::AcceleratorAssisted => 0,
            _ => 2,
        },
    }
}

/// Weighted capacity of a node's full resource vector. This is the amount
/// the usage objective charges when the node is active.
pub fn weighted_capacity(node: &Node, weights: &ObjectiveWeights) -> u64 {
    weights.value(&node.capacity)
}

/// Per-class server specification: capacity and how many exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ServerSpec {
    pub class: ServerClass,
    pub capacity: ResourceVector,
    pub count: u32,
}

/// The built-in node inventory: counts and capacities of the disaggregated
/// node types plus the five server classes. Memory nodes are listed only by
/// their total capacity; individual sizes are set by the pool plan in force.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Catalog {
    pub cpu_node: ResourceVector,
    pub cpu_nodes: u32,
    /// Total GB across all memory nodes; node sizes come from the pool plan.
    pub memory_total: u32,
    pub gpu_node: ResourceVector,
    pub gpu_nodes: u32,
    pub fpga_node: ResourceVector,
    pub fpga_nodes: u32,
    pub servers: Vec<ServerSpec>,
}

impl Default for Catalog {
    fn default() -> Self {
        Catalog {
            cpu_node: ResourceVector::new(32, 64, 0, 0),
            cpu_nodes: 16,
            memory_total: 1280,
            gpu_node: ResourceVector::new(0, 0, 32, 0),
            gpu_nodes: 8,
            fpga_node: ResourceVector::new(0, 0, 0, 32),
            fpga_nodes: 4,
            servers: vec![
                ServerSpec {
                    class: ServerClass::S1,
                    capacity: ResourceVector::new(32, 128, 0, 0),
                    count: 4,
                },
                ServerSpec {
                    class: ServerClass::S2,
                    capacity: ResourceVector::new(32, 64, 0, 0),
                    count: 3,
                },
                ServerSpec {
                    class: ServerClass::S3,
                    capacity: ResourceVector::new(32, 256, 0, 0),
                    count: 2,
                },
                ServerSpec {
                    class: ServerClass::S4,
                    capacity: ResourceVector::new(32, 128, 32, 0),
                    count: 2,
                },
                ServerSpec {
                    class: ServerClass::S5,
                    capacity: ResourceVector::new(32, 128, 0, 32),
                    count: 1,
                },
            ],
        }
    }
}

impl Catalog {
    pub fn validate(&self) -> Result<()> {
        if self.cpu_node.cores == 0 && self.cpu_nodes > 0 {
            return Err(Error::inventory("CPU nodes must have cores"));
        }
        for spec in &self.servers {
            if spec.capacity.cores == 0 && spec.count > 0 {
                return Err(Error::inventory(format!("server {} must have cores", spec.class)));
            }
            if spec.capacity.gpu > 0 && spec.capacity.fpga > 0 {
                return Err(Error::inventory(format!(
                    "server {} carries both GPU and FPGA units",
                    spec.class
                )));
            }
        }
        Ok(())
    }

    pub fn server_count(&self) -> u32 {
        self.servers.iter().map(|s| s.count).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classify_matches_class_boundaries() {
        assert_eq!(classify(2.0, false).unwrap(), WorkloadClass::ComputeIntensive);
        assert_eq!(classify(4.5, true).unwrap(), WorkloadClass::AcceleratorAssisted);
        assert_eq!(classify(3.0, false).unwrap(), WorkloadClass::GeneralPurpose);
        assert_eq!(classify(1.0, false).unwrap(), WorkloadClass::ComputeIntensive);
        assert_eq!(classify(6.0, false).unwrap(), WorkloadClass::MemoryIntensive);
        assert_eq!(classify(12.0, false).unwrap(), WorkloadClass::MemoryIntensive);
        assert!(classify(0.99, false).is_err());
        assert!(classify(12.01, true).is_err());
    }

    #[test]
    fn penalty_matrix_values() {
        use PoolClass as P;
        use WorkloadClass as W;
        assert_eq!(penalty(W::GeneralPurpose, P::ComputeOptimized), 1);
        assert_eq!(penalty(W::MemoryIntensive, P::MemoryOptimized), 0);
        assert_eq!(penalty(W::MemoryIntensive, P::AcceleratorAssisted), 2);
        assert_eq!(penalty(W::ComputeIntensive, P::Uniform), 0);
        assert_eq!(penalty(W::ComputeIntensive, P::General), 1);
        assert_eq!(penalty(W::AcceleratorAssisted, P::AcceleratorAssisted), 0);
        assert_eq!(penalty(W::AcceleratorAssisted, P::General), 2);
    }

    #[test]
    fn penalty_is_symmetric_around_general_and_bounded() {
        use PoolClass as P;
        use WorkloadClass as W;
        assert_eq!(
            penalty(W::ComputeIntensive, P::General),
            penalty(W::GeneralPurpose, P::ComputeOptimized)
        );
        assert_eq!(
            penalty(W::MemoryIntensive, P::General),
            penalty(W::GeneralPurpose, P::MemoryOptimized)
        );
        for req in [
            W::ComputeIntensive,
            W::GeneralPurpose,
            W::MemoryIntensive,
            W::AcceleratorAssisted,
        ] {
            for place in [
                P::Uniform,
                P::General,
                P::ComputeOptimized,
                P::MemoryOptimized,
                P::AcceleratorAssisted,
            ] {
                assert!(penalty(req, place) <= 2);
            }
        }
    }

    #[test]
    fn weighted_capacity_of_catalog_nodes() {
        let weights = ObjectiveWeights::default();
        let cpu = Node {
            id: NodeId(0),
            kind: NodeKind::Cpu,
            capacity: ResourceVector::new(32, 64, 0, 0),
            pool: None,
        };
        assert_eq!(weighted_capacity(&cpu, &weights), 3264);
        let gpu = Node {
            id: NodeId(1),
            kind: NodeKind::Gpu,
            capacity: ResourceVector::new(0, 0, 32, 0),
            pool: None,
        };
        assert_eq!(weighted_capacity(&gpu, &weights), 320);
        let empty = Node {
            id: NodeId(2),
            kind: NodeKind::Memory,
            capacity: ResourceVector::zero(),
            pool: None,
        };
        assert_eq!(weighted_capacity(&empty, &weights), 0);
    }

    #[test]
    fn weighted_capacity_is_linear() {
        let weights = ObjectiveWeights::default();
        for (c, m, g, f) in [(1, 5, 0, 2), (32, 64, 0, 0), (7, 80, 3, 0)] {
            let single = weights.value(&ResourceVector::new(c, m, g, f));
            let double = weights.value(&ResourceVector::new(2 * c, 2 * m, 2 * g, 2 * f));
            assert_eq!(double, 2 * single);
        }
    }

    #[test]
    fn request_invariants_enforced() {
        let ok = Request::new(0, ResourceVector::new(4, 18, 0, 0), 9).unwrap();
        assert_eq!(ok.class, WorkloadClass::GeneralPurpose);
        // threshold above half the memory demand
        assert!(Request::new(0, ResourceVector::new(4, 18, 0, 0), 10).is_err());
        // memory below cores
        assert!(Request::new(0, ResourceVector::new(4, 3, 0, 0), 0).is_err());
        // memory above 12x cores
        assert!(Request::new(0, ResourceVector::new(2, 25, 0, 0), 0).is_err());
        // zero and oversized cores
        assert!(Request::new(0, ResourceVector::new(0, 0, 0, 0), 0).is_err());
        assert!(Request::new(0, ResourceVector::new(33, 40, 0, 0), 0).is_err());
        // dual accelerator types
        assert!(Request::new(0, ResourceVector::new(4, 8, 1, 1), 0).is_err());
        // accelerator demand above one provider's capacity
        assert!(Request::new(0, ResourceVector::new(4, 8, 33, 0), 0).is_err());
        // class consistency on import
        assert!(Request::with_class(
            0,
            ResourceVector::new(4, 18, 0, 0),
            9,
            WorkloadClass::MemoryIntensive
        )
        .is_err());
    }

    #[test]
    fn accelerator_class_follows_demand() {
        let gpu = Request::new(1, ResourceVector::new(2, 4, 8, 0), 2).unwrap();
        assert_eq!(gpu.class, WorkloadClass::AcceleratorAssisted);
        assert_eq!(gpu.accel_kind(), Some(AccelKind::Gpu));
        let fpga = Request::new(2, ResourceVector::new(2, 4, 0, 8), 0).unwrap();
        assert_eq!(fpga.accel_kind(), Some(AccelKind::Fpga));
        let none = Request::new(3, ResourceVector::new(2, 4, 0, 0), 0).unwrap();
        assert_eq!(none.accel_kind(), None);
    }

    #[test]
    fn server_pool_classes() {
        assert_eq!(ServerClass::S1.pool_class(), PoolClass::General);
        assert_eq!(ServerClass::S2.pool_class(), PoolClass::ComputeOptimized);
        assert_eq!(ServerClass::S3.pool_class(), PoolClass::MemoryOptimized);
        assert_eq!(ServerClass::S4.pool_class(), PoolClass::AcceleratorAssisted);
        assert_eq!(ServerClass::S5.pool_class(), PoolClass::AcceleratorAssisted);
    }

    #[test]
    fn default_catalog_matches_node_settings() {
        let cat = Catalog::default();
        cat.validate().unwrap();
        assert_eq!(cat.cpu_nodes, 16);
        assert_eq!(cat.gpu_nodes, 8);
        assert_eq!(cat.fpga_nodes, 4);
        assert_eq!(cat.memory_total, 1280);
        assert_eq!(cat.server_count(), 12);
        let s4 = cat.servers.iter().find(|s| s.class == ServerClass::S4).unwrap();
        assert_eq!(s4.capacity, ResourceVector::new(32, 128, 32, 0));
    }
}
