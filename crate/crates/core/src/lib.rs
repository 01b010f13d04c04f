//! Desk-scale study of resource pooling in disaggregated data centers.
//!
//! The library synthesizes composable-system workloads, partitions a node
//! inventory into pools under three configuration policies (with servers
//! kept separate or mixed in), allocates requests exactly under a
//! lexicographic (penalty, weighted-capacity) objective, and reports
//! utilization, cost, and Student's-t confidence intervals across seeded
//! repetitions. The `experiment` module drives the full pipeline; the
//! companion CLI wraps it.

pub mod allocator;
pub mod error;
pub mod experiment;
pub mod metrics;
pub mod model;
pub mod poolcfg;
pub mod workload;

pub use allocator::{
    build_problem, export_lp, solve_exact, solve_greedy, validate, AccelAssignment,
    AccelProvider, LpExport, Objective, Placement, Problem, SolveLimits, SolveOutcome, Solution,
    SolverChoice, Violation,
};
pub use error::{Error, Result};
pub use model::{
    classify, penalty, weighted_capacity, AccelKind, Catalog, Node, NodeId, NodeKind,
    ObjectiveWeights, PoolClass, PoolId, Request, ResourceVector, ServerClass, ServerSpec,
    UnitCosts, WorkloadClass,
};
pub use metrics::{
    saturation_capacity, summarize, t_quantile, total_cost, utilization, SaturationOutcome,
    StatSummary, UtilEntry, UtilizationReport,
};
pub use poolcfg::{
    per_core_memory, Condition, Deployment, Policy, Pool, PoolPlan, PoolPlans, ServerMode,
};
pub use workload::{
    generate_request, generate_workload, read_workload, sample_trunc_normal, write_workload,
    TruncNormalParams, WorkloadRng, WorkloadSpec,
};
