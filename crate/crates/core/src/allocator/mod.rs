//! Allocation problem construction and solvers.
//!
//! A problem instance fixes a deployment, a request list, and objective
//! weights. Solvers assign each request one host, local and remote memory,
//! and at most one accelerator provider, minimizing the lexicographic
//! objective (total penalty, weighted capacity of active nodes). The exact
//! solver is a two-phase branch-and-bound; the greedy solver is a best-fit
//! heuristic for instances beyond exact reach.

mod exact;
mod greedy;
mod lp;
mod problem;
mod state;
mod validate;

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::NodeId;

pub use lp::{export_lp, export_lp_phase1, export_lp_phase2, LpExport};
pub use problem::{build_problem, Problem};
pub use validate::{validate, Violation};

/// Memory and accelerator assignment of one request.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Placement {
    pub request: u32,
    /// Host node (a CPU node or a server).
    pub host: NodeId,
    /// GB served from the host's local memory.
    pub local_mem: u32,
    /// GB drawn from memory nodes of the host's pool, by node id, ascending.
    pub remote_mem: Vec<(NodeId, u32)>,
    pub accel: Option<AccelAssignment>,
}

/// Accelerator provider of a request: the host's integrated units or one
/// GPU/FPGA node from the host's pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AccelProvider {
    HostIntegrated,
    Node(NodeId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccelAssignment {
    pub provider: AccelProvider,
    pub units: u32,
}

/// The lexicographic objective value: total penalty first, weighted capacity
/// of active nodes second. The derived ordering compares exactly in that
/// order.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default, Serialize, Deserialize,
)]
pub struct Objective {
    pub penalty: u64,
    pub weighted_usage: u64,
}

/// A complete assignment of every request.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Solution {
    /// One placement per request, ascending request id.
    pub placements: Vec<Placement>,
    /// Nodes supplying any nonzero amount (hosts always do), ascending id.
    pub active_nodes: Vec<NodeId>,
    pub objective: Objective,
}

impl Solution {
    pub fn empty() -> Solution {
        Solution { placements: Vec::new(), active_nodes: Vec::new(), objective: Objective::default() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("solution serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Solution> {
        serde_json::from_str(text).map_err(|e| Error::config(format!("solution JSON: {e}")))
    }
}

/// Search budgets for the exact solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveLimits {
    /// Wall-clock budget in seconds. Unset means unlimited. Note that a
    /// time cutoff makes results machine-dependent; the deterministic knob
    /// is the node budget.
    pub time_budget_secs: Option<f64>,
    /// Branch-and-bound node budget. Unset means unlimited.
    pub node_budget: Option<u64>,
    /// When false, the search stops at the first feasible assignment it
    /// completes instead of proving optimality.
    pub optimality_required: bool,
}

impl Default for SolveLimits {
    fn default() -> Self {
        SolveLimits {
            time_budget_secs: None,
            node_budget: Some(200_000_000),
            optimality_required: true,
        }
    }
}

impl SolveLimits {
    pub fn validate(&self) -> Result<()> {
        if let Some(t) = self.time_budget_secs {
            if !(t > 0.0) {
                return Err(Error::domain("time budget must be positive"));
            }
        }
        if self.node_budget == Some(0) {
            return Err(Error::domain("node budget must be positive"));
        }
        Ok(())
    }

    /// Budget profile for a pure feasibility probe.
    pub fn feasibility(&self) -> SolveLimits {
        SolveLimits { optimality_required: false, ..*self }
    }

    pub fn time_budget(&self) -> Option<Duration> {
        self.time_budget_secs.map(Duration::from_secs_f64)
    }
}

/// Result of an exact solve.
#[derive(Debug, Clone, PartialEq)]
pub enum SolveOutcome {
    /// Proven lexicographic optimum.
    Optimal(Solution),
    /// No feasible assignment exists.
    Infeasible,
    /// The search stopped early — budget exhausted, or optimality was not
    /// required — carrying the best incumbent found, if any.
    BudgetExceeded(Option<Solution>),
}

impl SolveOutcome {
    /// The carried solution, when one exists.
    pub fn solution(&self) -> Option<&Solution> {
        match self {
            SolveOutcome::Optimal(s) => Some(s),
            SolveOutcome::BudgetExceeded(s) => s.as_ref(),
            SolveOutcome::Infeasible => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.solution().is_some()
    }
}

/// Lexicographically optimal solve: phase 1 minimizes total penalty, phase 2
/// minimizes weighted usage subject to the phase-1 optimum.
pub fn solve_exact(problem: &Problem, limits: &SolveLimits) -> Result<SolveOutcome> {
    limits.validate()?;
    Ok(exact::solve(problem, limits))
}

/// Best-fit-decreasing heuristic: requests in descending weighted demand,
/// each placed to minimize the incremental (penalty, newly activated
/// weighted capacity). Feasible but never claims optimality; `None` may be
/// pessimistic.
pub fn solve_greedy(problem: &Problem) -> Option<Solution> {
    greedy::solve(problem)
}

/// Which solver an experiment runs.
#[derive(Debug, Clone, PartialEq)]
pub enum SolverChoice {
    Exact(SolveLimits),
    Greedy,
}

impl SolverChoice {
    pub fn solve(&self, problem: &Problem) -> Result<SolveOutcome> {
        match self {
            SolverChoice::Exact(limits) => solve_exact(problem, limits),
            SolverChoice::Greedy => Ok(match solve_greedy(problem) {
                Some(s) => SolveOutcome::BudgetExceeded(Some(s)),
                None => SolveOutcome::Infeasible,
            }),
        }
    }

    /// Feasibility-only probe of the instance. For the exact solver this is
    /// a proof; for greedy it inherits the heuristic's pessimism.
    pub fn probe(&self, problem: &Problem) -> Result<bool> {
        match self {
            SolverChoice::Exact(limits) => {
                match solve_exact(problem, &limits.feasibility())? {
                    SolveOutcome::Infeasible => Ok(false),
                    SolveOutcome::Optimal(_) => Ok(true),
                    SolveOutcome::BudgetExceeded(Some(_)) => Ok(true),
                    SolveOutcome::BudgetExceeded(None) => Err(Error::domain(
                        "feasibility probe exhausted its budget undecided",
                    )),
                }
            }
            SolverChoice::Greedy => Ok(solve_greedy(problem).is_some()),
        }
    }
}
