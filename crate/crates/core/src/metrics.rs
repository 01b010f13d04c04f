//! Utilization and cost accounting, the saturation-capacity search, and
//! Student's-t confidence intervals over repeated runs.

use serde::{Deserialize, Serialize};

use crate::allocator::{build_problem, Problem, Solution, SolverChoice};
use crate::error::{Error, Result};
use crate::model::{ObjectiveWeights, UnitCosts};
use crate::poolcfg::Deployment;
use crate::workload::{generate_workload, WorkloadSpec};

/// Usage of one resource type against the installed capacity.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct UtilEntry {
    pub used: u64,
    pub installed: u64,
    pub ratio: f64,
}

impl UtilEntry {
    fn new(used: u64, installed: u64) -> UtilEntry {
        let ratio = if installed == 0 { 0.0 } else { used as f64 / installed as f64 };
        UtilEntry { used, installed, ratio }
    }
}

/// Per-type utilization of a deployment under one solution. The installed
/// denominator counts every node — pooled or standalone, active or not — so
/// specialization that strands capacity shows up as lost utilization.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct UtilizationReport {
    pub cores: UtilEntry,
    pub memory: UtilEntry,
    pub gpu: UtilEntry,
    pub fpga: UtilEntry,
}

/// Total allocated demand per resource type over the installed capacity of
/// the whole deployment.
pub fn utilization(solution: &Solution, problem: &Problem) -> UtilizationReport {
    let requests = problem.requests();
    let by_id: std::collections::BTreeMap<u32, usize> =
        requests.iter().enumerate().map(|(i, r)| (r.id, i)).collect();
    let mut cores = 0u64;
    let mut memory = 0u64;
    let mut gpu = 0u64;
    let mut fpga = 0u64;
    for placement in &solution.placements {
        if let Some(&i) = by_id.get(&placement.request) {
            let d = requests[i].demand;
            cores += d.cores as u64;
            memory += d.memory as u64;
            gpu += d.gpu as u64;
            fpga += d.fpga as u64;
        }
    }
    let installed = problem.deployment().total_capacity();
    UtilizationReport {
        cores: UtilEntry::new(cores, installed.cores as u64),
        memory: UtilEntry::new(memory, installed.memory as u64),
        gpu: UtilEntry::new(gpu, installed.gpu as u64),
        fpga: UtilEntry::new(fpga, installed.fpga as u64),
    }
}

/// Cost of the physical resources used: full capacities of all active nodes
/// at the given unit costs.
pub fn total_cost(solution: &Solution, deployment: &Deployment, costs: &UnitCosts) -> u64 {
    solution
        .active_nodes
        .iter()
        .map(|id| costs.value(&deployment.node(*id).capacity))
        .sum()
}

/// Result of the saturation-capacity search.
#[derive(Debug, Clone)]
pub struct SaturationOutcome {
    /// Largest feasible prefix length of the seeded workload.
    pub n_star: u32,
    /// Solution for the `n_star` prefix.
    pub solution: Solution,
    pub utilization: UtilizationReport,
    /// Whether the final solve proved lexicographic optimality (always
    /// false for the greedy solver).
    pub optimal: bool,
}

fn prefix_problem(
    deployment: &Deployment,
    requests: &[crate::model::Request],
    n: usize,
    weights: &ObjectiveWeights,
) -> Result<Option<Problem>> {
    match build_problem(deployment, &requests[..n], weights) {
        Ok(p) => Ok(Some(p)),
        // a request no host could ever serve makes the prefix infeasible
        Err(Error::InfeasibleRequest { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Finds the largest prefix of the seeded workload the deployment can fully
/// accommodate, by binary search over the prefix length (feasible prefixes
/// are downward closed), then solves that prefix.
///
/// `spec.count` is the upper bound fed to the search; if even the full count
/// fits, `n_star` equals it. An `n_star` of zero is reported as such, never
/// repaired.
pub fn saturation_capacity(
    deployment: &Deployment,
    spec: &WorkloadSpec,
    solver: &SolverChoice,
    weights: &ObjectiveWeights,
) -> Result<SaturationOutcome> {
    let requests = generate_workload(spec);
    let probe = |n: usize| -> Result<bool> {
        if n == 0 {
            return Ok(true);
        }
        match prefix_problem(deployment, &requests, n, weights)? {
            Some(problem) => solver.probe(&problem),
            None => Ok(false),
        }
    };

    let n0 = requests.len();
    let n_star = if probe(n0)? {
        n0
    } else {
        let mut lo = 0usize;
        let mut hi = n0;
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if probe(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };

    let problem = prefix_problem(deployment, &requests, n_star, weights)?
        .expect("the chosen prefix passed its feasibility probe");
    let outcome = solver.solve(&problem)?;
    let optimal = matches!(outcome, crate::allocator::SolveOutcome::Optimal(_));
    let solution = outcome
        .solution()
        .cloned()
        .ok_or_else(|| Error::domain("final solve lost a prefix the probe accepted"))?;
    let report = utilization(&solution, &problem);
    Ok(SaturationOutcome { n_star: n_star as u32, solution, utilization: report, optimal })
}

/// Mean and confidence-interval half-width of repeated measurements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatSummary {
    pub mean: f64,
    pub ci_half_width: f64,
    pub runs: usize,
}

/// Two-sided Student's-t quantiles for 90/95/99% confidence, df 1..=120;
/// beyond 120 the normal limit applies. Values follow the standard t table.
const T_90: [f64; 120] = [
    6.313752, 2.919986, 2.353363, 2.131847, 2.015048, 1.943180,
    1.894579, 1.859548, 1.833113, 1.812461, 1.795885, 1.782288,
    1.770933, 1.761310, 1.753050, 1.745884, 1.739607, 1.734064,
    1.729133, 1.724718, 1.720743, 1.717144, 1.713872, 1.710882,
    1.708141, 1.705618, 1.703288, 1.701131, 1.699127, 1.697261,
    1.695519, 1.693889, 1.692360, 1.690924, 1.689572, 1.688298,
    1.687094, 1.685954, 1.684875, 1.683851, 1.682878, 1.681952,
    1.681071, 1.680230, 1.679427, 1.678660, 1.677927, 1.677224,
    1.676551, 1.675905, 1.675285, 1.674689, 1.674116, 1.673565,
    1.673034, 1.672522, 1.672029, 1.671553, 1.671093, 1.670649,
    1.670219, 1.669804, 1.669402, 1.669013, 1.668636, 1.668271,
    1.667916, 1.667572, 1.667239, 1.666914, 1.666600, 1.666294,
    1.665996, 1.665707, 1.665425, 1.665151, 1.664885, 1.664625,
    1.664371, 1.664125, 1.663884, 1.663649, 1.663420, 1.663197,
    1.662978, 1.662765, 1.662557, 1.662354, 1.662155, 1.661961,
    1.661771, 1.661585, 1.661404, 1.661226, 1.661052, 1.660881,
    1.660715, 1.660551, 1.660391, 1.660234, 1.660081, 1.659930,
    1.659782, 1.659637, 1.659495, 1.659356, 1.659219, 1.659085,
    1.658953, 1.658824, 1.658697, 1.658573, 1.658450, 1.658330,
    1.658212, 1.658096, 1.657982, 1.657870, 1.657759, 1.657651,
];
const T_90_INF: f64 = 1.644854;
const T_95: [f64; 120] = [
    12.706205, 4.302653, 3.182446, 2.776445, 2.570582, 2.446912,
    2.364624, 2.306004, 2.262157, 2.228139, 2.200985, 2.178813,
    2.160369, 2.144787, 2.131450, 2.119905, 2.109816, 2.100922,
    2.093024, 2.085963, 2.079614, 2.073873, 2.068658, 2.063899,
    2.059539, 2.055529, 2.051831, 2.048407, 2.045230, 2.042272,
    2.039513, 2.036933, 2.034515, 2.032245, 2.030108, 2.028094,
    2.026192, 2.024394, 2.022691, 2.021075, 2.019541, 2.018082,
    2.016692, 2.015368, 2.014103, 2.012896, 2.011741, 2.010635,
    2.009575, 2.008559, 2.007584, 2.006647, 2.005746, 2.004879,
    2.004045, 2.003241, 2.002465, 2.001717, 2.000995, 2.000298,
    1.999624, 1.998972, 1.998341, 1.997730, 1.997138, 1.996564,
    1.996008, 1.995469, 1.994945, 1.994437, 1.993943, 1.993464,
    1.992997, 1.992543, 1.992102, 1.991673, 1.991254, 1.990847,
    1.990450, 1.990063, 1.989686, 1.989319, 1.988960, 1.988610,
    1.988268, 1.987934, 1.987608, 1.987290, 1.986979, 1.986675,
    1.986377, 1.986086, 1.985802, 1.985523, 1.985251, 1.984984,
    1.984723, 1.984467, 1.984217, 1.983972, 1.983731, 1.983495,
    1.983264, 1.983038, 1.982815, 1.982597, 1.982383, 1.982173,
    1.981967, 1.981765, 1.981567, 1.981372, 1.981180, 1.980992,
    1.980808, 1.980626, 1.980448, 1.980272, 1.980100, 1.979930,
];
const T_95_INF: f64 = 1.959964;
const T_99: [f64; 120] = [
    63.656741, 9.924843, 5.840909, 4.604095, 4.032143, 3.707428,
    3.499483, 3.355387, 3.249836, 3.169273, 3.105807, 3.054540,
    3.012276, 2.976843, 2.946713, 2.920782, 2.898231, 2.878440,
    2.860935, 2.845340, 2.831360, 2.818756, 2.807336, 2.796940,
    2.787436, 2.778715, 2.770683, 2.763262, 2.756386, 2.749996,
    2.744042, 2.738481, 2.733277, 2.728394, 2.723806, 2.719485,
    2.715409, 2.711558, 2.707913, 2.704459, 2.701181, 2.698066,
    2.695102, 2.692278, 2.689585, 2.687013, 2.684556, 2.682204,
    2.679952, 2.677793, 2.675722, 2.673734, 2.671823, 2.669985,
    2.668216, 2.666512, 2.664870, 2.663287, 2.661759, 2.660283,
    2.658857, 2.657479, 2.656145, 2.654854, 2.653604, 2.652394,
    2.651220, 2.650081, 2.648977, 2.647905, 2.646863, 2.645852,
    2.644869, 2.643913, 2.642983, 2.642078, 2.641198, 2.640340,
    2.639505, 2.638691, 2.637897, 2.637123, 2.636369, 2.635632,
    2.634914, 2.634212, 2.633527, 2.632858, 2.632204, 2.631565,
    2.630940, 2.630330, 2.629732, 2.629148, 2.628576, 2.628016,
    2.627468, 2.626931, 2.626405, 2.625891, 2.625386, 2.624891,
    2.624407, 2.623932, 2.623465, 2.623008, 2.622560, 2.622120,
    2.621688, 2.621265, 2.620849, 2.620440, 2.620039, 2.619645,
    2.619258, 2.618878, 2.618504, 2.618137, 2.617776, 2.617421,
];
const T_99_INF: f64 = 2.575829;

/// Two-sided t quantile at the given confidence level and degrees of
/// freedom. Supported levels: 0 (degenerate), 0.90, 0.95, 0.99.
pub fn t_quantile(confidence: f64, df: usize) -> Result<f64> {
    if df == 0 {
        return Err(Error::domain("t quantile requires at least 1 degree of freedom"));
    }
    let lookup = |table: &[f64; 120], inf: f64| if df <= 120 { table[df - 1] } else { inf };
    if confidence == 0.0 {
        Ok(0.0)
    } else if (confidence - 0.90).abs() < 1e-9 {
        Ok(lookup(&T_90, T_90_INF))
    } else if (confidence - 0.95).abs() < 1e-9 {
        Ok(lookup(&T_95, T_95_INF))
    } else if (confidence - 0.99).abs() < 1e-9 {
        Ok(lookup(&T_99, T_99_INF))
    } else {
        Err(Error::domain(format!(
            "unsupported confidence level {confidence}; use 0, 0.90, 0.95, or 0.99"
        )))
    }
}

/// Mean with a Student's-t confidence interval (df = runs - 1, sample
/// standard deviation). Requires at least two values.
pub fn summarize(values: &[f64], confidence: f64) -> Result<StatSummary> {
    let n = values.len();
    if n < 2 {
        return Err(Error::domain(format!("need at least 2 values to summarize, got {n}")));
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let sd = var.sqrt();
    let t = t_quantile(confidence, n - 1)?;
    Ok(StatSummary { mean, ci_half_width: t * sd / (n as f64).sqrt(), runs: n })
}
