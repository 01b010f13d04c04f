//! Experiment orchestration: configuration, the condition x run grid, and
//! the CSV/JSON/plot-data artifacts.
//!
//! Seeding: run `k` of every condition uses `base_seed + k`, so all
//! conditions see the same workloads and differences come from the pool
//! configuration alone. Runs are pure functions of the configuration;
//! re-running an identical configuration reproduces every artifact byte for
//! byte.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::allocator::{
    build_problem, validate, SolveLimits, SolveOutcome, Solution, SolverChoice,
};
use crate::error::{Error, Result};
use crate::metrics::{
    saturation_capacity, summarize, total_cost, utilization, StatSummary, UtilizationReport,
};
use crate::model::{Catalog, ObjectiveWeights, UnitCosts};
use crate::poolcfg::{Condition, Deployment, PoolPlans};
use crate::workload::{generate_workload, WorkloadSpec};

/// What each run of a condition does.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExperimentKind {
    /// Search the largest feasible workload prefix, starting from
    /// `initial_requests`.
    Saturation { initial_requests: u32 },
    /// Allocate a fixed request volume and account the cost of the active
    /// nodes.
    FixedCost { request_count: u32 },
}

impl Default for ExperimentKind {
    fn default() -> Self {
        ExperimentKind::Saturation { initial_requests: 100 }
    }
}

/// Fully resolved experiment configuration. `Default` reproduces the
/// built-in study: six conditions, 11 runs, saturation from 100 requests,
/// exact solver.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub conditions: Vec<Condition>,
    pub runs: u32,
    pub base_seed: u64,
    pub experiment: ExperimentKind,
    pub solver: SolverChoice,
    pub output_dir: PathBuf,
    pub weights: ObjectiveWeights,
    pub costs: UnitCosts,
    pub catalog: Catalog,
    pub plans: PoolPlans,
    pub workload: WorkloadSpec,
    /// Also write one solution JSON per run under `solutions/`.
    pub emit_solutions: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            conditions: Condition::PAPER_ORDER.to_vec(),
            runs: 11,
            base_seed: 42,
            experiment: ExperimentKind::default(),
            solver: SolverChoice::Exact(SolveLimits::default()),
            output_dir: PathBuf::from("out"),
            weights: ObjectiveWeights::default(),
            costs: UnitCosts::default(),
            catalog: Catalog::default(),
            plans: PoolPlans::default(),
            workload: WorkloadSpec::default(),
            emit_solutions: false,
        }
    }
}

/// On-disk TOML form of the configuration. Every field is optional; unset
/// fields keep the built-in study defaults.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    conditions: Option<Vec<String>>,
    runs: Option<u32>,
    base_seed: Option<u64>,
    experiment: Option<ExperimentSection>,
    solver: Option<SolverSection>,
    output: Option<OutputSection>,
    weights: Option<ObjectiveWeights>,
    costs: Option<UnitCosts>,
    catalog: Option<Catalog>,
    plans: Option<PoolPlans>,
    workload: Option<WorkloadSpec>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExperimentSection {
    /// "saturation" or "fixed_cost".
    kind: Option<String>,
    initial_requests: Option<u32>,
    request_count: Option<u32>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolverSection {
    /// "exact" or "greedy".
    kind: Option<String>,
    node_budget: Option<u64>,
    time_budget_secs: Option<f64>,
    optimality_required: Option<bool>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSection {
    dir: Option<PathBuf>,
    emit_solutions: Option<bool>,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<ExperimentConfig> {
        let file: ConfigFile =
            toml::from_str(text).map_err(|e| Error::config(format!("config parse: {e}")))?;
        let mut config = ExperimentConfig::default();
        if let Some(labels) = file.conditions {
            let mut conditions = Vec::new();
            for label in labels {
                conditions.push(label.parse()?);
            }
            if conditions.is_empty() {
                return Err(Error::config("conditions must be nonempty"));
            }
            config.conditions = conditions;
        }
        if let Some(runs) = file.runs {
            if runs == 0 {
                return Err(Error::config("runs must be at least 1"));
            }
            config.runs = runs;
        }
        if let Some(seed) = file.base_seed {
            config.base_seed = seed;
        }
        if let Some(section) = file.experiment {
            let kind = section.kind.as_deref().unwrap_or("saturation");
            config.experiment = match kind {
                "saturation" => ExperimentKind::Saturation {
                    initial_requests: section.initial_requests.unwrap_or(100),
                },
                "fixed_cost" | "fixed-cost" | "fixed" => ExperimentKind::FixedCost {
                    request_count: section.request_count.unwrap_or(50),
                },
                other => return Err(Error::config(format!("unknown experiment kind {other:?}"))),
            };
        }
        if let Some(section) = file.solver {
            let mut limits = SolveLimits::default();
            if section.node_budget.is_some() {
                limits.node_budget = section.node_budget;
            }
            if section.time_budget_secs.is_some() {
                limits.time_budget_secs = section.time_budget_secs;
            }
            if let Some(required) = section.optimality_required {
                limits.optimality_required = required;
            }
            limits.validate()?;
            config.solver = match section.kind.as_deref().unwrap_or("exact") {
                "exact" => SolverChoice::Exact(limits),
                "greedy" => SolverChoice::Greedy,
                other => return Err(Error::config(format!("unknown solver kind {other:?}"))),
            };
        }
        if let Some(section) = file.output {
            if let Some(dir) = section.dir {
                config.output_dir = dir;
            }
            if let Some(emit) = section.emit_solutions {
                config.emit_solutions = emit;
            }
        }
        if let Some(weights) = file.weights {
            weights.validate()?;
            config.weights = weights;
        }
        if let Some(costs) = file.costs {
            costs.validate()?;
            config.costs = costs;
        }
        if let Some(catalog) = file.catalog {
            catalog.validate()?;
            config.catalog = catalog;
        }
        if let Some(plans) = file.plans {
            config.plans = plans;
        }
        if let Some(workload) = file.workload {
            workload.validate()?;
            config.workload = workload;
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<ExperimentConfig> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
        ExperimentConfig::from_toml_str(&text)
    }

    fn request_count(&self) -> u32 {
        match self.experiment {
            ExperimentKind::Saturation { initial_requests } => initial_requests,
            ExperimentKind::FixedCost { request_count } => request_count,
        }
    }
}

/// Outcome of one (condition, run) cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Ok,
    Infeasible,
    BudgetExceeded,
}

impl RunStatus {
    fn as_str(&self) -> &'static str {
        match self {
            RunStatus::Ok => "ok",
            RunStatus::Infeasible => "infeasible",
            RunStatus::BudgetExceeded => "budget_exceeded",
        }
    }
}

/// One row of `runs.csv`.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub condition: Condition,
    pub run_index: u32,
    pub seed: u64,
    pub status: RunStatus,
    /// Requests placed: the saturation prefix length, or the fixed request
    /// count when all were placed.
    pub n_star: u32,
    pub utilization: Option<UtilizationReport>,
    pub penalty: Option<u64>,
    pub weighted_usage: Option<u64>,
    pub cost: Option<u64>,
    pub solution: Option<Solution>,
}

/// Per-condition means and confidence intervals. A metric is `None` when
/// fewer than two runs produced it.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionSummary {
    pub condition: String,
    pub runs: usize,
    pub n_star: Option<StatSummary>,
    pub cores_util: Option<StatSummary>,
    pub memory_util: Option<StatSummary>,
    pub gpu_util: Option<StatSummary>,
    pub fpga_util: Option<StatSummary>,
    pub penalty: Option<StatSummary>,
    pub weighted_usage: Option<StatSummary>,
    pub cost: Option<StatSummary>,
}

/// Full experiment output: the per-run records and the per-condition
/// summaries, in configuration order.
#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub records: Vec<RunRecord>,
    pub summaries: Vec<ConditionSummary>,
}

impl ExperimentReport {
    pub fn any_failed(&self) -> bool {
        self.records.iter().any(|r| r.status != RunStatus::Ok)
    }

    pub fn condition_records(&self, condition: Condition) -> Vec<&RunRecord> {
        self.records.iter().filter(|r| r.condition == condition).collect()
    }
}

fn run_one(config: &ExperimentConfig, condition: Condition, run_index: u32) -> Result<RunRecord> {
    let deployment = Deployment::build_with(
        condition.policy,
        condition.server_mode,
        &config.catalog,
        &config.plans,
    )?;
    let seed = config.base_seed.wrapping_add(run_index as u64);
    let spec = config.workload.with_count_seed(config.request_count(), seed);

    let mut record = RunRecord {
        condition,
        run_index,
        seed,
        status: RunStatus::Ok,
        n_star: 0,
        utilization: None,
        penalty: None,
        weighted_usage: None,
        cost: None,
        solution: None,
    };

    let (solution, n_star, optimal) = match config.experiment {
        ExperimentKind::Saturation { .. } => {
            let outcome = saturation_capacity(&deployment, &spec, &config.solver, &config.weights)?;
            (outcome.solution, outcome.n_star, outcome.optimal)
        }
        ExperimentKind::FixedCost { .. } => {
            let requests = generate_workload(&spec);
            let problem = match build_problem(&deployment, &requests, &config.weights) {
                Ok(p) => p,
                Err(Error::InfeasibleRequest { .. }) => {
                    record.status = RunStatus::Infeasible;
                    return Ok(record);
                }
                Err(e) => return Err(e),
            };
            match config.solver.solve(&problem)? {
                SolveOutcome::Optimal(s) => (s, spec.count, true),
                SolveOutcome::BudgetExceeded(Some(s)) => {
                    let exact = matches!(config.solver, SolverChoice::Exact(_));
                    (s, spec.count, !exact)
                }
                SolveOutcome::BudgetExceeded(None) => {
                    record.status = RunStatus::BudgetExceeded;
                    return Ok(record);
                }
                SolveOutcome::Infeasible => {
                    record.status = RunStatus::Infeasible;
                    return Ok(record);
                }
            }
        }
    };

    if matches!(config.solver, SolverChoice::Exact(_)) && !optimal {
        record.status = RunStatus::BudgetExceeded;
    }

    let problem = build_problem(
        &deployment,
        &generate_workload(&spec.with_count_seed(n_star, seed))[..],
        &config.weights,
    )?;
    let violations = validate(&solution, &problem);
    if !violations.is_empty() {
        return Err(Error::domain(format!(
            "solver produced an invalid solution for {condition} run {run_index}: {}",
            violations[0]
        )));
    }

    record.n_star = n_star;
    record.utilization = Some(utilization(&solution, &problem));
    record.penalty = Some(solution.objective.penalty);
    record.weighted_usage = Some(solution.objective.weighted_usage);
    record.cost = Some(total_cost(&solution, &deployment, &config.costs));
    record.solution = Some(solution);
    Ok(record)
}

fn summarize_condition(
    condition: Condition,
    records: &[&RunRecord],
    confidence: f64,
) -> Result<ConditionSummary> {
    let gather = |f: &dyn Fn(&RunRecord) -> Option<f64>| -> Result<Option<StatSummary>> {
        let values: Vec<f64> = records.iter().filter_map(|r| f(r)).collect();
        if values.len() < 2 {
            return Ok(None);
        }
        summarize(&values, confidence).map(Some)
    };
    Ok(ConditionSummary {
        condition: condition.label(),
        runs: records.len(),
        n_star: gather(&|r| (r.status == RunStatus::Ok).then_some(r.n_star as f64))?,
        cores_util: gather(&|r| r.utilization.map(|u| u.cores.ratio))?,
        memory_util: gather(&|r| r.utilization.map(|u| u.memory.ratio))?,
        gpu_util: gather(&|r| r.utilization.map(|u| u.gpu.ratio))?,
        fpga_util: gather(&|r| r.utilization.map(|u| u.fpga.ratio))?,
        penalty: gather(&|r| r.penalty.map(|v| v as f64))?,
        weighted_usage: gather(&|r| r.weighted_usage.map(|v| v as f64))?,
        cost: gather(&|r| r.cost.map(|v| v as f64))?,
    })
}

/// Runs every condition x run cell, validates every solution, and writes
/// `runs.csv`, `summary.json`, and the plot-data files into the output
/// directory.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    if config.conditions.is_empty() {
        return Err(Error::config("conditions must be nonempty"));
    }
    if config.runs == 0 {
        return Err(Error::config("runs must be at least 1"));
    }
    config.weights.validate()?;
    config.costs.validate()?;
    config.workload.validate()?;

    let mut records = Vec::new();
    for &condition in &config.conditions {
        for run_index in 0..config.runs {
            records.push(run_one(config, condition, run_index)?);
        }
    }

    let mut summaries = Vec::new();
    for &condition in &config.conditions {
        let rows: Vec<&RunRecord> =
            records.iter().filter(|r| r.condition == condition).collect();
        summaries.push(summarize_condition(condition, &rows, 0.95)?);
    }
    let report = ExperimentReport { records, summaries };

    fs::create_dir_all(&config.output_dir)?;
    write_runs_csv(&report, &config.output_dir.join("runs.csv"))?;
    write_summary_json(&report, &config.output_dir.join("summary.json"))?;
    emit_plot_data(&report, &config.output_dir)?;
    if config.emit_solutions {
        let dir = config.output_dir.join("solutions");
        fs::create_dir_all(&dir)?;
        for record in &report.records {
            if let Some(solution) = &record.solution {
                let name = format!("{}_run{:02}.json", record.condition, record.run_index);
                fs::write(dir.join(name), solution.to_json())?;
            }
        }
    }
    Ok(report)
}

fn fmt_ratio(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

fn fmt_int(v: Option<u64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn write_runs_csv(report: &ExperimentReport, path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record([
            "condition",
            "seed",
            "n_star",
            "status",
            "cores_util",
            "memory_util",
            "gpu_util",
            "fpga_util",
            "penalty",
            "weighted_usage",
            "cost",
        ])
        .map_err(csv_io)?;
    for r in &report.records {
        writer
            .write_record([
                r.condition.label(),
                r.seed.to_string(),
                r.n_star.to_string(),
                r.status.as_str().to_string(),
                fmt_ratio(r.utilization.map(|u| u.cores.ratio)),
                fmt_ratio(r.utilization.map(|u| u.memory.ratio)),
                fmt_ratio(r.utilization.map(|u| u.gpu.ratio)),
                fmt_ratio(r.utilization.map(|u| u.fpga.ratio)),
                fmt_int(r.penalty),
                fmt_int(r.weighted_usage),
                fmt_int(r.cost),
            ])
            .map_err(csv_io)?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::domain(e.to_string()))?;
    fs::write(path, bytes)?;
    Ok(())
}

fn write_summary_json(report: &ExperimentReport, path: &Path) -> Result<()> {
    #[derive(Serialize)]
    struct SummaryDoc<'a> {
        conditions: &'a [ConditionSummary],
    }
    let doc = SummaryDoc { conditions: &report.summaries };
    let text = serde_json::to_string_pretty(&doc)
        .map_err(|e| Error::domain(format!("summary serialization: {e}")))?;
    fs::write(path, text + "\n")?;
    Ok(())
}

/// Writes grouped-bar plot data: per-type utilization means with confidence
/// half-widths, and cost, one row per condition in configuration order.
pub fn emit_plot_data(report: &ExperimentReport, dir: &Path) -> Result<()> {
    let entry = |s: &Option<StatSummary>| -> String {
        match s {
            Some(s) => format!("{:.6}\t{:.6}", s.mean, s.ci_half_width),
            None => "\t".to_string(),
        }
    };
    let mut util = String::from(
        "condition\tcores_mean\tcores_ci\tmemory_mean\tmemory_ci\tgpu_mean\tgpu_ci\tfpga_mean\tfpga_ci\n",
    );
    let mut cost = String::from("condition\tcost_mean\tcost_ci\n");
    for s in &report.summaries {
        util.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            s.condition,
            entry(&s.cores_util),
            entry(&s.memory_util),
            entry(&s.gpu_util),
            entry(&s.fpga_util)
        ));
        cost.push_str(&format!("{}\t{}\n", s.condition, entry(&s.cost)));
    }
    fs::write(dir.join("plot_utilization.tsv"), util)?;
    fs::write(dir.join("plot_cost.tsv"), cost)?;
    Ok(())
}

fn csv_io(e: csv::Error) -> Error {
    Error::Domain(format!("csv serialization failed: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_matches_study_defaults() {
        let c = ExperimentConfig::default();
        assert_eq!(c.conditions.len(), 6);
        assert_eq!(c.runs, 11);
        assert_eq!(c.experiment, ExperimentKind::Saturation { initial_requests: 100 });
    }

    #[test]
    fn toml_round_trip_overrides() {
        let text = r#"
            conditions = ["C2_S", "C1_M"]
            runs = 3
            base_seed = 7

            [experiment]
            kind = "fixed_cost"
            request_count = 12

            [solver]
            kind = "exact"
            node_budget = 1000000

            [output]
            dir = "results"

            [weights]
            cpu = 200
        "#;
        let c = ExperimentConfig::from_toml_str(text).unwrap();
        assert_eq!(c.conditions.len(), 2);
        assert_eq!(c.conditions[0].label(), "C2_S");
        assert_eq!(c.runs, 3);
        assert_eq!(c.base_seed, 7);
        assert_eq!(c.experiment, ExperimentKind::FixedCost { request_count: 12 });
        assert_eq!(c.output_dir, PathBuf::from("results"));
        assert_eq!(c.weights.cpu, 200);
        assert_eq!(c.weights.accel, 10);
        match c.solver {
            SolverChoice::Exact(limits) => assert_eq!(limits.node_budget, Some(1_000_000)),
            _ => panic!("expected exact solver"),
        }
    }

    #[test]
    fn malformed_config_is_rejected_with_location() {
        let err = ExperimentConfig::from_toml_str("runs = \"eleven\"").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("config parse"), "{msg}");
        assert!(ExperimentConfig::from_toml_str("conditions = [\"C9_S\"]").is_err());
        assert!(ExperimentConfig::from_toml_str("runs = 0").is_err());
        assert!(ExperimentConfig::from_toml_str("nonsense = 1").is_err());
    }
}
