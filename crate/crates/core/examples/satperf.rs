//! Scratch timing harness for full-scale saturation and fixed-cost solves.

use std::time::Instant;

use poolsim::{
    build_problem, saturation_capacity, solve_exact, Condition, Deployment, ObjectiveWeights,
    SolveLimits, SolveOutcome, SolverChoice, WorkloadSpec,
};

fn main() {
    let weights = ObjectiveWeights::default();
    let limits = SolveLimits::default();
    let solver = SolverChoice::Exact(limits);

    for condition in Condition::PAPER_ORDER {
        let d = Deployment::build(condition.policy, condition.server_mode).unwrap();
        for seed in [42u64, 43, 44] {
            let spec = WorkloadSpec::new(100, seed);
            let t = Instant::now();
            match saturation_capacity(&d, &spec, &solver, &weights) {
                Ok(out) => println!(
                    "{condition} seed {seed}: n*={} pen={} usage={} optimal={} [{:.2?}]",
                    out.n_star,
                    out.solution.objective.penalty,
                    out.solution.objective.weighted_usage,
                    out.optimal,
                    t.elapsed()
                ),
                Err(e) => println!("{condition} seed {seed}: ERROR {e} [{:.2?}]", t.elapsed()),
            }
        }
    }

    println!("--- fixed cost (50 requests) ---");
    for condition in Condition::PAPER_ORDER {
        let d = Deployment::build(condition.policy, condition.server_mode).unwrap();
        for seed in [42u64, 43, 44] {
            let spec = WorkloadSpec::new(50, seed);
            let requests = poolsim::generate_workload(&spec);
            let problem = build_problem(&d, &requests, &weights).unwrap();
            let t = Instant::now();
            match solve_exact(&problem, &limits).unwrap() {
                SolveOutcome::Optimal(s) => println!(
                    "{condition} seed {seed}: pen={} usage={} [{:.2?}]",
                    s.objective.penalty,
                    s.objective.weighted_usage,
                    t.elapsed()
                ),
                other => println!("{condition} seed {seed}: {other:?} [{:.2?}]", t.elapsed()),
            }
        }
    }
}
