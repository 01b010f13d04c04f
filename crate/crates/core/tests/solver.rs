//! Exact-solver checks against the enumeration oracle and the frozen small
//! instances, greedy dominance, weight-scale invariance, and prefix
//! feasibility monotonicity.

mod common;

use common::{enumerate_optimum, random_instance};
use poolsim::{
    build_problem, solve_exact, solve_greedy, validate, Deployment, ObjectiveWeights, Policy,
    Request, ResourceVector, ServerMode, SolveLimits, SolveOutcome,
};

fn exact_objective(
    deployment: &Deployment,
    requests: &[Request],
    weights: &ObjectiveWeights,
) -> Option<(u64, u64)> {
    let problem = build_problem(deployment, requests, weights).ok()?;
    match solve_exact(&problem, &SolveLimits::default()).unwrap() {
        SolveOutcome::Optimal(s) => {
            assert!(validate(&s, &problem).is_empty(), "solver output must validate");
            Some((s.objective.penalty, s.objective.weighted_usage))
        }
        SolveOutcome::Infeasible => None,
        SolveOutcome::BudgetExceeded(_) => panic!("budget exhausted on a tiny instance"),
    }
}

#[test]
fn single_request_on_uniform_separate_uses_one_cpu_node() {
    let d = Deployment::build(Policy::C1, ServerMode::Separate).unwrap();
    let weights = ObjectiveWeights::default();
    let r = Request::new(0, ResourceVector::new(8, 16, 0, 0), 8).unwrap();
    let problem = build_problem(&d, &[r], &weights).unwrap();
    let SolveOutcome::Optimal(s) = solve_exact(&problem, &SolveLimits::default()).unwrap() else {
        panic!("expected optimal");
    };
    assert_eq!(s.objective.penalty, 0);
    assert_eq!(s.objective.weighted_usage, 3264);
    assert_eq!(s.active_nodes.len(), 1);
    assert_eq!(enumerate_optimum(&d, &[r], &weights), Some((0, 3264)));
    // local memory fully covers the demand, nothing remote
    assert_eq!(s.placements[0].local_mem, 16);
    assert!(s.placements[0].remote_mem.is_empty());
}

#[test]
fn two_heavy_memory_requests_fill_the_memory_pool() {
    let d = Deployment::build(Policy::C2, ServerMode::Separate).unwrap();
    let weights = ObjectiveWeights::default();
    let requests = vec![
        Request::new(0, ResourceVector::new(32, 300, 0, 0), 0).unwrap(),
        Request::new(1, ResourceVector::new(32, 300, 0, 0), 0).unwrap(),
    ];
    let oracle = enumerate_optimum(&d, &requests, &weights).unwrap();
    let exact = exact_objective(&d, &requests, &weights).unwrap();
    assert_eq!(exact, oracle);
    // perfect match in the memory-optimized pool; each request overflows
    // 236 GB past its host's 64 GB, so both 384-GB memory nodes activate
    assert_eq!(exact, (0, 2 * 3264 + 2 * 384));

    let problem = build_problem(&d, &requests, &weights).unwrap();
    let SolveOutcome::Optimal(s) = solve_exact(&problem, &SolveLimits::default()).unwrap() else {
        panic!("expected optimal");
    };
    let hosts: Vec<_> = s.placements.iter().map(|p| p.host).collect();
    for host in hosts {
        let node = problem.deployment().node(host);
        let pool = problem.deployment().pool(node.pool.unwrap());
        assert_eq!(pool.class, poolsim::PoolClass::MemoryOptimized);
    }
}

#[test]
fn zero_requests_solve_to_the_empty_solution() {
    let d = Deployment::build(Policy::C3, ServerMode::Mixed).unwrap();
    let problem = build_problem(&d, &[], &ObjectiveWeights::default()).unwrap();
    let SolveOutcome::Optimal(s) = solve_exact(&problem, &SolveLimits::default()).unwrap() else {
        panic!("expected optimal");
    };
    assert!(s.placements.is_empty());
    assert_eq!(s.objective.penalty, 0);
    assert_eq!(s.objective.weighted_usage, 0);
}

#[test]
fn oracle_equivalence_on_random_small_instances() {
    let weights = ObjectiveWeights::default();
    let mut feasible = 0;
    let mut infeasible = 0;
    for seed in 0..250u64 {
        let (deployment, requests) = random_instance(seed + 1);
        let oracle = enumerate_optimum(&deployment, &requests, &weights);
        let exact = exact_objective(&deployment, &requests, &weights);
        assert_eq!(exact, oracle, "objective mismatch on seed {seed}");
        match oracle {
            Some(_) => feasible += 1,
            None => infeasible += 1,
        }
    }
    // the suite must exercise both outcomes to mean anything
    assert!(feasible >= 50, "only {feasible} feasible instances");
    assert!(infeasible >= 10, "only {infeasible} infeasible instances");
}

#[test]
fn greedy_is_feasible_and_never_beats_exact() {
    let weights = ObjectiveWeights::default();
    let mut compared = 0;
    for seed in 300..1100u64 {
        let (deployment, requests) = random_instance(seed);
        let Ok(problem) = build_problem(&deployment, &requests, &weights) else { continue };
        let Some(greedy) = solve_greedy(&problem) else { continue };
        assert!(validate(&greedy, &problem).is_empty(), "greedy must validate on seed {seed}");
        let exact = exact_objective(&deployment, &requests, &weights)
            .expect("greedy found a solution, so the instance is feasible");
        let greedy_tuple = (greedy.objective.penalty, greedy.objective.weighted_usage);
        assert!(
            greedy_tuple >= exact,
            "greedy {greedy_tuple:?} beats exact {exact:?} on seed {seed}"
        );
        compared += 1;
    }
    assert!(compared >= 80, "only {compared} comparisons");
}

#[test]
fn scaling_all_weights_preserves_the_argmin() {
    let base = ObjectiveWeights::default();
    let scaled = ObjectiveWeights { cpu: 300, accel: 30, memory: 3 };
    for seed in 500..560u64 {
        let (deployment, requests) = random_instance(seed);
        let a = exact_objective(&deployment, &requests, &base);
        let b = exact_objective(&deployment, &requests, &scaled);
        match (a, b) {
            (None, None) => {}
            (Some((pa, ua)), Some((pb, ub))) => {
                assert_eq!(pa, pb, "penalty changed under weight scaling on seed {seed}");
                assert_eq!(3 * ua, ub, "usage did not scale linearly on seed {seed}");
            }
            other => panic!("feasibility changed under weight scaling on seed {seed}: {other:?}"),
        }
    }
}

#[test]
fn feasible_instances_have_feasible_prefixes() {
    let weights = ObjectiveWeights::default();
    let mut checked = 0;
    for seed in 1200..1900u64 {
        let (deployment, requests) = random_instance(seed);
        if exact_objective(&deployment, &requests, &weights).is_none() {
            continue;
        }
        for n in 0..requests.len() {
            assert!(
                exact_objective(&deployment, &requests[..n], &weights).is_some(),
                "prefix {n} infeasible while the full list is feasible (seed {seed})"
            );
        }
        checked += 1;
    }
    assert!(checked >= 40, "only {checked} feasible instances checked");
}

#[test]
fn budget_exhaustion_reports_rather_than_lies() {
    let d = Deployment::build(Policy::C2, ServerMode::Separate).unwrap();
    let weights = ObjectiveWeights::default();
    let requests: Vec<Request> = (0..12)
        .map(|i| Request::new(i, ResourceVector::new(7, 30, 0, 0), 10).unwrap())
        .collect();
    let problem = build_problem(&d, &requests, &weights).unwrap();
    let tiny = SolveLimits { node_budget: Some(3), ..SolveLimits::default() };
    match solve_exact(&problem, &tiny).unwrap() {
        SolveOutcome::BudgetExceeded(_) => {}
        other => panic!("expected budget exhaustion, got {other:?}"),
    }
    let generous = SolveLimits::default();
    assert!(matches!(solve_exact(&problem, &generous).unwrap(), SolveOutcome::Optimal(_)));
}
