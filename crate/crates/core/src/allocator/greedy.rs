//! Best-fit-decreasing heuristic: requests in descending weighted demand,
//! each committed to the choice with the smallest incremental
//! (penalty, newly activated weighted capacity), ties broken by lowest node
//! id. Scales past the exact solver but never claims optimality, and its
//! infeasibility verdicts may be pessimistic.

use super::problem::Problem;
use super::state::AssignState;
use super::Solution;

pub(super) fn solve(problem: &Problem) -> Option<Solution> {
    let requests = problem.requests();
    let weights = problem.weights();
    let mut order: Vec<usize> = (0..requests.len()).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(weights.value(&requests[i].demand)), i));

    let mut state = AssignState::new(problem);
    let mut choices = Vec::new();
    for req in order {
        state.collect_choices(req, true, &mut choices);
        let best = choices.first()?;
        state.apply(req, best.choice);
    }
    Some(state.materialize())
}
