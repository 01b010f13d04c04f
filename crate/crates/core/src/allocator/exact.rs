//! Two-phase branch-and-bound. Phase 1 minimizes total penalty; phase 2
//! minimizes weighted usage subject to the phase-1 optimum. Branching is
//! over (request -> host, request -> accelerator provider); remote memory is
//! resolved analytically per pool (see `state`).
//!
//! Determinism: requests are processed in descending weighted demand, and
//! candidate ties break by lowest node id then lowest provider id, so the
//! returned solution is a pure function of the instance and the node budget.

use std::time::Instant;

use super::problem::Problem;
use super::state::{AssignState, Choice, ScoredChoice, Suffix};
use super::{SolveLimits, SolveOutcome, Solution};

struct Ctx {
    /// Request indices in search order (descending weighted demand).
    order: Vec<usize>,
    /// `suffix[k]` aggregates the demand of `order[k..]`.
    suffix: Vec<Suffix>,
    scratch: Vec<Vec<ScoredChoice>>,
    nodes: u64,
    node_budget: Option<u64>,
    deadline: Option<Instant>,
    out_of_budget: bool,
    stop: bool,
}

impl Ctx {
    fn new(problem: &Problem, limits: &SolveLimits) -> Self {
        let weights = problem.weights();
        let requests = problem.requests();
        let mut order: Vec<usize> = (0..requests.len()).collect();
        order.sort_by_key(|&i| (std::cmp::Reverse(weights.value(&requests[i].demand)), i));
        let mut suffix = vec![Suffix::default(); requests.len() + 1];
        for k in (0..requests.len()).rev() {
            let r = &requests[order[k]];
            let next = suffix[k + 1];
            suffix[k] = Suffix {
                cores: next.cores + r.demand.cores as u64,
                memory: next.memory + r.demand.memory as u64,
                gpu: next.gpu + r.demand.gpu as u64,
                fpga: next.fpga + r.demand.fpga as u64,
                min_penalty: next.min_penalty + problem.min_penalty[order[k]],
            };
        }
        Ctx {
            order,
            suffix,
            scratch: vec![Vec::new(); requests.len()],
            nodes: 0,
            node_budget: limits.node_budget,
            deadline: limits.time_budget().map(|d| Instant::now() + d),
            out_of_budget: false,
            stop: false,
        }
    }

    /// Counts one search node; false once any budget is exhausted.
    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if let Some(budget) = self.node_budget {
            if self.nodes > budget {
                self.out_of_budget = true;
            }
        }
        if self.nodes % 4096 == 0 {
            if let Some(deadline) = self.deadline {
                if Instant::now() > deadline {
                    self.out_of_budget = true;
                }
            }
        }
        !self.out_of_budget
    }
}

struct Incumbent {
    penalty: u64,
    usage: u64,
    moves: Vec<Choice>,
}

fn snapshot(state: &AssignState) -> Vec<Choice> {
    state.assigned.iter().map(|c| c.expect("complete assignment")).collect()
}

fn replay(problem: &Problem, moves: &[Choice]) -> Solution {
    let mut state = AssignState::new(problem);
    for (req, &choice) in moves.iter().enumerate() {
        state.apply(req, choice);
    }
    state.materialize()
}

/// Phase-1 depth-first search for the minimum total penalty. With
/// `first_only` the search is a pure feasibility probe that stops at the
/// first completed assignment.
fn search_penalty(
    ctx: &mut Ctx,
    state: &mut AssignState,
    depth: usize,
    best: &mut Option<Incumbent>,
    first_only: bool,
) {
    if ctx.out_of_budget || ctx.stop {
        return;
    }
    if depth == ctx.order.len() {
        let penalty = state.penalty;
        let improves = best.as_ref().map_or(true, |b| penalty < b.penalty);
        if improves {
            *best = Some(Incumbent { penalty, usage: state.usage(), moves: snapshot(state) });
        }
        if first_only || penalty <= ctx.suffix[0].min_penalty {
            ctx.stop = true;
        }
        return;
    }
    let suffix = ctx.suffix[depth];
    if state.infeasible_by_aggregates(&suffix) {
        return;
    }
    if let Some(b) = best.as_ref() {
        if state.penalty + suffix.min_penalty >= b.penalty {
            return;
        }
    }
    let req = ctx.order[depth];
    let mut choices = std::mem::take(&mut ctx.scratch[depth]);
    state.collect_choices(req, !first_only, &mut choices);
    for sc in &choices {
        if let Some(b) = best.as_ref() {
            if state.penalty + sc.choice.penalty + ctx.suffix[depth + 1].min_penalty >= b.penalty {
                continue;
            }
        }
        if !ctx.tick() {
            break;
        }
        state.apply(req, sc.choice);
        search_penalty(ctx, state, depth + 1, best, first_only);
        state.undo(req, sc.choice);
        if ctx.out_of_budget || ctx.stop {
            break;
        }
    }
    ctx.scratch[depth] = choices;
}

/// Phase-2 depth-first search for the minimum weighted usage among
/// assignments whose total penalty stays within `penalty_cap`.
fn search_usage(
    ctx: &mut Ctx,
    state: &mut AssignState,
    depth: usize,
    penalty_cap: u64,
    best: &mut Incumbent,
) {
    if ctx.out_of_budget {
        return;
    }
    if depth == ctx.order.len() {
        let usage = state.usage();
        if usage < best.usage {
            *best = Incumbent { penalty: state.penalty, usage, moves: snapshot(state) };
        }
        return;
    }
    let suffix = ctx.suffix[depth];
    if state.infeasible_by_aggregates(&suffix) {
        return;
    }
    if state.penalty + suffix.min_penalty > penalty_cap {
        return;
    }
    if state.usage_lower_bound(&suffix) >= best.usage {
        return;
    }
    let req = ctx.order[depth];
    let current_usage = state.usage();
    let mut choices = std::mem::take(&mut ctx.scratch[depth]);
    state.collect_choices(req, false, &mut choices);
    for sc in &choices {
        if state.penalty + sc.choice.penalty + ctx.suffix[depth + 1].min_penalty > penalty_cap {
            continue;
        }
        if current_usage + sc.usage_delta >= best.usage {
            continue;
        }
        if !ctx.tick() {
            break;
        }
        state.apply(req, sc.choice);
        search_usage(ctx, state, depth + 1, penalty_cap, best);
        state.undo(req, sc.choice);
        if ctx.out_of_budget {
            break;
        }
    }
    ctx.scratch[depth] = choices;
}

pub(super) fn solve(problem: &Problem, limits: &SolveLimits) -> SolveOutcome {
    let n = problem.requests().len();
    if n == 0 {
        return SolveOutcome::Optimal(AssignState::new(problem).materialize());
    }
    if problem.candidates.iter().any(|c| c.is_empty()) {
        return SolveOutcome::Infeasible;
    }

    let mut ctx = Ctx::new(problem, limits);
    let mut state = AssignState::new(problem);

    if !limits.optimality_required {
        let mut best = None;
        search_penalty(&mut ctx, &mut state, 0, &mut best, true);
        return match best {
            Some(b) => SolveOutcome::BudgetExceeded(Some(replay(problem, &b.moves))),
            None if ctx.out_of_budget => SolveOutcome::BudgetExceeded(None),
            None => SolveOutcome::Infeasible,
        };
    }

    let mut best = None;
    search_penalty(&mut ctx, &mut state, 0, &mut best, false);
    if ctx.out_of_budget {
        return SolveOutcome::BudgetExceeded(best.map(|b| replay(problem, &b.moves)));
    }
    let Some(phase1) = best else {
        return SolveOutcome::Infeasible;
    };

    let penalty_cap = phase1.penalty;
    let mut incumbent = phase1;
    ctx.stop = false;
    search_usage(&mut ctx, &mut state, 0, penalty_cap, &mut incumbent);
    let solution = replay(problem, &incumbent.moves);
    if ctx.out_of_budget {
        SolveOutcome::BudgetExceeded(Some(solution))
    } else {
        SolveOutcome::Optimal(solution)
    }
}
