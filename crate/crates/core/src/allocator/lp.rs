//! LP-format export of the allocation problem, for cross-validation against
//! external MILP solvers.
//!
//! The lexicographic objective becomes two single-objective files: phase 1
//! minimizes the total placement penalty; phase 2 minimizes the weighted
//! capacity of active nodes with the penalty capped at a caller-supplied
//! budget (normally the phase-1 optimum). Variable naming is stable —
//! `r{i}_h{j}` hosts request `i` on node `j`, `r{i}_m{j}` supplies GB from
//! node `j` (local when `j` is the host, remote when `j` is a memory node),
//! `r{i}_a{j}` picks the accelerator provider, `act_{j}` marks node activity
//! — so identical problems export byte-identical documents.

use std::collections::BTreeSet;
use std::fmt::Write;

use crate::model::AccelKind;

use super::problem::Problem;

/// The two exported documents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpExport {
    pub phase1: String,
    pub phase2: String,
}

/// Exports both phases; `penalty_budget` is the cap written into the
/// phase-2 file.
pub fn export_lp(problem: &Problem, penalty_budget: u64) -> LpExport {
    LpExport {
        phase1: export_lp_phase1(problem),
        phase2: export_lp_phase2(problem, penalty_budget),
    }
}

/// Phase-1 file: minimize the total placement penalty.
pub fn export_lp_phase1(problem: &Problem) -> String {
    render(problem, None)
}

/// Phase-2 file: minimize weighted active capacity subject to the penalty
/// staying within `penalty_budget`.
pub fn export_lp_phase2(problem: &Problem, penalty_budget: u64) -> String {
    render(problem, Some(penalty_budget))
}

struct Terms(String);

impl Terms {
    fn new() -> Self {
        Terms(String::new())
    }

    fn add(&mut self, coeff: i64, var: &str) {
        if coeff == 0 {
            return;
        }
        if self.0.is_empty() {
            if coeff < 0 {
                let _ = write!(self.0, "- {} {var}", -coeff);
            } else {
                let _ = write!(self.0, "{coeff} {var}");
            }
        } else if coeff < 0 {
            let _ = write!(self.0, " - {} {var}", -coeff);
        } else {
            let _ = write!(self.0, " + {coeff} {var}");
        }
    }

    fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn render(problem: &Problem, penalty_budget: Option<u64>) -> String {
    let requests = problem.requests();
    let deployment = problem.deployment();

    let rh = |req: u32, host: usize| format!("r{req}_h{}", problem.hosts[host].node.0);
    let rm_host = |req: u32, host: usize| format!("r{req}_m{}", problem.hosts[host].node.0);
    let rm_node = |req: u32, node: u32| format!("r{req}_m{node}");
    let ra_host = |req: u32, host: usize| format!("r{req}_a{}", problem.hosts[host].node.0);
    let ra_node = |req: u32, node: u32| format!("r{req}_a{node}");

    // Accelerator nodes a request can use: matching kind, sufficient
    // capacity, in the pool of at least one candidate host.
    let accel_targets = |ri: usize| -> Vec<usize> {
        let r = &requests[ri];
        let Some(kind) = r.accel_kind() else { return Vec::new() };
        let units = r.accel_units();
        let pools: BTreeSet<usize> = problem.candidates[ri]
            .iter()
            .filter_map(|c| problem.hosts[c.host].pool)
            .collect();
        let mut targets = Vec::new();
        for pool in pools {
            let nodes = match kind {
                AccelKind::Gpu => &problem.pools[pool].gpu_nodes,
                AccelKind::Fpga => &problem.pools[pool].fpga_nodes,
            };
            for &a in nodes {
                if problem.accel_nodes[a].cap >= units {
                    targets.push(a);
                }
            }
        }
        targets
    };
    // Memory nodes reachable from some candidate host.
    let memory_targets = |ri: usize| -> Vec<u32> {
        let pools: BTreeSet<usize> = problem.candidates[ri]
            .iter()
            .filter_map(|c| problem.hosts[c.host].pool)
            .collect();
        let mut nodes = Vec::new();
        for pool in pools {
            for id in &problem.pools[pool].mem_nodes {
                nodes.push(id.0);
            }
        }
        nodes.sort_unstable();
        nodes
    };

    let mut binaries: Vec<String> = Vec::new();
    let mut generals: Vec<String> = Vec::new();
    let mut bounds: Vec<String> = Vec::new();
    let mut constraints: Vec<String> = Vec::new();
    let mut active_nodes: BTreeSet<u32> = BTreeSet::new();

    let mut penalty_terms = Terms::new();
    for (ri, r) in requests.iter().enumerate() {
        for cand in &problem.candidates[ri] {
            penalty_terms.add(cand.penalty as i64, &rh(r.id, cand.host));
        }
    }

    // Per-request structure.
    for (ri, r) in requests.iter().enumerate() {
        let cands = &problem.candidates[ri];
        let mut one_host = Terms::new();
        for cand in cands {
            let var = rh(r.id, cand.host);
            one_host.add(1, &var);
            binaries.push(var);
            active_nodes.insert(problem.hosts[cand.host].node.0);
        }
        constraints.push(format!(" one_host_r{}: {} = 1", r.id, one_host.0));

        let mut mem_balance = Terms::new();
        for cand in cands {
            let host = &problem.hosts[cand.host];
            let var = rm_host(r.id, cand.host);
            mem_balance.add(1, &var);
            let ub = r.demand.memory.min(host.local_mem);
            bounds.push(format!(" 0 <= {var} <= {ub}"));
            generals.push(var.clone());
            // local supply only from the request's own host, and at least
            // the threshold when hosted there
            let mut upper = Terms::new();
            upper.add(1, &var);
            upper.add(-(r.demand.memory as i64), &rh(r.id, cand.host));
            constraints.push(format!(" local_r{}_n{}: {} <= 0", r.id, host.node.0, upper.0));
            if r.local_threshold > 0 {
                let mut lower = Terms::new();
                lower.add(1, &var);
                lower.add(-(r.local_threshold as i64), &rh(r.id, cand.host));
                constraints.push(format!(" thr_r{}_n{}: {} >= 0", r.id, host.node.0, lower.0));
            }
        }
        for node in memory_targets(ri) {
            let var = rm_node(r.id, node);
            mem_balance.add(1, &var);
            let cap = deployment.node(crate::model::NodeId(node)).capacity.memory;
            bounds.push(format!(" 0 <= {var} <= {}", r.demand.memory.min(cap)));
            generals.push(var.clone());
            active_nodes.insert(node);
            // remote supply requires a host in the memory node's pool
            let mut link = Terms::new();
            link.add(1, &var);
            for cand in cands {
                let host = &problem.hosts[cand.host];
                if host.pool.map(|p| problem.pools[p].mem_nodes.iter().any(|m| m.0 == node))
                    == Some(true)
                {
                    link.add(-(r.demand.memory as i64), &rh(r.id, cand.host));
                }
            }
            constraints.push(format!(" rlink_r{}_m{}: {} <= 0", r.id, node, link.0));
        }
        constraints.push(format!(" mem_r{}: {} = {}", r.id, mem_balance.0, r.demand.memory));

        if r.accel_units() > 0 {
            let mut one_accel = Terms::new();
            for cand in cands {
                if !cand.integrated_ok {
                    continue;
                }
                let var = ra_host(r.id, cand.host);
                one_accel.add(1, &var);
                binaries.push(var.clone());
                let mut link = Terms::new();
                link.add(1, &var);
                link.add(-1, &rh(r.id, cand.host));
                constraints.push(format!(
                    " alink_r{}_n{}: {} <= 0",
                    r.id, problem.hosts[cand.host].node.0, link.0
                ));
            }
            for a in accel_targets(ri) {
                let info = &problem.accel_nodes[a];
                let var = ra_node(r.id, info.node.0);
                one_accel.add(1, &var);
                binaries.push(var.clone());
                active_nodes.insert(info.node.0);
                let mut link = Terms::new();
                link.add(1, &var);
                for cand in cands {
                    if problem.hosts[cand.host].pool == Some(info.pool) {
                        link.add(-1, &rh(r.id, cand.host));
                    }
                }
                constraints.push(format!(" alink_r{}_m{}: {} <= 0", r.id, info.node.0, link.0));
            }
            constraints.push(format!(" accel_r{}: {} = 1", r.id, one_accel.0));
        }
    }

    // Per-node capacities, coupled to activity.
    for (hi, host) in problem.hosts.iter().enumerate() {
        let act = format!("act_{}", host.node.0);
        let mut cores = Terms::new();
        let mut local = Terms::new();
        let mut accel = Terms::new();
        for (ri, r) in requests.iter().enumerate() {
            for cand in &problem.candidates[ri] {
                if cand.host != hi {
                    continue;
                }
                cores.add(r.demand.cores as i64, &rh(r.id, hi));
                local.add(1, &rm_host(r.id, hi));
                if r.accel_units() > 0 && cand.integrated_ok {
                    accel.add(r.accel_units() as i64, &ra_host(r.id, hi));
                }
            }
        }
        if cores.is_empty() {
            continue;
        }
        let mut c = cores;
        c.add(-(host.cores as i64), &act);
        constraints.push(format!(" cores_n{}: {} <= 0", host.node.0, c.0));
        let mut l = local;
        l.add(-(host.local_mem as i64), &act);
        constraints.push(format!(" lmem_n{}: {} <= 0", host.node.0, l.0));
        if !accel.is_empty() {
            let cap = host.gpu.max(host.fpga);
            let mut a = accel;
            a.add(-(cap as i64), &act);
            constraints.push(format!(" acap_n{}: {} <= 0", host.node.0, a.0));
        }
    }
    for meta in &problem.pools {
        for mem_node in &meta.mem_nodes {
            let mut supply = Terms::new();
            for (ri, r) in requests.iter().enumerate() {
                if memory_targets(ri).contains(&mem_node.0) {
                    supply.add(1, &rm_node(r.id, mem_node.0));
                }
            }
            if supply.is_empty() {
                continue;
            }
            supply.add(-(meta.mem_node_size as i64), &format!("act_{}", mem_node.0));
            constraints.push(format!(" rmem_n{}: {} <= 0", mem_node.0, supply.0));
        }
    }
    for (ai, info) in problem.accel_nodes.iter().enumerate() {
        let mut supply = Terms::new();
        for (ri, r) in requests.iter().enumerate() {
            if accel_targets(ri).contains(&ai) {
                supply.add(r.accel_units() as i64, &ra_node(r.id, info.node.0));
            }
        }
        if supply.is_empty() {
            continue;
        }
        supply.add(-(info.cap as i64), &format!("act_{}", info.node.0));
        constraints.push(format!(" acap_n{}: {} <= 0", info.node.0, supply.0));
    }

    if let Some(budget) = penalty_budget {
        if !penalty_terms.is_empty() {
            constraints.push(format!(" penalty_budget: {} <= {budget}", penalty_terms.0));
        }
    }

    let mut usage_terms = Terms::new();
    for node in &active_nodes {
        let cap = problem
            .weights()
            .value(&deployment.node(crate::model::NodeId(*node)).capacity);
        usage_terms.add(cap as i64, &format!("act_{node}"));
    }
    for node in &active_nodes {
        binaries.push(format!("act_{node}"));
    }

    let (title, objective) = match penalty_budget {
        None => ("phase 1: minimize total placement penalty", penalty_terms),
        Some(_) => ("phase 2: minimize weighted active capacity", usage_terms),
    };

    let mut out = String::new();
    let _ = writeln!(out, "\\ poolsim allocation export, {title}");
    let _ = writeln!(out, "Minimize");
    let _ = writeln!(out, " obj: {}", objective.0);
    let _ = writeln!(out, "Subject To");
    for c in &constraints {
        let _ = writeln!(out, "{c}");
    }
    let _ = writeln!(out, "Bounds");
    for b in &bounds {
        let _ = writeln!(out, "{b}");
    }
    let _ = writeln!(out, "Binary");
    for b in &binaries {
        let _ = writeln!(out, " {b}");
    }
    let _ = writeln!(out, "Generals");
    for g in &generals {
        let _ = writeln!(out, " {g}");
    }
    let _ = writeln!(out, "End");
    out
}
