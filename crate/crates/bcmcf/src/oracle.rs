//! Desk-scale ground truth: exhaustive enumeration of basic solutions,
//! independent of the simplex machinery, plus a fuzz harness comparing
//! the solver against it on random tiny instances.
//!
//! The enumeration deliberately reimplements tree flows and cycle
//! arithmetic from scratch so a bug in the solver's basis code cannot
//! cancel out against the same bug here.

use num::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instance::{generate_with_edge_count, Instance};
use crate::numerics::{format_rat, rat_int, Rat};
use crate::preprocess::{budget_gate, min_cost_circulation, Flow, Gate};
use crate::solver::{certify, solve, SolveOptions};
use crate::{Error, Result};

/// Hard size limits for the exhaustive search.
#[derive(Debug, Clone, Copy)]
pub struct OracleLimits {
    pub max_nodes: usize,
    pub max_edges: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_nodes: 5,
            max_edges: 9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OraclePath {
    BudgetGate,
    Enumeration,
}

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub objective: Rat,
    pub flow: Flow,
    pub bases_enumerated: u64,
    pub path: OraclePath,
}

/// Exhaustive optimum: if the budget-free minimum cost circulation fits
/// the budget it is returned outright; otherwise every basis structure
/// (spanning tree, extra edge with nonzero cycle fee, lower/upper
/// assignment of the rest) is expanded into its basic solution with the
/// fee pinned at the budget, and the cheapest feasible one wins.
pub fn enumerate_optimum(inst: &Instance, limits: &OracleLimits) -> Result<OracleResult> {
    let n = inst.node_count;
    let m = inst.edge_count();
    if n > limits.max_nodes || m > limits.max_edges {
        return Err(Error::SizeLimit(format!(
            "oracle accepts n <= {} and m <= {}, got n = {n}, m = {m}",
            limits.max_nodes, limits.max_edges
        )));
    }
    let mcc = min_cost_circulation(inst)?;
    if let Gate::Done(flow) = budget_gate(inst, &mcc)? {
        let objective = flow.cost(inst);
        return Ok(OracleResult {
            objective,
            flow,
            bases_enumerated: 0,
            path: OraclePath::BudgetGate,
        });
    }

    let budget = rat_int(inst.budget as i64);
    let mut best: Option<(Rat, Flow)> = None;
    let mut bases = 0u64;
    // All edge subsets of size n-1 that form a spanning tree.
    for mask in 0u32..(1 << m) {
        if mask.count_ones() as usize != n - 1 {
            continue;
        }
        let tree: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
        if !is_spanning_tree(n, inst, &tree) {
            continue;
        }
        for extra in 0..m {
            if mask >> extra & 1 == 1 {
                continue;
            }
            let chi = cycle_indicator(n, inst, &tree, extra);
            let cycle_fee: Rat = chi
                .iter()
                .zip(&inst.edges)
                .map(|(c, e)| rat_int(*c) * rat_int(e.fee as i64))
                .sum();
            if cycle_fee.is_zero() {
                continue;
            }
            let rest: Vec<usize> = (0..m)
                .filter(|&i| mask >> i & 1 == 0 && i != extra)
                .collect();
            for bounds in 0u32..(1 << rest.len()) {
                bases += 1;
                // Fix the non-basic edges, set the extra edge to zero,
                // and force conservation through the tree.
                let mut x = vec![Rat::zero(); m];
                for (k, &eid) in rest.iter().enumerate() {
                    if bounds >> k & 1 == 1 {
                        x[eid] = rat_int(inst.edges[eid].capacity as i64);
                    }
                }
                let Some(mut x) = tree_flows(n, inst, &tree, x) else {
                    continue;
                };
                // Shift along the extra cycle until the fee hits the
                // budget exactly.
                let fee0: Rat = x
                    .iter()
                    .zip(&inst.edges)
                    .map(|(v, e)| v * rat_int(e.fee as i64))
                    .sum();
                let t = (&budget - fee0) / &cycle_fee;
                for (i, c) in chi.iter().enumerate() {
                    if *c != 0 {
                        x[i] += rat_int(*c) * &t;
                    }
                }
                let flow = Flow { values: x };
                if !flow.within_bounds(inst) {
                    continue;
                }
                debug_assert!(flow.is_circulation(inst));
                debug_assert_eq!(flow.fee(inst), budget);
                let cost = flow.cost(inst);
                if best.as_ref().is_none_or(|(c, _)| cost < *c) {
                    best = Some((cost, flow));
                }
            }
        }
    }
    let (objective, flow) = best.ok_or_else(|| {
        Error::Corruption("no feasible basic solution despite the gate proceeding".into())
    })?;
    // Re-check the witness without trusting the enumeration bookkeeping.
    if !flow.within_bounds(inst) || !flow.is_circulation(inst) || flow.fee(inst) > budget {
        return Err(Error::Corruption(
            "oracle witness fails its own feasibility check".into(),
        ));
    }
    Ok(OracleResult {
        objective,
        flow,
        bases_enumerated: bases,
        path: OraclePath::Enumeration,
    })
}

fn is_spanning_tree(n: usize, inst: &Instance, tree: &[usize]) -> bool {
    // Union-find over 1..=n: n-1 edges and no cycle means spanning.
    let mut parent: Vec<usize> = (0..=n).collect();
    fn find(parent: &mut Vec<usize>, v: usize) -> usize {
        if parent[v] != v {
            let r = find(parent, parent[v]);
            parent[v] = r;
        }
        parent[v]
    }
    for &eid in tree {
        let a = find(&mut parent, inst.edges[eid].tail);
        let b = find(&mut parent, inst.edges[eid].head);
        if a == b {
            return false;
        }
        parent[a] = b;
    }
    true
}

/// Signed per-edge indicator of the cycle closed by `extra` over the
/// tree: +1 along the extra edge's direction, found by walking the tree
/// path from its head back to its tail.
fn cycle_indicator(n: usize, inst: &Instance, tree: &[usize], extra: usize) -> Vec<i64> {
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    for &eid in tree {
        adj[inst.edges[eid].tail].push(eid);
        adj[inst.edges[eid].head].push(eid);
    }
    let start = inst.edges[extra].head;
    let goal = inst.edges[extra].tail;
    // DFS for the unique tree path start -> goal.
    let mut prev: Vec<Option<usize>> = vec![None; n + 1];
    let mut seen = vec![false; n + 1];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(v) = stack.pop() {
        for &eid in &adj[v] {
            let e = &inst.edges[eid];
            let other = if e.tail == v { e.head } else { e.tail };
            if !seen[other] {
                seen[other] = true;
                prev[other] = Some(eid);
                stack.push(other);
            }
        }
    }
    let mut chi = vec![0i64; inst.edge_count()];
    chi[extra] = 1;
    let mut v = goal;
    while v != start {
        let eid = prev[v].expect("tree path exists");
        let e = &inst.edges[eid];
        // Walking start -> goal; arriving at v through eid.
        if e.head == v {
            chi[eid] = 1;
            v = e.tail;
        } else {
            chi[eid] = -1;
            v = e.head;
        }
    }
    chi
}

/// Solves conservation for the tree edges by leaf elimination, the
/// non-tree flows in `x` being fixed. Returns None only on internal
/// inconsistency (cannot happen for a true spanning tree).
fn tree_flows(n: usize, inst: &Instance, tree: &[usize], mut x: Vec<Rat>) -> Option<Vec<Rat>> {
    let mut net = vec![Rat::zero(); n + 1];
    for (i, e) in inst.edges.iter().enumerate() {
        if !x[i].is_zero() {
            net[e.head] += &x[i];
            net[e.tail] -= &x[i];
        }
    }
    let mut remaining: Vec<usize> = tree.to_vec();
    let mut degree = vec![0usize; n + 1];
    for &eid in &remaining {
        degree[inst.edges[eid].tail] += 1;
        degree[inst.edges[eid].head] += 1;
    }
    while !remaining.is_empty() {
        let pos = remaining.iter().position(|&eid| {
            degree[inst.edges[eid].tail] == 1 || degree[inst.edges[eid].head] == 1
        })?;
        let eid = remaining.swap_remove(pos);
        let e = &inst.edges[eid];
        let leaf = if degree[e.tail] == 1 { e.tail } else { e.head };
        // Zero excess at the leaf fixes this edge's flow.
        if e.tail == leaf {
            x[eid] = net[leaf].clone();
            net[e.head] += &x[eid];
        } else {
            x[eid] = -net[leaf].clone();
            net[e.tail] -= &x[eid];
        }
        net[leaf] = Rat::zero();
        degree[e.tail] -= 1;
        degree[e.head] -= 1;
    }
    Some(x)
}

/// One solver-vs-oracle discrepancy, with the instance serialized for
/// replay.
#[derive(Debug, Clone)]
pub struct FuzzMismatch {
    pub seed: u64,
    pub reason: String,
    pub instance_text: String,
}

#[derive(Debug, Clone, Default)]
pub struct FuzzReport {
    pub cases: u64,
    pub gate_cases: u64,
    pub mismatches: Vec<FuzzMismatch>,
}

impl FuzzReport {
    pub fn is_ok(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Draws a deterministic tiny instance for fuzzing: n in [2,5], m in
/// [n,9], costs/capacities up to 5, fees up to 3, budget fraction in
/// {1/4, 1/2, 3/4}.
pub fn fuzz_instance(rng: &mut ChaCha8Rng) -> Result<Instance> {
    let n = rng.gen_range(2..=5usize);
    let m = rng.gen_range(n.max(2)..=9usize);
    let phi_num = rng.gen_range(1..=3u64);
    let sub_seed = rng.gen::<u64>();
    generate_with_edge_count(n, m, 5, 5, 3, (phi_num, 4), sub_seed)
}

/// Runs `count` random tiny instances through both the solver (with
/// deep per-pivot checks) and the oracle, requiring exact objective
/// agreement plus an independent feasibility check of the solver flow.
pub fn fuzz_equivalence(count: u64, seed: u64, options: &SolveOptions) -> Result<FuzzReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let limits = OracleLimits::default();
    let mut report = FuzzReport::default();
    for case in 0..count {
        let inst = fuzz_instance(&mut rng)?;
        report.cases += 1;
        let fail = |reason: String| FuzzMismatch {
            seed: case,
            reason,
            instance_text: inst.serialize(),
        };
        let solved = match solve(&inst, options) {
            Ok(r) => r,
            Err(e) => {
                report.mismatches.push(fail(format!("solver error: {e}")));
                continue;
            }
        };
        let truth = match enumerate_optimum(&inst, &limits) {
            Ok(r) => r,
            Err(e) => {
                report.mismatches.push(fail(format!("oracle error: {e}")));
                continue;
            }
        };
        if truth.path == OraclePath::BudgetGate {
            report.gate_cases += 1;
        }
        if solved.objective != truth.objective {
            report.mismatches.push(fail(format!(
                "objective mismatch: solver {} vs oracle {}",
                format_rat(&solved.objective),
                format_rat(&truth.objective)
            )));
            continue;
        }
        let budget = rat_int(inst.budget as i64);
        if !solved.flow.within_bounds(&inst)
            || !solved.flow.is_circulation(&inst)
            || solved.flow.fee(&inst) > budget
        {
            report
                .mismatches
                .push(fail("solver flow infeasible".into()));
            continue;
        }
        if !certify(&solved, &inst) {
            report
                .mismatches
                .push(fail("certificate failed verification".into()));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::parse_instance;

    const MICRO1: &str = "p bcmcf 2 2 6\na 1 2 10 -2 1\na 2 1 10 0 1\n";

    #[test]
    fn micro1_enumeration() {
        let inst = parse_instance(MICRO1).unwrap();
        let res = enumerate_optimum(&inst, &OracleLimits::default()).unwrap();
        assert_eq!(res.path, OraclePath::Enumeration);
        assert_eq!(res.objective, rat_int(-6));
        assert_eq!(res.flow.values, vec![rat_int(3), rat_int(3)]);
        assert!(res.bases_enumerated > 0);
    }

    #[test]
    fn micro2_gate() {
        let mut inst = parse_instance(MICRO1).unwrap();
        inst.budget = 20;
        let res = enumerate_optimum(&inst, &OracleLimits::default()).unwrap();
        assert_eq!(res.path, OraclePath::BudgetGate);
        assert_eq!(res.objective, rat_int(-20));
    }

    #[test]
    fn nonnegative_costs_give_zero() {
        let inst =
            parse_instance("p bcmcf 3 3 2\na 1 2 5 1 1\na 2 3 5 0 1\na 3 1 5 2 1\n").unwrap();
        let res = enumerate_optimum(&inst, &OracleLimits::default()).unwrap();
        assert!(res.objective.is_zero());
    }

    #[test]
    fn refuses_oversized_instances() {
        let inst = crate::instance::generate_with_edge_count(6, 12, 5, 5, 3, (1, 2), 0).unwrap();
        assert!(matches!(
            enumerate_optimum(&inst, &OracleLimits::default()),
            Err(Error::SizeLimit(_))
        ));
    }

    #[test]
    fn objective_invariant_under_edge_permutation() {
        let base = parse_instance(
            "p bcmcf 3 5 3\na 1 2 4 -3 1\na 2 3 4 -1 2\na 3 1 4 1 0\na 1 3 3 2 1\na 2 1 2 0 1\n",
        )
        .unwrap();
        let expected = enumerate_optimum(&base, &OracleLimits::default())
            .unwrap()
            .objective;
        let mut permuted = base.clone();
        permuted.edges.reverse();
        let got = enumerate_optimum(&permuted, &OracleLimits::default())
            .unwrap()
            .objective;
        assert_eq!(expected, got);
    }

    #[test]
    fn fuzz_solver_matches_oracle() {
        let opts = SolveOptions {
            paranoid: true,
            ..Default::default()
        };
        let report = fuzz_equivalence(60, 4242, &opts).unwrap();
        assert_eq!(report.cases, 60);
        for m in &report.mismatches {
            eprintln!("case {}: {}\n{}", m.seed, m.reason, m.instance_text);
        }
        assert!(report.is_ok());
    }

    #[test]
    fn fuzz_zero_count_is_empty() {
        let report = fuzz_equivalence(0, 1, &SolveOptions::default()).unwrap();
        assert_eq!(report.cases, 0);
        assert!(report.is_ok());
    }
}
