//! Full solve pipeline: budget gate, half-integral budget shift,
//! strongly feasible cold-start basis, the pivot loop with anti-cycling
//! monitors, restoration of the original-budget optimum, and an
//! independently checkable optimality certificate.

use num::{Signed, Zero};

use crate::basis::{
    adjusted_cost_fee, basic_solution, compute_potentials, cycle, reduced_costs,
    strong_feasibility_check, BasisStructure, EdgeState, Potentials,
};
use crate::instance::{augment_strong_connectivity, validate, Edge, Instance};
use crate::numerics::{format_rat, is_integral, parse_rat, rat_int, rat_make, Rat};
use crate::pivot::{apply_pivot, ratio_test, select_entering, select_leaving, PivotRule};
use crate::preprocess::Flow;
use crate::preprocess::{budget_gate, has_negative_residual_cycle, min_cost_circulation, Gate};
use crate::{Error, Result};

/// Solver options.
#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub rule: PivotRule,
    /// Collect a one-line-per-pivot trace in the report.
    pub trace: bool,
    /// Run deep structural checks after every pivot (slow; meant for
    /// verification runs).
    pub paranoid: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            rule: PivotRule::Dantzig,
            trace: false,
            paranoid: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    /// Solved by the simplex with the budget constraint binding.
    Optimal,
    /// The budget-free optimum already fit the budget.
    OptimalViaBudgetGate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PivotStats {
    pub total: u64,
    pub degenerate: u64,
    pub nondegenerate: u64,
    pub max_consecutive_degenerate: u64,
}

/// Snapshot sufficient to re-verify optimality without trusting the
/// solver run that produced it.
#[derive(Debug, Clone, PartialEq)]
pub enum Certificate {
    /// Optimality via absence of negative-cost residual cycles plus fee
    /// within budget.
    BudgetGate,
    /// Final basis over the working (artificially extended) instance,
    /// its potentials, and the combined reduced cost of every edge.
    Basis {
        state: Vec<EdgeState>,
        extra: usize,
        root: usize,
        pi: Vec<i64>,
        mu: Vec<i64>,
        combined: Vec<Rat>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub status: SolveStatus,
    /// Exact optimal cost; always <= 0 (the zero flow is feasible).
    pub objective: Rat,
    /// Flow on the original edges only.
    pub flow: Flow,
    pub budget_used: Rat,
    pub pivots: PivotStats,
    pub certificate: Certificate,
    /// One line per pivot when tracing was requested, else empty.
    pub trace: Vec<String>,
}

/// Shifts an integral budget by one half. Every basic solution of the
/// shifted problem must route a fractional amount around the extra-edge
/// cycle, which keeps all other flows integral and drives the
/// anti-cycling argument.
pub fn transform_budget(budget: u64) -> Rat {
    rat_int(budget as i64) + rat_make(1, 2).expect("nonzero denominator")
}

/// Builds the working instance for the simplex phase: the (already
/// connectivity-augmented) instance plus a two-edge artificial gadget
/// between nodes 1 and 2 whose cycle carries fee 2B + 1, plus fallback
/// tree edges for nodes that cannot reach node 2 through positive-
/// capacity edges avoiding node 1. Returns the instance, the edge
/// states of the cold-start basis, and the gadget edge ids.
fn build_working_state(aug: &Instance, budget: u64) -> Result<(Instance, Vec<EdgeState>)> {
    if aug.node_count < 2 {
        return Err(Error::Invalid("need at least 2 nodes".into()));
    }
    let mut work = aug.clone();
    // All artificial edges cost 1 + n*C: any cycle through one then has
    // strictly positive total cost, so no optimum can afford them. (A
    // unit cost would not be enough: a cheap original (1,2) edge plus
    // the reverse gadget edge can form a profitable budget-burning
    // cycle.)
    let big_cost = 1 + (aug.node_count as i64) * aug.max_abs_cost();
    let e0 = work.edges.len();
    work.artificial_edge_ids.insert(e0);
    work.edges.push(Edge {
        tail: 1,
        head: 2,
        capacity: 1,
        cost: big_cost,
        fee: budget,
    });
    let e0p = work.edges.len();
    work.artificial_edge_ids.insert(e0p);
    let fee0p = budget
        .checked_add(1)
        .ok_or_else(|| Error::Overflow("budget + 1 exceeds u64".into()))?;
    work.edges.push(Edge {
        tail: 2,
        head: 1,
        capacity: 1,
        cost: big_cost,
        fee: fee0p,
    });

    let mut state = vec![EdgeState::Lower; work.edges.len()];
    state[e0] = EdgeState::Tree;
    state[e0p] = EdgeState::Extra;

    // Directed in-tree of V \ {1} rooted at node 2, over positive-
    // capacity edges only: walk reversed edges from node 2, assigning
    // each reached node the tree edge pointing toward its parent. The
    // positive-capacity restriction keeps the start strongly feasible
    // (all in-tree edges point toward the root and carry zero flow).
    let n = work.node_count;
    let inc = work.in_edges();
    let mut seen = vec![false; n + 1];
    seen[1] = true;
    seen[2] = true;
    let mut stack = vec![2usize];
    while let Some(v) = stack.pop() {
        for &eid in &inc[v] {
            let e = &work.edges[eid];
            if e.capacity == 0 || seen[e.tail] || e.tail == 1 {
                continue;
            }
            seen[e.tail] = true;
            state[eid] = EdgeState::Tree;
            stack.push(e.tail);
        }
    }
    // Nodes with no usable path to node 2 get a fallback tree edge too
    // expensive for any optimum to touch.
    for v in (3..=n).filter(|&v| !seen[v]) {
        let id = work.edges.len();
        work.artificial_edge_ids.insert(id);
        work.edges.push(Edge {
            tail: v,
            head: 2,
            capacity: 1,
            cost: big_cost,
            fee: 0,
        });
        state.push(EdgeState::Tree);
    }
    Ok((work, state))
}

/// Cold-start basis: the artificial gadget carries 1/2 on each of its
/// two edges (pinning the fee at B + 1/2), every other edge is at zero,
/// and the basis is strongly feasible with root 1.
pub fn initial_basis(aug: &Instance, budget: u64) -> Result<(Instance, BasisStructure, Flow)> {
    let (work, state) = build_working_state(aug, budget)?;
    let basis = BasisStructure::new(&work, state, 1)?;
    let (flow, feasible) = basic_solution(&basis, &work, &transform_budget(budget))?;
    if !feasible {
        return Err(Error::Corruption(
            "cold-start basic solution out of bounds".into(),
        ));
    }
    if !strong_feasibility_check(&basis, &flow, &work) {
        return Err(Error::Corruption(
            "cold-start basis is not strongly feasible".into(),
        ));
    }
    Ok((work, basis, flow))
}

/// Anti-cycling potential: sum over nodes of pi_v - (c^_extra /
/// b^_extra) * mu_v. A degenerate pivot keeps the extra edge and its
/// cycle in place and shifts the potentials of the re-hung subtree by
/// (+-c^_e, +-b^_e), so this sum changes by a nonzero multiple of the
/// entering edge's combined reduced cost: it strictly decreases across
/// every degenerate pivot.
fn phi(pot: &Potentials, basis: &BasisStructure, inst: &Instance) -> Result<Rat> {
    let (chat_x, bhat_x) = adjusted_cost_fee(basis.extra, pot, inst);
    if bhat_x == 0 {
        return Err(Error::Corruption("extra edge has zero reduced fee".into()));
    }
    let ratio = rat_make(chat_x, bhat_x)?;
    let mut total = Rat::zero();
    for v in 1..=inst.node_count {
        total += rat_int(pot.pi[v]) - &ratio * rat_int(pot.mu[v]);
    }
    Ok(total)
}

/// Deep per-pivot structural checks, enabled by `SolveOptions::paranoid`.
fn paranoid_check(
    basis: &BasisStructure,
    pot: &Potentials,
    flow: &Flow,
    work: &Instance,
    budget_t: &Rat,
) -> Result<()> {
    let fail = |msg: &str| Err(Error::Corruption(format!("paranoid check failed: {msg}")));
    if flow.fee(work) != *budget_t {
        return fail("total fee drifted off the transformed budget");
    }
    if !flow.within_bounds(work) {
        return fail("flow violates capacity bounds");
    }
    if !flow.is_circulation(work) {
        return fail("nonzero excess");
    }
    if !strong_feasibility_check(basis, flow, work) {
        return fail("strong feasibility lost");
    }
    let cyc = cycle(basis.extra, basis, work)?;
    for (i, v) in flow.values.iter().enumerate() {
        if cyc.contains(i) {
            if is_integral(v) {
                return fail("integral flow on an extra-cycle edge");
            }
        } else if !is_integral(v) {
            return fail("fractional flow off the extra cycle");
        }
    }
    // Every value is an integer multiple of 1 / (2 * |b(C(extra))|).
    let granuality = rat_int(2 * cyc.fee(work)?.abs());
    for v in &flow.values {
        if !is_integral(&(v * &granuality)) {
            return fail("flow value off the 1/(2*b(C)) grid");
        }
    }
    // Potentials are short signed sums of tree edge weights.
    let n = work.node_count as i64;
    let c_bound = n * work.max_abs_cost();
    let b_bound = (n as i128) * (work.max_fee() as i128);
    for v in 1..=work.node_count {
        if pot.pi[v].abs() > c_bound || (pot.mu[v] as i128).abs() > b_bound {
            return fail("node potential out of its structural bound");
        }
    }
    Ok(())
}

/// Shifts the optimal transformed-budget flow back to the integral
/// budget: one move of -1/2 fee units around the extra-edge cycle. The
/// optimality certificate is unaffected (only tree/extra flows change,
/// and they stay strictly inside their bounds).
pub fn restore_original(
    basis: &BasisStructure,
    flow: &Flow,
    work: &Instance,
    budget: u64,
) -> Result<Flow> {
    let cyc = cycle(basis.extra, basis, work)?;
    let cycle_fee = cyc.fee(work)?;
    if cycle_fee == 0 {
        return Err(Error::Corruption(
            "extra-edge cycle has zero total fee".into(),
        ));
    }
    let delta = rat_make(-1i64, 2 * cycle_fee)?;
    let mut out = flow.clone();
    for &(eid, fwd) in &cyc.edges {
        if fwd {
            out.values[eid] += &delta;
        } else {
            out.values[eid] -= &delta;
        }
    }
    if !out.within_bounds(work) {
        return Err(Error::Corruption(
            "budget restoration pushed a flow out of bounds".into(),
        ));
    }
    if out.fee(work) != rat_int(budget as i64) {
        return Err(Error::Corruption(
            "restored flow misses the original budget".into(),
        ));
    }
    Ok(out)
}

/// Runs the full pipeline and returns a certified report.
pub fn solve(inst: &Instance, options: &SolveOptions) -> Result<SolveReport> {
    let report = validate(inst);
    if !report.is_ok() {
        return Err(Error::Invalid(report.violations.join("; ")));
    }
    let aug = augment_strong_connectivity(inst);
    let mcc = min_cost_circulation(&aug)?;
    if let Gate::Done(flow) = budget_gate(&aug, &mcc)? {
        for &i in &aug.artificial_edge_ids {
            if !flow.values[i].is_zero() {
                return Err(Error::Corruption(
                    "budget-free optimum routes flow on an artificial edge".into(),
                ));
            }
        }
        let original = Flow {
            values: flow.values[..inst.edge_count()].to_vec(),
        };
        let objective = original.cost(inst);
        let budget_used = original.fee(inst);
        return Ok(SolveReport {
            status: SolveStatus::OptimalViaBudgetGate,
            objective,
            flow: original,
            budget_used,
            pivots: PivotStats::default(),
            certificate: Certificate::BudgetGate,
            trace: Vec::new(),
        });
    }

    let budget_t = transform_budget(inst.budget);
    let (work, mut basis, mut flow) = initial_basis(&aug, inst.budget)?;
    let mut pot = compute_potentials(&basis, &work)?;
    let mut phi_prev = phi(&pot, &basis, &work)?;
    let mut stats = PivotStats::default();
    let mut consecutive_degenerate = 0u64;
    let mut trace = Vec::new();
    // Safety cap: a correct run terminates far below n^3 * C * (B+1) * m
    // pivots; hitting the cap means an implementation bug, not a hard
    // instance.
    let cap = (work.node_count as u128)
        .saturating_pow(3)
        .saturating_mul(work.max_abs_cost().max(1) as u128)
        .saturating_mul(inst.budget as u128 + 1)
        .saturating_mul(work.edge_count() as u128);

    while let Some(entering) = select_entering(&basis, &pot, &work, options.rule)? {
        let ratio = ratio_test(&basis, &pot, &flow, &entering, &work)?;
        let leaving = select_leaving(&ratio)?;
        let extra_before = basis.extra;
        let rec = apply_pivot(&mut basis, &mut flow, &entering, leaving, &ratio, &work)?;
        pot = compute_potentials(&basis, &work)?;

        stats.total += 1;
        if rec.degenerate {
            stats.degenerate += 1;
            consecutive_degenerate += 1;
            stats.max_consecutive_degenerate =
                stats.max_consecutive_degenerate.max(consecutive_degenerate);
        } else {
            stats.nondegenerate += 1;
            consecutive_degenerate = 0;
        }
        let phi_now = phi(&pot, &basis, &work)?;
        if rec.degenerate && basis.extra == extra_before && phi_now >= phi_prev {
            return Err(Error::Corruption(format!(
                "anti-cycling monitor failed at pivot {}: potential did not decrease \
                 across a degenerate pivot",
                stats.total
            )));
        }
        phi_prev = phi_now;
        if options.trace {
            trace.push(format!(
                "pivot {}: enter {} leave {} delta {} degenerate {} objective {}",
                stats.total,
                rec.entering,
                rec.leaving,
                format_rat(&rec.delta),
                rec.degenerate,
                format_rat(&flow.cost(&work)),
            ));
        }
        if options.paranoid {
            paranoid_check(&basis, &pot, &flow, &work, &budget_t)?;
        }
        if (stats.total as u128) > cap {
            return Err(Error::Corruption(format!(
                "pivot safety cap {cap} exceeded after {} pivots",
                stats.total
            )));
        }
    }

    let restored = restore_original(&basis, &flow, &work, inst.budget)?;
    for &i in &work.artificial_edge_ids {
        if !restored.values[i].is_zero() {
            return Err(Error::Corruption(format!(
                "artificial edge {i} carries nonzero flow in the final solution"
            )));
        }
    }
    let mut combined = Vec::with_capacity(work.edge_count());
    for eid in 0..work.edge_count() {
        combined.push(reduced_costs(eid, &pot, &basis, &work)?.combined);
    }
    let original = Flow {
        values: restored.values[..inst.edge_count()].to_vec(),
    };
    let objective = original.cost(inst);
    if objective.is_positive() {
        return Err(Error::Corruption(
            "positive objective at claimed optimum".into(),
        ));
    }
    let budget_used = original.fee(inst);
    Ok(SolveReport {
        status: SolveStatus::Optimal,
        objective,
        flow: original,
        budget_used,
        pivots: stats,
        certificate: Certificate::Basis {
            state: basis.state.clone(),
            extra: basis.extra,
            root: basis.root,
            pi: pot.pi.clone(),
            mu: pot.mu.clone(),
            combined,
        },
        trace,
    })
}

/// Independently re-verifies a report against the instance: rebuilds
/// the working instance, recomputes potentials and reduced costs from
/// the basis snapshot, and checks the sign conditions, feasibility, and
/// the exact budget. Returns false (never panics) on any mismatch.
pub fn certify(report: &SolveReport, inst: &Instance) -> bool {
    certify_inner(report, inst).unwrap_or(false)
}

fn certify_inner(report: &SolveReport, inst: &Instance) -> Result<bool> {
    if report.flow.values.len() != inst.edge_count() {
        return Ok(false);
    }
    if !report.flow.within_bounds(inst)
        || !report.flow.is_circulation(inst)
        || report.flow.cost(inst) != report.objective
        || report.flow.fee(inst) != report.budget_used
        || report.objective.is_positive()
    {
        return Ok(false);
    }
    match &report.certificate {
        Certificate::BudgetGate => {
            let budget = rat_int(inst.budget as i64);
            Ok(report.flow.is_integral()
                && report.budget_used <= budget
                && !has_negative_residual_cycle(inst, &report.flow))
        }
        Certificate::Basis {
            state,
            extra,
            root,
            pi,
            mu,
            combined,
        } => {
            let aug = augment_strong_connectivity(inst);
            let (work, _) = build_working_state(&aug, inst.budget)?;
            if state.len() != work.edge_count()
                || combined.len() != work.edge_count()
                || pi.len() != work.node_count + 1
                || mu.len() != work.node_count + 1
            {
                return Ok(false);
            }
            if report.budget_used != rat_int(inst.budget as i64) {
                return Ok(false);
            }
            let basis = match BasisStructure::new(&work, state.clone(), *root) {
                Ok(b) => b,
                Err(_) => return Ok(false),
            };
            if basis.extra != *extra {
                return Ok(false);
            }
            let pot = compute_potentials(&basis, &work)?;
            if &pot.pi != pi || &pot.mu != mu {
                return Ok(false);
            }
            let mut full = report.flow.clone();
            full.values.resize(work.edge_count(), Rat::zero());
            for (eid, s) in state.iter().enumerate() {
                let rc = reduced_costs(eid, &pot, &basis, &work)?;
                if rc.combined != combined[eid] {
                    return Ok(false);
                }
                let x = &full.values[eid];
                let ok = match s {
                    EdgeState::Lower => {
                        x.is_zero() && (work.edges[eid].capacity == 0 || !rc.combined.is_negative())
                    }
                    EdgeState::Upper => {
                        *x == rat_int(work.edges[eid].capacity as i64)
                            && (work.edges[eid].capacity == 0 || !rc.combined.is_positive())
                    }
                    EdgeState::Tree | EdgeState::Extra => rc.combined.is_zero(),
                };
                if !ok {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

fn state_char(s: EdgeState) -> char {
    match s {
        EdgeState::Lower => 'L',
        EdgeState::Tree => 'T',
        EdgeState::Upper => 'U',
        EdgeState::Extra => 'X',
    }
}

fn state_from_char(c: char) -> Result<EdgeState> {
    match c {
        'L' => Ok(EdgeState::Lower),
        'T' => Ok(EdgeState::Tree),
        'U' => Ok(EdgeState::Upper),
        'X' => Ok(EdgeState::Extra),
        other => Err(Error::Invalid(format!("bad basis state char {other:?}"))),
    }
}

/// Serializes a report (without the trace) as JSON.
pub fn report_to_json(report: &SolveReport) -> serde_json::Value {
    let status = match report.status {
        SolveStatus::Optimal => "optimal",
        SolveStatus::OptimalViaBudgetGate => "optimal_via_budget_gate",
    };
    let flow: Vec<serde_json::Value> = report
        .flow
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| serde_json::json!({ "edge": i, "value": format_rat(v) }))
        .collect();
    let certificate = match &report.certificate {
        Certificate::BudgetGate => serde_json::json!({ "type": "budget_gate" }),
        Certificate::Basis {
            state,
            extra,
            root,
            pi,
            mu,
            combined,
        } => serde_json::json!({
            "type": "basis",
            "state": state.iter().map(|s| state_char(*s)).collect::<String>(),
            "extra": extra,
            "root": root,
            "pi": pi,
            "mu": mu,
            "dhat": combined.iter().map(format_rat).collect::<Vec<_>>(),
        }),
    };
    serde_json::json!({
        "status": status,
        "objective": format_rat(&report.objective),
        "flow": flow,
        "budget_used": format_rat(&report.budget_used),
        "pivots": {
            "total": report.pivots.total,
            "degenerate": report.pivots.degenerate,
            "nondegenerate": report.pivots.nondegenerate,
            "max_consecutive_degenerate": report.pivots.max_consecutive_degenerate,
        },
        "certificate": certificate,
    })
}

/// Parses a report serialized by [`report_to_json`].
pub fn report_from_json(text: &str) -> Result<SolveReport> {
    let v: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("bad JSON: {e}")))?;
    let bad = |what: &str| Error::Invalid(format!("report JSON: missing or bad {what}"));
    let status = match v["status"].as_str().ok_or_else(|| bad("status"))? {
        "optimal" => SolveStatus::Optimal,
        "optimal_via_budget_gate" => SolveStatus::OptimalViaBudgetGate,
        other => return Err(Error::Invalid(format!("unknown status {other:?}"))),
    };
    let objective = parse_rat(v["objective"].as_str().ok_or_else(|| bad("objective"))?)?;
    let budget_used = parse_rat(
        v["budget_used"]
            .as_str()
            .ok_or_else(|| bad("budget_used"))?,
    )?;
    let flow_arr = v["flow"].as_array().ok_or_else(|| bad("flow"))?;
    let mut values = vec![Rat::zero(); flow_arr.len()];
    for item in flow_arr {
        let edge = item["edge"]
            .as_u64()
            .ok_or_else(|| bad("flow edge index"))? as usize;
        if edge >= values.len() {
            return Err(bad("flow edge index"));
        }
        values[edge] = parse_rat(item["value"].as_str().ok_or_else(|| bad("flow value"))?)?;
    }
    let p = &v["pivots"];
    let count = |k: &str| p[k].as_u64().ok_or_else(|| bad("pivot counter"));
    let pivots = PivotStats {
        total: count("total")?,
        degenerate: count("degenerate")?,
        nondegenerate: count("nondegenerate")?,
        max_consecutive_degenerate: count("max_consecutive_degenerate")?,
    };
    let cert = &v["certificate"];
    let certificate = match cert["type"]
        .as_str()
        .ok_or_else(|| bad("certificate type"))?
    {
        "budget_gate" => Certificate::BudgetGate,
        "basis" => {
            let state = cert["state"]
                .as_str()
                .ok_or_else(|| bad("certificate state"))?
                .chars()
                .map(state_from_char)
                .collect::<Result<Vec<_>>>()?;
            let ints = |k: &str| -> Result<Vec<i64>> {
                cert[k]
                    .as_array()
                    .ok_or_else(|| bad("certificate potentials"))?
                    .iter()
                    .map(|x| x.as_i64().ok_or_else(|| bad("potential entry")))
                    .collect()
            };
            let combined = cert["dhat"]
                .as_array()
                .ok_or_else(|| bad("certificate dhat"))?
                .iter()
                .map(|x| parse_rat(x.as_str().ok_or_else(|| bad("dhat entry"))?))
                .collect::<Result<Vec<_>>>()?;
            Certificate::Basis {
                state,
                extra: cert["extra"]
                    .as_u64()
                    .ok_or_else(|| bad("certificate extra"))? as usize,
                root: cert["root"]
                    .as_u64()
                    .ok_or_else(|| bad("certificate root"))? as usize,
                pi: ints("pi")?,
                mu: ints("mu")?,
                combined,
            }
        }
        other => {
            return Err(Error::Invalid(format!(
                "unknown certificate type {other:?}"
            )))
        }
    };
    Ok(SolveReport {
        status,
        objective,
        flow: Flow { values },
        budget_used,
        pivots,
        certificate,
        trace: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::parse_instance;

    const MICRO1: &str = "p bcmcf 2 2 6\na 1 2 10 -2 1\na 2 1 10 0 1\n";
    const MICRO2: &str = "p bcmcf 2 2 20\na 1 2 10 -2 1\na 2 1 10 0 1\n";

    #[test]
    fn budget_shift_examples() {
        assert_eq!(transform_budget(6), rat_make(13, 2).unwrap());
        assert_eq!(transform_budget(0), rat_make(1, 2).unwrap());
        assert_eq!(transform_budget(1_000_000), rat_make(2_000_001, 2).unwrap());
    }

    #[test]
    fn cold_start_on_micro1() {
        let inst = parse_instance(MICRO1).unwrap();
        let aug = augment_strong_connectivity(&inst);
        let (work, basis, flow) = initial_basis(&aug, 6).unwrap();
        assert_eq!(work.edge_count(), 4);
        assert_eq!(work.edges[2].fee, 6);
        assert_eq!(work.edges[3].fee, 7);
        assert_eq!(basis.state[2], EdgeState::Tree);
        assert_eq!(basis.extra, 3);
        assert_eq!(basis.state[0], EdgeState::Lower);
        assert_eq!(basis.state[1], EdgeState::Lower);
        let half = rat_make(1, 2).unwrap();
        assert_eq!(
            flow.values,
            vec![Rat::zero(), Rat::zero(), half.clone(), half]
        );
        assert_eq!(flow.fee(&work), rat_make(13, 2).unwrap());
        // Both gadget edges cost 1 + n*C = 5 here: initial objective 5.
        assert_eq!(work.edges[2].cost, 5);
        assert_eq!(flow.cost(&work), rat_int(5));
    }

    #[test]
    fn cold_start_adds_fallback_tree_edges() {
        // Node 3 has no positive-capacity path to node 2 that avoids
        // node 1, so it gets a fallback edge into the tree.
        let inst =
            parse_instance("p bcmcf 3 3 0\na 1 2 5 -1 1\na 2 1 5 0 1\na 3 1 0 0 0\n").unwrap();
        let aug = augment_strong_connectivity(&inst);
        let (work, basis, flow) = initial_basis(&aug, 0).unwrap();
        let fallback = work.edge_count() - 1;
        assert_eq!(work.edges[fallback].tail, 3);
        assert_eq!(work.edges[fallback].head, 2);
        assert_eq!(work.edges[fallback].fee, 0);
        assert_eq!(basis.state[fallback], EdgeState::Tree);
        assert!(flow.values[fallback].is_zero());
        assert!(strong_feasibility_check(&basis, &flow, &work));
    }

    #[test]
    fn solve_micro1() {
        let inst = parse_instance(MICRO1).unwrap();
        let report = solve(&inst, &SolveOptions::default()).unwrap();
        assert_eq!(report.status, SolveStatus::Optimal);
        assert_eq!(report.objective, rat_int(-6));
        assert_eq!(report.flow.values, vec![rat_int(3), rat_int(3)]);
        assert_eq!(report.budget_used, rat_int(6));
        assert_eq!(
            report.pivots.total,
            report.pivots.degenerate + report.pivots.nondegenerate
        );
        assert!(certify(&report, &inst));
    }

    #[test]
    fn solve_micro2_via_gate() {
        let inst = parse_instance(MICRO2).unwrap();
        let report = solve(&inst, &SolveOptions::default()).unwrap();
        assert_eq!(report.status, SolveStatus::OptimalViaBudgetGate);
        assert_eq!(report.objective, rat_int(-20));
        assert_eq!(report.pivots.total, 0);
        assert!(certify(&report, &inst));
    }

    #[test]
    fn solve_all_positive_costs() {
        let inst =
            parse_instance("p bcmcf 3 3 5\na 1 2 5 1 1\na 2 3 5 2 1\na 3 1 5 3 1\n").unwrap();
        let report = solve(&inst, &SolveOptions::default()).unwrap();
        assert!(report.objective.is_zero());
        assert!(report.flow.values.iter().all(Zero::is_zero));
        assert!(certify(&report, &inst));
    }

    #[test]
    fn solve_is_deterministic() {
        let inst = crate::instance::generate_with_edge_count(4, 8, 5, 5, 3, (1, 2), 11).unwrap();
        let opts = SolveOptions {
            trace: true,
            ..Default::default()
        };
        let a = solve(&inst, &opts).unwrap();
        let b = solve(&inst, &opts).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.trace, b.trace);
    }

    #[test]
    fn restore_shifts_half_fee_unit() {
        // Extra cycle with total fee 2: restoring from budget 13/2 to 6
        // moves each cycle flow by -1/4.
        let inst = parse_instance(MICRO1).unwrap();
        let basis = BasisStructure::new(&inst, vec![EdgeState::Extra, EdgeState::Tree], 1).unwrap();
        let (flow, _) = basic_solution(&basis, &inst, &rat_make(13, 2).unwrap()).unwrap();
        assert_eq!(
            flow.values,
            vec![rat_make(13, 4).unwrap(), rat_make(13, 4).unwrap()]
        );
        let restored = restore_original(&basis, &flow, &inst, 6).unwrap();
        assert_eq!(restored.values, vec![rat_int(3), rat_int(3)]);
        assert_eq!(restored.fee(&inst), rat_int(6));
    }

    #[test]
    fn certify_rejects_tampered_reports() {
        let inst = parse_instance(MICRO1).unwrap();
        let report = solve(&inst, &SolveOptions::default()).unwrap();
        assert!(certify(&report, &inst));

        let mut worse = report.clone();
        worse.objective = rat_int(-7);
        assert!(!certify(&worse, &inst));

        let mut off_budget = report.clone();
        off_budget.flow.values[0] = rat_int(4);
        assert!(!certify(&off_budget, &inst));

        let mut bad_cert = report.clone();
        if let Certificate::Basis { combined, .. } = &mut bad_cert.certificate {
            combined[0] = rat_int(-1);
            assert!(!certify(&bad_cert, &inst));
        }
    }

    #[test]
    fn report_json_round_trip() {
        for source in [MICRO1, MICRO2] {
            let i = parse_instance(source).unwrap();
            let report = solve(&i, &SolveOptions::default()).unwrap();
            let json = report_to_json(&report).to_string();
            let back = report_from_json(&json).unwrap();
            assert_eq!(back, report);
            assert!(certify(&back, &i));
        }
    }

    #[test]
    fn paranoid_mode_passes_on_random_instances() {
        for seed in 0..10u64 {
            let inst =
                crate::instance::generate_with_edge_count(5, 9, 5, 5, 3, (1, 2), seed).unwrap();
            let opts = SolveOptions {
                paranoid: true,
                ..Default::default()
            };
            let report = solve(&inst, &opts).unwrap();
            assert!(certify(&report, &inst), "seed {seed}");
        }
    }
}
