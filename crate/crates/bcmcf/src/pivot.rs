//! One simplex pivot: entering-edge selection, the two-cycle ratio
//! test, the strongly-feasible leaving-edge rule, and the basis/flow
//! update.
//!
//! A pivot augments flow around the cycle of the entering edge while
//! simultaneously counter-rotating the extra-edge cycle so the total
//! fee stays pinned at the budget. All step arithmetic is exact.

use std::collections::BTreeMap;

use num::{Signed, Zero};

use crate::basis::{
    adjusted_cost_fee, combined_numerator, cycle, BasisStructure, EdgeState, OrientedCycle,
    Potentials,
};
use crate::instance::Instance;
use crate::numerics::{rat_int, rat_make, sign, Rat};
use crate::preprocess::Flow;
use crate::{Error, Result};

/// Entering-edge pricing rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PivotRule {
    /// Largest violation |combined reduced cost|, ties to the lowest
    /// edge index.
    Dantzig,
    /// Lowest-index violating edge.
    FirstViolating,
}

/// A chosen entering edge and the size of its optimality violation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnteringChoice {
    pub edge: usize,
    /// True if entering from the upper bound (flow decreases on its
    /// cycle), false if entering from the lower bound.
    pub from_upper: bool,
    /// |combined reduced cost| of the edge, always positive.
    pub violation: Rat,
}

/// Which region of the two cycles holds the blocking edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeavingCase {
    /// All blocking edges lie on the entering cycle only.
    CeOnly,
    /// All blocking edges lie on the extra-edge cycle only.
    ExtraOnly,
    /// All blocking edges lie on the shared path of both cycles.
    Shared,
}

/// Outcome of the ratio test.
#[derive(Debug, Clone)]
pub struct RatioResult {
    /// Step length, >= 0 and always finite.
    pub delta: Rat,
    /// Nonzero per-edge flow-change coefficients, sorted by edge id.
    pub theta: Vec<(usize, Rat)>,
    /// Edges attaining the minimum ratio.
    pub blocking: Vec<usize>,
    pub case: LeavingCase,
    pub cycle_entering: OrientedCycle,
    pub cycle_extra: OrientedCycle,
}

/// Record of one applied pivot.
#[derive(Debug, Clone)]
pub struct PivotRecord {
    pub entering: usize,
    pub leaving: usize,
    pub delta: Rat,
    pub degenerate: bool,
    /// Exact change of the cost objective, always <= 0.
    pub objective_delta: Rat,
}

/// Picks an entering edge violating the optimality conditions, or None
/// at an optimum. Lower-bound edges violate with a negative combined
/// reduced cost, upper-bound edges with a positive one. Comparisons use
/// the shared-denominator numerators in 128-bit integers; ties go to
/// the lowest edge index across both bound sets. Zero-capacity edges
/// are never entered: their flow is pinned at 0 regardless.
pub fn select_entering(
    basis: &BasisStructure,
    pot: &Potentials,
    inst: &Instance,
    rule: PivotRule,
) -> Result<Option<EnteringChoice>> {
    let (chat_x, bhat_x) = adjusted_cost_fee(basis.extra, pot, inst);
    if bhat_x == 0 {
        return Err(Error::Corruption("extra edge has zero reduced fee".into()));
    }
    let mut best: Option<(i128, usize, bool)> = None; // (|numerator|, edge, from_upper)
    for (eid, state) in basis.state.iter().enumerate() {
        let from_upper = match state {
            EdgeState::Lower => false,
            EdgeState::Upper => true,
            _ => continue,
        };
        if inst.edges[eid].capacity == 0 {
            continue;
        }
        let (chat, bhat) = adjusted_cost_fee(eid, pot, inst);
        let num = combined_numerator(chat, bhat, chat_x, bhat_x)?;
        // Combined reduced cost = num / bhat_x; normalize to a positive
        // denominator so the sign test reads off the numerator.
        let signed = if bhat_x > 0 { num } else { -num };
        let violates = if from_upper { signed > 0 } else { signed < 0 };
        if !violates {
            continue;
        }
        match rule {
            PivotRule::FirstViolating => {
                return Ok(Some(EnteringChoice {
                    edge: eid,
                    from_upper,
                    violation: rat_make(num.abs(), (bhat_x as i128).abs())?,
                }));
            }
            PivotRule::Dantzig => {
                if best.is_none_or(|(v, _, _)| num.abs() > v) {
                    best = Some((num.abs(), eid, from_upper));
                }
            }
        }
    }
    Ok(best.map(|(v, edge, from_upper)| EnteringChoice {
        edge,
        from_upper,
        violation: rat_make(v, (bhat_x as i128).abs()).expect("nonzero denominator"),
    }))
}

/// Computes the flow-change coefficients theta over both cycles and the
/// largest feasible step. For each edge, theta = s * (chi_entering -
/// (b^_e / b^_extra) * chi_extra) with s = +1 from the lower bound and
/// -1 from the upper bound; the per-edge bound is -x/theta for negative
/// theta and (u - x)/theta for positive theta.
pub fn ratio_test(
    basis: &BasisStructure,
    pot: &Potentials,
    flow: &Flow,
    entering: &EnteringChoice,
    inst: &Instance,
) -> Result<RatioResult> {
    let cycle_entering = cycle(entering.edge, basis, inst)?;
    let cycle_extra = cycle(basis.extra, basis, inst)?;
    let (_, bhat_e) = adjusted_cost_fee(entering.edge, pot, inst);
    let (_, bhat_x) = adjusted_cost_fee(basis.extra, pot, inst);
    if bhat_x == 0 {
        return Err(Error::Corruption("extra edge has zero reduced fee".into()));
    }
    let ratio = rat_make(bhat_e, bhat_x)?;
    let s = if entering.from_upper {
        rat_int(-1)
    } else {
        rat_int(1)
    };

    let mut theta: BTreeMap<usize, Rat> = BTreeMap::new();
    for &(eid, fwd) in &cycle_entering.edges {
        let chi = if fwd { rat_int(1) } else { rat_int(-1) };
        *theta.entry(eid).or_insert_with(Rat::zero) += &s * chi;
    }
    for &(eid, fwd) in &cycle_extra.edges {
        let chi = if fwd { rat_int(1) } else { rat_int(-1) };
        *theta.entry(eid).or_insert_with(Rat::zero) -= &s * &ratio * chi;
    }
    theta.retain(|_, t| !t.is_zero());

    let mut delta: Option<Rat> = None;
    for (&eid, t) in &theta {
        let x = &flow.values[eid];
        let bound = if t.is_positive() {
            (rat_int(inst.edges[eid].capacity as i64) - x) / t
        } else {
            -x / t
        };
        if bound.is_negative() {
            return Err(Error::Corruption(format!(
                "negative ratio bound on edge {eid}: flow outside its bounds"
            )));
        }
        if delta.as_ref().is_none_or(|d| bound < *d) {
            delta = Some(bound);
        }
    }
    let delta = delta.ok_or_else(|| {
        Error::Corruption("ratio test found no bounded edge on either cycle".into())
    })?;

    let mut blocking = Vec::new();
    for (&eid, t) in &theta {
        let x = &flow.values[eid];
        let bound = if t.is_positive() {
            (rat_int(inst.edges[eid].capacity as i64) - x) / t
        } else {
            -x / t
        };
        if bound == delta {
            blocking.push(eid);
        }
    }
    let case = classify_blocking(&blocking, &cycle_entering, &cycle_extra)?;
    Ok(RatioResult {
        delta,
        theta: theta.into_iter().collect(),
        blocking,
        case,
        cycle_entering,
        cycle_extra,
    })
}

/// Classifies the blocking set against the three disjoint cycle
/// regions; a blocking set spanning two regions indicates a broken
/// basis and is reported as corruption.
fn classify_blocking(
    blocking: &[usize],
    cycle_entering: &OrientedCycle,
    cycle_extra: &OrientedCycle,
) -> Result<LeavingCase> {
    let mut case: Option<LeavingCase> = None;
    for &eid in blocking {
        let on_e = cycle_entering.contains(eid);
        let on_x = cycle_extra.contains(eid);
        let c = match (on_e, on_x) {
            (true, false) => LeavingCase::CeOnly,
            (false, true) => LeavingCase::ExtraOnly,
            (true, true) => LeavingCase::Shared,
            (false, false) => {
                return Err(Error::Corruption(format!(
                    "blocking edge {eid} lies on neither cycle"
                )))
            }
        };
        match case {
            None => case = Some(c),
            Some(prev) if prev == c => {}
            Some(prev) => {
                return Err(Error::Corruption(format!(
                    "blocking edges span two cycle regions ({prev:?} and {c:?})"
                )))
            }
        }
    }
    case.ok_or_else(|| Error::Corruption("empty blocking set".into()))
}

/// Strongly-feasible leaving rule: traverse the cycle holding the
/// blocking edges, starting at its apex and following the direction of
/// the flow change, and take the last blocking edge encountered.
pub fn select_leaving(ratio: &RatioResult) -> Result<usize> {
    let traversed = match ratio.case {
        LeavingCase::ExtraOnly => &ratio.cycle_extra,
        _ => &ratio.cycle_entering,
    };
    let rep = ratio.blocking[0];
    let theta_rep = ratio
        .theta
        .iter()
        .find(|(eid, _)| *eid == rep)
        .map(|(_, t)| t)
        .expect("blocking edge has nonzero theta");
    let dir = sign(theta_rep) * traversed.indicator(rep);
    debug_assert_ne!(dir, 0);
    // All blocking edges in one region share the same flow-change
    // direction relative to the traversal.
    debug_assert!(ratio.blocking.iter().all(|&b| {
        let t = &ratio.theta.iter().find(|(eid, _)| *eid == b).unwrap().1;
        sign(t) * traversed.indicator(b) == dir
    }));
    let mut last = None;
    let order: Vec<usize> = if dir > 0 {
        traversed.edges.iter().map(|&(eid, _)| eid).collect()
    } else {
        traversed.edges.iter().rev().map(|&(eid, _)| eid).collect()
    };
    for eid in order {
        if ratio.blocking.contains(&eid) {
            last = Some(eid);
        }
    }
    last.ok_or_else(|| Error::Corruption("no blocking edge on the traversed cycle".into()))
}

/// Applies one pivot: shifts the flow by delta along theta and updates
/// the basis partition by the three structural cases (entering swaps
/// bounds; the extra edge leaves; a tree edge leaves). Rebuilds the
/// tree index; the caller recomputes potentials.
pub fn apply_pivot(
    basis: &mut BasisStructure,
    flow: &mut Flow,
    entering: &EnteringChoice,
    leaving: usize,
    ratio: &RatioResult,
    inst: &Instance,
) -> Result<PivotRecord> {
    let mut objective_delta = Rat::zero();
    for (eid, t) in &ratio.theta {
        let step = &ratio.delta * t;
        objective_delta += &step * rat_int(inst.edges[*eid].cost);
        flow.values[*eid] += step;
    }
    if objective_delta.is_positive() {
        return Err(Error::Corruption("pivot increased the objective".into()));
    }

    // New bound state of the leaving edge, decided by its updated flow.
    let bound_state = |eid: usize| -> Result<EdgeState> {
        let x = &flow.values[eid];
        if x.is_zero() {
            Ok(EdgeState::Lower)
        } else if *x == rat_int(inst.edges[eid].capacity as i64) {
            Ok(EdgeState::Upper)
        } else {
            Err(Error::Corruption(format!(
                "leaving edge {eid} is strictly between its bounds"
            )))
        }
    };

    if leaving == entering.edge {
        // The entering edge traverses its whole span and swaps bounds.
        basis.state[entering.edge] = bound_state(entering.edge)?;
    } else if leaving == basis.extra {
        basis.state[leaving] = bound_state(leaving)?;
        basis.state[entering.edge] = EdgeState::Extra;
        basis.extra = entering.edge;
    } else {
        if basis.state[leaving] != EdgeState::Tree {
            return Err(Error::Corruption(format!(
                "leaving edge {leaving} is neither entering, extra, nor a tree edge"
            )));
        }
        if ratio.cycle_entering.contains(leaving) {
            basis.state[leaving] = bound_state(leaving)?;
            basis.state[entering.edge] = EdgeState::Tree;
        } else {
            // The leaving edge sits on the extra cycle only: the old
            // extra edge takes its tree slot and the entering edge
            // becomes the new extra edge.
            basis.state[leaving] = bound_state(leaving)?;
            basis.state[basis.extra] = EdgeState::Tree;
            basis.state[entering.edge] = EdgeState::Extra;
            basis.extra = entering.edge;
        }
        basis.rebuild_index(inst)?;
    }

    // The new extra-edge cycle must keep a nonzero total fee.
    let cyc = cycle(basis.extra, basis, inst)?;
    if cyc.fee(inst)? == 0 {
        return Err(Error::Corruption(
            "extra-edge cycle has zero total fee after pivot".into(),
        ));
    }

    let degenerate = ratio.delta.is_zero();
    if degenerate != objective_delta.is_zero() {
        return Err(Error::Corruption(
            "objective change inconsistent with degeneracy flag".into(),
        ));
    }
    Ok(PivotRecord {
        entering: entering.edge,
        leaving,
        delta: ratio.delta.clone(),
        degenerate,
        objective_delta,
    })
}
