//! Basis structures for the budget-constrained network simplex: the
//! partition (L, T, U, extra edge), the rooted-tree index, the two
//! integral node potentials, cycles closed by non-tree edges, the three
//! kinds of reduced costs, and basic-solution computation.

use num::{Signed, Zero};

use crate::instance::Instance;
use crate::numerics::{fract, is_integral, rat_int, rat_make, Rat};
use crate::preprocess::Flow;
use crate::{Error, Result};

/// Role of an edge within a basis structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeState {
    /// At its lower bound (flow 0).
    Lower,
    /// Spanning tree edge.
    Tree,
    /// At its upper bound (flow = capacity).
    Upper,
    /// The distinguished extra edge closing the fee-carrying cycle.
    Extra,
}

/// Basis structure (L, T, U, extra) plus the rooted-tree index.
///
/// Invariants: the states partition the edge set, the Tree edges form a
/// spanning tree, and the cycle closed by the extra edge has nonzero
/// total fee.
#[derive(Debug, Clone)]
pub struct BasisStructure {
    pub state: Vec<EdgeState>,
    pub extra: usize,
    pub root: usize,
    /// Parent tree edge per node; `None` for the root (index 0 unused).
    pub parent_edge: Vec<Option<usize>>,
    pub depth: Vec<usize>,
}

impl BasisStructure {
    /// Builds a basis from edge states, validating the tree and the
    /// nonzero-fee cycle condition.
    pub fn new(inst: &Instance, state: Vec<EdgeState>, root: usize) -> Result<Self> {
        if state.len() != inst.edge_count() {
            return Err(Error::Corruption("state vector length mismatch".into()));
        }
        let extra_edges: Vec<usize> = state
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == EdgeState::Extra)
            .map(|(i, _)| i)
            .collect();
        if extra_edges.len() != 1 {
            return Err(Error::Corruption(format!(
                "expected exactly one extra edge, found {}",
                extra_edges.len()
            )));
        }
        let mut basis = BasisStructure {
            state,
            extra: extra_edges[0],
            root,
            parent_edge: Vec::new(),
            depth: Vec::new(),
        };
        basis.rebuild_index(inst)?;
        let cyc = cycle(basis.extra, &basis, inst)?;
        if cyc.fee(inst)? == 0 {
            return Err(Error::Corruption(
                "extra-edge cycle has zero total fee".into(),
            ));
        }
        Ok(basis)
    }

    /// Recomputes parent edges and depths from the Tree states.
    pub fn rebuild_index(&mut self, inst: &Instance) -> Result<()> {
        let n = inst.node_count;
        let tree_count = self.state.iter().filter(|s| **s == EdgeState::Tree).count();
        if tree_count != n - 1 {
            return Err(Error::Corruption(format!(
                "spanning tree must have {} edges, found {tree_count}",
                n - 1
            )));
        }
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
        for (i, s) in self.state.iter().enumerate() {
            if *s == EdgeState::Tree {
                adj[inst.edges[i].tail].push(i);
                adj[inst.edges[i].head].push(i);
            }
        }
        let mut parent_edge = vec![None; n + 1];
        let mut depth = vec![0usize; n + 1];
        let mut seen = vec![false; n + 1];
        let mut stack = vec![self.root];
        seen[self.root] = true;
        let mut visited = 1usize;
        while let Some(v) = stack.pop() {
            for &eid in &adj[v] {
                let e = &inst.edges[eid];
                let other = if e.tail == v { e.head } else { e.tail };
                if !seen[other] {
                    seen[other] = true;
                    parent_edge[other] = Some(eid);
                    depth[other] = depth[v] + 1;
                    visited += 1;
                    stack.push(other);
                }
            }
        }
        if visited != n {
            return Err(Error::Corruption("tree edges do not span all nodes".into()));
        }
        self.parent_edge = parent_edge;
        self.depth = depth;
        Ok(())
    }

    pub fn in_tree(&self, eid: usize) -> bool {
        self.state[eid] == EdgeState::Tree
    }
}

/// Integral node potentials for costs (pi) and fees (mu), zero at the
/// root, with zero reduced cost and reduced fee on every tree edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Potentials {
    pub pi: Vec<i64>,
    pub mu: Vec<i64>,
}

/// Computes the unique potentials in one tree traversal from the root.
pub fn compute_potentials(basis: &BasisStructure, inst: &Instance) -> Result<Potentials> {
    let n = inst.node_count;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    for (i, s) in basis.state.iter().enumerate() {
        if *s == EdgeState::Tree {
            adj[inst.edges[i].tail].push(i);
            adj[inst.edges[i].head].push(i);
        }
    }
    let mut pi = vec![0i64; n + 1];
    let mut mu = vec![0i64; n + 1];
    let mut seen = vec![false; n + 1];
    let mut stack = vec![basis.root];
    seen[basis.root] = true;
    let ovf = || Error::Overflow("node potential out of i64 range".into());
    while let Some(v) = stack.pop() {
        for &eid in &adj[v] {
            let e = &inst.edges[eid];
            let other = if e.tail == v { e.head } else { e.tail };
            if seen[other] {
                continue;
            }
            seen[other] = true;
            // Zero reduced cost on tree edge (t, h): c - pi_t + pi_h = 0.
            if e.tail == v {
                pi[other] = pi[v].checked_sub(e.cost).ok_or_else(ovf)?;
                mu[other] = mu[v].checked_sub(e.fee as i64).ok_or_else(ovf)?;
            } else {
                pi[other] = pi[v].checked_add(e.cost).ok_or_else(ovf)?;
                mu[other] = mu[v].checked_add(e.fee as i64).ok_or_else(ovf)?;
            }
            stack.push(other);
        }
    }
    Ok(Potentials { pi, mu })
}

/// The three reduced costs of one edge under given potentials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedCosts {
    pub cost: i64,
    pub fee: i64,
    pub combined: Rat,
}

/// Tree-adjusted cost and fee of an edge: c - pi_tail + pi_head and
/// b - mu_tail + mu_head.
pub fn adjusted_cost_fee(eid: usize, pot: &Potentials, inst: &Instance) -> (i64, i64) {
    let e = &inst.edges[eid];
    (
        e.cost - pot.pi[e.tail] + pot.pi[e.head],
        e.fee as i64 - pot.mu[e.tail] + pot.mu[e.head],
    )
}

/// Reduced costs of an edge, including the side-constraint-adjusted
/// combined value c^ - c^_extra * (b^ / b^_extra). The comparison-ready
/// numerator c^_e * b^_extra - c^_extra * b^_e is formed in 128-bit
/// integers; no floating point is involved anywhere.
pub fn reduced_costs(
    eid: usize,
    pot: &Potentials,
    basis: &BasisStructure,
    inst: &Instance,
) -> Result<ReducedCosts> {
    let (chat, bhat) = adjusted_cost_fee(eid, pot, inst);
    let (chat_x, bhat_x) = adjusted_cost_fee(basis.extra, pot, inst);
    if bhat_x == 0 {
        return Err(Error::Corruption("extra edge has zero reduced fee".into()));
    }
    let num = combined_numerator(chat, bhat, chat_x, bhat_x)?;
    Ok(ReducedCosts {
        cost: chat,
        fee: bhat,
        combined: rat_make(num, bhat_x)?,
    })
}

/// Numerator of the combined reduced cost over the common denominator
/// b^_extra.
pub fn combined_numerator(chat: i64, bhat: i64, chat_x: i64, bhat_x: i64) -> Result<i128> {
    let a = (chat as i128)
        .checked_mul(bhat_x as i128)
        .ok_or_else(|| Error::Overflow("combined reduced cost".into()))?;
    let b = (chat_x as i128)
        .checked_mul(bhat as i128)
        .ok_or_else(|| Error::Overflow("combined reduced cost".into()))?;
    a.checked_sub(b)
        .ok_or_else(|| Error::Overflow("combined reduced cost".into()))
}

/// The unique undirected cycle closed by a non-tree edge, stored as an
/// edge sequence starting at the apex and traversed in the direction of
/// the generating edge (which appears as a forward edge).
#[derive(Debug, Clone)]
pub struct OrientedCycle {
    /// (edge id, forward?) in traversal order from the apex.
    pub edges: Vec<(usize, bool)>,
    pub apex: usize,
    pub generating: usize,
}

impl OrientedCycle {
    /// Signed indicator of an edge on this cycle: +1 forward, -1
    /// backward, 0 absent.
    pub fn indicator(&self, eid: usize) -> i32 {
        for &(id, fwd) in &self.edges {
            if id == eid {
                return if fwd { 1 } else { -1 };
            }
        }
        0
    }

    pub fn contains(&self, eid: usize) -> bool {
        self.indicator(eid) != 0
    }

    /// Total cost of the cycle in traversal orientation.
    pub fn cost(&self, inst: &Instance) -> Result<i64> {
        self.signed_sum(|e| inst.edges[e].cost)
    }

    /// Total fee of the cycle in traversal orientation.
    pub fn fee(&self, inst: &Instance) -> Result<i64> {
        self.signed_sum(|e| inst.edges[e].fee as i64)
    }

    fn signed_sum(&self, weight: impl Fn(usize) -> i64) -> Result<i64> {
        let mut total = 0i64;
        for &(eid, fwd) in &self.edges {
            let w = weight(eid);
            total = if fwd {
                total.checked_add(w)
            } else {
                total.checked_sub(w)
            }
            .ok_or_else(|| Error::Overflow("cycle weight".into()))?;
        }
        Ok(total)
    }
}

/// Computes the cycle closed by `eid` (which must not be a tree edge)
/// by walking both endpoints to equal depth and then in lockstep to the
/// apex.
pub fn cycle(eid: usize, basis: &BasisStructure, inst: &Instance) -> Result<OrientedCycle> {
    if basis.in_tree(eid) {
        return Err(Error::Corruption("cycle() called on a tree edge".into()));
    }
    let e = &inst.edges[eid];
    // Paths upward: (parent edge, child node) pairs.
    let mut up_tail: Vec<(usize, usize)> = Vec::new();
    let mut up_head: Vec<(usize, usize)> = Vec::new();
    let mut a = e.tail;
    let mut b = e.head;
    while basis.depth[a] > basis.depth[b] {
        let pe = basis.parent_edge[a].expect("non-root node has a parent edge");
        up_tail.push((pe, a));
        a = tree_other_end(pe, a, inst);
    }
    while basis.depth[b] > basis.depth[a] {
        let pe = basis.parent_edge[b].expect("non-root node has a parent edge");
        up_head.push((pe, b));
        b = tree_other_end(pe, b, inst);
    }
    while a != b {
        let pa = basis.parent_edge[a].expect("non-root node has a parent edge");
        up_tail.push((pa, a));
        a = tree_other_end(pa, a, inst);
        let pb = basis.parent_edge[b].expect("non-root node has a parent edge");
        up_head.push((pb, b));
        b = tree_other_end(pb, b, inst);
    }
    let apex = a;
    // Traversal: apex -> tail(e) downward, then e, then head(e) -> apex
    // upward. Downward through a node's parent edge is forward iff the
    // edge points away from the parent; upward is forward iff it points
    // toward the parent.
    let mut edges = Vec::with_capacity(up_tail.len() + up_head.len() + 1);
    for &(pe, child) in up_tail.iter().rev() {
        edges.push((pe, inst.edges[pe].head == child));
    }
    edges.push((eid, true));
    for &(pe, child) in up_head.iter() {
        edges.push((pe, inst.edges[pe].tail == child));
    }
    Ok(OrientedCycle {
        edges,
        apex,
        generating: eid,
    })
}

fn tree_other_end(eid: usize, node: usize, inst: &Instance) -> usize {
    let e = &inst.edges[eid];
    if e.tail == node {
        e.head
    } else {
        e.tail
    }
}

/// Computes the basic solution of a basis structure for the given
/// budget: bound edges pinned, tree flows forced by conservation
/// (leaf-to-root elimination), then the extra-edge cycle shifted so the
/// total fee equals the budget exactly. Returns the flow and whether it
/// respects the capacity bounds.
pub fn basic_solution(
    basis: &BasisStructure,
    inst: &Instance,
    budget: &Rat,
) -> Result<(Flow, bool)> {
    let n = inst.node_count;
    let mut x = vec![Rat::zero(); inst.edge_count()];
    for (i, s) in basis.state.iter().enumerate() {
        if *s == EdgeState::Upper {
            x[i] = rat_int(inst.edges[i].capacity as i64);
        }
    }
    // net[v] = inflow - outflow over all currently fixed edges.
    let mut net = vec![Rat::zero(); n + 1];
    for (i, e) in inst.edges.iter().enumerate() {
        if basis.state[i] != EdgeState::Tree && !x[i].is_zero() {
            net[e.head] += &x[i];
            net[e.tail] -= &x[i];
        }
    }
    let mut order: Vec<usize> = (1..=n).filter(|&v| v != basis.root).collect();
    order.sort_by(|&a, &b| basis.depth[b].cmp(&basis.depth[a]).then(a.cmp(&b)));
    for v in order {
        let pe = basis.parent_edge[v].expect("non-root node has a parent edge");
        let e = &inst.edges[pe];
        if e.tail == v {
            // Edge leaves v: outflow balances the net inflow.
            x[pe] = net[v].clone();
            net[e.head] += &x[pe];
        } else {
            x[pe] = -net[v].clone();
            net[e.tail] -= &x[pe];
        }
    }
    let mut flow = Flow { values: x };
    debug_assert!(flow.is_circulation(inst));

    let cyc = cycle(basis.extra, basis, inst)?;
    let cycle_fee = cyc.fee(inst)?;
    if cycle_fee == 0 {
        return Err(Error::Corruption(
            "extra-edge cycle has zero total fee".into(),
        ));
    }
    let shift = (budget - flow.fee(inst)) / rat_int(cycle_fee);
    for &(eid, fwd) in &cyc.edges {
        if fwd {
            flow.values[eid] += &shift;
        } else {
            flow.values[eid] -= &shift;
        }
    }
    debug_assert_eq!(flow.fee(inst), budget.clone());
    let feasible = flow.within_bounds(inst);
    Ok((flow, feasible))
}

/// Splits a basic solution into an integral circulation and a fractional
/// multiple of the extra-edge cycle indicator. Errors if the fractional
/// parts are inconsistent with a single cycle multiplier.
pub fn decompose(flow: &Flow, basis: &BasisStructure, inst: &Instance) -> Result<(Flow, Flow)> {
    let cyc = cycle(basis.extra, basis, inst)?;
    let first_forward = cyc
        .edges
        .iter()
        .find(|(_, fwd)| *fwd)
        .map(|&(eid, _)| eid)
        .expect("generating edge is always forward");
    let lambda = fract(&flow.values[first_forward]);
    let mut integral = flow.clone();
    let mut cycle_part = Flow::zero(inst.edge_count());
    for &(eid, fwd) in &cyc.edges {
        if fwd {
            integral.values[eid] -= &lambda;
            cycle_part.values[eid] = lambda.clone();
        } else {
            integral.values[eid] += &lambda;
            cycle_part.values[eid] = -lambda.clone();
        }
    }
    for (i, v) in integral.values.iter().enumerate() {
        if !is_integral(v) {
            return Err(Error::Corruption(format!(
                "inconsistent fractional parts: edge {i} remains fractional after removing \
                 the cycle component"
            )));
        }
    }
    Ok((integral, cycle_part))
}

/// Strong feasibility: every non-root node can push a positive amount of
/// flow toward the root along its parent tree edge (increase if the edge
/// points toward the root, decrease otherwise).
pub fn strong_feasibility_check(basis: &BasisStructure, flow: &Flow, inst: &Instance) -> bool {
    for v in 1..=inst.node_count {
        if v == basis.root {
            continue;
        }
        let pe = basis.parent_edge[v].expect("non-root node has a parent edge");
        let e = &inst.edges[pe];
        let toward_root = e.tail == v;
        let ok = if toward_root {
            flow.values[pe] < rat_int(e.capacity as i64)
        } else {
            flow.values[pe].is_positive()
        };
        if !ok {
            return false;
        }
    }
    true
}
