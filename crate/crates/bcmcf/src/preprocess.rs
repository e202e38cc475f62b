//! Budget-free minimum cost circulation and the preprocessing gate: if
//! the unconstrained optimum already respects the budget, the instance is
//! solved outright and the simplex machinery never runs.

use num::{Signed, Zero};

use crate::instance::Instance;
use crate::numerics::{is_integral, rat_int, Rat};
use crate::{Error, Result};

/// Per-edge rational flow vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flow {
    pub values: Vec<Rat>,
}

impl Flow {
    pub fn zero(edge_count: usize) -> Self {
        Flow {
            values: vec![Rat::zero(); edge_count],
        }
    }

    pub fn cost(&self, inst: &Instance) -> Rat {
        self.values
            .iter()
            .zip(&inst.edges)
            .map(|(x, e)| x * rat_int(e.cost))
            .sum()
    }

    pub fn fee(&self, inst: &Instance) -> Rat {
        self.values
            .iter()
            .zip(&inst.edges)
            .map(|(x, e)| x * rat_int(e.fee as i64))
            .sum()
    }

    pub fn is_integral(&self) -> bool {
        self.values.iter().all(is_integral)
    }

    /// True iff 0 <= x_e <= u_e for every edge.
    pub fn within_bounds(&self, inst: &Instance) -> bool {
        self.values
            .iter()
            .zip(&inst.edges)
            .all(|(x, e)| !x.is_negative() && *x <= rat_int(e.capacity as i64))
    }

    /// Net excess (inflow minus outflow) per node; all zero for a circulation.
    pub fn excesses(&self, inst: &Instance) -> Vec<Rat> {
        let mut ex = vec![Rat::zero(); inst.node_count + 1];
        for (x, e) in self.values.iter().zip(&inst.edges) {
            ex[e.head] += x;
            ex[e.tail] -= x;
        }
        ex
    }

    pub fn is_circulation(&self, inst: &Instance) -> bool {
        self.excesses(inst).iter().all(Zero::is_zero)
    }
}

/// Outcome of the preprocessing gate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Gate {
    /// The unconstrained optimum respects the budget and is final.
    Done(Flow),
    /// The unconstrained fee is at least B + 1; run the simplex.
    Proceed,
}

/// Minimum cost circulation ignoring the budget, by successive shortest
/// paths: saturate all negative-cost edges, then route the resulting
/// excesses along shortest residual paths under reduced costs. The
/// result is integral and admits no negative-cost residual cycle.
pub fn min_cost_circulation(inst: &Instance) -> Result<Flow> {
    let n = inst.node_count;
    let m = inst.edge_count();
    let mut cap = Vec::with_capacity(m);
    for e in &inst.edges {
        let c = i64::try_from(e.capacity)
            .map_err(|_| Error::Overflow("capacity exceeds i64".into()))?;
        cap.push(c);
    }

    let mut x = vec![0i64; m];
    let mut excess = vec![0i64; n + 1];
    for (i, e) in inst.edges.iter().enumerate() {
        if e.cost < 0 && cap[i] > 0 {
            x[i] = cap[i];
            excess[e.head] += cap[i];
            excess[e.tail] -= cap[i];
        }
    }

    let out = inst.out_edges();
    let inc = inst.in_edges();
    let mut pot = vec![0i64; n + 1];

    while let Some(source) = (1..=n).find(|&v| excess[v] > 0) {
        // Dijkstra over the residual graph with reduced costs.
        const UNSEEN: i64 = i64::MAX;
        let mut dist = vec![UNSEEN; n + 1];
        // Predecessor: (node, edge id, true = forward residual arc).
        let mut pred: Vec<Option<(usize, usize, bool)>> = vec![None; n + 1];
        let mut heap = std::collections::BinaryHeap::new();
        dist[source] = 0;
        heap.push(std::cmp::Reverse((0i64, source)));
        let mut target = None;
        while let Some(std::cmp::Reverse((d, v))) = heap.pop() {
            if d > dist[v] {
                continue;
            }
            if excess[v] < 0 {
                target = Some(v);
                break;
            }
            for &eid in &out[v] {
                if x[eid] < cap[eid] {
                    let w = inst.edges[eid].head;
                    let rc = inst.edges[eid].cost + pot[v] - pot[w];
                    debug_assert!(rc >= 0);
                    if dist[v] + rc < dist[w] {
                        dist[w] = dist[v] + rc;
                        pred[w] = Some((v, eid, true));
                        heap.push(std::cmp::Reverse((dist[w], w)));
                    }
                }
            }
            for &eid in &inc[v] {
                if x[eid] > 0 {
                    let w = inst.edges[eid].tail;
                    let rc = -inst.edges[eid].cost + pot[v] - pot[w];
                    debug_assert!(rc >= 0);
                    if dist[v] + rc < dist[w] {
                        dist[w] = dist[v] + rc;
                        pred[w] = Some((v, eid, false));
                        heap.push(std::cmp::Reverse((dist[w], w)));
                    }
                }
            }
        }
        let target = target.ok_or_else(|| {
            Error::Corruption("excess node cannot reach any deficit in the residual graph".into())
        })?;
        let dt = dist[target];
        for v in 1..=n {
            if dist[v] != UNSEEN {
                pot[v] += dist[v].min(dt);
            } else {
                pot[v] += dt;
            }
        }
        // Bottleneck along the path, capped by the excesses at both ends.
        let mut bottleneck = excess[source].min(-excess[target]);
        let mut v = target;
        while let Some((prev, eid, fwd)) = pred[v] {
            let room = if fwd { cap[eid] - x[eid] } else { x[eid] };
            bottleneck = bottleneck.min(room);
            v = prev;
        }
        debug_assert!(bottleneck > 0);
        let mut v = target;
        while let Some((prev, eid, fwd)) = pred[v] {
            if fwd {
                x[eid] += bottleneck;
            } else {
                x[eid] -= bottleneck;
            }
            v = prev;
        }
        excess[source] -= bottleneck;
        excess[target] += bottleneck;
    }

    Ok(Flow {
        values: x.into_iter().map(rat_int).collect(),
    })
}

/// True iff the residual graph of `flow` contains a negative-cost cycle
/// (label-correcting pass). Absence certifies min-cost-circulation
/// optimality.
pub fn has_negative_residual_cycle(inst: &Instance, flow: &Flow) -> bool {
    let n = inst.node_count;
    // Arcs (from, to, cost) of the residual graph.
    let mut arcs = Vec::new();
    for (i, e) in inst.edges.iter().enumerate() {
        let x = &flow.values[i];
        if *x < rat_int(e.capacity as i64) {
            arcs.push((e.tail, e.head, e.cost));
        }
        if x.is_positive() {
            arcs.push((e.head, e.tail, -e.cost));
        }
    }
    let mut dist = vec![0i128; n + 1];
    for round in 0..n {
        let mut changed = false;
        for &(from, to, c) in &arcs {
            if dist[from] + (c as i128) < dist[to] {
                dist[to] = dist[from] + c as i128;
                changed = true;
                if round == n - 1 {
                    return true;
                }
            }
        }
        if !changed {
            return false;
        }
    }
    false
}

/// Integrality dichotomy: an integral optimal circulation either fits
/// the budget (Done) or spends at least B + 1 fee units (Proceed).
pub fn budget_gate(inst: &Instance, flow: &Flow) -> Result<Gate> {
    if !flow.is_integral() {
        return Err(Error::Corruption(
            "budget gate requires an integral flow".into(),
        ));
    }
    let fee = flow.fee(inst);
    if fee <= rat_int(inst.budget as i64) {
        Ok(Gate::Done(flow.clone()))
    } else {
        debug_assert!(fee >= rat_int(inst.budget as i64 + 1));
        Ok(Gate::Proceed)
    }
}
