//! Instance data model, file I/O, validation, strong-connectivity
//! augmentation, and a seeded random instance generator.
//!
//! Instances are circulations on a directed multigraph: every node has
//! zero excess, each edge carries a capacity, a cost (any sign), and a
//! nonnegative usage fee, and the total fee of a flow is limited by the
//! budget.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num::ToPrimitive;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::numerics::{is_integral, rat_make};
use crate::{Error, Result};

/// A directed edge. Node ids are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
    pub capacity: u64,
    pub cost: i64,
    pub fee: u64,
}

/// A BCMCF instance: directed multigraph plus a fee budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub node_count: usize,
    pub edges: Vec<Edge>,
    pub budget: u64,
    /// Indices of edges added by augmentation or by the solver; empty for
    /// raw instances. Artificial edges must carry zero flow in optima.
    pub artificial_edge_ids: BTreeSet<usize>,
}

impl Instance {
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Maximum absolute edge cost.
    pub fn max_abs_cost(&self) -> i64 {
        self.edges.iter().map(|e| e.cost.abs()).max().unwrap_or(0)
    }

    /// Maximum edge capacity.
    pub fn max_capacity(&self) -> u64 {
        self.edges.iter().map(|e| e.capacity).max().unwrap_or(0)
    }

    /// Maximum usage fee.
    pub fn max_fee(&self) -> u64 {
        self.edges.iter().map(|e| e.fee).max().unwrap_or(0)
    }

    /// Outgoing edge ids per node (index 0 unused).
    pub fn out_edges(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.node_count + 1];
        for (i, e) in self.edges.iter().enumerate() {
            adj[e.tail].push(i);
        }
        adj
    }

    /// Incoming edge ids per node (index 0 unused).
    pub fn in_edges(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.node_count + 1];
        for (i, e) in self.edges.iter().enumerate() {
            adj[e.head].push(i);
        }
        adj
    }

    /// Serializes in the same line format accepted by [`parse_instance`].
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "p bcmcf {} {} {}",
            self.node_count,
            self.edges.len(),
            self.budget
        )
        .unwrap();
        for e in &self.edges {
            writeln!(
                out,
                "a {} {} {} {} {}",
                e.tail, e.head, e.capacity, e.cost, e.fee
            )
            .unwrap();
        }
        out
    }
}

/// Result of [`validate`]: violations are data, not errors.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Parses the line-oriented instance format:
///
/// ```text
/// c <comment>
/// p bcmcf <n> <m> <B>
/// a <tail> <head> <capacity> <cost> <fee>
/// ```
pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut header: Option<(usize, usize, u64)> = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let err = |msg: String| Error::Parse { line: lineno, msg };
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields[0] {
            "p" => {
                if header.is_some() {
                    return Err(err("duplicate problem line".into()));
                }
                if fields.len() != 5 || fields[1] != "bcmcf" {
                    return Err(err("expected: p bcmcf <n> <m> <B>".into()));
                }
                let n: usize = fields[2]
                    .parse()
                    .map_err(|_| err("non-integer node count".into()))?;
                let m: usize = fields[3]
                    .parse()
                    .map_err(|_| err("non-integer edge count".into()))?;
                let b: u64 = fields[4]
                    .parse()
                    .map_err(|_| err("budget must be a nonnegative integer".into()))?;
                header = Some((n, m, b));
            }
            "a" => {
                let (n, _, _) =
                    header.ok_or_else(|| err("edge line before problem line".into()))?;
                if fields.len() != 6 {
                    return Err(err(
                        "expected: a <tail> <head> <capacity> <cost> <fee>".into()
                    ));
                }
                let tail: usize = fields[1]
                    .parse()
                    .map_err(|_| err("non-integer tail".into()))?;
                let head: usize = fields[2]
                    .parse()
                    .map_err(|_| err("non-integer head".into()))?;
                let capacity: i64 = fields[3]
                    .parse()
                    .map_err(|_| err("non-integer capacity".into()))?;
                let cost: i64 = fields[4]
                    .parse()
                    .map_err(|_| err("non-integer cost".into()))?;
                let fee: i64 = fields[5]
                    .parse()
                    .map_err(|_| err("non-integer fee".into()))?;
                if tail == 0 || tail > n || head == 0 || head > n {
                    return Err(err(format!("edge endpoint out of range [1..{n}]")));
                }
                if tail == head {
                    return Err(err("self-loop".into()));
                }
                if capacity < 0 {
                    return Err(err("negative capacity".into()));
                }
                if fee < 0 {
                    return Err(err("negative fee".into()));
                }
                edges.push(Edge {
                    tail,
                    head,
                    capacity: capacity as u64,
                    cost,
                    fee: fee as u64,
                });
            }
            other => return Err(err(format!("unknown line kind {other:?}"))),
        }
    }
    let (n, m, b) = header.ok_or(Error::Parse {
        line: 0,
        msg: "missing problem line".into(),
    })?;
    if edges.len() != m {
        return Err(Error::Parse {
            line: 0,
            msg: format!("problem line announces {m} edges, found {}", edges.len()),
        });
    }
    Ok(Instance {
        node_count: n,
        edges,
        budget: b,
        artificial_edge_ids: BTreeSet::new(),
    })
}

/// Checks the instance invariants; violations are reported, not thrown.
pub fn validate(inst: &Instance) -> ValidationReport {
    let mut v = Vec::new();
    if inst.node_count < 2 {
        v.push("node count < 2".to_string());
    }
    for (i, e) in inst.edges.iter().enumerate() {
        if e.tail == 0 || e.tail > inst.node_count || e.head == 0 || e.head > inst.node_count {
            v.push(format!("edge {i}: endpoint out of range"));
        }
        if e.tail == e.head {
            v.push(format!("edge {i}: self-loop"));
        }
    }
    ValidationReport { violations: v }
}

fn reachable(
    n: usize,
    adj: &[Vec<usize>],
    edges: &[Edge],
    from: usize,
    forward: bool,
) -> Vec<bool> {
    let mut seen = vec![false; n + 1];
    let mut stack = vec![from];
    seen[from] = true;
    while let Some(v) = stack.pop() {
        for &eid in &adj[v] {
            let next = if forward {
                edges[eid].head
            } else {
                edges[eid].tail
            };
            if !seen[next] {
                seen[next] = true;
                stack.push(next);
            }
        }
    }
    seen
}

/// True iff every node reaches and is reached by every other node.
pub fn is_strongly_connected(inst: &Instance) -> bool {
    let n = inst.node_count;
    if n == 0 {
        return false;
    }
    let fwd = reachable(n, &inst.out_edges(), &inst.edges, 1, true);
    let bwd = reachable(n, &inst.in_edges(), &inst.edges, 1, false);
    (1..=n).all(|v| fwd[v] && bwd[v])
}

/// Makes the instance strongly connected by adding artificial edges of
/// capacity 1, cost 1 + n*C, fee 0: edge (1, v) for every node v not
/// reachable from node 1 and (v, 1) for every node that cannot reach
/// node 1. Any cycle through such an edge has strictly positive cost, so
/// optima never use them; the zero fee leaves budget semantics untouched.
pub fn augment_strong_connectivity(inst: &Instance) -> Instance {
    let n = inst.node_count;
    let big_cost = 1 + (n as i64) * inst.max_abs_cost();
    let mut out = inst.clone();
    let fwd = reachable(n, &inst.out_edges(), &inst.edges, 1, true);
    let bwd = reachable(n, &inst.in_edges(), &inst.edges, 1, false);
    for v in 2..=n {
        if !fwd[v] {
            out.artificial_edge_ids.insert(out.edges.len());
            out.edges.push(Edge {
                tail: 1,
                head: v,
                capacity: 1,
                cost: big_cost,
                fee: 0,
            });
        }
        if !bwd[v] {
            out.artificial_edge_ids.insert(out.edges.len());
            out.edges.push(Edge {
                tail: v,
                head: 1,
                capacity: 1,
                cost: big_cost,
                fee: 0,
            });
        }
    }
    debug_assert!(is_strongly_connected(&out));
    out
}

/// Parameters for the random instance generator.
#[derive(Debug, Clone)]
pub struct GenParams {
    pub nodes: usize,
    /// Edges per node; the generated instance has `nodes * density` edges.
    pub density: usize,
    pub cost_max: i64,
    pub cap_max: u64,
    pub fee_max: u64,
    /// Budget fraction phi in (0, 1) as num/den.
    pub budget_frac_num: u64,
    pub budget_frac_den: u64,
    pub seed: u64,
}

impl GenParams {
    fn check(&self) -> Result<()> {
        if self.nodes < 2 {
            return Err(Error::Invalid("node count must be >= 2".into()));
        }
        if self.density < 1 {
            return Err(Error::Invalid("density must be >= 1".into()));
        }
        if self.cost_max < 1 || self.cap_max < 1 {
            return Err(Error::Invalid(
                "cost_max and cap_max must be positive".into(),
            ));
        }
        if self.budget_frac_den == 0
            || self.budget_frac_num == 0
            || self.budget_frac_num >= self.budget_frac_den
        {
            return Err(Error::Invalid(
                "budget fraction must lie strictly in (0, 1)".into(),
            ));
        }
        Ok(())
    }
}

/// Generates a strongly connected instance with `nodes * density` edges,
/// deterministic in the seed. The graph is a random spanning cycle plus
/// random extra edges; the budget is `floor(phi * fee(min-cost
/// circulation))`, so the budget binds whenever the unconstrained
/// optimum spends at least 1/phi fee units.
pub fn generate(params: &GenParams) -> Result<Instance> {
    params.check()?;
    generate_with_edge_count(
        params.nodes,
        params.nodes * params.density,
        params.cost_max,
        params.cap_max,
        params.fee_max,
        (params.budget_frac_num, params.budget_frac_den),
        params.seed,
    )
}

/// Generator core with an explicit edge count (`edge_count >= nodes`).
pub fn generate_with_edge_count(
    nodes: usize,
    edge_count: usize,
    cost_max: i64,
    cap_max: u64,
    fee_max: u64,
    budget_frac: (u64, u64),
    seed: u64,
) -> Result<Instance> {
    if edge_count < nodes {
        return Err(Error::Invalid(format!(
            "edge count {edge_count} below node count {nodes}: spanning cycle impossible"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (1..=nodes).collect();
    order.shuffle(&mut rng);
    let mut pairs: Vec<(usize, usize)> = (0..nodes)
        .map(|i| (order[i], order[(i + 1) % nodes]))
        .collect();
    while pairs.len() < edge_count {
        let tail = rng.gen_range(1..=nodes);
        let head = rng.gen_range(1..=nodes);
        if tail != head {
            pairs.push((tail, head));
        }
    }
    let edges: Vec<Edge> = pairs
        .into_iter()
        .map(|(tail, head)| Edge {
            tail,
            head,
            capacity: rng.gen_range(1..=cap_max),
            cost: rng.gen_range(-cost_max..=cost_max),
            fee: rng.gen_range(0..=fee_max),
        })
        .collect();
    let mut inst = Instance {
        node_count: nodes,
        edges,
        budget: 0,
        artificial_edge_ids: BTreeSet::new(),
    };
    let mcc = crate::preprocess::min_cost_circulation(&inst)?;
    let fee = mcc.fee(&inst);
    debug_assert!(is_integral(&fee));
    let phi = rat_make(budget_frac.0, budget_frac.1)?;
    let budget = (phi * fee).floor().to_integer();
    inst.budget = budget
        .to_u64()
        .ok_or_else(|| Error::Overflow("generated budget out of range".into()))?;
    Ok(inst)
}
