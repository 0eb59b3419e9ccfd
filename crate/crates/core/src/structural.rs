//! Exact isoperimetric constant, vertex connectivity, and the degree /
//! isoperimetry chain checked on concrete random instances.

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::bitset::NodeSet;
use crate::error::{Error, Result};
use crate::graph::{Graph, LayeredGraph};
use crate::robustness::MAX_ENUMERATION_NODES;

pub const DEFAULT_ISOPERIMETRIC_CAP: usize = 24;

/// Exact `i(G) = min |∂A|/|A|` over nonempty `A` with `|A| ≤ ⌊N/2⌋`.
#[derive(Clone, Debug, PartialEq)]
pub struct IsoperimetricResult {
    /// Reduced fraction.
    pub value: Ratio<u64>,
    /// `|∂A|` of the minimizer, before reduction.
    pub boundary: u64,
    /// `|A|` of the minimizer.
    pub size: u64,
    pub argmin_set: NodeSet,
    pub enumerated_sets: u64,
}

impl IsoperimetricResult {
    pub fn as_f64(&self) -> f64 {
        self.boundary as f64 / self.size as f64
    }
}

#[derive(Clone, Copy, Debug)]
struct Candidate {
    boundary: u64,
    size: u64,
    mask: u64,
}

impl Candidate {
    /// Smaller ratio first, then smaller set, then lexicographically smaller
    /// sorted member list.
    fn better_than(&self, other: &Candidate) -> bool {
        let lhs = self.boundary as u128 * other.size as u128;
        let rhs = other.boundary as u128 * self.size as u128;
        if lhs != rhs {
            return lhs < rhs;
        }
        if self.size != other.size {
            return self.size < other.size;
        }
        let diff = self.mask ^ other.mask;
        diff != 0 && self.mask & (diff & diff.wrapping_neg()) != 0
    }
}

fn boundary_of(adj: &[u64], mask: u64) -> u64 {
    let mut bits = mask;
    let mut b = 0u64;
    while bits != 0 {
        let v = bits.trailing_zeros() as usize;
        bits &= bits - 1;
        b += (adj[v] & !mask).count_ones() as u64;
    }
    b
}

/// Scans every low-bit pattern under a fixed high-bit prefix in Gray-code
/// order, updating `|∂A|` incrementally as one node flips per step.
fn scan_block(adj: &[u64], prefix: u64, low_bits: u32, half: u64) -> (Option<Candidate>, u64) {
    let mut mask = prefix << low_bits;
    let mut boundary = boundary_of(adj, mask);
    let mut size = mask.count_ones() as u64;
    let mut best: Option<Candidate> = None;
    let mut seen = 0u64;
    let mut consider = |mask: u64, boundary: u64, size: u64, best: &mut Option<Candidate>| {
        if size == 0 || size > half {
            return;
        }
        seen += 1;
        let c = Candidate {
            boundary,
            size,
            mask,
        };
        if best.as_ref().is_none_or(|b| c.better_than(b)) {
            *best = Some(c);
        }
    };
    consider(mask, boundary, size, &mut best);
    for step in 1u64..(1u64 << low_bits) {
        let v = step.trailing_zeros() as usize;
        let bit = 1u64 << v;
        let deg = adj[v].count_ones() as u64;
        let inside = (adj[v] & mask).count_ones() as u64;
        if mask & bit == 0 {
            boundary = boundary + deg - 2 * inside;
            size += 1;
        } else {
            boundary = boundary + 2 * inside - deg;
            size -= 1;
        }
        mask ^= bit;
        consider(mask, boundary, size, &mut best);
    }
    (best, seen)
}

/// Exact isoperimetric constant by enumerating all sets of at most half the
/// nodes. Ties go to the smaller set, then to the lexicographically smaller
/// member list.
pub fn isoperimetric_exact(g: &Graph, node_cap: usize) -> Result<IsoperimetricResult> {
    let n = g.node_count();
    if n < 2 {
        return Err(Error::TooFewNodes {
            required: 2,
            found: n,
        });
    }
    let cap = node_cap.min(MAX_ENUMERATION_NODES);
    if n > cap {
        return Err(Error::TooLarge {
            what: "exact isoperimetric constant",
            nodes: n,
            cap,
        });
    }
    let adj = g.adjacency_masks().expect("n <= 63");
    let half = (n / 2) as u64;
    let high_bits = (n as u32).min(6);
    let low_bits = n as u32 - high_bits;

    let blocks: Vec<(Option<Candidate>, u64)> = (0..1u64 << high_bits)
        .into_par_iter()
        .map(|prefix| scan_block(&adj, prefix, low_bits, half))
        .collect();
    let enumerated_sets = blocks.iter().map(|(_, s)| s).sum();
    let best = blocks
        .into_iter()
        .filter_map(|(c, _)| c)
        .reduce(|a, b| if b.better_than(&a) { b } else { a })
        .expect("n >= 2 has a singleton candidate");
    Ok(IsoperimetricResult {
        value: Ratio::new(best.boundary, best.size),
        boundary: best.boundary,
        size: best.size,
        argmin_set: NodeSet::from_mask(n, best.mask),
        enumerated_sets,
    })
}

/// `(λ₂/2, d_min)`: lower and upper bounds on `i(G)`.
pub fn isoperimetric_bounds(g: &Graph, lambda2: f64) -> Result<(f64, f64)> {
    if !(lambda2 >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "λ₂ must be non-negative, got {lambda2}"
        )));
    }
    let d_min = g.min_max_degree()?.0;
    Ok((lambda2 / 2.0, d_min as f64))
}

/// Adjacency-list flow network for unit-capacity node-split graphs.
struct FlowNetwork {
    head: Vec<usize>,
    to: Vec<usize>,
    cap: Vec<u32>,
    next: Vec<usize>,
    level: Vec<u32>,
    cursor: Vec<usize>,
}

const NIL: usize = usize::MAX;

impl FlowNetwork {
    fn new(nodes: usize) -> Self {
        FlowNetwork {
            head: vec![NIL; nodes],
            to: Vec::new(),
            cap: Vec::new(),
            next: Vec::new(),
            level: vec![0; nodes],
            cursor: vec![NIL; nodes],
        }
    }

    fn add_arc(&mut self, u: usize, v: usize, c: u32) {
        for (a, b, cap) in [(u, v, c), (v, u, 0)] {
            self.to.push(b);
            self.cap.push(cap);
            self.next.push(self.head[a]);
            self.head[a] = self.to.len() - 1;
        }
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.fill(u32::MAX);
        self.level[s] = 0;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            let mut e = self.head[u];
            while e != NIL {
                let v = self.to[e];
                if self.cap[e] > 0 && self.level[v] == u32::MAX {
                    self.level[v] = self.level[u] + 1;
                    queue.push_back(v);
                }
                e = self.next[e];
            }
        }
        self.level[t] != u32::MAX
    }

    fn dfs(&mut self, u: usize, t: usize, pushed: u32) -> u32 {
        if u == t {
            return pushed;
        }
        while self.cursor[u] != NIL {
            let e = self.cursor[u];
            let v = self.to[e];
            if self.cap[e] > 0 && self.level[v] == self.level[u] + 1 {
                let got = self.dfs(v, t, pushed.min(self.cap[e]));
                if got > 0 {
                    self.cap[e] -= got;
                    self.cap[e ^ 1] += got;
                    return got;
                }
            }
            self.cursor[u] = self.next[e];
        }
        0
    }

    /// Dinic's algorithm, stopping once the flow reaches `limit`.
    fn max_flow(&mut self, s: usize, t: usize, limit: u32) -> u32 {
        let mut flow = 0;
        while flow < limit && self.bfs(s, t) {
            self.cursor.copy_from_slice(&self.head);
            loop {
                let f = self.dfs(s, t, limit - flow);
                if f == 0 {
                    break;
                }
                flow += f;
                if flow >= limit {
                    break;
                }
            }
        }
        flow
    }
}

/// Maximum number of internally vertex-disjoint `s`–`t` paths for a
/// non-adjacent pair, capped at `limit` (Menger, via node splitting).
fn local_connectivity(g: &Graph, s: usize, t: usize, limit: usize) -> usize {
    let n = g.node_count();
    let inf = n as u32 + 1;
    let mut net = FlowNetwork::new(2 * n);
    for v in 0..n {
        let c = if v == s || v == t { inf } else { 1 };
        net.add_arc(2 * v, 2 * v + 1, c);
    }
    for (u, v) in g.edges() {
        net.add_arc(2 * u + 1, 2 * v, inf);
        net.add_arc(2 * v + 1, 2 * u, inf);
    }
    net.max_flow(2 * s + 1, 2 * t, limit as u32) as usize
}

/// Vertex connectivity κ(G): `N − 1` for complete graphs, 0 for
/// disconnected ones.
///
/// Some node among the first `κ + 1` survives any minimum separator and is
/// non-adjacent to a node cut off from it, so it suffices to run max-flow
/// from nodes `0, 1, …` (while the index does not exceed the best value
/// found so far) to each of their non-neighbours.
pub fn vertex_connectivity(g: &Graph) -> Result<usize> {
    let n = g.node_count();
    if n < 2 {
        return Err(Error::TooFewNodes {
            required: 2,
            found: n,
        });
    }
    let mut best = g.min_max_degree()?.0;
    let mut i = 0;
    while i <= best && i < n {
        for j in i + 1..n {
            if best == 0 {
                return Ok(0);
            }
            if !g.has_edge(i, j) {
                best = best.min(local_connectivity(g, i, j, best));
            }
        }
        i += 1;
    }
    Ok(best)
}

/// What is known about `i(G)` for the sandwich check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum IsoperimetricEstimate {
    Exact(Ratio<u64>),
    /// λ₂/2, used when exact enumeration is out of reach.
    LowerBound(f64),
}

impl IsoperimetricEstimate {
    pub fn value(&self) -> f64 {
        match *self {
            IsoperimetricEstimate::Exact(r) => *r.numer() as f64 / *r.denom() as f64,
            IsoperimetricEstimate::LowerBound(x) => x,
        }
    }

    /// Exact when the graph fits under `iso_cap`, otherwise `λ₂/2`.
    pub fn for_graph(g: &Graph, iso_cap: usize) -> Result<Self> {
        if g.node_count() <= iso_cap.min(MAX_ENUMERATION_NODES) {
            Ok(IsoperimetricEstimate::Exact(
                isoperimetric_exact(g, iso_cap)?.value,
            ))
        } else {
            let tol = crate::spectral::default_tolerance(g);
            Ok(IsoperimetricEstimate::LowerBound(
                crate::spectral::algebraic_connectivity(g, tol)? / 2.0,
            ))
        }
    }
}

/// `n(k−1)p · (1 + √3 · (ln n / ((k−1)np))^{1/2−ε})`, the high-probability
/// ceiling on the maximum degree of a random k-partite graph.
pub fn max_degree_upper_bound(n: usize, k: usize, p: f64, epsilon: f64) -> f64 {
    let mean = n as f64 * (k as f64 - 1.0) * p;
    let ratio = (n as f64).ln() / mean;
    mean * (1.0 + 3f64.sqrt() * ratio.powf(0.5 - epsilon))
}

/// Which links of `α·n·p ≤ i(G) ≤ d_min ≤ d_max ≤ upper` hold on one instance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SandwichReport {
    pub alpha_np_le_i: bool,
    pub i_le_d_min: bool,
    pub d_min_le_d_max: bool,
    pub d_max_le_upper: bool,
    pub i_value: f64,
    pub i_is_exact: bool,
    pub d_min: usize,
    pub d_max: usize,
    pub upper_bound: f64,
    /// `i/(n·p)`: the largest α this instance sustains.
    pub largest_alpha: f64,
}

impl SandwichReport {
    pub fn all_hold(&self) -> bool {
        self.alpha_np_le_i && self.i_le_d_min && self.d_min_le_d_max && self.d_max_le_upper
    }
}

/// Evaluates the degree / isoperimetry chain on a concrete layered graph.
///
/// Requires `ln n < (k−1)·n·p` and `ε ∈ (0, 1/2]`. With only a lower bound
/// on `i(G)`, the first link is checked against that bound (a pass is then
/// conclusive) and the second against the same bound.
pub fn check_degree_isoperimetric_sandwich(
    lg: &LayeredGraph,
    p: f64,
    alpha: f64,
    epsilon: f64,
    i_estimate: IsoperimetricEstimate,
) -> Result<SandwichReport> {
    let (n, k) = (lg.per_layer(), lg.layers());
    let mean_degree = (k as f64 - 1.0) * n as f64 * p;
    if !((n as f64).ln() < mean_degree) {
        return Err(Error::Precondition(format!(
            "need ln n < (k-1)np, got ln {n} = {:.4} vs {mean_degree:.4}",
            (n as f64).ln()
        )));
    }
    if !(epsilon > 0.0 && epsilon <= 0.5) {
        return Err(Error::Precondition(format!(
            "epsilon must lie in (0, 1/2], got {epsilon}"
        )));
    }
    let (d_min, d_max) = lg.graph().min_max_degree()?;
    let i = i_estimate.value();
    let upper_bound = max_degree_upper_bound(n, k, p, epsilon);
    let np = n as f64 * p;
    Ok(SandwichReport {
        alpha_np_le_i: alpha * np <= i,
        i_le_d_min: i <= d_min as f64,
        d_min_le_d_max: d_min <= d_max,
        d_max_le_upper: d_max as f64 <= upper_bound,
        i_value: i,
        i_is_exact: matches!(i_estimate, IsoperimetricEstimate::Exact(_)),
        d_min,
        d_max,
        upper_bound,
        largest_alpha: i / np,
    })
}
