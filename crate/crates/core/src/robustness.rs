//! r-reachability, exact r-robustness and certified robustness verdicts.
//!
//! A set `S` is r-reachable when some node of `S` has at least `r` neighbours
//! outside `S`; a graph is r-robust when every pair of disjoint nonempty
//! node sets contains an r-reachable member.
//!
//! # Exact decision procedure
//!
//! Sets that are *not* r-reachable are closed under union: if every node of
//! `A` and of `B` has fewer than `r` neighbours outside its own set, it has
//! even fewer outside `A ∪ B`. Inside any candidate region `U` there is
//! therefore a unique largest non-reachable subset, and repeatedly deleting
//! nodes of `U` that have `r` or more neighbours outside the current set
//! finds it (no member of a non-reachable subset is ever deleted).
//!
//! The graph fails to be r-robust exactly when some nonempty non-reachable
//! `S₁` leaves a nonempty non-reachable set inside `V ∖ S₁`. The checker
//! enumerates the `2^N` candidates for `S₁` and peels the complement, which
//! replaces the `3^N` scan over ordered pairs by a `2^N · poly(N)` one.

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::bitset::NodeSet;
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Largest graph handled by exact enumeration unless the caller overrides it.
pub const DEFAULT_ROBUSTNESS_CAP: usize = 20;

/// Hard ceiling: the enumeration works on `u64` node masks.
pub const MAX_ENUMERATION_NODES: usize = 63;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RobustnessStatus {
    Robust,
    NotRobust,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RobustnessMethod {
    ExactEnumeration,
    MinDegreeRefutation,
    IsoperimetricCertificate,
    SpectralCertificate,
}

/// Outcome of an r-robustness query together with the evidence behind it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RobustnessVerdict {
    #[serde(rename = "r")]
    pub r_queried: usize,
    pub status: RobustnessStatus,
    pub method: RobustnessMethod,
    #[serde(rename = "witness_s1", serialize_with = "ser_opt_set")]
    pub witness_s1: Option<NodeSet>,
    #[serde(rename = "witness_s2", serialize_with = "ser_opt_set")]
    pub witness_s2: Option<NodeSet>,
    /// λ₂/2, the exact i(G), or d_min, depending on `method`.
    pub certificate: Option<f64>,
}

fn ser_opt_set<S: Serializer>(set: &Option<NodeSet>, s: S) -> Result<S::Ok, S::Error> {
    match set {
        Some(set) => s.collect_seq(set.iter()),
        None => s.serialize_none(),
    }
}

impl RobustnessVerdict {
    pub fn is_robust(&self) -> bool {
        self.status == RobustnessStatus::Robust
    }

    pub fn witness(&self) -> Option<(&NodeSet, &NodeSet)> {
        self.witness_s1.as_ref().zip(self.witness_s2.as_ref())
    }

    /// Re-derives the witness claim from scratch: both sets nonempty,
    /// disjoint and neither r-reachable. `None` when there is no witness.
    pub fn recheck_witness(&self, g: &Graph) -> Option<bool> {
        let (a, b) = self.witness()?;
        Some(
            !a.is_empty()
                && !b.is_empty()
                && a.is_disjoint(b)
                && !is_r_reachable(g, a, self.r_queried).unwrap_or(true)
                && !is_r_reachable(g, b, self.r_queried).unwrap_or(true),
        )
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("verdict serializes")
    }
}

/// True iff some node of `s` has at least `r` neighbours outside `s`.
pub fn is_r_reachable(g: &Graph, s: &NodeSet, r: usize) -> Result<bool> {
    g.check_set(s)?;
    if s.is_empty() {
        return Err(Error::EmptySet);
    }
    if r == 0 {
        return Err(Error::InvalidParameter("r must be >= 1".into()));
    }
    Ok(s.iter().any(|v| g.neighbors(v).difference_count(s) >= r))
}

fn enumeration_masks(g: &Graph, what: &'static str, node_cap: usize) -> Result<Vec<u64>> {
    let n = g.node_count();
    let cap = node_cap.min(MAX_ENUMERATION_NODES);
    if n > cap {
        return Err(Error::TooLarge {
            what,
            nodes: n,
            cap,
        });
    }
    Ok(g.adjacency_masks().expect("n <= 63"))
}

#[inline]
fn mask_reachable(adj: &[u64], s: u64, r: u32) -> bool {
    let mut bits = s;
    while bits != 0 {
        let v = bits.trailing_zeros() as usize;
        bits &= bits - 1;
        if (adj[v] & !s).count_ones() >= r {
            return true;
        }
    }
    false
}

/// Largest subset of `region` that is not r-reachable (possibly empty).
#[inline]
fn peel_unreachable(adj: &[u64], region: u64, r: u32) -> u64 {
    let mut t = region;
    loop {
        let mut changed = false;
        let mut bits = t;
        while bits != 0 {
            let v = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            if (adj[v] & !t).count_ones() >= r {
                t &= !(1u64 << v);
                changed = true;
            }
        }
        if !changed {
            return t;
        }
    }
}

/// First violating pair in ascending order of the `S₁` mask, if any.
fn find_violation(adj: &[u64], r: u32) -> Option<(u64, u64)> {
    let n = adj.len();
    if n < 2 {
        return None;
    }
    let full: u64 = if n == 64 { !0 } else { (1u64 << n) - 1 };
    (1..full as usize).into_par_iter().find_map_first(|s1| {
        let s1 = s1 as u64;
        if mask_reachable(adj, s1, r) {
            return None;
        }
        let s2 = peel_unreachable(adj, full & !s1, r);
        if s2 == 0 {
            return None;
        }
        // Grow both sides to maximal non-reachable sets against each other.
        let s1 = peel_unreachable(adj, full & !s2, r);
        Some((s1, peel_unreachable(adj, full & !s1, r)))
    })
}

/// Decides r-robustness by exhaustive search, refusing graphs above `node_cap`.
///
/// When the graph is not r-robust the verdict carries a violating pair. The
/// search stops at the first non-reachable set (by bitmask order) that admits
/// a partner; both sides are then grown to maximal non-reachable sets.
pub fn is_r_robust_exact(g: &Graph, r: usize, node_cap: usize) -> Result<RobustnessVerdict> {
    if r == 0 {
        return Err(Error::InvalidParameter("r must be >= 1".into()));
    }
    let adj = enumeration_masks(g, "exact r-robustness", node_cap)?;
    let n = g.node_count();
    let r32 = u32::try_from(r).unwrap_or(u32::MAX);
    let violation = find_violation(&adj, r32);
    Ok(RobustnessVerdict {
        r_queried: r,
        status: if violation.is_some() {
            RobustnessStatus::NotRobust
        } else {
            RobustnessStatus::Robust
        },
        method: RobustnessMethod::ExactEnumeration,
        witness_s1: violation.map(|(a, _)| NodeSet::from_mask(n, a)),
        witness_s2: violation.map(|(_, b)| NodeSet::from_mask(n, b)),
        certificate: None,
    })
}

/// Largest `r` for which the graph is r-robust.
///
/// Equals the minimum over disjoint nonempty pairs of the larger of the two
/// reaches, where `reach(S) = max_{v∈S} |N(v) ∖ S|`. It never exceeds
/// `d_min`, and robustness is monotone in `r`, so a binary search over
/// `1..=d_min` with the exact checker finds it. Disconnected graphs give 0,
/// and so does the single-node graph, which has no pairs at all.
pub fn robustness_parameter_exact(g: &Graph, node_cap: usize) -> Result<usize> {
    let adj = enumeration_masks(g, "exact robustness parameter", node_cap)?;
    if adj.len() < 2 {
        return Ok(0);
    }
    let d_min = adj.iter().map(|m| m.count_ones()).min().unwrap_or(0);
    let (mut lo, mut hi) = (0u32, d_min);
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        if find_violation(&adj, mid).is_none() {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    Ok(lo as usize)
}

/// Everything the certificate rules look at.
#[derive(Clone, Debug)]
pub struct CertificateInputs {
    pub lambda2: f64,
    /// Eigensolver tolerance attached to `lambda2`.
    pub tolerance: f64,
    pub i_exact: Option<Ratio<u64>>,
    pub d_min: usize,
}

impl CertificateInputs {
    /// Collects λ₂ (at the default tolerance) and d_min; no exact i(G).
    pub fn from_graph(g: &Graph) -> Result<Self> {
        let tol = crate::spectral::default_tolerance(g);
        Ok(CertificateInputs {
            lambda2: crate::spectral::algebraic_connectivity(g, tol)?,
            tolerance: tol,
            i_exact: None,
            d_min: g.min_max_degree()?.0,
        })
    }

    fn spectral_margin(&self, r: usize) -> f64 {
        self.lambda2 / 2.0 - (r as f64 - 1.0)
    }
}

/// Decides r-robustness from bounds alone, or reports that it cannot.
///
/// * `d_min < r` refutes (an r-robust graph has minimum degree at least `r`).
/// * `λ₂/2 > r − 1` with a margin of `10·tol` certifies, since
///   `i(G) ≥ λ₂/2` and `i(G) > r − 1` forces r-robustness.
/// * An exact `i(G) > r − 1` certifies directly.
///
/// Anything else is [`Error::Indeterminate`].
pub fn certify_r_robust(r: usize, inputs: &CertificateInputs) -> Result<RobustnessVerdict> {
    if r == 0 {
        return Err(Error::InvalidParameter("r must be >= 1".into()));
    }
    let verdict = |status, method, certificate| RobustnessVerdict {
        r_queried: r,
        status,
        method,
        witness_s1: None,
        witness_s2: None,
        certificate: Some(certificate),
    };
    if inputs.d_min < r {
        return Ok(verdict(
            RobustnessStatus::NotRobust,
            RobustnessMethod::MinDegreeRefutation,
            inputs.d_min as f64,
        ));
    }
    if inputs.spectral_margin(r) > 10.0 * inputs.tolerance {
        return Ok(verdict(
            RobustnessStatus::Robust,
            RobustnessMethod::SpectralCertificate,
            inputs.lambda2 / 2.0,
        ));
    }
    if let Some(i) = inputs.i_exact {
        if i > Ratio::from_integer(r as u64 - 1) {
            return Ok(verdict(
                RobustnessStatus::Robust,
                RobustnessMethod::IsoperimetricCertificate,
                *i.numer() as f64 / *i.denom() as f64,
            ));
        }
    }
    Err(Error::Indeterminate { r })
}

/// Largest `r` some certificate proves, or 0.
pub fn max_certified_r(inputs: &CertificateInputs) -> usize {
    (1..=inputs.d_min)
        .rev()
        .find(|&r| matches!(certify_r_robust(r, inputs), Ok(v) if v.is_robust()))
        .unwrap_or(0)
}
