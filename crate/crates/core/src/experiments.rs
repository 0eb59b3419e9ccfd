//! Monte Carlo sweeps over random interdependent networks.
//!
//! A sweep visits every *cell* `(n, x)` of an [`ExperimentSpec`], where `x`
//! is a threshold offset, a growth factor `c`, or an explicit `p`. Each cell
//! draws `trials` graphs, evaluates every requested metric on the same
//! graph, and reports one CSV row per metric. Trial `t` of cell `c` is seeded
//! from `(base_seed, c, t)`, and aggregation runs in trial order, so the
//! output does not depend on the worker count.

use std::io::Write;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{derive_seed, gen_interdependent, GenSeed, IntraLayerSpec};
use crate::graph::LayeredGraph;
use crate::robustness::{
    certify_r_robust, is_r_robust_exact, CertificateInputs, DEFAULT_ROBUSTNESS_CAP,
};
use crate::spectral::{algebraic_connectivity, default_tolerance};
use crate::structural::{isoperimetric_exact, max_degree_upper_bound, DEFAULT_ISOPERIMETRIC_CAP};

/// z for a two-sided 95% interval.
pub const WILSON_Z: f64 = 1.96;

/// `(ln n + (r−1)·ln ln n + x) / ((k−1)·n)`, clamped to `[0, 1]`.
pub fn threshold_p(n: usize, k: usize, r: usize, x: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "threshold needs n >= 3 so that ln ln n > 0, got {n}"
        )));
    }
    if k < 2 || r < 1 {
        return Err(Error::InvalidParameter(format!(
            "need k >= 2 and r >= 1, got k={k}, r={r}"
        )));
    }
    let ln = (n as f64).ln();
    let raw = (ln + (r as f64 - 1.0) * ln.ln() + x) / ((k as f64 - 1.0) * n as f64);
    Ok(raw.clamp(0.0, 1.0))
}

/// `c · ln n / ((k−1)·n)`; needs `c > 1` and a result at most 1.
pub fn growth_p(n: usize, k: usize, c: f64) -> Result<f64> {
    if !(c > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "growth factor c must exceed 1, got {c}"
        )));
    }
    if n < 2 || k < 2 {
        return Err(Error::InvalidParameter(format!(
            "need n >= 2 and k >= 2, got n={n}, k={k}"
        )));
    }
    let p = c * (n as f64).ln() / ((k as f64 - 1.0) * n as f64);
    if p > 1.0 {
        return Err(Error::InvalidParameter(format!(
            "c = {c} gives p = {p} > 1 at n = {n}"
        )));
    }
    Ok(p)
}

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = WILSON_Z * WILSON_Z;
    let denom = 1.0 + z2 / n;
    let centre = (phat + z2 / (2.0 * n)) / denom;
    let half = WILSON_Z * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    KPartite,
    Interdependent { intra: IntraLayerSpec },
}

impl Family {
    fn label(&self) -> String {
        match self {
            Family::KPartite => "k_partite".into(),
            Family::Interdependent { intra } => format!("interdependent:{}", intra.label()),
        }
    }

    fn intra(&self) -> IntraLayerSpec {
        match self {
            Family::KPartite => IntraLayerSpec::empty(),
            Family::Interdependent { intra } => intra.clone(),
        }
    }
}

/// How the edge probability of each cell is chosen.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum PRule {
    /// `p = threshold_p(n, k, r, x)` for each offset `x`.
    ThresholdOffsets {
        x: Vec<f64>,
    },
    /// `p = c · ln n / ((k−1)n)` for each `c > 1`.
    COverThreshold {
        c: Vec<f64>,
    },
    Explicit {
        p: Vec<f64>,
    },
}

impl PRule {
    fn values(&self) -> &[f64] {
        match self {
            PRule::ThresholdOffsets { x } => x,
            PRule::COverThreshold { c } => c,
            PRule::Explicit { p } => p,
        }
    }

    fn p_for(&self, n: usize, k: usize, r: usize, v: f64) -> Result<f64> {
        match self {
            PRule::ThresholdOffsets { .. } => threshold_p(n, k, r, v),
            PRule::COverThreshold { .. } => growth_p(n, k, v),
            PRule::Explicit { .. } => {
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::InvalidParameter(format!("p = {v} not in [0, 1]")));
                }
                Ok(v)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// Proportion with `d_min ≥ r`.
    MinDegGeR,
    /// Proportion r-robust by exact search.
    RobustExact,
    /// Proportion proven r-robust by a certificate; undecided trials count
    /// as failures and are tallied in `indeterminate`.
    RobustCertified,
    /// Mean λ₂.
    Lambda2,
    /// Mean exact i(G).
    IExact,
    /// Mean lower bound λ₂/2 in `value`; the interval columns hold the mean
    /// lower bound and the mean upper bound `d_min`.
    IBounds,
    /// Proportion with `d_max` below the high-probability degree ceiling.
    DMaxBound,
    Lambda2OverNp,
    /// Mean `(λ₂/2)/(np)`.
    ILowerOverNp,
    DMinOverNp,
    /// Mean `d_max/(n(k−1)p)`.
    DMaxOverNp,
    /// Mean edge count between layer 0 and the rest.
    BoundaryMean,
    /// Proportion with that count above `(1 + √3/√ln n) · n²(k−1)p`.
    BoundaryExceedance,
    /// Proportion with exact `i(G) > r − 1`.
    PropertySr,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::MinDegGeR => "min_deg_ge_r",
            Metric::RobustExact => "robust_exact",
            Metric::RobustCertified => "robust_certified",
            Metric::Lambda2 => "lambda2",
            Metric::IExact => "i_exact",
            Metric::IBounds => "i_bounds",
            Metric::DMaxBound => "d_max_bound",
            Metric::Lambda2OverNp => "lambda2_over_np",
            Metric::ILowerOverNp => "i_lower_over_np",
            Metric::DMinOverNp => "d_min_over_np",
            Metric::DMaxOverNp => "d_max_over_np",
            Metric::BoundaryMean => "boundary_mean",
            Metric::BoundaryExceedance => "boundary_exceedance",
            Metric::PropertySr => "property_sr",
        }
    }

    fn is_proportion(self) -> bool {
        matches!(
            self,
            Metric::MinDegGeR
                | Metric::RobustExact
                | Metric::RobustCertified
                | Metric::DMaxBound
                | Metric::BoundaryExceedance
                | Metric::PropertySr
        )
    }
}

fn default_epsilon() -> f64 {
    0.25
}

fn default_robustness_cap() -> usize {
    DEFAULT_ROBUSTNESS_CAP
}

fn default_iso_cap() -> usize {
    DEFAULT_ISOPERIMETRIC_CAP
}

/// Declarative sweep; also the JSON spec-file schema.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub family: Family,
    pub n_list: Vec<usize>,
    pub k: usize,
    pub r: usize,
    pub p_rule: PRule,
    pub trials: usize,
    pub base_seed: u64,
    pub metrics: Vec<Metric>,
    #[serde(default = "default_robustness_cap")]
    pub robustness_cap: usize,
    #[serde(default = "default_iso_cap")]
    pub iso_cap: usize,
    /// Exponent slack in the degree ceiling.
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::InvalidParameter("trials must be >= 1".into()));
        }
        if self.k < 2 || self.r < 1 {
            return Err(Error::InvalidParameter(format!(
                "need k >= 2 and r >= 1, got k={}, r={}",
                self.k, self.r
            )));
        }
        if self.n_list.is_empty() || self.n_list.iter().any(|&n| n < 2) {
            return Err(Error::InvalidParameter(
                "n_list must be nonempty with every n >= 2".into(),
            ));
        }
        if self.p_rule.values().is_empty() || self.metrics.is_empty() {
            return Err(Error::InvalidParameter(
                "need at least one offset and one metric".into(),
            ));
        }
        if !(self.epsilon > 0.0 && self.epsilon <= 0.5) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must lie in (0, 1/2], got {}",
                self.epsilon
            )));
        }
        for &n in &self.n_list {
            for &v in self.p_rule.values() {
                self.p_rule.p_for(n, self.k, self.r, v)?;
            }
        }
        Ok(())
    }
}

/// One output line.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub family: String,
    pub n: usize,
    pub k: usize,
    pub r: usize,
    pub x_or_c: f64,
    pub p: f64,
    pub metric: String,
    /// Proportion, or mean; NaN when the metric could not run at this size.
    pub value: f64,
    /// Wilson interval for proportions, mean ± sample std for means.
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub trials: usize,
    pub indeterminate: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn find(&self, n: usize, x_or_c: f64, metric: Metric) -> Option<&SweepRow> {
        self.rows
            .iter()
            .find(|row| row.n == n && row.x_or_c == x_or_c && row.metric == metric.name())
    }

    /// CSV with header `family,n,k,r,x_or_c,p,metric,value,ci_lo,ci_hi,trials,indeterminate`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for row in &self.rows {
            out.serialize(row)?;
        }
        if self.rows.is_empty() {
            out.write_record([
                "family",
                "n",
                "k",
                "r",
                "x_or_c",
                "p",
                "metric",
                "value",
                "ci_lo",
                "ci_hi",
                "trials",
                "indeterminate",
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }
}

/// Execution knobs that never affect the numbers produced.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Worker threads; `None` uses the available parallelism.
    pub workers: Option<usize>,
    /// Print one line per finished cell to standard error.
    pub progress: bool,
}

/// Per-trial outcome of one metric.
#[derive(Clone, Copy, Debug)]
enum Outcome {
    Flag(bool),
    Value(f64),
    /// Lower and upper bound.
    Pair(f64, f64),
    /// Counted in `indeterminate`; a failure for proportions, skipped for means.
    Undecided,
    /// The metric cannot run at this size at all.
    OverCap,
}

/// Lazily computed quantities shared by all metrics of one trial.
struct Trial<'a> {
    lg: LayeredGraph,
    spec: &'a ExperimentSpec,
    p: f64,
    lambda2: Option<f64>,
    i_exact: Option<Option<Ratio<u64>>>,
}

impl Trial<'_> {
    fn node_count(&self) -> usize {
        self.lg.graph().node_count()
    }

    fn lambda2(&mut self) -> Result<f64> {
        if let Some(l) = self.lambda2 {
            return Ok(l);
        }
        let g = self.lg.graph();
        let l = algebraic_connectivity(g, default_tolerance(g))?;
        self.lambda2 = Some(l);
        Ok(l)
    }

    /// `None` above the isoperimetric cap.
    fn i_exact(&mut self) -> Result<Option<Ratio<u64>>> {
        if let Some(i) = self.i_exact {
            return Ok(i);
        }
        let i = if self.node_count() <= self.spec.iso_cap {
            Some(isoperimetric_exact(self.lg.graph(), self.spec.iso_cap)?.value)
        } else {
            None
        };
        self.i_exact = Some(i);
        Ok(i)
    }

    fn np(&self) -> f64 {
        self.lg.per_layer() as f64 * self.p
    }

    fn boundary(&self) -> Result<usize> {
        self.lg.graph().edge_boundary_size(&self.lg.layer_nodes(0))
    }

    fn evaluate(&mut self, metric: Metric) -> Result<Outcome> {
        let g = self.lg.graph();
        let (d_min, d_max) = g.min_max_degree()?;
        let (n, k, r) = (self.lg.per_layer(), self.lg.layers(), self.spec.r);
        let ratio = |x: f64, denom: f64| if denom > 0.0 { x / denom } else { f64::NAN };
        Ok(match metric {
            Metric::MinDegGeR => Outcome::Flag(d_min >= r),
            Metric::RobustExact => {
                if self.node_count() > self.spec.robustness_cap {
                    Outcome::OverCap
                } else {
                    Outcome::Flag(is_r_robust_exact(g, r, self.spec.robustness_cap)?.is_robust())
                }
            }
            Metric::RobustCertified => {
                // d_min < r refutes without touching the spectrum.
                if d_min < r {
                    return Ok(Outcome::Flag(false));
                }
                let inputs = CertificateInputs {
                    lambda2: self.lambda2()?,
                    tolerance: default_tolerance(self.lg.graph()),
                    i_exact: self.i_exact()?,
                    d_min,
                };
                match certify_r_robust(r, &inputs) {
                    Ok(v) => Outcome::Flag(v.is_robust()),
                    Err(Error::Indeterminate { .. }) => Outcome::Undecided,
                    Err(e) => return Err(e),
                }
            }
            Metric::Lambda2 => Outcome::Value(self.lambda2()?),
            Metric::IExact => match self.i_exact()? {
                Some(i) => Outcome::Value(*i.numer() as f64 / *i.denom() as f64),
                None => Outcome::OverCap,
            },
            Metric::IBounds => Outcome::Pair(self.lambda2()? / 2.0, d_min as f64),
            Metric::DMaxBound => Outcome::Flag(
                d_max as f64 <= max_degree_upper_bound(n, k, self.p, self.spec.epsilon),
            ),
            Metric::Lambda2OverNp => Outcome::Value(ratio(self.lambda2()?, self.np())),
            Metric::ILowerOverNp => Outcome::Value(ratio(self.lambda2()? / 2.0, self.np())),
            Metric::DMinOverNp => Outcome::Value(ratio(d_min as f64, self.np())),
            Metric::DMaxOverNp => Outcome::Value(ratio(d_max as f64, (k as f64 - 1.0) * self.np())),
            Metric::BoundaryMean => Outcome::Value(self.boundary()? as f64),
            Metric::BoundaryExceedance => {
                let mean = (n * n) as f64 * (k as f64 - 1.0) * self.p;
                let delta = 3f64.sqrt() / (n as f64).ln().sqrt();
                Outcome::Flag(self.boundary()? as f64 > (1.0 + delta) * mean)
            }
            Metric::PropertySr => match self.i_exact()? {
                Some(i) => Outcome::Flag(i > Ratio::from_integer(r as u64 - 1)),
                None => Outcome::OverCap,
            },
        })
    }
}

fn aggregate(metric: Metric, outcomes: &[Outcome]) -> (f64, f64, f64, usize) {
    let trials = outcomes.len();
    if outcomes.iter().any(|o| matches!(o, Outcome::OverCap)) {
        return (f64::NAN, f64::NAN, f64::NAN, trials);
    }
    let undecided = outcomes
        .iter()
        .filter(|o| matches!(o, Outcome::Undecided))
        .count();
    if metric.is_proportion() {
        let hits = outcomes
            .iter()
            .filter(|o| matches!(o, Outcome::Flag(true)))
            .count();
        let (lo, hi) = wilson_interval(hits, trials);
        return (hits as f64 / trials as f64, lo, hi, undecided);
    }
    if metric == Metric::IBounds {
        let pairs: Vec<(f64, f64)> = outcomes
            .iter()
            .filter_map(|o| match *o {
                Outcome::Pair(a, b) => Some((a, b)),
                _ => None,
            })
            .collect();
        let lower = mean(pairs.iter().map(|p| p.0));
        let upper = mean(pairs.iter().map(|p| p.1));
        return (lower, lower, upper, undecided);
    }
    let values: Vec<f64> = outcomes
        .iter()
        .filter_map(|o| match *o {
            Outcome::Value(x) => Some(x),
            _ => None,
        })
        .collect();
    let m = mean(values.iter().copied());
    let sd = sample_std(&values, m);
    (m, m - sd, m + sd, undecided)
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, count) = xs.fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
    if count == 0 {
        f64::NAN
    } else {
        sum / count as f64
    }
}

fn sample_std(xs: &[f64], m: f64) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    (ss / (xs.len() - 1) as f64).sqrt()
}

fn with_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        if w == 0 {
            return Err(Error::InvalidParameter("workers must be >= 1".into()));
        }
        builder = builder.num_threads(w);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// Runs every cell of `spec` and returns rows ordered by `n`, then offset,
/// then metric in spec order.
pub fn run_sweep(spec: &ExperimentSpec, opts: &RunOptions) -> Result<SweepResult> {
    spec.validate()?;
    let intra = spec.family.intra().resolve()?;
    let family = spec.family.label();
    let cells: Vec<(usize, f64)> = spec
        .n_list
        .iter()
        .flat_map(|&n| spec.p_rule.values().iter().map(move |&v| (n, v)))
        .collect();
    let mut rows = Vec::with_capacity(cells.len() * spec.metrics.len());
    for (cell, &(n, v)) in cells.iter().enumerate() {
        let p = spec.p_rule.p_for(n, spec.k, spec.r, v)?;
        let cell_seed = derive_seed(spec.base_seed, &[cell as u64]);
        let per_trial: Vec<Vec<Outcome>> = with_pool(opts.workers, || {
            (0..spec.trials)
                .into_par_iter()
                .map(|t| {
                    let lg = gen_interdependent(
                        n,
                        spec.k,
                        p,
                        &intra,
                        GenSeed::new(cell_seed, t as u64),
                    )?;
                    let mut trial = Trial {
                        lg,
                        spec,
                        p,
                        lambda2: None,
                        i_exact: None,
                    };
                    spec.metrics.iter().map(|&m| trial.evaluate(m)).collect()
                })
                .collect::<Result<Vec<_>>>()
        })??;
        for (mi, &metric) in spec.metrics.iter().enumerate() {
            let outcomes: Vec<Outcome> = per_trial.iter().map(|t| t[mi]).collect();
            let (value, ci_lo, ci_hi, indeterminate) = aggregate(metric, &outcomes);
            rows.push(SweepRow {
                family: family.clone(),
                n,
                k: spec.k,
                r: spec.r,
                x_or_c: v,
                p,
                metric: metric.name().into(),
                value,
                ci_lo,
                ci_hi,
                trials: spec.trials,
                indeterminate,
            });
        }
        if opts.progress {
            eprintln!(
                "[{}/{}] n={n} x_or_c={v} p={p:.6} done",
                cell + 1,
                cells.len()
            );
        }
    }
    Ok(SweepResult { rows })
}

/// Threshold sweep: `p_rule` must be a list of offsets.
pub fn run_threshold_sweep(spec: &ExperimentSpec, opts: &RunOptions) -> Result<SweepResult> {
    if !matches!(spec.p_rule, PRule::ThresholdOffsets { .. }) {
        return Err(Error::InvalidParameter(
            "a threshold sweep takes p_rule = threshold_offsets".into(),
        ));
    }
    run_sweep(spec, opts)
}

/// Growth sweep: `p_rule` must be a list of factors `c > 1`.
pub fn run_growth_sweep(spec: &ExperimentSpec, opts: &RunOptions) -> Result<SweepResult> {
    match &spec.p_rule {
        PRule::COverThreshold { c } => {
            if let Some(bad) = c.iter().find(|&&c| !(c > 1.0)) {
                return Err(Error::InvalidParameter(format!(
                    "growth factor c must exceed 1, got {bad}"
                )));
            }
        }
        _ => {
            return Err(Error::InvalidParameter(
                "a growth sweep takes p_rule = c_over_threshold".into(),
            ))
        }
    }
    run_sweep(spec, opts)
}

/// Samples the edge count between layer 0 and the other layers of a random
/// k-partite graph; rows `boundary_mean` and `boundary_exceedance`.
pub fn run_boundary_concentration(
    n: usize,
    k: usize,
    p: f64,
    trials: usize,
    base_seed: u64,
    opts: &RunOptions,
) -> Result<SweepResult> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "p must lie in (0, 1], got {p}"
        )));
    }
    let spec = ExperimentSpec {
        family: Family::KPartite,
        n_list: vec![n],
        k,
        r: 1,
        p_rule: PRule::Explicit { p: vec![p] },
        trials,
        base_seed,
        metrics: vec![Metric::BoundaryMean, Metric::BoundaryExceedance],
        robustness_cap: DEFAULT_ROBUSTNESS_CAP,
        iso_cap: DEFAULT_ISOPERIMETRIC_CAP,
        epsilon: default_epsilon(),
    };
    run_sweep(&spec, opts)
}

/// Fraction of random k-partite graphs at `threshold_p(n, k, r, x)` whose
/// exact `i(G)` exceeds `r − 1`, i.e. every set of at most half the nodes
/// has more than `(r−1)|S|` boundary edges.
#[allow(clippy::too_many_arguments)]
pub fn run_property_sr_check(
    n: usize,
    k: usize,
    r: usize,
    x: &[f64],
    trials: usize,
    subset_cap: usize,
    base_seed: u64,
    opts: &RunOptions,
) -> Result<SweepResult> {
    if n * k > subset_cap {
        return Err(Error::TooLarge {
            what: "property S_r check",
            nodes: n * k,
            cap: subset_cap,
        });
    }
    let spec = ExperimentSpec {
        family: Family::KPartite,
        n_list: vec![n],
        k,
        r,
        p_rule: PRule::ThresholdOffsets { x: x.to_vec() },
        trials,
        base_seed,
        metrics: vec![Metric::PropertySr],
        robustness_cap: DEFAULT_ROBUSTNESS_CAP,
        iso_cap: subset_cap,
        epsilon: default_epsilon(),
    };
    run_sweep(&spec, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(metrics: Vec<Metric>, p_rule: PRule) -> ExperimentSpec {
        ExperimentSpec {
            family: Family::KPartite,
            n_list: vec![6],
            k: 2,
            r: 2,
            p_rule,
            trials: 40,
            base_seed: 7,
            metrics,
            robustness_cap: DEFAULT_ROBUSTNESS_CAP,
            iso_cap: DEFAULT_ISOPERIMETRIC_CAP,
            epsilon: 0.25,
        }
    }

    #[test]
    fn threshold_examples() {
        assert!((threshold_p(100, 2, 1, 0.0).unwrap() - 0.046052).abs() < 1e-6);
        assert!((threshold_p(100, 2, 2, 0.0).unwrap() - 0.061324).abs() < 1e-6);
        assert!((threshold_p(100, 3, 1, 0.0).unwrap() - 0.023026).abs() < 1e-6);
        assert!(threshold_p(2, 2, 1, 0.0).is_err());
        assert_eq!(threshold_p(3, 2, 1, -100.0).unwrap(), 0.0);
        assert_eq!(threshold_p(3, 2, 1, 100.0).unwrap(), 1.0);
    }

    #[test]
    fn wilson_matches_closed_form() {
        // 8/10: centre (0.8 + 0.19208) / 1.38416, half-width from the score formula.
        let (lo, hi) = wilson_interval(8, 10);
        assert!((lo - 0.4901).abs() < 1e-4 && (hi - 0.9433).abs() < 1e-4);
        let (lo, hi) = wilson_interval(0, 50);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.1);
        let (lo, hi) = wilson_interval(50, 50);
        assert!(lo > 0.9 && (hi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn growth_rejects_c_at_most_one() {
        let s = spec(
            vec![Metric::Lambda2OverNp],
            PRule::COverThreshold { c: vec![0.5] },
        );
        assert!(run_growth_sweep(&s, &RunOptions::default()).is_err());
        let s = spec(
            vec![Metric::Lambda2OverNp],
            PRule::ThresholdOffsets { x: vec![0.0] },
        );
        assert!(run_growth_sweep(&s, &RunOptions::default()).is_err());
    }

    #[test]
    fn row_layout_and_hierarchy() {
        let mut s = spec(
            vec![
                Metric::MinDegGeR,
                Metric::RobustExact,
                Metric::RobustCertified,
            ],
            PRule::ThresholdOffsets { x: vec![-2.0, 2.0] },
        );
        s.n_list = vec![5, 6];
        let res = run_threshold_sweep(&s, &RunOptions::default()).unwrap();
        assert_eq!(res.rows.len(), 2 * 2 * 3);
        assert_eq!(res.rows[0].metric, "min_deg_ge_r");
        assert_eq!((res.rows[3].n, res.rows[3].x_or_c), (5, 2.0));
        for cell in res.rows.chunks(3) {
            let (deg, exact, cert) = (&cell[0], &cell[1], &cell[2]);
            assert!(exact.value <= deg.value);
            assert!(cert.value <= exact.value);
            for row in cell {
                assert!((0.0..=1.0).contains(&row.value));
                assert!(row.ci_lo <= row.value && row.value <= row.ci_hi);
            }
        }
    }

    #[test]
    fn over_cap_rows_are_nan_not_fatal() {
        let mut s = spec(
            vec![Metric::RobustExact, Metric::MinDegGeR],
            PRule::Explicit { p: vec![0.5] },
        );
        s.robustness_cap = 8;
        s.trials = 3;
        let res = run_sweep(&s, &RunOptions::default()).unwrap();
        assert!(res.rows[0].value.is_nan());
        assert_eq!(res.rows[0].indeterminate, 3);
        assert!(!res.rows[1].value.is_nan());
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let s = spec(
            vec![
                Metric::MinDegGeR,
                Metric::Lambda2,
                Metric::IExact,
                Metric::IBounds,
            ],
            PRule::ThresholdOffsets { x: vec![0.0, 1.0] },
        );
        let a = run_sweep(
            &s,
            &RunOptions {
                workers: Some(1),
                progress: false,
            },
        )
        .unwrap();
        let b = run_sweep(
            &s,
            &RunOptions {
                workers: Some(4),
                progress: false,
            },
        )
        .unwrap();
        assert_eq!(a.to_csv_string(), b.to_csv_string());
        let i_bounds = a.find(6, 0.0, Metric::IBounds).unwrap();
        let i_exact = a.find(6, 0.0, Metric::IExact).unwrap();
        assert!(i_bounds.ci_lo <= i_exact.value + 1e-9 && i_exact.value <= i_bounds.ci_hi);
    }

    #[test]
    fn boundary_extremes() {
        let res = run_boundary_concentration(5, 3, 1.0, 4, 1, &RunOptions::default()).unwrap();
        let mean = &res.rows[0];
        assert_eq!(mean.value, 50.0);
        assert_eq!(mean.ci_lo, 50.0);
        assert_eq!(res.rows[1].value, 0.0);
        assert!(run_boundary_concentration(5, 2, 0.0, 4, 1, &RunOptions::default()).is_err());
    }

    #[test]
    fn property_sr_extremes() {
        let opts = RunOptions::default();
        let all = run_property_sr_check(4, 2, 1, &[1e6], 5, 16, 3, &opts).unwrap();
        assert_eq!(all.rows[0].value, 1.0);
        let none = run_property_sr_check(4, 2, 1, &[-1e6], 5, 16, 3, &opts).unwrap();
        assert_eq!(none.rows[0].value, 0.0);
        assert!(run_property_sr_check(10, 2, 1, &[0.0], 5, 16, 3, &opts).is_err());
    }

    #[test]
    fn csv_header_and_spec_json() {
        let json = r#"{
            "family": {"kind": "interdependent", "intra": {"kind": "erdos_renyi", "q": 0.2}},
            "n_list": [5], "k": 2, "r": 1,
            "p_rule": {"rule": "threshold_offsets", "x": [0.0]},
            "trials": 3, "base_seed": 11,
            "metrics": ["min_deg_ge_r", "lambda2_over_np"]
        }"#;
        let s: ExperimentSpec = serde_json::from_str(json).unwrap();
        assert_eq!(s.robustness_cap, DEFAULT_ROBUSTNESS_CAP);
        let csv = run_sweep(&s, &RunOptions::default())
            .unwrap()
            .to_csv_string();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next(),
            Some("family,n,k,r,x_or_c,p,metric,value,ci_lo,ci_hi,trials,indeterminate")
        );
        assert!(lines
            .next()
            .unwrap()
            .starts_with("interdependent:er(0.2),5,2,1,0.0,"));
    }
}
