//! Synchronous W-MSR resilient consensus.
//!
//! Each normal node drops up to `F` neighbour values strictly above its own
//! (the largest ones) and up to `F` strictly below (the smallest ones), then
//! moves to the uniform average of what is left together with its own
//! value. Adversarial nodes broadcast scripted values.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::bitset::NodeSet;
use crate::error::{Error, Result};
use crate::generators::derive_seed;
use crate::graph::Graph;

/// What an adversarial node broadcasts at round `t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AdversaryBehavior {
    Constant {
        value: f64,
    },
    /// `start + slope · t`.
    Ramp {
        start: f64,
        slope: f64,
    },
    /// Uniform in `[lo, hi)`, drawn from a hash of (seed, node, round).
    RandomIn {
        lo: f64,
        hi: f64,
    },
}

impl AdversaryBehavior {
    fn validate(&self) -> Result<()> {
        let finite = match *self {
            AdversaryBehavior::Constant { value } => value.is_finite(),
            AdversaryBehavior::Ramp { start, slope } => start.is_finite() && slope.is_finite(),
            AdversaryBehavior::RandomIn { lo, hi } => {
                if lo.is_finite() && hi.is_finite() && lo > hi {
                    return Err(Error::InvalidParameter(format!(
                        "random_in bounds reversed: [{lo}, {hi}]"
                    )));
                }
                lo.is_finite() && hi.is_finite()
            }
        };
        if !finite {
            return Err(Error::InvalidParameter(format!(
                "adversary script has non-finite parameters: {self:?}"
            )));
        }
        Ok(())
    }

    fn value_at(&self, seed: u64, node: usize, round: usize) -> f64 {
        match *self {
            AdversaryBehavior::Constant { value } => value,
            AdversaryBehavior::Ramp { start, slope } => start + slope * round as f64,
            AdversaryBehavior::RandomIn { lo, hi } => {
                let bits = derive_seed(seed, &[node as u64, round as u64]);
                let unit = (bits >> 11) as f64 / (1u64 << 53) as f64;
                lo + (hi - lo) * unit
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Adversary {
    pub node: usize,
    pub behavior: AdversaryBehavior,
}

/// Scenario for one W-MSR run; also the JSON scenario-file schema.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConsensusConfig {
    /// Values trimmed on each side.
    pub f: usize,
    pub rounds_max: usize,
    pub convergence_eps: f64,
    #[serde(default)]
    pub adversaries: Vec<Adversary>,
    pub initial_values: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
}

impl ConsensusConfig {
    pub fn adversary_set(&self, node_count: usize) -> NodeSet {
        NodeSet::from_indices(
            node_count,
            self.adversaries
                .iter()
                .map(|a| a.node)
                .filter(|&v| v < node_count),
        )
    }

    fn script(&self, node_count: usize) -> Vec<Option<&AdversaryBehavior>> {
        let mut script = vec![None; node_count];
        for a in &self.adversaries {
            script[a.node] = Some(&a.behavior);
        }
        script
    }

    fn validate(&self, g: &Graph) -> Result<()> {
        let n = g.node_count();
        if self.initial_values.len() != n {
            return Err(Error::InvalidParameter(format!(
                "{} initial values for {n} nodes",
                self.initial_values.len()
            )));
        }
        if let Some(x) = self.initial_values.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "non-finite initial value {x}"
            )));
        }
        if !(self.convergence_eps > 0.0) {
            return Err(Error::InvalidParameter(
                "convergence_eps must be positive".into(),
            ));
        }
        let mut seen = NodeSet::empty(n);
        for a in &self.adversaries {
            if a.node >= n {
                return Err(Error::NodeOutOfRange {
                    node: a.node,
                    node_count: n,
                });
            }
            if !seen.insert(a.node) {
                return Err(Error::InvalidParameter(format!(
                    "node {} scripted twice",
                    a.node
                )));
            }
            a.behavior.validate()?;
        }
        if seen.len() == n {
            return Err(Error::InvalidParameter("every node is adversarial".into()));
        }
        Ok(())
    }
}

/// Every normal node has at most `f` adversarial neighbours.
pub fn is_f_local(g: &Graph, adversaries: &NodeSet, f: usize) -> bool {
    (0..g.node_count())
        .filter(|&v| !adversaries.contains(v))
        .all(|v| g.neighbors(v).intersection_count(adversaries) <= f)
}

/// Outcome of trimming one node's neighbourhood.
#[derive(Clone, Debug, PartialEq)]
pub struct Trimmed {
    pub retained: Vec<f64>,
    pub removed_high: usize,
    pub removed_low: usize,
}

/// Drops up to `f` of the largest values strictly above `own` and up to `f`
/// of the smallest strictly below it. Values equal to `own` always stay.
pub fn wmsr_filter(own: f64, neighbor_values: &[f64], f: usize) -> Trimmed {
    let mut sorted = neighbor_values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let below = sorted.iter().take_while(|&&x| x < own).count();
    let above = sorted.iter().rev().take_while(|&&x| x > own).count();
    let removed_low = below.min(f);
    let removed_high = above.min(f);
    let retained = sorted[removed_low..sorted.len() - removed_high].to_vec();
    Trimmed {
        retained,
        removed_high,
        removed_low,
    }
}

/// One synchronous round. Adversaries output their script for round `round`.
pub fn wmsr_step(g: &Graph, values: &[f64], cfg: &ConsensusConfig, round: usize) -> Vec<f64> {
    let script = cfg.script(g.node_count());
    step_with_script(g, values, cfg, &script, round)
}

fn step_with_script(
    g: &Graph,
    values: &[f64],
    cfg: &ConsensusConfig,
    script: &[Option<&AdversaryBehavior>],
    round: usize,
) -> Vec<f64> {
    let mut neighbor_values = Vec::new();
    (0..g.node_count())
        .map(|i| {
            if let Some(b) = script[i] {
                return b.value_at(cfg.seed, i, round);
            }
            neighbor_values.clear();
            neighbor_values.extend(g.neighbors(i).iter().map(|j| values[j]));
            let kept = wmsr_filter(values[i], &neighbor_values, cfg.f);
            (values[i] + kept.retained.iter().sum::<f64>()) / (kept.retained.len() + 1) as f64
        })
        .collect()
}

/// Per-round node values of a run plus summary statistics over normal nodes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConsensusTrace {
    /// `values[t][v]`: value of node `v` after `t` rounds.
    pub values: Vec<Vec<f64>>,
    pub is_adversary: Vec<bool>,
    pub converged_round: Option<usize>,
    pub final_spread: f64,
    /// Every normal value stayed inside the initial normal hull in every round.
    pub validity: bool,
    /// Normal-node max never rose and min never fell from one round to the next.
    pub monotone_hull: bool,
}

impl ConsensusTrace {
    fn normal_range(values: &[f64], is_adversary: &[bool]) -> (f64, f64) {
        values
            .iter()
            .zip(is_adversary)
            .filter(|(_, &adv)| !adv)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (&x, _)| {
                (lo.min(x), hi.max(x))
            })
    }

    pub fn rounds(&self) -> usize {
        self.values.len() - 1
    }

    /// `(min, max)` over normal nodes at round `t`.
    pub fn normal_hull(&self, t: usize) -> (f64, f64) {
        Self::normal_range(&self.values[t], &self.is_adversary)
    }

    /// CSV `round,node,value,is_adversary`, with header.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["round", "node", "value", "is_adversary"])?;
        for (t, row) in self.values.iter().enumerate() {
            for (v, x) in row.iter().enumerate() {
                out.write_record([
                    t.to_string(),
                    v.to_string(),
                    x.to_string(),
                    self.is_adversary[v].to_string(),
                ])?;
            }
        }
        out.flush()?;
        Ok(())
    }
}

/// Iterates W-MSR until the normal spread drops below `convergence_eps` or
/// `rounds_max` rounds have run.
pub fn run_consensus(g: &Graph, cfg: &ConsensusConfig) -> Result<ConsensusTrace> {
    cfg.validate(g)?;
    let n = g.node_count();
    let script = cfg.script(n);
    let is_adversary: Vec<bool> = script.iter().map(Option::is_some).collect();

    let mut current: Vec<f64> = (0..n)
        .map(|v| match script[v] {
            Some(b) => b.value_at(cfg.seed, v, 0),
            None => cfg.initial_values[v],
        })
        .collect();
    let (lo0, hi0) = ConsensusTrace::normal_range(&current, &is_adversary);
    let mut values = vec![current.clone()];
    let mut validity = true;
    let mut monotone_hull = true;
    let mut converged_round = None;
    let (mut prev_lo, mut prev_hi) = (lo0, hi0);

    for t in 0..=cfg.rounds_max {
        let (lo, hi) = ConsensusTrace::normal_range(&current, &is_adversary);
        validity &= lo >= lo0 && hi <= hi0;
        monotone_hull &= lo >= prev_lo && hi <= prev_hi;
        (prev_lo, prev_hi) = (lo, hi);
        if hi - lo < cfg.convergence_eps {
            converged_round = Some(t);
            break;
        }
        if t == cfg.rounds_max {
            break;
        }
        current = step_with_script(g, &current, cfg, &script, t + 1);
        if let Some(x) = current.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "non-finite value {x} produced in round {}",
                t + 1
            )));
        }
        values.push(current.clone());
    }
    let (lo, hi) = ConsensusTrace::normal_range(values.last().expect("nonempty"), &is_adversary);
    Ok(ConsensusTrace {
        values,
        is_adversary,
        converged_round,
        final_spread: hi - lo,
        validity,
        monotone_hull,
    })
}

/// Scenario built from a pair of disjoint sets that are not
/// `(F+1)`-reachable: nodes of `s1` start at `low`, nodes of `s2` at `high`,
/// everything else halfway between. One node of each set becomes a constant
/// adversary holding its side's value; the pair is the first (in index
/// order) with no common neighbour, so a single adversary per neighbourhood
/// keeps the placement 1-local. Errors if no such pair exists.
///
/// Each node of either set then sees at most `F` values from the other
/// side, all strictly beyond its own, and trims them away, so the two sides
/// never mix.
pub fn witness_split_config(
    g: &Graph,
    s1: &NodeSet,
    s2: &NodeSet,
    f: usize,
    (low, high): (f64, f64),
    rounds_max: usize,
) -> Result<ConsensusConfig> {
    g.check_set(s1)?;
    g.check_set(s2)?;
    if s1.is_empty() || s2.is_empty() {
        return Err(Error::EmptySet);
    }
    let (a, b) = s1
        .iter()
        .flat_map(|a| s2.iter().map(move |b| (a, b)))
        .find(|&(a, b)| g.neighbors(a).is_disjoint(g.neighbors(b)))
        .ok_or_else(|| {
            Error::Precondition("every cross pair shares a neighbour; no 1-local placement".into())
        })?;
    let mid = (low + high) / 2.0;
    let initial_values = (0..g.node_count())
        .map(|v| {
            if s1.contains(v) {
                low
            } else if s2.contains(v) {
                high
            } else {
                mid
            }
        })
        .collect();
    Ok(ConsensusConfig {
        f,
        rounds_max,
        convergence_eps: 1e-6,
        adversaries: vec![
            Adversary {
                node: a,
                behavior: AdversaryBehavior::Constant { value: low },
            },
            Adversary {
                node: b,
                behavior: AdversaryBehavior::Constant { value: high },
            },
        ],
        initial_values,
        seed: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::gen_fig1;
    use proptest::prelude::*;

    fn plain(f: usize, initial_values: Vec<f64>) -> ConsensusConfig {
        ConsensusConfig {
            f,
            rounds_max: 200,
            convergence_eps: 1e-6,
            adversaries: vec![],
            initial_values,
            seed: 0,
        }
    }

    /// `x ← W x` with `W = (I + A)` row-normalized.
    fn averaging_oracle(g: &Graph, x: &[f64], rounds: usize) -> Vec<f64> {
        let n = g.node_count();
        let mut w = vec![vec![0.0; n]; n];
        for i in 0..n {
            let d = g.neighbors(i).len() as f64 + 1.0;
            w[i][i] = 1.0 / d;
            for j in g.neighbors(i).iter() {
                w[i][j] = 1.0 / d;
            }
        }
        let mut x = x.to_vec();
        for _ in 0..rounds {
            x = (0..n)
                .map(|i| (0..n).map(|j| w[i][j] * x[j]).sum())
                .collect();
        }
        x
    }

    #[test]
    fn f_zero_is_plain_averaging() {
        let g = Graph::cycle(5);
        let x = vec![1.0, 4.0, -2.0, 0.5, 3.0];
        let next = wmsr_step(&g, &x, &plain(0, x.clone()), 1);
        let oracle = averaging_oracle(&g, &x, 1);
        for (a, b) in next.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn star_center_trims_both_extremes() {
        let g = Graph::from_edges(3, [(0, 1), (0, 2)]).unwrap();
        let x = vec![5.0, 0.0, 10.0];
        let next = wmsr_step(&g, &x, &plain(1, x.clone()), 1);
        assert_eq!(next[0], 5.0);
    }

    #[test]
    fn single_outlier_is_discarded() {
        let g = Graph::complete(5);
        let mut cfg = plain(1, vec![0.0; 5]);
        cfg.adversaries = vec![Adversary {
            node: 4,
            behavior: AdversaryBehavior::Constant { value: 100.0 },
        }];
        let x = vec![0.0, 0.0, 0.0, 0.0, 100.0];
        let next = wmsr_step(&g, &x, &cfg, 1);
        assert_eq!(&next[..4], &[0.0; 4]);
        assert_eq!(next[4], 100.0);
    }

    #[test]
    fn filter_keeps_ties_and_counts_removals() {
        let t = wmsr_filter(2.0, &[2.0, 2.0, 5.0, 1.0, 9.0, -3.0], 1);
        assert_eq!((t.removed_high, t.removed_low), (1, 1));
        assert_eq!(t.retained, vec![1.0, 2.0, 2.0, 5.0]);
        let t = wmsr_filter(2.0, &[2.0, 2.0], 3);
        assert_eq!((t.removed_high, t.removed_low), (0, 0));
        assert_eq!(t.retained.len(), 2);
    }

    #[test]
    fn k4_averaging_converges() {
        let g = Graph::complete(4);
        let trace = run_consensus(&g, &plain(0, vec![3.0, -1.0, 8.0, 0.25])).unwrap();
        assert!(trace.converged_round.is_some());
        assert!(trace.final_spread < 1e-6);
        assert!(trace.validity && trace.monotone_hull);
        let mean = (3.0 - 1.0 + 8.0 + 0.25) / 4.0;
        assert!(trace
            .values
            .last()
            .unwrap()
            .iter()
            .all(|x| (x - mean).abs() < 1e-6));
    }

    #[test]
    fn fig1_split_scenario_never_agrees() {
        let g = gen_fig1(16, 1).unwrap().into_graph();
        let s1 = NodeSet::from_indices(16, 0..8);
        let s2 = NodeSet::from_indices(16, 8..16);
        let cfg = witness_split_config(&g, &s1, &s2, 1, (0.0, 10.0), 300).unwrap();
        assert!(is_f_local(&g, &cfg.adversary_set(16), 1));
        let trace = run_consensus(&g, &cfg).unwrap();
        assert!(trace.converged_round.is_none());
        assert!(trace.final_spread > 1.0);
        assert_eq!(trace.rounds(), 300);
    }

    #[test]
    fn adversaries_follow_their_script() {
        let g = Graph::complete(6);
        let mut cfg = plain(1, vec![0.0, 1.0, 2.0, 3.0, 4.0, 0.0]);
        cfg.rounds_max = 20;
        cfg.convergence_eps = 1e-12;
        cfg.adversaries = vec![Adversary {
            node: 5,
            behavior: AdversaryBehavior::Ramp {
                start: 1.0,
                slope: 2.0,
            },
        }];
        let trace = run_consensus(&g, &cfg).unwrap();
        for (t, row) in trace.values.iter().enumerate() {
            assert_eq!(row[5], 1.0 + 2.0 * t as f64);
        }
        assert!(trace.values.len() <= cfg.rounds_max + 1);
        assert!(trace.validity);
    }

    #[test]
    fn random_script_is_reproducible() {
        let g = Graph::complete(7);
        let mut cfg = plain(1, (0..7).map(f64::from).collect());
        cfg.seed = 99;
        cfg.rounds_max = 30;
        cfg.adversaries = vec![Adversary {
            node: 0,
            behavior: AdversaryBehavior::RandomIn {
                lo: -50.0,
                hi: 50.0,
            },
        }];
        let a = run_consensus(&g, &cfg).unwrap();
        let b = run_consensus(&g, &cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.values.iter().all(|row| (-50.0..50.0).contains(&row[0])));
    }

    #[test]
    fn rejects_bad_inputs() {
        let g = Graph::complete(3);
        assert!(run_consensus(&g, &plain(0, vec![0.0, f64::NAN, 1.0])).is_err());
        assert!(run_consensus(&g, &plain(0, vec![0.0, 1.0])).is_err());
        let mut cfg = plain(1, vec![0.0; 3]);
        cfg.adversaries = vec![Adversary {
            node: 0,
            behavior: AdversaryBehavior::Constant {
                value: f64::INFINITY,
            },
        }];
        assert!(run_consensus(&g, &cfg).is_err());
        cfg.adversaries = vec![Adversary {
            node: 0,
            behavior: AdversaryBehavior::RandomIn { lo: 1.0, hi: 0.0 },
        }];
        assert!(run_consensus(&g, &cfg).is_err());
    }

    #[test]
    fn scenario_json_roundtrip_and_csv() {
        let json = r#"{
            "f": 1, "rounds_max": 5, "convergence_eps": 1e-6,
            "adversaries": [{"node": 2, "behavior": {"kind": "ramp", "start": 0.0, "slope": 1.5}}],
            "initial_values": [0.0, 1.0, 2.0]
        }"#;
        let cfg: ConsensusConfig = serde_json::from_str(json).unwrap();
        assert_eq!(
            cfg.adversaries[0].behavior,
            AdversaryBehavior::Ramp {
                start: 0.0,
                slope: 1.5
            }
        );
        let trace = run_consensus(&Graph::complete(3), &cfg).unwrap();
        let mut buf = Vec::new();
        trace.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("round,node,value,is_adversary\n0,0,0,false\n"));
        assert!(text.contains("\n0,2,0,true\n"));
    }

    proptest! {
        #[test]
        fn f_zero_matches_matrix_powers(n in 2usize..10, seed in any::<u64>(), rounds in 1usize..15) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let edges: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
            let edges: Vec<_> = edges.into_iter().filter(|_| rng.gen_bool(0.5)).collect();
            let g = Graph::from_edges(n, edges).unwrap();
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
            let mut cfg = plain(0, x.clone());
            cfg.rounds_max = rounds;
            cfg.convergence_eps = 1e-300;
            let trace = run_consensus(&g, &cfg).unwrap();
            let oracle = averaging_oracle(&g, &x, trace.rounds());
            for (a, b) in trace.values.last().unwrap().iter().zip(&oracle) {
                prop_assert!((a - b).abs() < 1e-9);
            }
        }

        #[test]
        fn filter_removes_only_strict_extremes(own in -5i32..5, vals in prop::collection::vec(-5i32..5, 0..12), f in 0usize..4) {
            let vals: Vec<f64> = vals.into_iter().map(f64::from).collect();
            let own = f64::from(own);
            let t = wmsr_filter(own, &vals, f);
            prop_assert!(t.removed_high <= f && t.removed_low <= f);
            prop_assert_eq!(t.retained.len() + t.removed_high + t.removed_low, vals.len());
            let ties = vals.iter().filter(|&&x| x == own).count();
            prop_assert_eq!(t.retained.iter().filter(|&&x| x == own).count(), ties);
            let above = vals.iter().filter(|&&x| x > own).count();
            prop_assert_eq!(t.removed_high, above.min(f));
        }
    }
}
