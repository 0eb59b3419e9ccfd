//! Seeded constructors for random k-partite graphs, random interdependent
//! networks and the deterministic counterexample family.
//!
//! Every random draw comes from a ChaCha stream derived from a [`GenSeed`],
//! and candidate pairs are visited in a fixed layer-major, index-major
//! order, so a seed maps to the same graph on every platform and under any
//! thread schedule.

use std::path::PathBuf;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, LayeredGraph};

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds a sequence of indices into a base seed. Pure; order matters.
pub fn derive_seed(base: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(base), |acc, &x| splitmix64(acc ^ splitmix64(x)))
}

/// Per-trial seed: the stream for a trial is a pure function of both fields.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GenSeed {
    pub base_seed: u64,
    pub trial_index: u64,
}

impl GenSeed {
    pub fn new(base_seed: u64, trial_index: u64) -> Self {
        GenSeed {
            base_seed,
            trial_index,
        }
    }

    /// Independent stream for one purpose (inter-layer draws, layer `i`, ...).
    pub fn stream(&self, purpose: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(derive_seed(self.base_seed, &[self.trial_index, purpose]))
    }
}

const INTER_STREAM: u64 = 0;
const INTRA_STREAM_BASE: u64 = 1;

/// Topology of a single layer.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IntraKind {
    Empty,
    Complete,
    ErdosRenyi {
        q: f64,
    },
    Ring,
    /// Edge-list file with exactly `n` nodes, read when the spec is resolved.
    FromFile {
        path: PathBuf,
    },
    #[serde(skip)]
    Fixed(Arc<Graph>),
}

impl IntraKind {
    fn validate(&self, n: usize) -> Result<()> {
        match self {
            IntraKind::ErdosRenyi { q } if !(0.0..=1.0).contains(q) => Err(
                Error::InvalidParameter(format!("intra-layer probability {q} not in [0, 1]")),
            ),
            IntraKind::Fixed(g) if g.node_count() != n => Err(Error::InvalidParameter(format!(
                "layer graph has {} nodes, layers have {n}",
                g.node_count()
            ))),
            _ => Ok(()),
        }
    }

    fn resolve(&self) -> Result<IntraKind> {
        Ok(match self {
            IntraKind::FromFile { path } => {
                let file = std::fs::File::open(path)?;
                IntraKind::Fixed(Arc::new(Graph::read_edge_list(std::io::BufReader::new(
                    file,
                ))?))
            }
            other => other.clone(),
        })
    }

    fn short_name(&self) -> String {
        match self {
            IntraKind::Empty => "empty".into(),
            IntraKind::Complete => "complete".into(),
            IntraKind::ErdosRenyi { q } => format!("er({q})"),
            IntraKind::Ring => "ring".into(),
            IntraKind::FromFile { path } => format!("file({})", path.display()),
            IntraKind::Fixed(_) => "fixed".into(),
        }
    }
}

/// Intra-layer topology: either one kind for every layer or one per layer.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IntraLayerSpec {
    Uniform(IntraKind),
    PerLayer(Vec<IntraKind>),
}

impl Default for IntraLayerSpec {
    fn default() -> Self {
        IntraLayerSpec::Uniform(IntraKind::Empty)
    }
}

impl IntraLayerSpec {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn erdos_renyi(q: f64) -> Self {
        IntraLayerSpec::Uniform(IntraKind::ErdosRenyi { q })
    }

    fn kind_for(&self, layer: usize) -> &IntraKind {
        match self {
            IntraLayerSpec::Uniform(kind) => kind,
            IntraLayerSpec::PerLayer(kinds) => &kinds[layer],
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            IntraLayerSpec::Uniform(k) => matches!(k, IntraKind::Empty),
            IntraLayerSpec::PerLayer(ks) => ks.iter().all(|k| matches!(k, IntraKind::Empty)),
        }
    }

    /// Loads any file-backed layers so repeated generation does no I/O.
    pub fn resolve(&self) -> Result<IntraLayerSpec> {
        Ok(match self {
            IntraLayerSpec::Uniform(k) => IntraLayerSpec::Uniform(k.resolve()?),
            IntraLayerSpec::PerLayer(ks) => {
                IntraLayerSpec::PerLayer(ks.iter().map(IntraKind::resolve).collect::<Result<_>>()?)
            }
        })
    }

    /// Compact label used in sweep output.
    pub fn label(&self) -> String {
        match self {
            IntraLayerSpec::Uniform(k) => k.short_name(),
            IntraLayerSpec::PerLayer(ks) => ks
                .iter()
                .map(IntraKind::short_name)
                .collect::<Vec<_>>()
                .join("|"),
        }
    }
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "probability {p} not in [0, 1]"
        )));
    }
    Ok(())
}

fn check_shape(n: usize, k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "an interdependent network needs k >= 2 layers, got {k}"
        )));
    }
    if n < 1 {
        return Err(Error::InvalidParameter("layer size n must be >= 1".into()));
    }
    Ok(())
}

fn add_inter_layer_edges(g: &mut Graph, n: usize, k: usize, p: f64, rng: &mut ChaCha8Rng) {
    for la in 0..k {
        for lb in la + 1..k {
            for i in 0..n {
                for j in 0..n {
                    if rng.gen::<f64>() < p {
                        g.add_edge_unchecked(la * n + i, lb * n + j);
                    }
                }
            }
        }
    }
}

/// Random k-partite graph: each of the `n²·k(k−1)/2` inter-layer pairs is an
/// edge independently with probability `p`.
pub fn gen_k_partite(n: usize, k: usize, p: f64, seed: GenSeed) -> Result<LayeredGraph> {
    check_shape(n, k)?;
    check_probability(p)?;
    let mut g = Graph::edgeless(n * k);
    add_inter_layer_edges(&mut g, n, k, p, &mut seed.stream(INTER_STREAM));
    LayeredGraph::new(g, k, n)
}

/// Random interdependent network with Bernoulli interconnections.
///
/// The inter-layer draws use the same stream as [`gen_k_partite`], so an
/// empty intra-layer spec reproduces it exactly; each layer draws from its
/// own stream.
pub fn gen_interdependent(
    n: usize,
    k: usize,
    p: f64,
    intra: &IntraLayerSpec,
    seed: GenSeed,
) -> Result<LayeredGraph> {
    check_shape(n, k)?;
    check_probability(p)?;
    if let IntraLayerSpec::PerLayer(kinds) = intra {
        if kinds.len() != k {
            return Err(Error::InvalidParameter(format!(
                "{} per-layer specs for {k} layers",
                kinds.len()
            )));
        }
    }
    let resolved;
    let intra = if needs_resolve(intra) {
        resolved = intra.resolve()?;
        &resolved
    } else {
        intra
    };
    for layer in 0..k {
        intra.kind_for(layer).validate(n)?;
    }

    let mut g = Graph::edgeless(n * k);
    add_inter_layer_edges(&mut g, n, k, p, &mut seed.stream(INTER_STREAM));
    for layer in 0..k {
        let base = layer * n;
        let mut rng = seed.stream(INTRA_STREAM_BASE + layer as u64);
        match intra.kind_for(layer) {
            IntraKind::Empty => {}
            IntraKind::Complete => {
                for i in 0..n {
                    for j in i + 1..n {
                        g.add_edge_unchecked(base + i, base + j);
                    }
                }
            }
            IntraKind::ErdosRenyi { q } => {
                for i in 0..n {
                    for j in i + 1..n {
                        if rng.gen::<f64>() < *q {
                            g.add_edge_unchecked(base + i, base + j);
                        }
                    }
                }
            }
            IntraKind::Ring => {
                for (i, j) in Graph::cycle(n).edges() {
                    g.add_edge_unchecked(base + i, base + j);
                }
            }
            IntraKind::Fixed(layer_graph) => {
                for (i, j) in layer_graph.edges() {
                    g.add_edge_unchecked(base + i, base + j);
                }
            }
            IntraKind::FromFile { .. } => unreachable!("resolved above"),
        }
    }
    LayeredGraph::new(g, k, n)
}

fn needs_resolve(intra: &IntraLayerSpec) -> bool {
    match intra {
        IntraLayerSpec::Uniform(k) => matches!(k, IntraKind::FromFile { .. }),
        IntraLayerSpec::PerLayer(ks) => ks.iter().any(|k| matches!(k, IntraKind::FromFile { .. })),
    }
}

/// Four blocks `V₁..V₄` of `n/4` nodes: `V₁–V₂` and `V₃–V₄` complete
/// bipartite, `V₂–V₃` a `t`-regular circulant (node `j` of `V₂` meets nodes
/// `j, j+1, …, j+t−1 (mod n/4)` of `V₃`). With `t = 1` this is the perfect
/// matching version.
pub fn gen_fig1(n: usize, t: usize) -> Result<LayeredGraph> {
    if n == 0 || n % 4 != 0 {
        return Err(Error::InvalidParameter(format!(
            "n = {n} must be a positive multiple of 4"
        )));
    }
    let q = n / 4;
    if t < 1 || t > q {
        return Err(Error::InvalidParameter(format!(
            "coupling degree t = {t} must lie in 1..={q}"
        )));
    }
    let (v1, v2, v3, v4) = (0, q, 2 * q, 3 * q);
    let mut g = Graph::edgeless(n);
    for a in 0..q {
        for b in 0..q {
            g.add_edge_unchecked(v1 + a, v2 + b);
            g.add_edge_unchecked(v3 + a, v4 + b);
        }
    }
    for j in 0..q {
        for s in 0..t {
            g.add_edge_unchecked(v2 + j, v3 + (j + s) % q);
        }
    }
    LayeredGraph::new(g, 4, q)
}
