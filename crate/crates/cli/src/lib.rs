//! Command-line front end. Everything a subcommand does is a function of its
//! flags, input files and seed; the same invocation always writes the same
//! bytes.

use std::fmt;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;
use serde::Serialize;

use interdep::consensus::{
    is_f_local, run_consensus, witness_split_config, ConsensusConfig, ConsensusTrace,
};
use interdep::experiments::{
    run_boundary_concentration, run_growth_sweep, run_property_sr_check, run_threshold_sweep,
    ExperimentSpec, Family, Metric, PRule, RunOptions, SweepResult,
};
use interdep::generators::{gen_fig1, gen_interdependent, GenSeed, IntraKind, IntraLayerSpec};
use interdep::robustness::{
    certify_r_robust, is_r_robust_exact, max_certified_r, robustness_parameter_exact,
    CertificateInputs, DEFAULT_ROBUSTNESS_CAP,
};
use interdep::spectral::{default_tolerance, laplacian_spectrum};
use interdep::structural::{
    isoperimetric_bounds, isoperimetric_exact, vertex_connectivity, DEFAULT_ISOPERIMETRIC_CAP,
};
use interdep::{Error, Graph, LayeredGraph};

/// Bad flags or inputs, as opposed to a computation that failed.
#[derive(Debug)]
pub struct Usage(pub String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

/// 2 for usage and input errors, 3 for computation errors.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if cause.is::<Usage>() || cause.is::<std::io::Error>() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<Error>() {
            return if e.is_usage() || matches!(e, Error::Io(_)) {
                2
            } else {
                3
            };
        }
    }
    3
}

#[derive(Debug, Parser)]
#[command(
    name = "interdep",
    version,
    about = "Random interdependent networks: generation, robustness analysis, threshold sweeps and W-MSR consensus"
)]
pub struct Cli {
    /// Worker threads for sweeps (default: available parallelism). Output does not depend on it.
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw a random interdependent network: k layers of n nodes, each
    /// inter-layer pair an edge with probability p, plus intra-layer edges.
    Generate(GenerateArgs),
    /// Build the four-partition counterexample: complete bipartite V1-V2 and
    /// V3-V4, and a t-regular circulant between V2 and V3.
    Fig1(Fig1Args),
    /// Report degrees, vertex connectivity, isoperimetric constant, algebraic
    /// connectivity and robustness of a graph as JSON.
    Analyze(AnalyzeArgs),
    /// Decide r-robustness exactly or by certificate, or compute the
    /// robustness parameter.
    Robustness(RobustnessArgs),
    /// Laplacian spectrum and algebraic connectivity.
    Spectral(SpectralArgs),
    /// Threshold sweep: p = (ln n + (r-1) ln ln n + x)/((k-1)n) for each offset x.
    SweepThreshold(SweepArgs),
    /// Growth sweep: p = c ln n/((k-1)n) for each c > 1; reports ratios to np.
    SweepGrowth(SweepArgs),
    /// Concentration of the edge count leaving layer 0.
    SweepBoundary(BoundaryArgs),
    /// Fraction of graphs near threshold whose every set of at most half the
    /// nodes has more than (r-1)|S| boundary edges.
    SweepSr(SrArgs),
    /// Simulate W-MSR consensus from a scenario file, or the split
    /// demonstration on the counterexample graph.
    Consensus(ConsensusArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub p: f64,
    /// empty, complete, ring, er:<q> or file:<path>.
    #[arg(long, default_value = "empty")]
    pub intra: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub trial: u64,
    /// Edge-list output (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Companion `node layer` file.
    #[arg(long)]
    pub layers_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Fig1Args {
    /// Total node count, divisible by 4.
    #[arg(long, default_value_t = 16)]
    pub n: usize,
    /// Links per V2 node into V3, 1..=n/4.
    #[arg(long, default_value_t = 1)]
    pub t: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub layers_out: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct CapArgs {
    /// Largest graph for exact robustness enumeration.
    #[arg(long)]
    pub robustness_cap: Option<usize>,
    /// Largest graph for exact isoperimetric enumeration.
    #[arg(long)]
    pub iso_cap: Option<usize>,
}

impl CapArgs {
    /// Resolved caps; overrides are announced on standard error.
    pub fn resolve(&self) -> (usize, usize) {
        let warn = |name: &str, value: usize, default: usize| {
            if value != default {
                eprintln!(
                    "WARNING: {name} overridden: {value} (default {default}). Exact enumeration \
                     cost grows exponentially with the node count."
                );
            }
            value
        };
        (
            self.robustness_cap.map_or(DEFAULT_ROBUSTNESS_CAP, |c| {
                warn("robustness cap", c, DEFAULT_ROBUSTNESS_CAP)
            }),
            self.iso_cap.map_or(DEFAULT_ISOPERIMETRIC_CAP, |c| {
                warn("isoperimetric cap", c, DEFAULT_ISOPERIMETRIC_CAP)
            }),
        )
    }
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Edge-list file.
    pub graph: PathBuf,
    #[command(flatten)]
    pub caps: CapArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RobustnessArgs {
    pub graph: PathBuf,
    /// Query r-robustness; without it the robustness parameter is computed.
    #[arg(long)]
    pub r: Option<usize>,
    /// Use degree, spectral and isoperimetric certificates instead of enumeration.
    #[arg(long, requires = "r")]
    pub certify: bool,
    #[command(flatten)]
    pub caps: CapArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct SpectralArgs {
    pub graph: PathBuf,
    /// Absolute eigenvalue tolerance (default 1e-9 * max(1, 2 d_max)).
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Value of the graph_id column in CSV output.
    #[arg(long, default_value = "g")]
    pub graph_id: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// JSON spec file; replaces every sweep flag below.
    #[arg(long, conflicts_with_all = ["n_list", "k", "r", "x", "c", "trials", "seed", "metrics", "intra", "epsilon"])]
    pub spec: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub n_list: Vec<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub r: Option<usize>,
    /// Threshold offsets (sweep-threshold).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub x: Vec<f64>,
    /// Growth factors (sweep-growth).
    #[arg(long, value_delimiter = ',')]
    pub c: Vec<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated metric names, e.g. min_deg_ge_r,robust_exact.
    #[arg(long, value_delimiter = ',')]
    pub metrics: Vec<String>,
    /// Intra-layer topology; anything but `empty` switches to the interdependent family.
    #[arg(long)]
    pub intra: Option<String>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[command(flatten)]
    pub caps: CapArgs,
    /// CSV output (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundaryArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value_t = 500)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SrArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long, default_value_t = 2)]
    pub r: usize,
    #[arg(
        long,
        value_delimiter = ',',
        allow_negative_numbers = true,
        required = true
    )]
    pub x: Vec<f64>,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest kn for the exact enumeration.
    #[arg(long)]
    pub subset_cap: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConsensusArgs {
    /// Edge-list file (not used with --fig1-demo).
    #[arg(
        long,
        required_unless_present = "fig1_demo",
        conflicts_with = "fig1_demo"
    )]
    pub graph: Option<PathBuf>,
    /// JSON scenario: f, rounds_max, convergence_eps, adversaries, initial_values, seed.
    #[arg(
        long,
        required_unless_present = "fig1_demo",
        conflicts_with = "fig1_demo"
    )]
    pub scenario: Option<PathBuf>,
    /// Constructed split run on the counterexample graph: the two sides of a
    /// violating pair start apart and constant adversaries hold them there.
    #[arg(long)]
    pub fig1_demo: bool,
    #[arg(long, default_value_t = 16)]
    pub n: usize,
    #[arg(long, default_value_t = 300)]
    pub rounds: usize,
    /// Per-round trace CSV.
    #[arg(long)]
    pub trace_out: Option<PathBuf>,
    /// Summary JSON (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
            Ok(())
        }
    }
}

fn to_json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub fn read_graph(path: &Path) -> Result<Graph> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Graph::read_edge_list(BufReader::new(file))
        .with_context(|| format!("parsing {}", path.display()))
}

/// `empty`, `complete`, `ring`, `er:<q>`, `file:<path>`.
pub fn parse_intra(s: &str) -> Result<IntraLayerSpec> {
    let kind = match s.split_once(':') {
        None => match s {
            "empty" => IntraKind::Empty,
            "complete" => IntraKind::Complete,
            "ring" => IntraKind::Ring,
            _ => return Err(usage(format!("unknown intra-layer kind `{s}`"))),
        },
        Some(("er", q)) => IntraKind::ErdosRenyi {
            q: q.parse()
                .map_err(|_| usage(format!("bad probability `{q}`")))?,
        },
        Some(("file", path)) => IntraKind::FromFile { path: path.into() },
        Some(_) => return Err(usage(format!("unknown intra-layer kind `{s}`"))),
    };
    Ok(IntraLayerSpec::Uniform(kind))
}

fn parse_metric(s: &str) -> Result<Metric> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| usage(format!("unknown metric `{s}`")))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RationalJson {
    pub num: u64,
    pub den: u64,
}

impl From<Ratio<u64>> for RationalJson {
    fn from(r: Ratio<u64>) -> Self {
        RationalJson {
            num: *r.numer(),
            den: *r.denom(),
        }
    }
}

/// Single-graph report. Exact fields appear only when the graph fits under
/// the corresponding cap.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalyzeReport {
    pub n: usize,
    pub m: usize,
    pub d_min: usize,
    pub d_max: usize,
    pub kappa: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i_exact: Option<RationalJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i_argmin: Option<Vec<usize>>,
    /// `[λ₂/2, d_min]`.
    pub i_bounds: [f64; 2],
    pub lambda2: f64,
    pub eigen_tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub robustness_exact: Option<usize>,
    /// Largest r proven by a certificate.
    pub robustness_certified: usize,
}

pub fn analyze(
    g: &Graph,
    robustness_cap: usize,
    iso_cap: usize,
) -> interdep::Result<AnalyzeReport> {
    let n = g.node_count();
    if n < 2 {
        return Err(Error::TooFewNodes {
            required: 2,
            found: n,
        });
    }
    let (d_min, d_max) = g.min_max_degree()?;
    let tol = default_tolerance(g);
    let spectrum = laplacian_spectrum(g, tol)?;
    let lambda2 = spectrum.algebraic_connectivity().expect("n >= 2");
    let iso = if n <= iso_cap {
        Some(isoperimetric_exact(g, iso_cap)?)
    } else {
        None
    };
    let robustness_exact = if n <= robustness_cap {
        Some(robustness_parameter_exact(g, robustness_cap)?)
    } else {
        None
    };
    let inputs = CertificateInputs {
        lambda2,
        tolerance: tol,
        i_exact: iso.as_ref().map(|i| i.value),
        d_min,
    };
    let (lower, upper) = isoperimetric_bounds(g, lambda2)?;
    Ok(AnalyzeReport {
        n,
        m: g.edge_count(),
        d_min,
        d_max,
        kappa: vertex_connectivity(g)?,
        i_exact: iso.as_ref().map(|i| i.value.into()),
        i_argmin: iso.as_ref().map(|i| i.argmin_set.to_vec()),
        i_bounds: [lower, upper],
        lambda2,
        eigen_tolerance: tol,
        robustness_exact,
        robustness_certified: max_certified_r(&inputs),
    })
}

fn sweep_spec(args: &SweepArgs, growth: bool) -> Result<ExperimentSpec> {
    let (robustness_cap, iso_cap) = args.caps.resolve();
    if let Some(path) = &args.spec {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut spec: ExperimentSpec = serde_json::from_str(&text)
            .map_err(|e| usage(format!("invalid spec {}: {e}", path.display())))?;
        if args.caps.robustness_cap.is_some() {
            spec.robustness_cap = robustness_cap;
        }
        if args.caps.iso_cap.is_some() {
            spec.iso_cap = iso_cap;
        }
        return Ok(spec);
    }
    let need = |what: &str| usage(format!("--{what} is required without --spec"));
    if args.n_list.is_empty() {
        return Err(need("n-list"));
    }
    let p_rule = if growth {
        if !args.x.is_empty() {
            return Err(usage("--x belongs to sweep-threshold"));
        }
        if args.c.is_empty() {
            return Err(need("c"));
        }
        PRule::COverThreshold { c: args.c.clone() }
    } else {
        if !args.c.is_empty() {
            return Err(usage("--c belongs to sweep-growth"));
        }
        if args.x.is_empty() {
            return Err(need("x"));
        }
        PRule::ThresholdOffsets { x: args.x.clone() }
    };
    let metrics = if args.metrics.is_empty() {
        if growth {
            vec![
                Metric::Lambda2OverNp,
                Metric::ILowerOverNp,
                Metric::DMinOverNp,
                Metric::DMaxOverNp,
                Metric::DMaxBound,
            ]
        } else {
            vec![Metric::MinDegGeR]
        }
    } else {
        args.metrics
            .iter()
            .map(|m| parse_metric(m))
            .collect::<Result<_>>()?
    };
    let family = match args.intra.as_deref() {
        None | Some("empty") => Family::KPartite,
        Some(s) => Family::Interdependent {
            intra: parse_intra(s)?,
        },
    };
    Ok(ExperimentSpec {
        family,
        n_list: args.n_list.clone(),
        k: args.k.unwrap_or(2),
        r: args.r.unwrap_or(if growth { 1 } else { 2 }),
        p_rule,
        trials: args.trials.unwrap_or(100),
        base_seed: args.seed.unwrap_or(0),
        metrics,
        robustness_cap,
        iso_cap,
        epsilon: args.epsilon.unwrap_or(0.25),
    })
}

fn write_sweep(result: &SweepResult, out: Option<&Path>) -> Result<()> {
    write_output(out, result.to_csv_string().as_bytes())
}

/// Summary of one consensus run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConsensusSummary {
    pub rounds: usize,
    pub converged_round: Option<usize>,
    pub final_spread: f64,
    pub validity: bool,
    pub monotone_hull: bool,
    pub f_local: bool,
}

impl ConsensusSummary {
    pub fn new(g: &Graph, cfg: &ConsensusConfig, trace: &ConsensusTrace) -> Self {
        ConsensusSummary {
            rounds: trace.rounds(),
            converged_round: trace.converged_round,
            final_spread: trace.final_spread,
            validity: trace.validity,
            monotone_hull: trace.monotone_hull,
            f_local: is_f_local(g, &cfg.adversary_set(g.node_count()), cfg.f),
        }
    }
}

/// Scenario on the counterexample graph built from the exact checker's
/// 2-robustness witness, with F = 1.
pub fn fig1_demo_scenario(n: usize, rounds: usize) -> Result<(Graph, ConsensusConfig)> {
    let g = gen_fig1(n, 1)?.into_graph();
    let verdict = is_r_robust_exact(&g, 2, DEFAULT_ROBUSTNESS_CAP.max(n))?;
    let (s1, s2) = verdict
        .witness()
        .ok_or_else(|| anyhow::anyhow!("graph unexpectedly 2-robust"))?;
    let cfg = witness_split_config(&g, s1, s2, 1, (0.0, 10.0), rounds)?;
    Ok((g, cfg))
}

fn write_layered(lg: &LayeredGraph, out: Option<&Path>, layers_out: Option<&Path>) -> Result<()> {
    write_output(out, lg.graph().to_edge_list_string().as_bytes())?;
    if let Some(path) = layers_out {
        let mut buf = Vec::new();
        lg.write_layers(&mut buf)?;
        write_output(Some(path), &buf)?;
    }
    Ok(())
}

pub fn run(cli: Cli) -> Result<()> {
    let opts = RunOptions {
        workers: cli.workers,
        progress: true,
    };
    if cli.workers == Some(0) {
        return Err(usage("--workers must be at least 1"));
    }
    match cli.command {
        Command::Generate(a) => {
            let intra = parse_intra(&a.intra)?;
            let lg = gen_interdependent(a.n, a.k, a.p, &intra, GenSeed::new(a.seed, a.trial))?;
            write_layered(&lg, a.out.as_deref(), a.layers_out.as_deref())
        }
        Command::Fig1(a) => {
            let lg = gen_fig1(a.n, a.t)?;
            write_layered(&lg, a.out.as_deref(), a.layers_out.as_deref())
        }
        Command::Analyze(a) => {
            let (rc, ic) = a.caps.resolve();
            let g = read_graph(&a.graph)?;
            let report = analyze(&g, rc, ic)?;
            write_output(a.out.as_deref(), &to_json_bytes(&report)?)
        }
        Command::Robustness(a) => {
            let (rc, ic) = a.caps.resolve();
            let g = read_graph(&a.graph)?;
            let json = match a.r {
                None => {
                    serde_json::json!({ "robustness_parameter": robustness_parameter_exact(&g, rc)? })
                }
                Some(r) if a.certify => {
                    let mut inputs = CertificateInputs::from_graph(&g)?;
                    if g.node_count() <= ic {
                        inputs.i_exact = Some(isoperimetric_exact(&g, ic)?.value);
                    }
                    match certify_r_robust(r, &inputs) {
                        Ok(v) => v.to_json(),
                        Err(Error::Indeterminate { .. }) => serde_json::json!({
                            "r": r,
                            "status": "indeterminate",
                            "method": null,
                            "lambda2": inputs.lambda2,
                            "d_min": inputs.d_min,
                        }),
                        Err(e) => return Err(e.into()),
                    }
                }
                Some(r) => is_r_robust_exact(&g, r, rc)?.to_json(),
            };
            write_output(None, &to_json_bytes(&json)?)
        }
        Command::Spectral(a) => {
            let g = read_graph(&a.graph)?;
            let tol = a.tol.unwrap_or_else(|| default_tolerance(&g));
            let spectrum = laplacian_spectrum(&g, tol)?;
            let bytes = match a.format {
                Format::Csv => {
                    let mut buf = Vec::new();
                    spectrum.write_csv(&a.graph_id, &mut buf)?;
                    buf
                }
                Format::Json => to_json_bytes(&serde_json::json!({
                    "eigenvalues": spectrum.eigenvalues,
                    "lambda2": spectrum.algebraic_connectivity(),
                    "tolerance": spectrum.tolerance,
                }))?,
            };
            write_output(a.out.as_deref(), &bytes)
        }
        Command::SweepThreshold(a) => {
            let spec = sweep_spec(&a, false)?;
            write_sweep(&run_threshold_sweep(&spec, &opts)?, a.out.as_deref())
        }
        Command::SweepGrowth(a) => {
            let spec = sweep_spec(&a, true)?;
            write_sweep(&run_growth_sweep(&spec, &opts)?, a.out.as_deref())
        }
        Command::SweepBoundary(a) => {
            let res = run_boundary_concentration(a.n, a.k, a.p, a.trials, a.seed, &opts)?;
            write_sweep(&res, a.out.as_deref())
        }
        Command::SweepSr(a) => {
            let cap = a.subset_cap.unwrap_or(DEFAULT_ISOPERIMETRIC_CAP);
            if cap != DEFAULT_ISOPERIMETRIC_CAP {
                eprintln!(
                    "WARNING: subset cap overridden: {cap} (default {DEFAULT_ISOPERIMETRIC_CAP})"
                );
            }
            let res = run_property_sr_check(a.n, a.k, a.r, &a.x, a.trials, cap, a.seed, &opts)?;
            write_sweep(&res, a.out.as_deref())
        }
        Command::Consensus(a) => {
            let (g, cfg) = if a.fig1_demo {
                fig1_demo_scenario(a.n, a.rounds)?
            } else {
                let g = read_graph(a.graph.as_deref().expect("required by clap"))?;
                let path = a.scenario.as_deref().expect("required by clap");
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                let cfg: ConsensusConfig = serde_json::from_str(&text)
                    .map_err(|e| usage(format!("invalid scenario {}: {e}", path.display())))?;
                (g, cfg)
            };
            let trace = run_consensus(&g, &cfg)?;
            if let Some(path) = &a.trace_out {
                let mut buf = Vec::new();
                trace.write_csv(&mut buf)?;
                write_output(Some(path), &buf)?;
            }
            let summary = ConsensusSummary::new(&g, &cfg, &trace);
            write_output(a.out.as_deref(), &to_json_bytes(&summary)?)
        }
    }
}
