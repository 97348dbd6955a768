//! Command-line front end. The `edgeshap` binary only forwards to [`run`].

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::comp_graph::CompGraph;
use crate::error::{Error, Result};
use crate::explain::{explain_node, ExplainConfig, Explanation, PhaseTimings};
use crate::gcn::{GcnModel, Normalization};
use crate::graph::{self, FeatureMatrix, Graph};
use crate::metrics::{self, FidelityReport};
use crate::sampler::{build_plan_chunked, Strategy};
use crate::synth;

#[derive(Debug, Parser)]
#[command(name = "edgeshap", version, about = "Edge-level Shapley explanations for GCN node classification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Explain nodes and write one file per node plus summary.json.
    Explain(ExplainArgs),
    /// Fidelity over sparsity and top-k grids.
    Evaluate(EvaluateArgs),
    /// Sequential vs batched prediction and serial vs parallel sampling.
    Bench(BenchArgs),
    /// Render an explanation file as a DOT digraph.
    ExportDot(ExportDotArgs),
    /// Write a synthetic fixture directory.
    GenFixtures(GenArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Dot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    AllSizes,
    SmallLarge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormalizationArg {
    Coalition,
    Frozen,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FixtureKind {
    Random,
    Planted,
    PowerLaw,
    CoraLike,
}

/// `1,5,9`, or `first:K:FILE` for the first K ids of a node-list file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeSelector {
    List(Vec<usize>),
    First { count: usize, file: PathBuf },
}

impl FromStr for NodeSelector {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if let Some(rest) = s.strip_prefix("first:") {
            let (count, file) = rest
                .split_once(':')
                .ok_or_else(|| format!("expected first:K:FILE, got {s:?}"))?;
            let count = count.parse().map_err(|_| format!("bad count in {s:?}"))?;
            return Ok(NodeSelector::First { count, file: file.into() });
        }
        s.split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|_| format!("bad node id {t:?}")))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(NodeSelector::List)
    }
}

impl NodeSelector {
    pub fn resolve(&self) -> Result<Vec<usize>> {
        match self {
            NodeSelector::List(v) => Ok(v.clone()),
            NodeSelector::First { count, file } => {
                let mut v = graph::load_node_list(file)?;
                v.truncate(*count);
                Ok(v)
            }
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Edge list, one `u v` pair per line.
    #[arg(long)]
    pub graph: PathBuf,
    /// Tensor archive holding `x` with shape [N, d].
    #[arg(long)]
    pub features: PathBuf,
    /// Tensor archive with the two GCN layers.
    #[arg(long)]
    pub model: PathBuf,
    /// Treat the edge list as directed (default: undirected).
    #[arg(long)]
    pub directed: bool,
    /// Map from original ids (one per line) to contiguous ids.
    #[arg(long)]
    pub relabel: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub nodes: NodeSelector,
    #[arg(long, default_value_t = 2)]
    pub layers: usize,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, value_enum, default_value_t = StrategyArg::AllSizes)]
    pub strategy: StrategyArg,
    /// Largest small coalition for the small-large strategy.
    #[arg(long, default_value_t = 3)]
    pub max_coalition: usize,
    #[arg(long, default_value_t = 1024)]
    pub batch_size: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; 0 uses every core.
    #[arg(long, env = "EDGESHAP_THREADS", default_value_t = 0)]
    pub threads: usize,
    #[arg(long, value_enum, default_value_t = NormalizationArg::Coalition)]
    pub normalization: NormalizationArg,
}

impl RunArgs {
    fn strategy(&self) -> Strategy {
        match self.strategy {
            StrategyArg::AllSizes => Strategy::AllSizes,
            StrategyArg::SmallLarge => Strategy::SmallLarge {
                max_coalition: self.max_coalition,
            },
        }
    }

    fn config(&self) -> ExplainConfig {
        ExplainConfig {
            num_layers: self.layers,
            num_samples: self.samples,
            strategy: self.strategy(),
            seed: self.seed,
            batch_size: self.batch_size,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.samples < 4 || self.samples % 2 != 0 {
            return Err(Error::InvalidArgument(format!("--samples must be even and >= 4, got {}", self.samples)));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidArgument("--batch-size must be at least 1".into()));
        }
        if self.layers == 0 {
            return Err(Error::InvalidArgument("--layers must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Args)]
pub struct ExplainArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub run: RunArgs,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub run: RunArgs,
    /// Directory of explanation files from `explain`; explanations are
    /// computed inline when omitted.
    #[arg(long)]
    pub explanations: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "0.3")]
    pub sparsity: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "10")]
    pub top_k: Vec<usize>,
    /// Inline runs per strategy, with seeds `seed, seed+1, ...`.
    #[arg(long, default_value_t = 5)]
    pub repeats: usize,
    /// Run all-sizes, small-large and a random-removal baseline side by side.
    #[arg(long)]
    pub compare_strategies: bool,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ExportDotArgs {
    /// Explanation JSON written by `explain`.
    #[arg(long)]
    pub explanation: PathBuf,
    /// Keep edges with |φ| at least this large.
    #[arg(long, default_value_t = 0.0)]
    pub threshold: f64,
    /// Keep only the k largest |φ| (applied after the threshold).
    #[arg(long)]
    pub top_k: Option<usize>,
    /// Optional inputs for colouring nodes by predicted class.
    #[arg(long, requires_all = ["features", "model"])]
    pub graph: Option<PathBuf>,
    #[arg(long)]
    pub features: Option<PathBuf>,
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub directed: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: FixtureKind,
    #[arg(long, default_value_t = 200)]
    pub num_nodes: usize,
    #[arg(long, default_value_t = 3.0)]
    pub avg_degree: f64,
    #[arg(long, default_value_t = 8)]
    pub feat_dim: usize,
    #[arg(long, default_value_t = 8)]
    pub hidden: usize,
    #[arg(long, default_value_t = 3)]
    pub classes: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli.command) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e @ Error::InvalidArgument(_)) => {
            eprintln!("error: {e}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

/// Runs one command. `Ok(false)` means some nodes failed.
pub fn execute(command: Command) -> Result<bool> {
    match command {
        Command::Explain(a) => cmd_explain(&a),
        Command::Evaluate(a) => cmd_evaluate(&a),
        Command::Bench(a) => cmd_bench(&a),
        Command::ExportDot(a) => cmd_export_dot(&a).map(|_| true),
        Command::GenFixtures(a) => cmd_gen_fixtures(&a).map(|_| true),
    }
}

pub struct Inputs {
    pub graph: Graph,
    pub feats: FeatureMatrix,
    pub model: GcnModel,
    /// Hash of the three input files.
    pub hash: String,
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

pub fn load_inputs(args: &InputArgs, normalization: Normalization) -> Result<Inputs> {
    let mut hasher = Sha256::new();
    let mut read_hashed = |path: &Path| -> Result<Vec<u8>> {
        let bytes = read(path)?;
        hasher.update(Sha256::digest(&bytes));
        Ok(bytes)
    };
    let edge_bytes = read_hashed(&args.graph)?;
    let feats = FeatureMatrix::from_archive(&crate::TensorArchive::from_bytes(&read_hashed(&args.features)?)?)?;
    let model = GcnModel::from_archive(&crate::TensorArchive::from_bytes(&read_hashed(&args.model)?)?)?
        .with_normalization(normalization);
    let mut text = String::from_utf8(edge_bytes).map_err(|_| Error::Parse {
        line: 0,
        msg: "edge list is not UTF-8".into(),
    })?;
    if let Some(map) = &args.relabel {
        text = graph::relabel_edge_list(&text, &graph::load_relabel_map(map)?)?;
    }
    let graph = Graph::parse_edge_list(&text, feats.num_nodes(), !args.directed)?;
    Ok(Inputs {
        graph,
        feats,
        model,
        hash: hex(&hasher.finalize()[..8]),
    })
}

/// `<inputs>.<config>`: hash of the input files, then of the run settings.
pub fn fingerprint(inputs_hash: &str, run: &RunArgs) -> String {
    let config = format!(
        "layers={};samples={};strategy={};max_coalition={};batch={};seed={};norm={:?}",
        run.layers,
        run.samples,
        run.strategy().name(),
        run.max_coalition,
        run.batch_size,
        run.seed,
        run.normalization
    );
    format!("{inputs_hash}.{}", hex(&Sha256::digest(config.as_bytes())[..8]))
}

fn normalization(arg: NormalizationArg) -> Normalization {
    match arg {
        NormalizationArg::Coalition => Normalization::Coalition,
        NormalizationArg::Frozen => Normalization::Frozen,
    }
}

fn with_pool<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> Result<R> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn emit(out: Option<&Path>, contents: &str) -> Result<()> {
    match out {
        Some(p) => write_file(p, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NodeRecord {
    pub node: usize,
    pub ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub players: usize,
    pub samples: usize,
    pub pruned_predictions: usize,
    pub efficiency_gap: f64,
    pub timings_ms: PhaseTimings,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Summary {
    pub fingerprint: String,
    pub strategy: String,
    pub samples: usize,
    pub seed: u64,
    pub layers: usize,
    pub nodes: Vec<NodeRecord>,
    pub failed: usize,
    pub total_ms: PhaseTimings,
}

fn explain_all(inputs: &Inputs, nodes: &[usize], config: &ExplainConfig, fp: &str) -> Vec<Result<Explanation>> {
    nodes
        .par_iter()
        .map(|&v| {
            let mut e = explain_node(&inputs.graph, &inputs.feats, &inputs.model, v, config)?;
            e.meta.fingerprint = Some(fp.to_string());
            Ok(e)
        })
        .collect()
}

pub fn explanation_csv(e: &Explanation) -> String {
    let mut out = String::from("src,dst,phi\n");
    for p in &e.players {
        let _ = writeln!(out, "{},{},{}", p.src, p.dst, p.phi);
    }
    out
}

fn cmd_explain(a: &ExplainArgs) -> Result<bool> {
    a.run.validate()?;
    let inputs = load_inputs(&a.input, normalization(a.run.normalization))?;
    let nodes = a.run.nodes.resolve()?;
    let config = a.run.config();
    let fp = fingerprint(&inputs.hash, &a.run);
    let results = with_pool(a.run.threads, || explain_all(&inputs, &nodes, &config, &fp))?;

    fs::create_dir_all(&a.out).map_err(|e| Error::io(&a.out, e))?;
    let mut records = Vec::new();
    let mut total = PhaseTimings::default();
    for (&node, result) in nodes.iter().zip(&results) {
        match result {
            Ok(e) => {
                let (name, body) = match a.format {
                    Format::Json => (format!("node_{node}.json"), serde_json::to_string_pretty(e)?),
                    Format::Csv => (format!("node_{node}.csv"), explanation_csv(e)),
                    Format::Dot => (format!("node_{node}.dot"), to_dot(e, &DotOptions::default(), |_| None)?),
                };
                write_file(&a.out.join(name), body)?;
                let t = e.meta.timings_ms;
                total.prune += t.prune;
                total.sample += t.sample;
                total.predict += t.predict;
                total.solve += t.solve;
                records.push(NodeRecord {
                    node,
                    ok: true,
                    error: None,
                    players: e.num_players(),
                    samples: e.meta.samples,
                    pruned_predictions: e.meta.pruned_predictions,
                    efficiency_gap: e.efficiency_gap(),
                    timings_ms: t,
                });
            }
            Err(err) => records.push(NodeRecord {
                node,
                ok: false,
                error: Some(err.to_string()),
                players: 0,
                samples: 0,
                pruned_predictions: 0,
                efficiency_gap: 0.0,
                timings_ms: PhaseTimings::default(),
            }),
        }
    }
    let failed = records.iter().filter(|r| !r.ok).count();
    let summary = Summary {
        fingerprint: fp,
        strategy: config.strategy.name().into(),
        samples: config.num_samples,
        seed: config.seed,
        layers: config.num_layers,
        nodes: records,
        failed,
        total_ms: total,
    };
    write_file(&a.out.join("summary.json"), serde_json::to_string_pretty(&summary)?)?;
    if failed > 0 {
        eprintln!("{failed} of {} nodes failed; see summary.json", nodes.len());
    }
    Ok(failed == 0)
}

/// One point of a fidelity curve, aggregated over runs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurvePoint {
    pub strategy: String,
    pub metric: String,
    pub param: f64,
    pub mean: f64,
    pub std: f64,
    pub runs: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub fingerprint: String,
    pub curves: Vec<CurvePoint>,
    pub failed_nodes: Vec<usize>,
    pub reports: Vec<(String, u64, FidelityReport)>,
}

impl EvaluationReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("strategy,metric,param,mean,std,runs\n");
        for c in &self.curves {
            let runs: Vec<String> = c.runs.iter().map(f64::to_string).collect();
            let _ = writeln!(out, "{},{},{},{},{},{}", c.strategy, c.metric, c.param, c.mean, c.std, runs.join(";"));
        }
        out
    }
}

/// Mean and population standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let m = xs.iter().sum::<f64>() / xs.len() as f64;
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64;
    (m, var.sqrt())
}

fn load_explanations(dir: &Path, nodes: &[usize], inputs_hash: &str) -> Result<Vec<Explanation>> {
    nodes
        .iter()
        .map(|v| {
            let path = dir.join(format!("node_{v}.json"));
            let e: Explanation = serde_json::from_slice(&read(&path)?)?;
            let found = e.meta.fingerprint.clone().unwrap_or_default();
            if found.split('.').next() != Some(inputs_hash) {
                return Err(Error::FingerprintMismatch {
                    expected: inputs_hash.to_string(),
                    found,
                });
            }
            Ok(e)
        })
        .collect()
}

fn cmd_evaluate(a: &EvaluateArgs) -> Result<bool> {
    a.run.validate()?;
    if a.format == Format::Dot {
        return Err(Error::InvalidArgument("evaluate writes json or csv".into()));
    }
    if a.repeats == 0 {
        return Err(Error::InvalidArgument("--repeats must be at least 1".into()));
    }
    let inputs = load_inputs(&a.input, normalization(a.run.normalization))?;
    let nodes = a.run.nodes.resolve()?;
    let fp = fingerprint(&inputs.hash, &a.run);

    // (strategy label, seed, explanations)
    let mut runs: Vec<(String, u64, Vec<Explanation>)> = Vec::new();
    let mut failed = Vec::new();
    if let Some(dir) = &a.explanations {
        let expls = load_explanations(dir, &nodes, &inputs.hash)?;
        let label = expls.first().map(|e| e.meta.strategy.clone()).unwrap_or_default();
        runs.push((label, a.run.seed, expls));
    } else {
        let strategies = if a.compare_strategies {
            vec![Strategy::AllSizes, Strategy::SmallLarge { max_coalition: a.run.max_coalition }]
        } else {
            vec![a.run.strategy()]
        };
        for strategy in strategies {
            for r in 0..a.repeats as u64 {
                let config = ExplainConfig {
                    strategy,
                    seed: a.run.seed + r,
                    ..a.run.config()
                };
                let results = with_pool(a.run.threads, || explain_all(&inputs, &nodes, &config, &fp))?;
                let mut ok = Vec::new();
                for (&v, res) in nodes.iter().zip(results) {
                    match res {
                        Ok(e) => ok.push(e),
                        Err(err) => {
                            eprintln!("node {v}: {err}");
                            if !failed.contains(&v) {
                                failed.push(v);
                            }
                        }
                    }
                }
                runs.push((strategy.name().to_string(), config.seed, ok));
            }
        }
    }

    let mut curves: Vec<CurvePoint> = Vec::new();
    let mut reports = Vec::new();
    let mut push = |strategy: &str, metric: &str, param: f64, value: f64| {
        match curves
            .iter_mut()
            .find(|c| c.strategy == strategy && c.metric == metric && c.param == param)
        {
            Some(c) => c.runs.push(value),
            None => curves.push(CurvePoint {
                strategy: strategy.into(),
                metric: metric.into(),
                param,
                mean: 0.0,
                std: 0.0,
                runs: vec![value],
            }),
        }
    };
    with_pool(a.run.threads, || -> Result<()> {
        for (label, seed, expls) in &runs {
            for &s in &a.sparsity {
                let r = metrics::fidelity_minus(&inputs.model, &inputs.graph, &inputs.feats, expls, s)?;
                push(label, "fidelity_minus", s, r.fidelity_minus);
                reports.push((label.clone(), *seed, r));
                if a.compare_strategies && label == Strategy::AllSizes.name() {
                    let b = metrics::fidelity_minus_random(&inputs.model, &inputs.graph, &inputs.feats, expls, s, *seed)?;
                    push("random-baseline", "fidelity_minus", s, b.fidelity_minus);
                }
            }
            for &k in &a.top_k {
                let r = metrics::fidelity_plus(&inputs.model, &inputs.graph, &inputs.feats, expls, k)?;
                push(label, "fidelity_plus", k as f64, r.fidelity_plus);
                reports.push((label.clone(), *seed, r));
            }
        }
        Ok(())
    })??;
    for c in &mut curves {
        (c.mean, c.std) = mean_std(&c.runs);
    }
    let report = EvaluationReport {
        fingerprint: fp,
        curves,
        failed_nodes: failed.clone(),
        reports,
    };
    let body = match a.format {
        Format::Csv => report.to_csv(),
        _ => serde_json::to_string_pretty(&report)? + "\n",
    };
    emit(a.out.as_deref(), &body)?;
    Ok(failed.is_empty())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchNode {
    pub node: usize,
    pub players: usize,
    pub samples: usize,
    pub sampling_serial_ms: f64,
    pub sampling_parallel_ms: f64,
    pub sampling_identical: bool,
    pub sequential_ms: f64,
    pub batched_ms: f64,
    pub max_abs_diff: f64,
    pub pruned_fraction: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchReport {
    pub threads: usize,
    pub batch_size: usize,
    pub nodes: Vec<BenchNode>,
    pub skipped: Vec<usize>,
    pub sequential_ms: f64,
    pub batched_ms: f64,
    pub speedup: f64,
    pub pruned_fraction: f64,
}

/// Times both prediction paths and both sampling paths on each node.
pub fn bench_nodes(
    graph: &Graph,
    feats: &FeatureMatrix,
    model: &GcnModel,
    nodes: &[usize],
    config: &ExplainConfig,
) -> Result<BenchReport> {
    let threads = rayon::current_num_threads();
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for &v in nodes {
        let comp = CompGraph::extract_pruned(graph, v, config.num_layers)?;
        let n = comp.num_players();
        if n < 2 {
            skipped.push(v);
            continue;
        }
        let t = Instant::now();
        let serial = build_plan_chunked(n, config.num_samples, config.strategy, config.seed, 1)?;
        let sampling_serial_ms = ms(t);
        let t = Instant::now();
        let parallel = build_plan_chunked(n, config.num_samples, config.strategy, config.seed, threads)?;
        let sampling_parallel_ms = ms(t);

        let ev = model.evaluator(&comp, feats)?;
        let t = Instant::now();
        let seq = ev.predict_sequential(serial.mask())?;
        let sequential_ms = ms(t);
        let t = Instant::now();
        let batched = ev.predict(serial.mask(), config.batch_size)?;
        let batched_ms = ms(t);
        let max_abs_diff = seq
            .iter()
            .zip(&batched.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        rows.push(BenchNode {
            node: v,
            players: n,
            samples: serial.num_samples(),
            sampling_serial_ms,
            sampling_parallel_ms,
            sampling_identical: serial == parallel,
            sequential_ms,
            batched_ms,
            max_abs_diff,
            pruned_fraction: batched.pruned as f64 / serial.num_samples() as f64,
        });
    }
    let sequential_ms: f64 = rows.iter().map(|r| r.sequential_ms).sum();
    let batched_ms: f64 = rows.iter().map(|r| r.batched_ms).sum();
    let samples: usize = rows.iter().map(|r| r.samples).sum();
    let pruned: f64 = rows.iter().map(|r| r.pruned_fraction * r.samples as f64).sum();
    Ok(BenchReport {
        threads,
        batch_size: config.batch_size,
        speedup: if batched_ms > 0.0 { sequential_ms / batched_ms } else { f64::INFINITY },
        pruned_fraction: if samples > 0 { pruned / samples as f64 } else { 0.0 },
        sequential_ms,
        batched_ms,
        nodes: rows,
        skipped,
    })
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

fn cmd_bench(a: &BenchArgs) -> Result<bool> {
    a.run.validate()?;
    let inputs = load_inputs(&a.input, normalization(a.run.normalization))?;
    let nodes = a.run.nodes.resolve()?;
    let config = a.run.config();
    let report = with_pool(a.run.threads, || bench_nodes(&inputs.graph, &inputs.feats, &inputs.model, &nodes, &config))??;
    emit(a.out.as_deref(), &(serde_json::to_string_pretty(&report)? + "\n"))?;
    Ok(true)
}

/// Fill colours indexed by class.
pub const CLASS_PALETTE: [&str; 12] = [
    "#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462", "#b3de69", "#fccde5", "#d9d9d9", "#bc80bd",
    "#ccebc5", "#ffed6f",
];

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DotOptions {
    /// Keep edges with `|φ| >= threshold`.
    pub threshold: f64,
    /// Then keep at most this many, by `|φ|`.
    pub top_k: Option<usize>,
}

/// DOT digraph of an explanation. Edge width scales `|φ|` into [0.5, 4.0];
/// red edges raise the explained-class probability, blue edges lower it.
pub fn to_dot(expl: &Explanation, opts: &DotOptions, node_class: impl Fn(usize) -> Option<usize>) -> Result<String> {
    if expl.players.is_empty() {
        return Err(Error::InvalidArgument(format!("explanation for node {} has no edges", expl.node)));
    }
    let max = expl.players.iter().map(|p| p.phi.abs()).fold(0.0, f64::max);
    let mut kept: Vec<usize> = (0..expl.players.len())
        .filter(|&j| expl.players[j].phi.abs() >= opts.threshold)
        .collect();
    if let Some(k) = opts.top_k {
        kept.sort_by(|&a, &b| expl.players[b].phi.abs().total_cmp(&expl.players[a].phi.abs()).then(a.cmp(&b)));
        kept.truncate(k);
        kept.sort_unstable();
    }
    let mut nodes = vec![expl.node];
    for &j in &kept {
        nodes.extend([expl.players[j].src, expl.players[j].dst]);
    }
    nodes.sort_unstable();
    nodes.dedup();

    let mut out = format!("digraph explanation_{} {{\n  node [style=filled, fillcolor=\"#ffffff\"];\n", expl.node);
    for v in nodes {
        let mut attrs = vec![format!("label=\"{v}\"")];
        if let Some(c) = node_class(v) {
            attrs.push(format!("fillcolor=\"{}\"", CLASS_PALETTE[c % CLASS_PALETTE.len()]));
        }
        if v == expl.node {
            attrs.push("shape=doublecircle".into());
        }
        let _ = writeln!(out, "  n{v} [{}];", attrs.join(", "));
    }
    for &j in &kept {
        let p = &expl.players[j];
        let width = if max > 0.0 { 0.5 + 3.5 * p.phi.abs() / max } else { 0.5 };
        let color = if p.phi > 0.0 {
            "red"
        } else if p.phi < 0.0 {
            "blue"
        } else {
            "gray"
        };
        let _ = writeln!(
            out,
            "  n{} -> n{} [color={color}, penwidth={width:.3}, label=\"{:.4}\"];",
            p.src, p.dst, p.phi
        );
    }
    out.push_str("}\n");
    Ok(out)
}

fn cmd_export_dot(a: &ExportDotArgs) -> Result<()> {
    let expl: Explanation = serde_json::from_slice(&read(&a.explanation)?)?;
    let opts = DotOptions {
        threshold: a.threshold,
        top_k: a.top_k,
    };
    let classes: Option<(Graph, FeatureMatrix, GcnModel)> = match (&a.graph, &a.features, &a.model) {
        (Some(g), Some(f), Some(m)) => {
            let feats = FeatureMatrix::load(f)?;
            let graph = Graph::load_edge_list(g, feats.num_nodes(), !a.directed)?;
            Some((graph, feats, GcnModel::load(m)?))
        }
        _ => None,
    };
    let dot = to_dot(&expl, &opts, |v| {
        let (g, f, m) = classes.as_ref()?;
        m.predict_node(g, f, v).ok().map(|p| p.argmax())
    })?;
    emit(a.out.as_deref(), &dot)
}

fn cmd_gen_fixtures(a: &GenArgs) -> Result<()> {
    let task = match a.kind {
        FixtureKind::Random => {
            synth::gen_random_task(a.num_nodes, a.avg_degree, a.feat_dim, a.hidden, a.classes, a.seed)?
        }
        FixtureKind::Planted => synth::gen_planted_task(a.num_nodes, a.feat_dim, a.seed)?,
        FixtureKind::PowerLaw => synth::gen_power_law_task(
            a.num_nodes,
            a.avg_degree,
            a.feat_dim,
            a.feat_dim.div_ceil(80).max(1),
            a.hidden,
            a.classes,
            a.seed,
        )?,
        FixtureKind::CoraLike => synth::gen_cora_like(a.seed)?,
    };
    task.save(&a.out)?;
    eprintln!("wrote {} fixture ({} nodes, {} targets) to {}", task.kind, task.graph.num_nodes(), task.targets.len(), a.out.display());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::explain::{EdgeAttribution, ExplanationMeta};

    fn expl(phis: &[f64]) -> Explanation {
        Explanation {
            node: 0,
            explained_class: 1,
            base_value: 0.5,
            full_value: 0.5 + phis.iter().sum::<f64>(),
            players: phis
                .iter()
                .enumerate()
                .map(|(i, &phi)| EdgeAttribution { src: i + 1, dst: 0, phi })
                .collect(),
            meta: ExplanationMeta {
                samples: 8,
                strategy: "all-sizes".into(),
                max_coalition: None,
                seed: 0,
                layers: 2,
                pruned_predictions: 0,
                timings_ms: PhaseTimings::default(),
                fingerprint: None,
            },
        }
    }

    #[test]
    fn node_selector_parsing() {
        assert_eq!("3,1,4".parse::<NodeSelector>().unwrap(), NodeSelector::List(vec![3, 1, 4]));
        assert_eq!(
            "first:20:t.txt".parse::<NodeSelector>().unwrap(),
            NodeSelector::First { count: 20, file: "t.txt".into() }
        );
        assert!("first:x:t".parse::<NodeSelector>().is_err());
        assert!("a,b".parse::<NodeSelector>().is_err());
    }

    #[test]
    fn dot_colours_and_widths() {
        let dot = to_dot(&expl(&[0.2, -0.1, 0.0]), &DotOptions::default(), |_| None).unwrap();
        assert!(dot.contains("n1 -> n0 [color=red, penwidth=4.000"));
        assert!(dot.contains("n2 -> n0 [color=blue, penwidth=2.250"));
        assert!(dot.contains("n3 -> n0 [color=gray, penwidth=0.500"));
        assert!(dot.contains("shape=doublecircle"));
    }

    #[test]
    fn dot_threshold_above_max_keeps_target_only() {
        let opts = DotOptions { threshold: 1.0, top_k: None };
        let dot = to_dot(&expl(&[0.2, -0.1]), &opts, |v| Some(v)).unwrap();
        assert!(!dot.contains("->"));
        assert_eq!(dot.matches("label=").count(), 1);
        assert!(dot.contains(CLASS_PALETTE[0]));
        assert!(to_dot(&expl(&[]), &opts, |_| None).is_err());
    }

    #[test]
    fn usage_errors_exit_nonzero() {
        assert_ne!(run(["edgeshap", "explain"]), 0);
        assert_ne!(run(["edgeshap", "gen-fixtures", "--kind", "planted", "--num-nodes", "5", "--out", "/nonexistent/x"]), 0);
    }

    #[test]
    fn mean_std_basics() {
        assert_eq!(mean_std(&[]), (0.0, 0.0));
        let (m, s) = mean_std(&[1.0, 3.0]);
        assert_eq!((m, s), (2.0, 1.0));
    }
}
