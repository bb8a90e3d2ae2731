use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use ggeval::embed_metrics::{evaluate_embeddings, EmbedMetricsConfig, DEFAULT_K};
use ggeval::generators::{
    generate_ba, generate_community2, generate_er_matched, generate_grid, generate_grid_sampled, generate_ladder,
    generate_ws, perturb_set,
};
use ggeval::gin::model::GinModel;
use ggeval::gin::{embed, fit_features_seeded, load_model, save_model, train, FeatureMode, Readout, TrainHyper};
use ggeval::harness::experiments::{default_levels, PipelineConfig};
use ggeval::harness::run::default_candidates;
use ggeval::harness::{
    build_dataset_config, generate_dataset, perturbation_experiment, ranking_experiment, run_config, DatasetConfigName,
    DatasetKind, RunConfig, Scale,
};
use ggeval::io::{graphset_to_string, read_graphset, write_atomic};
use ggeval::mmd::{mmd_suite, Estimator, MmdConfig};
use ggeval::orbits::{orbit4_counts, DEFAULT_MAX_NODES};
use ggeval::ordering::{bandwidth, decode_sequence, encode_sequence, order, OrderingPolicy};
use ggeval::report::MetricReport;
use ggeval::stats::{
    clustering_coefficients, degree_histogram, laplacian_spectrum, laplacian_spectrum_histogram, CLUSTERING_BINS,
    SPECTRUM_BINS,
};
use ggeval::{Error, GraphSet, Result, Rng};

/// Evaluation metrics for generative models of graphs.
#[derive(Parser)]
#[command(name = "ggeval", version)]
struct Cli {
    /// Master seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Result file (JSON or JSON lines); standard output when absent.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, default_value = "warn")]
    log_level: log::LevelFilter,
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true, env = "GGM_EVAL_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic graph set.
    Generate(GenerateArgs),
    /// Rewire a fraction of the edges of every graph.
    Perturb(PerturbArgs),
    /// Node orderings, bandwidth and adjacency sequences.
    Order(OrderArgs),
    /// Per-graph statistics.
    Stats(StatsArgs),
    /// MMD between two graph sets.
    Mmd(MmdArgs),
    /// Train a GIN graph classifier; each input file is one class.
    TrainClassifier(TrainArgs),
    /// Embed a graph set with a model.
    Embed(EmbedArgs),
    /// Fréchet distance, precision, recall, density, coverage and F1.
    EvalEmbed(EvalEmbedArgs),
    /// Perturbation or ranking experiment.
    Experiment(ExperimentArgs),
    /// End-to-end run from a JSON config into the --output directory.
    Run(RunArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum GeneratorKind {
    Ba,
    Ws,
    Community2,
    C2l,
    C2s,
    Grid,
    GridSampled,
    Ladder,
    ErMatched,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    kind: GeneratorKind,
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    nmin: Option<usize>,
    #[arg(long)]
    nmax: Option<usize>,
    /// Attachment count (ba) or lattice degree (ws).
    #[arg(long, default_value_t = 4)]
    k: usize,
    /// Rewiring probability (ws).
    #[arg(long, default_value_t = 0.1)]
    p: f64,
    #[arg(long)]
    p_intra: Option<f64>,
    #[arg(long)]
    inter_frac: Option<f64>,
    /// Reference set (er-matched).
    #[arg(long)]
    reference: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    label: i64,
}

#[derive(Args)]
struct PerturbArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    fraction: f64,
}

#[derive(Args)]
struct OrderArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "bfs-deg")]
    policy: PolicyArg,
    /// Row-length cap of the adjacency sequence; `bandwidth` uses each
    /// graph's own bandwidth. Omit for full rows.
    #[arg(long)]
    truncation: Option<String>,
    /// Allow truncation for non-BFS policies.
    #[arg(long)]
    allow_non_bfs_truncation: bool,
    /// Include the adjacency sequence rows.
    #[arg(long)]
    sequence: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Default,
    DegreeDescent,
    BfsDeg,
    DfsDeg,
    Kcore,
    BfsRandom,
    DfsRandom,
    Uniform,
}

impl From<PolicyArg> for OrderingPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Default => OrderingPolicy::Default,
            PolicyArg::DegreeDescent => OrderingPolicy::DegreeDescent,
            PolicyArg::BfsDeg => OrderingPolicy::BfsDeg,
            PolicyArg::DfsDeg => OrderingPolicy::DfsDeg,
            PolicyArg::Kcore => OrderingPolicy::Kcore,
            PolicyArg::BfsRandom => OrderingPolicy::BfsRandom,
            PolicyArg::DfsRandom => OrderingPolicy::DfsRandom,
            PolicyArg::Uniform => OrderingPolicy::Uniform,
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum StatKind {
    Degree,
    Clustering,
    Spectrum,
    Orbits,
    All,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "all")]
    kind: StatKind,
    /// Histograms instead of raw per-node values.
    #[arg(long)]
    histogram: bool,
}

#[derive(Args)]
struct MmdArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long)]
    unbiased: bool,
    #[arg(long)]
    no_orbit: bool,
    #[arg(long, default_value_t = DEFAULT_MAX_NODES)]
    orbit_max_nodes: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum FeatureArg {
    Degree,
    Constant,
    Random,
}

impl From<FeatureArg> for FeatureMode {
    fn from(f: FeatureArg) -> Self {
        match f {
            FeatureArg::Degree => FeatureMode::OneHotDegree,
            FeatureArg::Constant => FeatureMode::Constant,
            FeatureArg::Random => FeatureMode::Random,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ReadoutArg {
    Sum,
    Concat,
}

impl From<ReadoutArg> for Readout {
    fn from(r: ReadoutArg) -> Self {
        match r {
            ReadoutArg::Sum => Readout::Sum,
            ReadoutArg::Concat => Readout::Concat,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ConfigArg {
    Base,
    Ladder,
    Full,
}

impl From<ConfigArg> for DatasetConfigName {
    fn from(c: ConfigArg) -> Self {
        match c {
            ConfigArg::Base => DatasetConfigName::Base,
            ConfigArg::Ladder => DatasetConfigName::Ladder,
            ConfigArg::Full => DatasetConfigName::Full,
        }
    }
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, value_enum, default_value = "degree")]
    features: FeatureArg,
    #[arg(long, value_enum, default_value = "sum")]
    readout: ReadoutArg,
    #[arg(long, default_value_t = 64)]
    epochs: usize,
    /// Keep the random initialization instead of training.
    #[arg(long)]
    untrained: bool,
}

#[derive(Args)]
struct TrainArgs {
    /// Class files in label order; generated datasets are used when absent.
    #[arg(long, num_args = 1..)]
    inputs: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "base")]
    dataset_config: ConfigArg,
    /// Full benchmark dataset sizes instead of the reduced ones.
    #[arg(long)]
    large_scale: bool,
    #[command(flatten)]
    model: ModelArgs,
    /// Per-epoch history as JSON.
    #[arg(long)]
    history: Option<PathBuf>,
}

#[derive(Args)]
struct EmbedArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    input: PathBuf,
}

#[derive(Args)]
struct EvalEmbedArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    real: PathBuf,
    #[arg(long)]
    gen: PathBuf,
    #[arg(long, default_value_t = DEFAULT_K)]
    k: usize,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum ExperimentKindArg {
    Perturbation,
    Ranking,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long, value_enum)]
    kind: ExperimentKindArg,
    /// Reference dataset name (BA, WS, C2L, C2S, Gr, Ld) or graph file.
    #[arg(long, default_value = "Gr")]
    reference: String,
    /// Extra ranking candidates as name=path.
    #[arg(long)]
    candidate: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    levels: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1)]
    repetitions: usize,
    #[arg(long, value_enum, default_value = "base")]
    dataset_config: ConfigArg,
    #[arg(long)]
    large_scale: bool,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, value_delimiter = ',', default_value = "fd,f1_pr,f1_dc")]
    metrics: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_K)]
    k: usize,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Leave level 0 out of the Spearman correlation.
    #[arg(long)]
    exclude_zero_level: bool,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    env_logger::Builder::new()
        .filter_level(cli.log_level)
        .format_timestamp(None)
        .init();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(1);
        }
    }
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn read_input(path: &Path, what: &str) -> Result<GraphSet> {
    read_graphset(path).map_err(|e| e.in_stage(&format!("read {what}")))
}

/// JSON to `--output` (summary to stdout) or to stdout.
fn emit_json<T: Serialize>(cli: &Cli, value: &T, summary: &str) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    emit_text(cli, &text, summary)
}

fn emit_text(cli: &Cli, text: &str, summary: &str) -> Result<()> {
    match &cli.output {
        Some(path) => {
            write_atomic(path, text.as_bytes())?;
            println!("{summary}");
            println!("wrote {}", path.display());
        }
        None => {
            print!("{text}");
            eprintln!("{summary}");
        }
    }
    Ok(())
}

fn summarize_metrics(report: &MetricReport) -> String {
    report
        .metrics
        .iter()
        .map(|(k, v)| format!("{k} = {:.6}", v.mean))
        .collect::<Vec<_>>()
        .join("\n")
}

fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Generate(a) => cmd_generate(cli, a),
        Command::Perturb(a) => cmd_perturb(cli, a),
        Command::Order(a) => cmd_order(cli, a),
        Command::Stats(a) => cmd_stats(cli, a),
        Command::Mmd(a) => cmd_mmd(cli, a),
        Command::TrainClassifier(a) => cmd_train(cli, a),
        Command::Embed(a) => cmd_embed(cli, a),
        Command::EvalEmbed(a) => cmd_eval_embed(cli, a),
        Command::Experiment(a) => cmd_experiment(cli, a),
        Command::Run(a) => cmd_run(cli, a),
    }
}

fn need<T: Copy>(v: Option<T>, flag: &str, kind: &str) -> Result<T> {
    v.ok_or_else(|| Error::InvalidParameter(format!("--{flag} is required for --kind {kind}")))
}

fn cmd_generate(cli: &Cli, a: &GenerateArgs) -> Result<()> {
    let mut rng = Rng::new(cli.seed);
    let count = a.count.unwrap_or(100);
    let set = match a.kind {
        GeneratorKind::Ba => generate_ba(
            count,
            need(a.nmin, "nmin", "ba")?,
            need(a.nmax, "nmax", "ba")?,
            a.k,
            &mut rng,
        )?,
        GeneratorKind::Ws => generate_ws(
            count,
            need(a.nmin, "nmin", "ws")?,
            need(a.nmax, "nmax", "ws")?,
            a.k,
            a.p,
            &mut rng,
        )?,
        GeneratorKind::Community2 => generate_community2(
            count,
            need(a.nmin, "nmin", "community2")?,
            need(a.nmax, "nmax", "community2")?,
            need(a.p_intra, "p-intra", "community2")?,
            need(a.inter_frac, "inter-frac", "community2")?,
            &mut rng,
        )?,
        GeneratorKind::C2l => generate_community2(
            count,
            a.nmin.unwrap_or(6),
            a.nmax.unwrap_or(10),
            a.p_intra.unwrap_or(0.7),
            a.inter_frac.unwrap_or(0.1),
            &mut rng,
        )?,
        GeneratorKind::C2s => generate_community2(
            count,
            a.nmin.unwrap_or(30),
            a.nmax.unwrap_or(80),
            a.p_intra.unwrap_or(0.3),
            a.inter_frac.unwrap_or(0.05),
            &mut rng,
        )?,
        GeneratorKind::Grid => generate_grid(count, need(a.nmin, "nmin", "grid")?, need(a.nmax, "nmax", "grid")?)?,
        GeneratorKind::GridSampled => generate_grid_sampled(
            count,
            need(a.nmin, "nmin", "grid-sampled")?,
            need(a.nmax, "nmax", "grid-sampled")?,
            &mut rng,
        )?,
        GeneratorKind::Ladder => {
            generate_ladder(count, need(a.nmin, "nmin", "ladder")?, need(a.nmax, "nmax", "ladder")?)?
        }
        GeneratorKind::ErMatched => {
            let path = a
                .reference
                .as_ref()
                .ok_or_else(|| Error::InvalidParameter("--reference is required for --kind er-matched".into()))?;
            generate_er_matched(&read_input(path, "reference")?, &mut rng)?
        }
    };
    let mut set = set.with_label(a.label);
    if set.provenance.seed.is_none() && !matches!(a.kind, GeneratorKind::Grid | GeneratorKind::Ladder) {
        set.provenance.seed = Some(cli.seed);
    }
    let summary = format!(
        "{} graphs, {} to {} nodes",
        set.len(),
        set.graphs.iter().map(|g| g.node_count()).min().unwrap_or(0),
        set.max_node_count()
    );
    emit_text(cli, &graphset_to_string(&set), &summary)
}

fn cmd_perturb(cli: &Cli, a: &PerturbArgs) -> Result<()> {
    let set = read_input(&a.input, "input")?;
    let out = perturb_set(&set, a.fraction, &mut Rng::new(cli.seed))?;
    let summary = format!("perturbed {} graphs at fraction {}", out.len(), a.fraction);
    emit_text(cli, &graphset_to_string(&out), &summary)
}

fn cmd_order(cli: &Cli, a: &OrderArgs) -> Result<()> {
    let policy: OrderingPolicy = a.policy.into();
    let cap = match a.truncation.as_deref() {
        None => None,
        Some(_) if !policy.is_bfs() && !a.allow_non_bfs_truncation => {
            return Err(Error::InvalidParameter(
                "truncation is only defined for BFS orderings; pass --allow-non-bfs-truncation to force it".into(),
            ))
        }
        Some("bandwidth") => Some(None),
        Some(m) => Some(Some(m.parse::<usize>().map_err(|_| {
            Error::InvalidParameter(format!("--truncation expects a number or `bandwidth`, got `{m}`"))
        })?)),
    };
    let set = read_input(&a.input, "input")?;
    let mut rng = Rng::new(cli.seed);
    let mut rows = Vec::with_capacity(set.len());
    let mut widest = 0;
    for g in &set.graphs {
        let pi = order(g, policy, &mut rng);
        let bw = bandwidth(g, &pi);
        widest = widest.max(bw);
        let m = cap.map(|c| c.unwrap_or(bw));
        let mut entry = json!({
            "n": g.node_count(),
            "permutation": pi.permutation,
            "bandwidth": bw,
        });
        if a.sequence || m.is_some() {
            let seq = encode_sequence(g, &pi, m);
            entry["truncation_m"] = json!(m);
            entry["sequence_length"] = json!(seq.rows.iter().map(|r| r.len()).sum::<usize>());
            entry["lossless"] = json!(decode_sequence(&seq).is_ok());
            if a.sequence {
                entry["rows"] = json!(seq.rows);
            }
        }
        rows.push(entry);
    }
    let out = json!({ "policy": policy, "graphs": rows });
    emit_json(cli, &out, &format!("{} orderings, max bandwidth {widest}", set.len()))
}

fn cmd_stats(cli: &Cli, a: &StatsArgs) -> Result<()> {
    let set = read_input(&a.input, "input")?;
    let want = |k: StatKind| a.kind == k || a.kind == StatKind::All;
    let bins = set.max_degree() + 1;
    let mut rows = Vec::with_capacity(set.len());
    for g in &set.graphs {
        let mut entry = json!({ "n": g.node_count(), "edges": g.edge_count() });
        if want(StatKind::Degree) {
            entry["degree"] = if a.histogram {
                json!(degree_histogram(g, bins))
            } else {
                json!(g.degrees())
            };
        }
        if want(StatKind::Clustering) {
            entry["clustering"] = if a.histogram {
                json!(ggeval::stats::clustering_histogram(g, CLUSTERING_BINS))
            } else {
                json!(clustering_coefficients(g))
            };
        }
        if want(StatKind::Spectrum) {
            entry["spectrum"] = if a.histogram {
                json!(laplacian_spectrum_histogram(g, SPECTRUM_BINS)?)
            } else {
                json!(laplacian_spectrum(g)?)
            };
        }
        if want(StatKind::Orbits) {
            entry["orbits"] = json!(orbit4_counts(g, DEFAULT_MAX_NODES)?);
        }
        rows.push(entry);
    }
    emit_json(
        cli,
        &json!({ "graphs": rows }),
        &format!("statistics for {} graphs", set.len()),
    )
}

fn cmd_mmd(cli: &Cli, a: &MmdArgs) -> Result<()> {
    let config = MmdConfig {
        sigma: a.sigma,
        estimator: if a.unbiased {
            Estimator::Unbiased
        } else {
            Estimator::Biased
        },
        orbit: !a.no_orbit,
        orbit_max_nodes: a.orbit_max_nodes,
        ..MmdConfig::default()
    };
    if a.sigma.is_nan() || a.sigma <= 0.0 {
        return Err(Error::InvalidParameter("--sigma must be positive".into()));
    }
    let sa = read_input(&a.a, "a")?;
    let sb = read_input(&a.b, "b")?;
    let mut report = mmd_suite(&sa, &sb, &config)?;
    report.reference = a.a.display().to_string();
    report.candidate = a.b.display().to_string();
    emit_json(cli, &report, &summarize_metrics(&report))
}

fn cmd_train(cli: &Cli, a: &TrainArgs) -> Result<()> {
    let out_path = cli
        .output
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("train-classifier needs --output for the model file".into()))?;
    if a.model.epochs == 0 {
        return Err(Error::InvalidParameter("--epochs must be positive".into()));
    }
    if !a.inputs.is_empty() && a.inputs.len() < 2 {
        return Err(Error::InvalidParameter(
            "--inputs needs at least two class files".into(),
        ));
    }
    let (sets, names) = if a.inputs.is_empty() {
        let scale = if a.large_scale { Scale::Large } else { Scale::Desk };
        let data =
            build_dataset_config(a.dataset_config.into(), scale, cli.seed).map_err(|e| e.in_stage("datasets"))?;
        (data.sets, data.class_names)
    } else {
        let mut sets = Vec::new();
        for (i, p) in a.inputs.iter().enumerate() {
            sets.push(read_input(p, "class")?.with_label(i as i64));
        }
        (sets, a.inputs.iter().map(|p| p.display().to_string()).collect())
    };
    let features = fit_features_seeded(&sets, a.model.features.into(), cli.seed)?;
    let hyper = TrainHyper {
        epochs: a.model.epochs,
        readout: a.model.readout.into(),
        seed: cli.seed,
        ..TrainHyper::default()
    };
    let (model, history) = if a.model.untrained {
        let m = GinModel::new(
            features,
            sets.len(),
            hyper.layers,
            hyper.hidden,
            hyper.readout,
            &mut Rng::child(cli.seed, 0),
        )?;
        (m, Vec::new())
    } else {
        let outcome = train(&sets, &features, &hyper).map_err(|e| e.in_stage("train"))?;
        (outcome.model, outcome.history)
    };
    if let Some(h) = &a.history {
        let text = serde_json::to_string_pretty(&json!({ "classes": names, "history": history }))? + "\n";
        write_atomic(h, text.as_bytes())?;
    }
    save_model(&model, out_path)?;
    match history.last() {
        Some(e) => println!(
            "{} classes, final loss {:.4}, train accuracy {:.3}, test accuracy {:.3}",
            sets.len(),
            e.loss,
            e.train_accuracy,
            e.test_accuracy
        ),
        None => println!("{} classes, untrained model", sets.len()),
    }
    println!("wrote {}", out_path.display());
    Ok(())
}

fn cmd_embed(cli: &Cli, a: &EmbedArgs) -> Result<()> {
    let model = load_model(&a.model)?;
    let set = read_input(&a.input, "input")?;
    let e = embed(&model, &set, cli.seed)?;
    emit_json(cli, &e, &format!("{} embeddings of dimension {}", e.len(), e.dim()))
}

fn cmd_eval_embed(cli: &Cli, a: &EvalEmbedArgs) -> Result<()> {
    if a.k == 0 {
        return Err(Error::InvalidParameter("--k must be positive".into()));
    }
    let model = load_model(&a.model)?;
    let real = read_input(&a.real, "real")?;
    let gen = read_input(&a.gen, "gen")?;
    let er = embed(&model, &real, cli.seed)?;
    let eg = embed(&model, &gen, ggeval::rng::derive_seed(cli.seed, 1))?;
    let mut report = MetricReport::new(&a.real.display().to_string(), &a.gen.display().to_string());
    let config = EmbedMetricsConfig {
        k: a.k,
        ..EmbedMetricsConfig::default()
    };
    evaluate_embeddings(&er, &eg, &config, &mut report)?;
    report.hyper("readout", serde_json::to_value(model.readout)?);
    report.hyper("feature_mode", serde_json::to_value(model.feature_config.mode)?);
    report.hyper("trained", model.trained);
    report.seeds.insert("embed".into(), cli.seed);
    emit_json(cli, &report, &summarize_metrics(&report))
}

fn cmd_experiment(cli: &Cli, a: &ExperimentArgs) -> Result<()> {
    let scale = if a.large_scale { Scale::Large } else { Scale::Desk };
    let mut pipeline = PipelineConfig {
        dataset_config: a.dataset_config.into(),
        scale,
        feature_mode: a.model.features.into(),
        readout: a.model.readout.into(),
        untrained: a.model.untrained,
        k: a.k,
        sigma: a.sigma,
        metrics: a.metrics.clone(),
        include_zero_level: !a.exclude_zero_level,
        ..PipelineConfig::default()
    };
    pipeline.train.epochs = a.model.epochs;
    pipeline.validate()?;
    let mut extra = Vec::new();
    for c in &a.candidate {
        let (name, path) = c
            .split_once('=')
            .ok_or_else(|| Error::InvalidParameter(format!("--candidate expects name=path, got `{c}`")))?;
        extra.push((name.to_string(), PathBuf::from(path)));
    }
    let (reference, kind) = match a.reference.parse::<DatasetKind>() {
        Ok(kind) => (generate_dataset(kind, scale, cli.seed)?, Some(kind)),
        Err(_) => (read_input(Path::new(&a.reference), "reference")?, None),
    };
    match a.kind {
        ExperimentKindArg::Perturbation => {
            let levels = a.levels.clone().unwrap_or_else(default_levels);
            let result = perturbation_experiment(&reference, &levels, &pipeline, a.repetitions, cli.seed)?;
            let summary = result
                .ranking
                .metrics
                .iter()
                .map(|(m, r)| format!("{m}: |spearman| = {:.3}", r.spearman.as_ref().map_or(0.0, |s| s.mean)))
                .collect::<Vec<_>>()
                .join("\n");
            emit_json(cli, &result, &summary)
        }
        ExperimentKindArg::Ranking => {
            let mut candidates = match kind {
                Some(k) => default_candidates(&reference, k, scale, cli.seed)?,
                None => Vec::new(),
            };
            for (name, path) in &extra {
                candidates.push((name.clone(), read_input(path, "candidate")?));
            }
            let result = ranking_experiment(&reference, &candidates, &pipeline, a.repetitions, cli.seed)?;
            let summary = result
                .ranking
                .metrics
                .iter()
                .map(|(m, r)| format!("{m}: {}", r.order.join(" < ")))
                .collect::<Vec<_>>()
                .join("\n");
            emit_json(cli, &result, &summary)
        }
    }
}

fn cmd_run(cli: &Cli, a: &RunArgs) -> Result<()> {
    let dir = cli
        .output
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("run needs --output for the report directory".into()))?;
    let config = RunConfig::load(&a.config)?;
    config.validate()?;
    let out = run_config(&config, dir)?;
    println!(
        "{} classes ({}), {} report files in {}",
        out.manifest.class_count,
        out.manifest.dataset_config,
        out.manifest.reports.len(),
        dir.display()
    );
    Ok(())
}
