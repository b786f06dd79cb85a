use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use epimine::analysis::{
    discover_synfire, rewrite_with_composites, significance_run, similarity, SignificanceConfig, SynfireConfig,
};
use epimine::sim::{build_network, gen_noise, presets, simulate, ModelKind, NetworkSpec};
use epimine::{read_events, Episode, EpisodeKind, Interval, MiningConfig, MiningReport};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "epimine", version, about = "Frequent episode discovery in spike trains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a spiking network or a noise model and write a spike file.
    Simulate(SimulateArgs),
    /// Mine frequent parallel or serial episodes from a spike file.
    Mine(MineArgs),
    /// Replace occurrences of parallel episodes by composite events.
    Rewrite(RewriteArgs),
    /// Parallel mining, composite rewriting, then serial mining.
    Synfire(SynfireArgs),
    /// Compare episode frequencies in noise against embedded patterns.
    Significance(SignificanceArgs),
    /// Similarity score of the largest episodes of two mining reports.
    Similarity(SimilarityArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Network description in TOML.
    #[arg(long, conflicts_with_all = ["preset", "noise"])]
    config: Option<PathBuf>,
    /// Built-in network: example1, example2, example3, synchrony, chain.
    #[arg(long, conflicts_with = "noise")]
    preset: Option<String>,
    /// Rate model for presets.
    #[arg(long, default_value = "sigmoid", value_parser = parse_model)]
    model: ModelKind,
    /// Structure-free noise model 1-6.
    #[arg(long)]
    noise: Option<u8>,
    /// Neuron count for noise models.
    #[arg(long, default_value_t = 26)]
    neurons: usize,
    /// Simulated time in seconds.
    #[arg(long, default_value_t = 50.0)]
    duration: f64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Clone)]
struct MiningArgs {
    /// Frequency threshold as a fraction of the stream length.
    #[arg(long, default_value_t = 0.01)]
    threshold: f64,
    /// Threshold factor per extra node.
    #[arg(long, default_value_t = 0.9)]
    decay: f64,
    #[arg(long, default_value_t = 10)]
    max_size: usize,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Args)]
struct MineArgs {
    /// `parallel` or `serial`.
    kind: String,
    /// Spike file (`type,time` per line).
    input: PathBuf,
    /// Expiry time in seconds (parallel).
    #[arg(long)]
    expiry: Option<f64>,
    /// Gap intervals in seconds, e.g. `0.002-0.004,0.004-0.006` (serial).
    #[arg(long)]
    intervals: Option<String>,
    #[command(flatten)]
    mining: MiningArgs,
    /// JSON report path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RewriteArgs {
    input: PathBuf,
    /// Parallel episode to collapse, e.g. `(B C D)`; repeatable.
    #[arg(long = "episode", required = true)]
    episodes: Vec<String>,
    #[arg(long)]
    expiry: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SynfireArgs {
    input: PathBuf,
    #[arg(long)]
    expiry: f64,
    #[arg(long)]
    intervals: String,
    #[command(flatten)]
    mining: MiningArgs,
    /// JSON report path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Where to write the rewritten stream.
    #[arg(long)]
    rewritten: Option<PathBuf>,
}

#[derive(Args)]
struct SignificanceArgs {
    /// Noise models, e.g. `1-6` or `1,3,5`.
    #[arg(long)]
    noise: Option<String>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    duration: Option<f64>,
    #[arg(long)]
    max_size: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    /// Start from a small configuration (1 replicate of 5 s).
    #[arg(long)]
    smoke: bool,
    /// Output prefix; writes `<out>.tsv` and `<out>.json`.
    #[arg(long, default_value = "significance")]
    out: PathBuf,
}

#[derive(Args)]
struct SimilarityArgs {
    a: PathBuf,
    b: PathBuf,
    /// Episode size to compare; defaults to the largest in each report.
    #[arg(long)]
    size: Option<usize>,
}

/// Failure with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl From<epimine::Error> for Failure {
    fn from(e: epimine::Error) -> Self {
        Failure { code: if e.is_data_error() { 2 } else { 1 }, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 1, message: message.into() }
}

fn data(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

type CliResult<T> = Result<T, Failure>;

fn parse_model(s: &str) -> Result<ModelKind, String> {
    match s {
        "sigmoid" => Ok(ModelKind::Sigmoid),
        "linear" => Ok(ModelKind::Linear),
        other => Err(format!("unknown model `{other}` (sigmoid or linear)")),
    }
}

fn parse_noise_list(s: &str) -> CliResult<Vec<u8>> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let bad = || usage(format!("bad noise model list `{s}`"));
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b): (u8, u8) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
                if a > b {
                    return Err(bad());
                }
                out.extend(a..=b);
            }
            None => out.push(part.parse().map_err(|_| bad())?),
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct RunManifest {
    subcommand: String,
    argv: Vec<String>,
    config: serde_json::Value,
    seeds: Vec<u64>,
    inputs: Vec<String>,
    outputs: Vec<String>,
    tool_version: String,
    started_unix_seconds: f64,
    elapsed_seconds: f64,
}

struct Run {
    subcommand: &'static str,
    started: SystemTime,
    clock: Instant,
}

impl Run {
    fn new(subcommand: &'static str) -> Self {
        Run { subcommand, started: SystemTime::now(), clock: Instant::now() }
    }

    fn manifest(&self, primary: &Path, config: impl Serialize, seeds: Vec<u64>, inputs: &[&Path], outputs: &[&Path]) -> CliResult<()> {
        let manifest = RunManifest {
            subcommand: self.subcommand.to_string(),
            argv: std::env::args().collect(),
            config: serde_json::to_value(config).map_err(|e| usage(e.to_string()))?,
            seeds,
            inputs: inputs.iter().map(|p| p.display().to_string()).collect(),
            outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            started_unix_seconds: self.started.duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0),
            elapsed_seconds: self.clock.elapsed().as_secs_f64(),
        };
        let mut path = primary.as_os_str().to_owned();
        path.push(".manifest.json");
        write_json(Path::new(&path), &manifest)
    }
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

fn write_json(path: &Path, value: &impl Serialize) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| usage(e.to_string()))?;
    write_text(path, &(text + "\n"))
}

fn read_spikes(path: &Path) -> CliResult<epimine::EventSequence> {
    read_events(path).map_err(|e| data(format!("{}: {e}", path.display())))
}

fn constraint_label(report: &MiningReport) -> String {
    match report.kind {
        EpisodeKind::Parallel => match report.config.expiry {
            Some(tx) => format!("expiry {tx}"),
            None => "no expiry".to_string(),
        },
        EpisodeKind::Serial => {
            let ivs: Vec<String> = report.config.intervals.iter().map(|i| i.to_string()).collect();
            ivs.join(" ")
        }
    }
}

/// Table with one row per level: constraint, threshold, time, size(count)
/// and the frequent episodes with their counts.
fn format_table(report: &MiningReport) -> String {
    const SHOWN: usize = 12;
    let constraint = constraint_label(report);
    let multi_interval = report.config.intervals.len() > 1;
    let mut out = format!("{:<24} {:>9} {:>9}  {:<11} patterns\n", "constraint", "threshold", "time(s)", "size(count)");
    for level in &report.levels {
        let shown: Vec<String> = level
            .episodes
            .iter()
            .take(SHOWN)
            .map(|c| {
                let name = if report.kind == EpisodeKind::Serial && multi_interval && c.episode.len() > 1 {
                    c.episode.to_string()
                } else {
                    c.episode.label()
                };
                format!("{name} : {}", c.count)
            })
            .collect();
        let mut patterns = shown.join("; ");
        if level.episodes.len() > SHOWN {
            let _ = write!(patterns, "; ... (+{} more)", level.episodes.len() - SHOWN);
        }
        let size = format!("{}({})", level.size, level.episodes.len());
        let _ = writeln!(out, "{constraint:<24} {:>9} {:>9.3}  {size:<11} {patterns}", level.threshold, level.elapsed_seconds);
    }
    let _ = writeln!(out, "total {:.3} s over {} events", report.elapsed_seconds, report.stream_length);
    out
}

fn mining_config(args: &MiningArgs, expiry: Option<f64>, intervals: Vec<Interval>) -> MiningConfig {
    MiningConfig {
        threshold: args.threshold,
        decay: args.decay,
        max_size: args.max_size,
        expiry,
        intervals,
        workers: args.workers,
    }
}

fn cmd_simulate(args: SimulateArgs) -> CliResult<()> {
    let run = Run::new("simulate");
    if !(args.duration >= 0.0 && args.duration.is_finite()) {
        return Err(usage("duration must be a non-negative number of seconds"));
    }
    #[derive(Serialize)]
    struct Echo {
        network: Option<NetworkSpec>,
        noise_model: Option<u8>,
        neurons: usize,
        duration: f64,
    }
    let mut inputs = Vec::new();
    let (spec, seq, seed) = match (&args.config, &args.preset, args.noise) {
        (Some(path), _, _) => {
            let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
            let spec = NetworkSpec::from_toml(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            let seed = args.seed.or(spec.seed).unwrap_or(0);
            inputs.push(path.as_path());
            let seq = simulate(&build_network(&spec, seed)?, args.duration, seed);
            (Some(spec), seq, seed)
        }
        (None, Some(name), _) => {
            let spec = presets::preset(name, args.model)?;
            let seed = args.seed.unwrap_or(0);
            let seq = simulate(&build_network(&spec, seed)?, args.duration, seed);
            (Some(spec), seq, seed)
        }
        (None, None, Some(model)) => {
            let seed = args.seed.unwrap_or(0);
            (None, gen_noise(model, seed, args.duration, args.neurons)?, seed)
        }
        (None, None, None) => return Err(usage("one of --config, --preset or --noise is required")),
    };
    write_text(&args.out, &epimine::write_events(&seq))?;
    println!("{} spikes over {} s written to {}", seq.len(), args.duration, args.out.display());
    let echo = Echo { network: spec, noise_model: args.noise, neurons: args.neurons, duration: args.duration };
    run.manifest(&args.out, echo, vec![seed], &inputs, &[args.out.as_path()])
}

fn cmd_mine(args: MineArgs) -> CliResult<()> {
    let run = Run::new("mine");
    let kind: EpisodeKind = args.kind.parse()?;
    let intervals = match &args.intervals {
        Some(s) => Interval::parse_list(s)?,
        None => Vec::new(),
    };
    let config = mining_config(&args.mining, args.expiry, intervals);
    config.validate(kind)?;
    let seq = read_spikes(&args.input)?;
    let report = epimine::mine(&seq, kind, &config)?;
    print!("{}", format_table(&report));
    if let Some(out) = &args.out {
        write_json(out, &report)?;
        run.manifest(out, serde_json::json!({ "kind": report.kind, "mining": config }), Vec::new(), &[args.input.as_path()], &[out.as_path()])?;
    }
    Ok(())
}

fn cmd_rewrite(args: RewriteArgs) -> CliResult<()> {
    let run = Run::new("rewrite");
    let episodes = args.episodes.iter().map(|s| s.parse::<Episode>()).collect::<Result<Vec<_>, _>>()?;
    let seq = read_spikes(&args.input)?;
    let rewrite = rewrite_with_composites(&seq, &episodes, args.expiry)?;
    for (ep, n) in episodes.iter().zip(&rewrite.replaced) {
        println!("{} : {n} occurrences replaced", ep.composite_symbol());
    }
    println!("{} events in, {} events out", seq.len(), rewrite.sequence.len());
    write_text(&args.out, &epimine::write_events(&rewrite.sequence))?;
    let config = serde_json::json!({ "episodes": episodes, "expiry": args.expiry });
    run.manifest(&args.out, config, Vec::new(), &[args.input.as_path()], &[args.out.as_path()])
}

fn cmd_synfire(args: SynfireArgs) -> CliResult<()> {
    let run = Run::new("synfire");
    let config = SynfireConfig {
        expiry: args.expiry,
        intervals: Interval::parse_list(&args.intervals)?,
        threshold: args.mining.threshold,
        decay: args.mining.decay,
        max_size: args.mining.max_size,
        workers: args.mining.workers,
    };
    mining_config(&args.mining, Some(config.expiry), config.intervals.clone()).validate(EpisodeKind::Serial)?;
    let seq = read_spikes(&args.input)?;
    let (report, rewritten) = discover_synfire(&seq, &config)?;
    println!("parallel episodes");
    print!("{}", format_table(&report.parallel));
    let names: Vec<String> = report.composites.iter().map(|c| format!("{} : {}", c.episode.label(), c.count)).collect();
    println!("composites: {}", if names.is_empty() { "none".to_string() } else { names.join("; ") });
    println!("serial episodes over {} rewritten events", report.rewritten_length);
    print!("{}", format_table(&report.serial));
    let mut outputs: Vec<&Path> = Vec::new();
    if let Some(path) = &args.rewritten {
        write_text(path, &epimine::write_events(&rewritten))?;
        outputs.push(path);
    }
    if let Some(out) = &args.out {
        write_json(out, &report)?;
        outputs.push(out);
        run.manifest(out, &config, Vec::new(), &[args.input.as_path()], &outputs)?;
    }
    Ok(())
}

fn cmd_significance(args: SignificanceArgs) -> CliResult<()> {
    let run = Run::new("significance");
    let mut config = if args.smoke { SignificanceConfig::smoke() } else { SignificanceConfig::default() };
    if let Some(s) = &args.noise {
        config.noise_models = parse_noise_list(s)?;
    }
    if let Some(r) = args.reps {
        config.replicates = r;
    }
    if let Some(d) = args.duration {
        config.duration = d;
    }
    if let Some(m) = args.max_size {
        config.max_size = m;
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    if let Some(w) = args.workers {
        config.workers = w;
    }
    let report = significance_run(&config)?;
    println!("{:<9} {:>4} {:>12} {:>12}", "study", "size", "noise max", "pattern min");
    for s in &report.separation {
        println!("{:<9} {:>4} {:>12.2} {:>12.2}", s.study.to_string(), s.size, s.noise_max, s.pattern_min);
    }
    let mut tsv = args.out.as_os_str().to_owned();
    tsv.push(".tsv");
    let mut json = args.out.as_os_str().to_owned();
    json.push(".json");
    let (tsv, json) = (PathBuf::from(tsv), PathBuf::from(json));
    write_text(&tsv, &report.to_tsv())?;
    write_json(&json, &report)?;
    println!("curves written to {} and {}", tsv.display(), json.display());
    run.manifest(&json, &config, vec![config.seed], &[], &[tsv.as_path(), json.as_path()])
}

fn load_episodes(path: &Path, size: Option<usize>) -> CliResult<Vec<Episode>> {
    let text = std::fs::read_to_string(path).map_err(|e| data(format!("cannot read {}: {e}", path.display())))?;
    let report: MiningReport =
        serde_json::from_str(&text).map_err(|e| data(format!("{}: not a mining report: {e}", path.display())))?;
    let n = size.unwrap_or_else(|| report.largest_size());
    Ok(report.episodes(n).iter().map(|c| c.episode.clone()).collect())
}

fn cmd_similarity(args: SimilarityArgs) -> CliResult<()> {
    let a = load_episodes(&args.a, args.size)?;
    let b = load_episodes(&args.b, args.size)?;
    println!("{}", similarity(&a, &b)?);
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Mine(a) => cmd_mine(a),
        Command::Rewrite(a) => cmd_rewrite(a),
        Command::Synfire(a) => cmd_synfire(a),
        Command::Significance(a) => cmd_significance(a),
        Command::Similarity(a) => cmd_similarity(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
