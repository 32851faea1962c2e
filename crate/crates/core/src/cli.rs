//! Command-line surface: single prequential runs and multi-stream comparisons.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::eval::{compare_runs, ByteModel, Metric, PrequentialEvaluator, RankTable, RunOutcome, Snapshot, DEFAULT_SNAPSHOT_EVERY};
use crate::generators::{make_generator, GeneratorConfig, GeneratorKind};
use crate::io::{load_dataset, save_model};
use crate::learner::{Algorithm, Learner, Model, ModelSpec};
use crate::rng::SplitMix64;
use crate::stream::StreamSource;
use crate::tree::TreeConfig;

#[derive(Debug, Parser)]
#[command(name = "greenstream", version, about = "Streaming decision trees with operation-count energy accounting")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Prequential run of one learner on one stream.
    Run(RunArgs),
    /// Runs several learners on several synthetic streams and ranks them.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Args)]
pub struct LearnerArgs {
    /// Member learner for ozabag and ozaboost.
    #[arg(long, default_value = "ht")]
    pub base_learner: Algorithm,
    /// Ensemble size for ozabag and ozaboost.
    #[arg(long, default_value_t = 10)]
    pub members: usize,
    #[arg(long, default_value_t = TreeConfig::default().nmin)]
    pub nmin: u64,
    #[arg(long, default_value_t = TreeConfig::default().delta)]
    pub delta: f64,
    #[arg(long, default_value_t = TreeConfig::default().tau)]
    pub tau: f64,
    #[arg(long, default_value_t = 0.01)]
    pub deactivate_threshold: f64,
    /// Accepts `inf`.
    #[arg(long, default_value_t = 2.0)]
    pub grow_fast_threshold: f64,
    #[arg(long, env = "GREENSTREAM_SEED", default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 1_000_000)]
    pub instances: u64,
    #[arg(long, default_value_t = DEFAULT_SNAPSHOT_EVERY)]
    pub snapshot_every: u64,
}

impl LearnerArgs {
    fn spec(&self, algorithm: Algorithm) -> ModelSpec {
        ModelSpec {
            algorithm,
            base: self.base_learner,
            members: self.members,
            tree: TreeConfig {
                nmin: self.nmin,
                delta: self.delta,
                tau: self.tau,
            },
            deactivate_threshold: self.deactivate_threshold,
            grow_fast_threshold: self.grow_fast_threshold,
            seed: SplitMix64::derive(self.seed, ENSEMBLE_STREAM).next_u64(),
        }
    }
}

/// Derived-stream index for ensemble sampling, disjoint from generator streams.
const ENSEMBLE_STREAM: u64 = 2;

#[derive(Debug, Clone, Args)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["stream", "file"]))]
pub struct RunArgs {
    #[arg(long)]
    pub algo: Algorithm,
    /// Synthetic generator name.
    #[arg(long)]
    pub stream: Option<GeneratorKind>,
    /// ARFF or CSV dataset.
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// Zero-based class column of `--file`; defaults to the last column.
    #[arg(long)]
    pub class_index: Option<usize>,
    /// Output directory for snapshots.jsonl and summary.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Writes the trained model here.
    #[arg(long)]
    pub save_model: Option<PathBuf>,
    #[command(flatten)]
    pub learner: LearnerArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[arg(long, value_delimiter = ',', default_value = "ht,efdt,gaht,ozabag,ozaboost")]
    pub algos: Vec<Algorithm>,
    /// Comma-separated generator names, or `all-synthetic`.
    #[arg(long, default_value = "all-synthetic")]
    pub streams: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub learner: LearnerArgs,
}

/// Writes non-finite floats as strings so JSON keeps them.
fn json_float<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else {
        s.serialize_str(&x.to_string())
    }
}

#[derive(Debug, Serialize)]
struct ConfigEcho {
    algorithm: Algorithm,
    base_learner: Option<Algorithm>,
    members: Option<usize>,
    stream: Option<String>,
    file: Option<String>,
    instances: u64,
    snapshot_every: u64,
    seed: u64,
    nmin: u64,
    delta: f64,
    tau: f64,
    #[serde(serialize_with = "json_float")]
    deactivate_threshold: f64,
    #[serde(serialize_with = "json_float")]
    grow_fast_threshold: f64,
}

#[derive(Debug, Serialize)]
struct Summary<'a> {
    config: ConfigEcho,
    truncated: bool,
    instances_seen: u64,
    accuracy: f64,
    counters: crate::counters::ResourceCounters,
    proxy_energy: u64,
    census: crate::tree::NodeCensus,
    inactive_leaves: usize,
    fast_nodes: usize,
    estimated_model_bytes: u64,
    byte_model: ByteModel,
    wall_time_secs: f64,
    final_snapshot: &'a Snapshot,
}

fn open_stream(args: &RunArgs, seed: u64) -> Result<Box<dyn StreamSource>> {
    match (&args.stream, &args.file) {
        (Some(kind), None) => Ok(Box::new(make_generator(&GeneratorConfig::new(*kind, seed))?)),
        (None, Some(path)) => Ok(Box::new(load_dataset(path, args.class_index)?.into_stream())),
        _ => Err(Error::InvalidConfig("exactly one of --stream or --file is required".into())),
    }
}

fn run_command(args: &RunArgs, stdout: &mut dyn Write) -> Result<()> {
    let l = &args.learner;
    let mut stream = open_stream(args, l.seed)?;
    let mut model = l.spec(args.algo).build(stream.schema().clone())?;
    let mut evaluator = PrequentialEvaluator::new(l.snapshot_every)?;
    evaluator.run_until(&mut model, &mut stream, l.instances)?;
    let result = evaluator.finish(&model);

    let ensemble = args.algo.is_ensemble();
    let summary = Summary {
        config: ConfigEcho {
            algorithm: args.algo,
            base_learner: ensemble.then_some(l.base_learner),
            members: ensemble.then_some(l.members),
            stream: args.stream.map(|k| k.name().to_string()),
            file: args.file.as_ref().map(|p| p.display().to_string()),
            instances: l.instances,
            snapshot_every: l.snapshot_every,
            seed: l.seed,
            nmin: l.nmin,
            delta: l.delta,
            tau: l.tau,
            deactivate_threshold: l.deactivate_threshold,
            grow_fast_threshold: l.grow_fast_threshold,
        },
        truncated: result.truncated,
        instances_seen: result.summary.instances_seen,
        accuracy: result.summary.cumulative_accuracy,
        counters: result.summary.counters,
        proxy_energy: result.summary.counters.proxy_energy(),
        census: result.summary.census,
        inactive_leaves: result.summary.census.deactivated_leaves,
        fast_nodes: result.summary.census.fast_nodes,
        estimated_model_bytes: result.summary.estimated_model_bytes,
        byte_model: ByteModel::for_classes(model.schema().class_count()),
        wall_time_secs: result.summary.wall_time_secs,
        final_snapshot: &result.summary,
    };
    let summary_json = serde_json::to_string_pretty(&summary)?;
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir)?;
        let mut lines = String::new();
        for s in &result.snapshots {
            lines.push_str(&serde_json::to_string(s)?);
            lines.push('\n');
        }
        fs::write(dir.join("snapshots.jsonl"), lines)?;
        fs::write(dir.join("summary.json"), format!("{summary_json}\n"))?;
    }
    if let Some(path) = &args.save_model {
        save_model(&model, path)?;
    }
    writeln!(stdout, "{summary_json}")?;
    Ok(())
}

fn parse_streams(spec: &str) -> Result<Vec<GeneratorKind>> {
    if spec.eq_ignore_ascii_case("all-synthetic") {
        return Ok(GeneratorKind::ALL.to_vec());
    }
    spec.split(',').map(|s| s.trim().parse()).collect()
}

/// One seeded run per (algorithm, stream) pair, in parallel.
pub fn compare(algos: &[Algorithm], streams: &[GeneratorKind], learner: &LearnerArgs) -> Result<Vec<RunOutcome>> {
    let jobs: Vec<(Algorithm, GeneratorKind)> = streams
        .iter()
        .flat_map(|s| algos.iter().map(move |a| (*a, *s)))
        .collect();
    jobs.par_iter()
        .map(|&(algo, kind)| {
            let mut stream = make_generator(&GeneratorConfig::new(kind, learner.seed))?;
            let mut model: Model = learner.spec(algo).build(stream.schema().clone())?;
            let mut evaluator = PrequentialEvaluator::new(learner.snapshot_every)?;
            evaluator.run_until(&mut model, &mut stream, learner.instances)?;
            Ok(RunOutcome {
                algorithm: algo.name().to_string(),
                dataset: kind.name().to_string(),
                summary: evaluator.finish(&model).summary,
            })
        })
        .collect()
}

const RANKED_METRICS: [Metric; 4] = [Metric::Accuracy, Metric::ProxyEnergy, Metric::SplitEvaluations, Metric::ModelBytes];

fn compare_command(args: &CompareArgs, stdout: &mut dyn Write) -> Result<()> {
    let streams = parse_streams(&args.streams)?;
    let outcomes = compare(&args.algos, &streams, &args.learner)?;
    let tables: Vec<RankTable> = RANKED_METRICS
        .iter()
        .map(|m| compare_runs(&outcomes, *m))
        .collect::<Result<_>>()?;
    let mut text = String::new();
    for table in &tables {
        text.push_str(&table.to_string());
        text.push('\n');
    }
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("runs.json"), serde_json::to_string_pretty(&outcomes)?)?;
        fs::write(dir.join("ranks.json"), serde_json::to_string_pretty(&tables)?)?;
        fs::write(dir.join("ranks.txt"), &text)?;
    }
    write!(stdout, "{text}")?;
    Ok(())
}

fn check_combination(learner: &LearnerArgs, algos: &[Algorithm]) -> std::result::Result<(), String> {
    if !matches!(learner.base_learner, Algorithm::Ht | Algorithm::Gaht) {
        return Err(format!("--base-learner must be ht or gaht, got {}", learner.base_learner));
    }
    if algos.iter().any(|a| a.is_ensemble()) && learner.members == 0 {
        return Err("--members must be at least 1".into());
    }
    if learner.snapshot_every == 0 {
        return Err("--snapshot-every must be at least 1".into());
    }
    Ok(())
}

/// Entry point shared by the binary and tests; returns the exit status.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let (learner, algos) = match &cli.command {
        Command::Run(a) => (&a.learner, vec![a.algo]),
        Command::Compare(a) => (&a.learner, a.algos.clone()),
    };
    let checked = match &cli.command {
        Command::Run(a) if a.class_index.is_some() && a.file.is_none() => {
            Err("--class-index applies only to --file".to_string())
        }
        _ => check_combination(learner, &algos),
    };
    if let Err(message) = checked {
        let e = Cli::command().error(ErrorKind::ArgumentConflict, message);
        let _ = e.print();
        return e.exit_code();
    }
    let outcome = match &cli.command {
        Command::Run(a) => run_command(a, stdout),
        Command::Compare(a) => compare_command(a, stdout),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

/// Path-free helper for tests that only need the parsed arguments.
pub fn parse(args: &[&str]) -> std::result::Result<Cli, clap::Error> {
    Cli::try_parse_from(args)
}
