//! Command-line driver: ingest edge lists, inspect fraction statistics,
//! score and evaluate single predictors, generate synthetic data, and
//! run full sweeps.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use linkpred::config::{ExperimentConfig, PredictorName};
use linkpred::dataset_io;
use linkpred::error::Result;
use linkpred::evaluation::{evaluate_transition, EvalReport, CSV_HEADER};
use linkpred::experiment::{
    build_dataset, compute_predictor_map, emit_fraction_series, fractions_csv, run_experiment_on,
    PredictorParams,
};
use linkpred::fusion::Aggregate;
use linkpred::graph::filter_by_aggregate_degree;
use linkpred::ingest::{ingest_edges, IngestOptions};
use linkpred::scores::ScoreMap;
use linkpred::synth::{generate_synthetic, SyntheticSpec};

#[derive(Parser)]
#[command(
    name = "linkpred",
    version,
    about = "Temporal link prediction over friendship and interaction networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ingest raw edge files into a dataset file.
    Ingest(IngestArgs),
    /// Print the per-transition fraction statistics of a dataset.
    Stats(StatsArgs),
    /// Score one predictor at one prediction time and export the map.
    Predict(PredictArgs),
    /// Evaluate an exported score map against the next snapshot.
    Evaluate(EvaluateArgs),
    /// Run the full (predictor, fusion mode, alpha, transition) sweep.
    Sweep(SweepArgs),
    /// Generate a synthetic coupled dataset from a config file.
    Synth(SynthArgs),
}

#[derive(Args)]
struct IngestArgs {
    /// Friendship edge list (`a b [unix_ts]`, `\N` or no field = at crawl).
    #[arg(long)]
    friends: PathBuf,
    /// Interaction edge list (`a b unix_ts`).
    #[arg(long)]
    interactions: PathBuf,
    /// Trace start, unix seconds.
    #[arg(long)]
    start: i64,
    /// Trace end, unix seconds; the last partial window is discarded.
    #[arg(long)]
    end: i64,
    /// Snapshot window length in days.
    #[arg(long, default_value_t = 90)]
    interval_days: i64,
    /// Keep only nodes with at least this degree in the aggregated
    /// friendship network (0 keeps everything).
    #[arg(long, default_value_t = 0)]
    degree_threshold: usize,
    /// Output dataset path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long)]
    dataset: PathBuf,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    dataset: PathBuf,
    /// One of: ewma, ts_aa, ts_katz, dsbm.
    #[arg(long)]
    predictor: String,
    /// Prediction time: scores target interactions at t + 1.
    #[arg(long)]
    t: usize,
    #[arg(long, default_value_t = 0.5)]
    lambda: f64,
    #[arg(long, default_value_t = 0.05)]
    beta: f64,
    #[arg(long, default_value_t = 4)]
    max_length: usize,
    #[arg(long, default_value_t = 10)]
    blocks: usize,
    #[arg(long, default_value_t = 0.5)]
    mix: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output score map path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    dataset: PathBuf,
    /// Exported score map (`u v score` lines).
    #[arg(long)]
    scores: PathBuf,
    /// Prediction time: the map is scored against interactions at t + 1.
    #[arg(long)]
    t: usize,
    /// Label recorded in the report's predictor column.
    #[arg(long, default_value = "scores")]
    label: String,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    /// Override the config's RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config's output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the config's metric aggregation across transitions.
    #[arg(long, value_enum)]
    aggregate: Option<AggregateArg>,
}

#[derive(Args)]
struct SynthArgs {
    /// Config file with a [synthetic] section.
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Output dataset path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Copy, Clone, ValueEnum)]
enum AggregateArg {
    Mean,
    Pooled,
}

impl From<AggregateArg> for Aggregate {
    fn from(a: AggregateArg) -> Self {
        match a {
            AggregateArg::Mean => Aggregate::Mean,
            AggregateArg::Pooled => Aggregate::Pooled,
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(cause) = source {
                eprintln!("  caused by: {cause}");
                source = cause.source();
            }
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest(args) => {
            let opts = IngestOptions {
                start: args.start,
                end: args.end,
                interval_secs: args.interval_days * 86_400,
            };
            let (ds, stats) = ingest_edges(&args.friends, &args.interactions, opts)?;
            let ds = if args.degree_threshold > 0 {
                filter_by_aggregate_degree(&ds, args.degree_threshold)?
            } else {
                ds
            };
            dataset_io::save(&ds, &args.out)?;
            println!(
                "wrote {}: {} nodes, {} snapshots",
                args.out.display(),
                ds.node_count(),
                ds.snapshot_count()
            );
            println!(
                "records: {} friendship ({} at crawl, {} skipped), {} interaction ({} skipped), {} self-loops dropped",
                stats.friendship_records,
                stats.crawl_time_friendships,
                stats.skipped_friendships,
                stats.interaction_records,
                stats.skipped_interactions,
                stats.self_loops_dropped
            );
            Ok(())
        }
        Command::Stats(args) => {
            let ds = dataset_io::load(&args.dataset)?;
            let csv = fractions_csv(&emit_fraction_series(&ds)?);
            match args.out {
                Some(path) => {
                    std::fs::write(&path, csv)
                        .map_err(|e| linkpred::Error::Io { path, source: e })?;
                }
                None => print!("{csv}"),
            }
            Ok(())
        }
        Command::Predict(args) => {
            let ds = dataset_io::load(&args.dataset)?;
            let predictor = PredictorName::parse(&args.predictor)?;
            let params = PredictorParams {
                ewma: linkpred::dynamic_predictors::EwmaConfig {
                    lambda: args.lambda,
                },
                katz: linkpred::static_predictors::KatzConfig {
                    beta: args.beta,
                    max_length: args.max_length,
                },
                sbm: linkpred::dynamic_predictors::SbmConfig {
                    blocks: args.blocks,
                    mix: args.mix,
                    seed: args.seed,
                },
            };
            let map = compute_predictor_map(&ds, predictor, args.t, &params)?;
            let file = std::fs::File::create(&args.out).map_err(|e| linkpred::Error::Io {
                path: args.out.clone(),
                source: e,
            })?;
            let mut w = std::io::BufWriter::new(file);
            map.export(&mut w)
                .and_then(|_| w.flush())
                .map_err(|e| linkpred::Error::Io {
                    path: args.out.clone(),
                    source: e,
                })?;
            println!("wrote {} ({} scored pairs)", args.out.display(), map.len());
            Ok(())
        }
        Command::Evaluate(args) => {
            let ds = dataset_io::load(&args.dataset)?;
            let file = std::fs::File::open(&args.scores).map_err(|e| linkpred::Error::Io {
                path: args.scores.clone(),
                source: e,
            })?;
            let map = ScoreMap::import(std::io::BufReader::new(file), ds.node_count())?;
            let row = evaluate_transition(&map, ds.interactions(), args.t)?;
            let report = EvalReport {
                predictor: args.label,
                mode: "none".into(),
                alpha: 0.0,
                row,
            };
            println!("{CSV_HEADER}");
            println!("{}", report.csv_row());
            Ok(())
        }
        Command::Sweep(args) => {
            let mut cfg = ExperimentConfig::from_path(&args.config)?;
            if let Some(seed) = args.seed {
                cfg.run.seed = seed;
            }
            if let Some(out) = args.out {
                cfg.run.out_dir = out;
            }
            if let Some(aggregate) = args.aggregate {
                cfg.run.aggregate = aggregate.into();
            }
            let ds = build_dataset(&cfg)?;
            let output = run_experiment_on(&ds, &cfg)?;
            output.write(&cfg.run.out_dir, &cfg)?;
            print!("{}", output.summary_markdown());
            println!(
                "\nwrote results.csv, summary.md, fractions.csv, run_meta.toml to {}",
                cfg.run.out_dir.display()
            );
            Ok(())
        }
        Command::Synth(args) => {
            let mut cfg = ExperimentConfig::from_path(&args.config)?;
            if let Some(seed) = args.seed {
                cfg.run.seed = seed;
            }
            let section = cfg.synthetic.as_ref().ok_or_else(|| {
                linkpred::Error::InvalidConfig("config has no [synthetic] section".into())
            })?;
            let ds = generate_synthetic(
                &SyntheticSpec {
                    nodes: section.nodes,
                    snapshots: section.snapshots,
                    friendship_growth: section.friendship_growth,
                    q_friend: section.q_friend,
                    q_nonfriend: section.q_nonfriend,
                    persistence_boost: section.persistence_boost,
                },
                cfg.run.seed,
            )?;
            dataset_io::save(&ds, &args.out)?;
            println!(
                "wrote {}: {} nodes, {} snapshots (seed {})",
                args.out.display(),
                ds.node_count(),
                ds.snapshot_count(),
                cfg.run.seed
            );
            Ok(())
        }
    }
}
