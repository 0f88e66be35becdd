//! `asecluster` command-line driver.
//!
//! Exit codes: 0 on success, 1 when an input or parameter is invalid, 2 when
//! the numerics degenerate (a non-positive retained eigenvalue, a zero row
//! under sphere projection, too few distinct points to cluster).

mod commands;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use asecluster::clustering::DEFAULT_RESTARTS;
use asecluster::harness::{DEFAULT_ETA, DEFAULT_N_GRID, DEFAULT_TRIALS};
use asecluster::Error;
use clap::{Args, Parser, Subcommand};

/// Environment variable holding the default worker-thread count.
pub const THREADS_ENV: &str = "ASECLUSTER_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "asecluster",
    version,
    about = "Spectral embedding, clustering and bound checks for block-model graphs",
    after_help = "Seeds: --seed is a trial seed. The model, edge-sampling and clustering stages each \
                  derive their own stream from it, so `sample`, `embed` and `cluster` with one seed \
                  reproduce the library trial with that seed."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a graph from a model and write its edge list.
    Sample(SampleArgs),
    /// Embed an edge list into d dimensions.
    Embed(EmbedArgs),
    /// Cluster an embedding into K groups.
    Cluster(ClusterArgs),
    /// Evaluate model constants, the error bound and the assumptions.
    Check(CheckArgs),
    /// Run seeded trials over a grid of vertex counts.
    Sweep(SweepArgs),
    /// Compare the clustering objective of true and embedded positions.
    Consistency(ConsistencyArgs),
    /// Render a records CSV or an embedding as SVG.
    Plot(PlotArgs),
}

#[derive(Args, Debug)]
struct ModelArg {
    /// Preset name or path to a model JSON file.
    #[arg(long, default_value = "dense-two-block")]
    model: String,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[command(flatten)]
    model: ModelArg,
    /// Vertex count; defaults to the model's own when it lists labels.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    n: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Edge list destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the true block labels as `vertex,label_true`.
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EmbedArgs {
    /// Edge list (`i j` per line, `#` comments).
    #[arg(long)]
    input: PathBuf,
    /// Embedding dimension.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    d: u64,
    /// Vertices in the edge list start at 1.
    #[arg(long)]
    one_indexed: bool,
    /// Embedding CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the retained eigenvalues.
    #[arg(long)]
    eigenvalues: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ClusterArgs {
    /// Embedding CSV with columns `vertex,x1..xd`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    k: u64,
    #[arg(long, default_value_t = DEFAULT_RESTARTS as u64, value_parser = clap::value_parser!(u64).range(1..))]
    restarts: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Project rows onto the unit sphere before clustering (degree-corrected models).
    #[arg(long)]
    project_sphere: bool,
    /// CSV with a `label_true` column; enables the misclustering report.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Labels CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Misclustering report JSON destination.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[command(flatten)]
    model: ModelArg,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    n: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_ETA, value_parser = parse_eta)]
    eta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Full report as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    model: ModelArg,
    /// Ascending vertex counts, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_N_GRID.map(|n| n as u64))]
    n: Vec<u64>,
    /// Embedding dimension; defaults to the rank of the model.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    d: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_TRIALS as u64, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_RESTARTS as u64, value_parser = clap::value_parser!(u64).range(1..))]
    restarts: u64,
    #[arg(long, default_value_t = DEFAULT_ETA, value_parser = parse_eta)]
    eta: f64,
    /// Skip the bound report in each trial.
    #[arg(long)]
    no_bounds: bool,
    #[command(flatten)]
    threads: ThreadsArg,
    /// Output directory for records.csv, timings.csv and summary.json.
    #[arg(long)]
    out: PathBuf,
    /// Also write decay.svg.
    #[arg(long)]
    plot: bool,
}

#[derive(Args, Debug)]
struct ConsistencyArgs {
    /// `two-point` or a path to a latent distribution JSON file.
    #[arg(long, default_value = "two-point")]
    dist: String,
    #[arg(long, value_delimiter = ',', default_values_t = [500u64, 1000, 2000, 4000])]
    n: Vec<u64>,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    k: u64,
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_RESTARTS as u64, value_parser = clap::value_parser!(u64).range(1..))]
    restarts: u64,
    #[command(flatten)]
    threads: ThreadsArg,
    /// Table destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct PlotSource {
    /// Records CSV from `sweep`: error decay with standard-error bars.
    #[arg(long)]
    records: Option<PathBuf>,
    /// Embedding CSV: scatter of the rows before and after sphere projection.
    #[arg(long)]
    embedding: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PlotArgs {
    #[command(flatten)]
    source: PlotSource,
    /// Labels CSV colouring the scatter (`label_true`, else `label_hat`).
    #[arg(long, requires = "embedding")]
    labels: Option<PathBuf>,
    /// SVG destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ThreadsArg {
    /// Worker threads; results do not depend on it.
    #[arg(long, env = THREADS_ENV, value_parser = clap::value_parser!(u64).range(1..))]
    threads: Option<u64>,
}

impl ThreadsArg {
    fn get(&self) -> usize {
        self.threads
            .map(|t| t as usize)
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    }
}

fn parse_eta(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v > 0.0 && v < 0.5 {
        Ok(v)
    } else {
        Err(format!("eta must lie in (0, 0.5), got {v}"))
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(
            Error::NonPositiveSpectrum { .. }
            | Error::ZeroRow { .. }
            | Error::TooFewDistinctRows { .. }
            | Error::NoConvergence { .. },
        ) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // clap reserves 2 for usage errors; here every usage error is a
            // validation failure.
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match &cli.command {
        Command::Sample(a) => commands::sample(a),
        Command::Embed(a) => commands::embed(a),
        Command::Cluster(a) => commands::cluster(a),
        Command::Check(a) => commands::check(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Consistency(a) => commands::consistency(a),
        Command::Plot(a) => commands::plot(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
