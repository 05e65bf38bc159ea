//! `pml`: experiment harness for power mean Laplacian multilayer clustering.
//!
//! Subcommands: `generate` (sample a bundle), `sweep` (clustering-error
//! curves), `benchmark` (wall-time scaling, single-threaded), `cluster`
//! (label a bundle or feature tables). Configuration is one JSON file plus
//! flag overrides; flags win. Every CSV embeds a metadata header (version,
//! config hash, seed, worker count, full config) sufficient to reproduce it.

mod benchmark;
mod cluster;
mod config;
mod generate;
mod output;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand};

use config::{Kind, Overrides};

#[derive(Parser)]
#[command(name = "pml", version, about = "Multilayer spectral clustering experiments")]
struct Cli {
    #[command(flatten)]
    overrides: Overrides,
    /// Sweep only: emit mean/std per (point, method, p) instead of raw rows.
    #[arg(long, global = true)]
    summary: bool,
    /// Force one worker in the numeric kernels.
    #[arg(long, global = true)]
    single_thread: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample a multilayer graph with ground truth and save it as a bundle.
    Generate,
    /// Run clustering methods over a parameter sweep and write a CSV.
    Sweep,
    /// Time the matrix-free eigensolver on growing graphs (one thread).
    Benchmark,
    /// Cluster a saved bundle or feature CSVs and write a labels CSV.
    Cluster {
        /// Bundle directory written by `generate`.
        #[arg(long, conflicts_with_all = ["features", "knn"])]
        bundle: Option<PathBuf>,
        /// Feature CSVs, one per view; rows are observations.
        #[arg(long, num_args = 1.., requires = "knn")]
        features: Vec<PathBuf>,
        /// Neighbors per vertex for the k-NN layer built from each view.
        #[arg(long, requires = "features")]
        knn: Option<usize>,
        /// Number of clusters (default: inferred from ground truth, else config).
        #[arg(long)]
        k: Option<usize>,
    },
}

fn worker_count(cmd: &Cmd, single_thread: bool) -> Result<usize> {
    if matches!(cmd, Cmd::Benchmark) || single_thread {
        return Ok(1);
    }
    let available = std::thread::available_parallelism().map_or(1, usize::from);
    match std::env::var("PML_THREADS") {
        Ok(v) => {
            let cap: usize = v.parse().map_err(|_| {
                anyhow::anyhow!("PML_THREADS must be a positive integer, got {v:?}")
            })?;
            if cap == 0 {
                bail!("PML_THREADS must be a positive integer, got 0");
            }
            Ok(cap.min(available))
        }
        Err(_) => Ok(available),
    }
}

fn run(cli: Cli) -> Result<bool> {
    let threads = worker_count(&cli.cmd, cli.single_thread)?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| anyhow::anyhow!("thread pool setup failed: {e}"))?;
    // Record what the pool actually provides, not what was asked for.
    let threads = rayon::current_num_threads();

    match cli.cmd {
        Cmd::Generate => {
            let cfg = cli.overrides.resolve(Kind::Case2)?;
            generate::cmd_generate(&cfg)?;
            Ok(true)
        }
        Cmd::Sweep => {
            let cfg = cli.overrides.resolve(Kind::Case1Sweep)?;
            sweep::cmd_sweep(&cfg, cli.summary, threads)
        }
        Cmd::Benchmark => {
            let cfg = cli.overrides.resolve(Kind::Benchmark)?;
            if cfg.kind != Kind::Benchmark {
                bail!("benchmark needs a config with kind = \"benchmark\", got {:?}", cfg.kind);
            }
            benchmark::cmd_benchmark(&cfg, threads)
        }
        Cmd::Cluster { bundle, features, knn, k } => {
            let mut cfg = cli.overrides.resolve(Kind::ClusterFiles)?;
            if cfg.kind != Kind::ClusterFiles {
                bail!("cluster needs a config with kind = \"cluster-files\", got {:?}", cfg.kind);
            }
            if bundle.is_some() {
                cfg.bundle = bundle;
                cfg.features.clear();
            }
            if !features.is_empty() {
                cfg.features = features;
                cfg.bundle = None;
            }
            if knn.is_some() {
                cfg.knn = knn;
            }
            cluster::cmd_cluster(&cfg, k, threads)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("completed with error rows; see the error column");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
