//! Scaling benchmark: eigensolve wall time on two-layer graphs of growing
//! size, single-threaded so timings measure the algorithm and not the box.

use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Result};

use pml_core::graphs::shift_for;
use pml_core::powermean::{power_mean_eigs, PowerMeanOp, PowerMeanSolveSpec};
use pml_core::rng::derive_seed;
use pml_core::sbm::{sample_case1, Case1Params};

use crate::config::ExperimentConfig;
use crate::output::open_csv;

const TAG_BENCH_GRAPH: u64 = 0x6267_7270;
const TAG_BENCH_SOLVE: u64 = 0x6273_6c76;

// Two equal clusters at these edge probabilities; the planted cut stays
// recoverable at every benchmark size.
const P_IN: f64 = 0.05;
const P_OUT: f64 = 0.025;
const EIGENPAIRS: usize = 2;

// Abort a size before sampling if the expected CSR storage alone would crowd
// the host. Entries are stored twice (symmetric CSR), 12 bytes each, and the
// sampler's transient edge list costs roughly as much again while it lives.
const MEM_BUDGET_BYTES: f64 = 3.5e9;

fn estimated_bytes(n: usize) -> f64 {
    let pairs = (n as f64) * (n as f64) / 4.0;
    let entries_per_layer = 2.0 * pairs * (P_IN + P_OUT);
    2.0 * entries_per_layer * 12.0 * 1.5
}

/// Runs the benchmark grid and writes the CSV. Returns true when every
/// requested (n, p, run) produced a timing row.
pub fn cmd_benchmark(cfg: &ExperimentConfig, threads: usize) -> Result<bool> {
    if threads != 1 {
        bail!("benchmark requires the single-threaded pool, got {threads} workers");
    }
    let p_grid = cfg.benchmark_p_grid();
    for &p in &p_grid {
        if p >= 0.0 {
            bail!("benchmark exponents must be negative (matrix-free path), got {p}");
        }
    }
    let runs = cfg.benchmark_runs();
    if runs == 0 || cfg.sizes.is_empty() {
        bail!("benchmark needs at least one size and one run");
    }
    let out_path: PathBuf = cfg.out.clone().unwrap_or_else(|| PathBuf::from("benchmark.csv"));
    let mut w = open_csv(&out_path, cfg, threads)?;
    w.write_record(["n", "p", "run", "wall_ms", "krylov_dims", "error"])?;

    let mut clean = true;
    let record_error = |w: &mut csv::Writer<_>, n: usize, p: f64, run: usize, msg: &str| -> Result<()> {
        w.write_record([
            n.to_string(),
            format!("{p}"),
            run.to_string(),
            String::new(),
            String::new(),
            msg.to_string(),
        ])?;
        Ok(())
    };

    for (size_idx, &n) in cfg.sizes.iter().enumerate() {
        if n < 2 * EIGENPAIRS || n % 2 != 0 {
            for &p in &p_grid {
                for run in 0..runs {
                    record_error(&mut w, n, p, run, "size must be even and at least 4")?;
                }
            }
            clean = false;
            continue;
        }
        let est = estimated_bytes(n);
        if est > MEM_BUDGET_BYTES {
            let msg = format!(
                "skipped: estimated layer storage {:.1} GB exceeds the {:.1} GB budget",
                est / 1e9,
                MEM_BUDGET_BYTES / 1e9
            );
            for &p in &p_grid {
                for run in 0..runs {
                    record_error(&mut w, n, p, run, &msg)?;
                }
            }
            clean = false;
            continue;
        }

        for &p in &p_grid {
            let point_start = Instant::now();
            let budget = std::time::Duration::from_secs(cfg.point_budget_secs);
            let mut aborted = false;
            for run in 0..runs {
                if aborted || point_start.elapsed() > budget {
                    if !aborted {
                        aborted = true;
                    }
                    record_error(
                        &mut w,
                        n,
                        p,
                        run,
                        &format!("point aborted: exceeded {}s budget", cfg.point_budget_secs),
                    )?;
                    clean = false;
                    continue;
                }
                let graph_seed = derive_seed(cfg.seed, &[TAG_BENCH_GRAPH, size_idx as u64, run as u64]);
                let sampled = sample_case1(&Case1Params {
                    k: 2,
                    cluster_size: n / 2,
                    layers: vec![(P_IN, P_OUT); 2],
                    seed: graph_seed,
                });
                let (graph, _truth) = match sampled {
                    Ok(g) => g,
                    Err(e) => {
                        record_error(&mut w, n, p, run, &e.to_string())?;
                        clean = false;
                        continue;
                    }
                };
                let solve_seed =
                    derive_seed(cfg.seed, &[TAG_BENCH_SOLVE, size_idx as u64, run as u64, p.to_bits()]);
                let mut spec = PowerMeanSolveSpec::new(p, EIGENPAIRS, solve_seed);
                spec.eps = shift_for(p);
                let start = Instant::now();
                let solved = PowerMeanOp::new(&graph, spec).and_then(|op| power_mean_eigs(&op));
                let wall_ms = start.elapsed().as_secs_f64() * 1e3;
                match solved {
                    Ok(res) => {
                        let dims = res
                            .krylov_dims
                            .iter()
                            .map(|d| d.to_string())
                            .collect::<Vec<_>>()
                            .join("|");
                        w.write_record([
                            n.to_string(),
                            format!("{p}"),
                            run.to_string(),
                            format!("{wall_ms:.3}"),
                            dims,
                            String::new(),
                        ])?;
                    }
                    Err(e) => {
                        record_error(&mut w, n, p, run, &e.to_string())?;
                        clean = false;
                    }
                }
            }
        }
        eprintln!("benchmark: n = {n} done");
    }
    w.flush()?;
    eprintln!("benchmark -> {}", out_path.display());
    Ok(clean)
}
