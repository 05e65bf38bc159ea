//! Clustering-error sweeps over planted-partition families.

use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Result};
use rayon::prelude::*;

use pml_core::clustering::{baseline_agg, baseline_arithmetic, clustering_error, spectral_cluster, ClusteringResult};
use pml_core::graphs::{shift_for, MultilayerGraph};
use pml_core::powermean::PowerMeanSolveSpec;
use pml_core::rng::derive_seed;
use pml_core::sbm::{sample_case1, sample_case2, sample_case3, Case1Params, Case2Params, Case3Params, GroundTruth};

use crate::config::{ExperimentConfig, Kind, Method};
use crate::output::{fmt_f64, open_csv};

// Seed-derivation tags; distinct per use so streams never collide.
const TAG_GRAPH: u64 = 0x6772_6170;
const TAG_SOLVE: u64 = 0x736f_6c76;

/// (param1, param2) for every sweep point of the configured kind.
pub fn point_params(cfg: &ExperimentConfig) -> Result<Vec<(f64, f64)>> {
    match cfg.kind {
        Kind::Case1Sweep => {
            let m = cfg.sweep_points;
            Ok((0..m)
                .map(|i| {
                    let f = if m == 1 { 0.0 } else { i as f64 / (m - 1) as f64 };
                    let p_in = cfg.sweep_from.0 + f * (cfg.sweep_to.0 - cfg.sweep_from.0);
                    let p_out = cfg.sweep_from.1 + f * (cfg.sweep_to.1 - cfg.sweep_from.1);
                    (p_in, p_out)
                })
                .collect())
        }
        Kind::Case2 => Ok(vec![(cfg.p_in, cfg.p_out)]),
        Kind::Case3Grid => {
            let mut pts = Vec::new();
            for &pt in &cfg.p_tilde_grid {
                for &mu in &cfg.mu_grid {
                    pts.push((pt, mu));
                }
            }
            if pts.is_empty() {
                bail!("case3 grid is empty");
            }
            Ok(pts)
        }
        Kind::ClusterFiles => bail!("cluster-files configs drive the cluster command, not sweep"),
        Kind::Benchmark => bail!("benchmark configs drive the benchmark command, not sweep"),
    }
}

/// Number of planted clusters for the configured kind.
pub fn cluster_count(cfg: &ExperimentConfig) -> usize {
    match cfg.kind {
        Kind::Case2 => 3,
        _ => cfg.k,
    }
}

/// Samples the multilayer graph for one (point, run) cell. The seed depends
/// only on (master seed, kind, point, run), so worker scheduling cannot
/// change any result.
pub fn sample_point(cfg: &ExperimentConfig, point: usize, run: usize) -> Result<(MultilayerGraph, GroundTruth)> {
    let params = point_params(cfg)?;
    let Some(&(a, b)) = params.get(point) else {
        bail!("point index {point} out of range ({} points)", params.len());
    };
    let seed = derive_seed(cfg.seed, &[TAG_GRAPH, cfg.kind as u64, point as u64, run as u64]);
    let sampled = match cfg.kind {
        Kind::Case1Sweep => sample_case1(&Case1Params {
            k: cfg.k,
            cluster_size: cfg.cluster_size,
            layers: vec![cfg.fixed_layer, (a, b)],
            seed,
        })?,
        Kind::Case2 => sample_case2(&Case2Params {
            cluster_size: cfg.cluster_size,
            p_in: a,
            p_out: b,
            seed,
        })?,
        Kind::Case3Grid => sample_case3(&Case3Params {
            n: cfg.n,
            t: cfg.layers,
            k: cfg.k,
            p_copy: a,
            mu: b,
            c: cfg.degree,
            seed,
        })?,
        Kind::ClusterFiles | Kind::Benchmark => unreachable!("rejected by point_params"),
    };
    Ok(sampled)
}

struct Row {
    point: usize,
    param1: f64,
    param2: f64,
    method: &'static str,
    p: Option<f64>,
    run: usize,
    clustering_error: Option<f64>,
    outer_iterations: Option<usize>,
    wall_ms: Option<f64>,
    error: Option<String>,
}

fn method_rows(
    cfg: &ExperimentConfig,
    point: usize,
    params: (f64, f64),
    run: usize,
    graph: &MultilayerGraph,
    truth: &[usize],
) -> Vec<Row> {
    let k = cluster_count(cfg);
    let mut rows = Vec::new();
    let mut push = |method: &'static str, p: Option<f64>, outcome: Result<(ClusteringResult, f64)>| {
        let row = match outcome {
            Ok((res, wall_ms)) => {
                let err = clustering_error(&res.labels, truth);
                match err {
                    Ok(e) => Row {
                        point,
                        param1: params.0,
                        param2: params.1,
                        method,
                        p,
                        run,
                        clustering_error: Some(e),
                        outer_iterations: Some(res.outer_iterations),
                        wall_ms: Some(wall_ms),
                        error: None,
                    },
                    Err(e) => Row {
                        point,
                        param1: params.0,
                        param2: params.1,
                        method,
                        p,
                        run,
                        clustering_error: None,
                        outer_iterations: Some(res.outer_iterations),
                        wall_ms: Some(wall_ms),
                        error: Some(e.to_string()),
                    },
                }
            }
            Err(e) => Row {
                point,
                param1: params.0,
                param2: params.1,
                method,
                p,
                run,
                clustering_error: None,
                outer_iterations: None,
                wall_ms: None,
                error: Some(e.to_string()),
            },
        };
        rows.push(row);
    };

    for method in cfg.sweep_methods() {
        match method {
            Method::Power => {
                for &p in &cfg.sweep_p_grid() {
                    let seed = derive_seed(
                        cfg.seed,
                        &[TAG_SOLVE, point as u64, run as u64, 0, p.to_bits()],
                    );
                    let start = Instant::now();
                    let mut spec = PowerMeanSolveSpec::new(p, k, seed);
                    spec.eps = shift_for(p);
                    let out = spectral_cluster(graph, k, spec)
                        .map(|r| (r, start.elapsed().as_secs_f64() * 1e3))
                        .map_err(anyhow::Error::from);
                    push(Method::Power.label(), Some(p), out);
                }
            }
            Method::Arithmetic => {
                let seed = derive_seed(cfg.seed, &[TAG_SOLVE, point as u64, run as u64, 1]);
                let start = Instant::now();
                let out = baseline_arithmetic(graph, k, seed)
                    .map(|r| (r, start.elapsed().as_secs_f64() * 1e3))
                    .map_err(anyhow::Error::from);
                push(Method::Arithmetic.label(), Some(1.0), out);
            }
            Method::Agg => {
                let seed = derive_seed(cfg.seed, &[TAG_SOLVE, point as u64, run as u64, 2]);
                let start = Instant::now();
                let out = baseline_agg(graph, k, seed)
                    .map(|r| (r, start.elapsed().as_secs_f64() * 1e3))
                    .map_err(anyhow::Error::from);
                push(Method::Agg.label(), None, out);
            }
        }
    }
    rows
}

/// Runs the sweep and writes the CSV. Returns true when every row completed
/// without an error-column entry.
pub fn cmd_sweep(cfg: &ExperimentConfig, summary: bool, threads: usize) -> Result<bool> {
    let params = point_params(cfg)?;
    let runs = cfg.sweep_runs();
    if runs == 0 {
        bail!("runs must be positive");
    }
    let out_path: PathBuf = cfg.out.clone().unwrap_or_else(|| PathBuf::from("sweep.csv"));

    let cells: Vec<(usize, usize)> = (0..params.len())
        .flat_map(|pt| (0..runs).map(move |r| (pt, r)))
        .collect();

    let mut rows: Vec<Row> = cells
        .par_iter()
        .flat_map_iter(|&(pt, run)| match sample_point(cfg, pt, run) {
            Ok((graph, truth)) => method_rows(cfg, pt, params[pt], run, &graph, &truth.labels),
            Err(e) => vec![Row {
                point: pt,
                param1: params[pt].0,
                param2: params[pt].1,
                method: "sample",
                p: None,
                run,
                clustering_error: None,
                outer_iterations: None,
                wall_ms: None,
                error: Some(e.to_string()),
            }],
        })
        .collect();

    // Deterministic file order regardless of worker scheduling.
    rows.sort_by(|x, y| {
        (x.point, x.method)
            .cmp(&(y.point, y.method))
            .then_with(|| match (x.p, y.p) {
                (Some(a), Some(b)) => a.total_cmp(&b),
                (a, b) => a.is_some().cmp(&b.is_some()),
            })
            .then(x.run.cmp(&y.run))
    });

    let clean = rows.iter().all(|r| r.error.is_none());
    let mut w = open_csv(&out_path, cfg, threads)?;
    if summary {
        write_summary(&mut w, &rows)?;
    } else {
        w.write_record([
            "point",
            "param1",
            "param2",
            "method",
            "p",
            "run",
            "clustering_error",
            "outer_iterations",
            "wall_ms",
            "error",
        ])?;
        for r in &rows {
            w.write_record([
                r.point.to_string(),
                fmt_f64(r.param1),
                fmt_f64(r.param2),
                r.method.to_string(),
                r.p.map(fmt_f64).unwrap_or_default(),
                r.run.to_string(),
                r.clustering_error.map(fmt_f64).unwrap_or_default(),
                r.outer_iterations.map(|v| v.to_string()).unwrap_or_default(),
                r.wall_ms.map(|v| format!("{v:.3}")).unwrap_or_default(),
                r.error.clone().unwrap_or_default(),
            ])?;
        }
    }
    w.flush()?;
    eprintln!(
        "sweep: {} points x {} runs -> {} rows -> {}",
        params.len(),
        runs,
        rows.len(),
        out_path.display()
    );
    Ok(clean)
}

fn write_summary<W: std::io::Write>(w: &mut csv::Writer<W>, rows: &[Row]) -> Result<()> {
    w.write_record([
        "point",
        "param1",
        "param2",
        "method",
        "p",
        "runs",
        "mean_error",
        "std_error",
        "mean_wall_ms",
        "errors",
    ])?;
    let mut i = 0;
    while i < rows.len() {
        let key = (rows[i].point, rows[i].method, rows[i].p.map(f64::to_bits));
        let mut j = i;
        let mut errs: Vec<f64> = Vec::new();
        let mut walls: Vec<f64> = Vec::new();
        let mut failures = 0usize;
        while j < rows.len() && (rows[j].point, rows[j].method, rows[j].p.map(f64::to_bits)) == key {
            match rows[j].clustering_error {
                Some(e) => {
                    errs.push(e);
                    walls.push(rows[j].wall_ms.unwrap_or(0.0));
                }
                None => failures += 1,
            }
            j += 1;
        }
        let mean = if errs.is_empty() { f64::NAN } else { errs.iter().sum::<f64>() / errs.len() as f64 };
        let std = if errs.len() > 1 {
            (errs.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (errs.len() - 1) as f64).sqrt()
        } else {
            0.0
        };
        let mean_wall = if walls.is_empty() { f64::NAN } else { walls.iter().sum::<f64>() / walls.len() as f64 };
        w.write_record([
            rows[i].point.to_string(),
            fmt_f64(rows[i].param1),
            fmt_f64(rows[i].param2),
            rows[i].method.to_string(),
            rows[i].p.map(fmt_f64).unwrap_or_default(),
            errs.len().to_string(),
            if errs.is_empty() { String::new() } else { format!("{mean:.6}") },
            if errs.is_empty() { String::new() } else { format!("{std:.6}") },
            if walls.is_empty() { String::new() } else { format!("{mean_wall:.3}") },
            failures.to_string(),
        ])?;
        i = j;
    }
    Ok(())
}
