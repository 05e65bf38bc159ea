//! Cluster stored inputs: a multilayer bundle or per-view feature tables.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};

use pml_core::clustering::{clustering_error, spectral_cluster};
use pml_core::graphs::io::{load_bundle, load_features_csv};
use pml_core::graphs::{knn_graph, shift_for, MultilayerGraph};
use pml_core::powermean::PowerMeanSolveSpec;

use crate::config::ExperimentConfig;
use crate::output::open_csv;

/// Loads the configured input, clusters it, writes the labels CSV, and prints
/// the clustering error when ground truth is available.
pub fn cmd_cluster(cfg: &ExperimentConfig, k_flag: Option<usize>, threads: usize) -> Result<()> {
    let (graph, truth) = match (&cfg.bundle, cfg.features.is_empty()) {
        (Some(dir), true) => load_bundle(dir).with_context(|| format!("loading bundle {}", dir.display()))?,
        (None, false) => {
            let Some(knn) = cfg.knn else {
                bail!("feature inputs need --knn");
            };
            let mut layers = Vec::with_capacity(cfg.features.len());
            for path in &cfg.features {
                let feats = load_features_csv(path)
                    .with_context(|| format!("loading features {}", path.display()))?;
                layers.push(
                    knn_graph(&feats, knn)
                        .with_context(|| format!("building {knn}-NN graph from {}", path.display()))?,
                );
            }
            (MultilayerGraph::new(layers)?, None)
        }
        (Some(_), false) => bail!("--bundle and --features are mutually exclusive"),
        (None, true) => bail!("nothing to cluster: pass --bundle DIR or --features FILES --knn K"),
    };

    let p = match &cfg.p_grid {
        Some(ps) if ps.len() == 1 => ps[0],
        Some(ps) => bail!("cluster takes a single exponent, got {} values", ps.len()),
        None => cfg.exponent.unwrap_or(-10.0),
    };
    let k = match (k_flag, &truth) {
        (Some(k), _) => k,
        (None, Some(labels)) => labels.iter().copied().max().map_or(cfg.k, |m| m + 1),
        (None, None) => cfg.k,
    };

    let mut spec = PowerMeanSolveSpec::new(p, k, cfg.seed);
    spec.eps = shift_for(p);
    let result = spectral_cluster(&graph, k, spec)?;

    let out_path: PathBuf = cfg.out.clone().unwrap_or_else(|| PathBuf::from("labels.csv"));
    let mut w = open_csv(&out_path, cfg, threads)?;
    w.write_record(["vertex", "label"])?;
    for (v, l) in result.labels.iter().enumerate() {
        w.write_record([v.to_string(), l.to_string()])?;
    }
    w.flush()?;

    println!(
        "clustered n = {} vertices, T = {} layers, k = {k}, p = {p} -> {}",
        graph.n(),
        graph.t(),
        out_path.display()
    );
    if !result.converged {
        eprintln!("warning: eigensolver stopped before reaching tolerance; labels use the best subspace found");
    }
    if let Some(labels) = &truth {
        let err = clustering_error(&result.labels, labels)?;
        println!("clustering error: {err:.4}");
    }
    Ok(())
}
