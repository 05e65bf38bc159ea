//! Materialize one sweep point as an on-disk bundle with ground truth.

use std::path::PathBuf;

use anyhow::{Context, Result};

use pml_core::graphs::io::save_bundle;

use crate::config::ExperimentConfig;
use crate::sweep::{point_params, sample_point};

/// Samples the configured point (run index 0, so `generate` and the sweep's
/// first run see the same graph) and writes it as a bundle directory.
pub fn cmd_generate(cfg: &ExperimentConfig) -> Result<()> {
    let params = point_params(cfg)?;
    let point = cfg.generate_point;
    let (graph, truth) = sample_point(cfg, point, 0)?;
    let dir: PathBuf = cfg.out.clone().unwrap_or_else(|| PathBuf::from("bundle"));
    save_bundle(&dir, &graph, Some(&truth.labels))
        .with_context(|| format!("writing bundle to {}", dir.display()))?;

    let n = graph.n();
    let densities: Vec<String> = graph
        .layers()
        .iter()
        .map(|w| format!("{:.4}", w.nnz() as f64 / (n as f64 * (n as f64 - 1.0))))
        .collect();
    println!(
        "wrote bundle: {} (point {point} of {}, params = ({}, {}), n = {n}, T = {}, densities = [{}])",
        dir.display(),
        params.len(),
        params[point].0,
        params[point].1,
        graph.t(),
        densities.join(", ")
    );
    Ok(())
}
