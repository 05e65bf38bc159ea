//! Declarative experiment configuration: one JSON file, flag overrides win.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Experiment kind. Selects which generator / sweep protocol a command runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
#[clap(rename_all = "kebab-case")]
pub enum Kind {
    /// Two-cluster multilayer graphs, one informative layer fixed and one
    /// swept from noise-dominated to informative.
    Case1Sweep,
    /// Three clusters, each layer informative for one cluster only.
    Case2,
    /// Grid over (label copy probability, mixing) for the per-layer-label model.
    Case3Grid,
    /// Cluster user-supplied bundles or feature tables (cmd_cluster only).
    ClusterFiles,
    /// Scaling benchmark on two-layer graphs of increasing size.
    Benchmark,
}

/// Clustering method requested in a sweep. `Power` expands over the p grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
#[clap(rename_all = "kebab-case")]
pub enum Method {
    /// Power mean Laplacian embedding, one row per grid exponent.
    Power,
    /// Arithmetic mean baseline (identical to power with p = 1).
    Arithmetic,
    /// Aggregate-adjacency baseline: mean adjacency, then single-layer clustering.
    Agg,
}

impl Method {
    /// Label used in the CSV `method` column.
    pub fn label(self) -> &'static str {
        match self {
            Method::Power => "L_p",
            Method::Arithmetic => "L_1",
            Method::Agg => "L_agg",
        }
    }
}

fn d_kind() -> Kind {
    Kind::Case2
}
fn d_cluster_size() -> usize {
    100
}
fn d_k() -> usize {
    2
}
fn d_fixed_layer() -> (f64, f64) {
    (0.1, 0.02)
}
fn d_sweep_from() -> (f64, f64) {
    (0.02, 0.10)
}
fn d_sweep_to() -> (f64, f64) {
    (0.10, 0.02)
}
fn d_sweep_points() -> usize {
    9
}
fn d_p_in() -> f64 {
    0.1
}
fn d_p_out() -> f64 {
    0.02
}
fn d_n() -> usize {
    100
}
fn d_layers() -> usize {
    10
}
fn d_degree() -> f64 {
    10.0
}
fn d_p_tilde_grid() -> Vec<f64> {
    vec![0.5, 0.6, 0.7, 0.8, 0.9, 1.0]
}
fn d_mu_grid() -> Vec<f64> {
    vec![0.0, 0.1, 0.2, 0.3, 0.4, 0.5]
}
fn d_sizes() -> Vec<usize> {
    vec![10_000, 20_000, 30_000, 40_000]
}
fn d_point_budget() -> u64 {
    3600
}

/// Full experiment description. Every field has a default so a config file
/// only needs to name what it changes; command-line flags override the file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "d_kind")]
    pub kind: Kind,
    #[serde(default)]
    pub seed: u64,
    /// Runs per sweep/benchmark point. Per-command default when absent
    /// (sweeps: 50, benchmark: 10).
    #[serde(default)]
    pub runs: Option<usize>,
    /// Exponent grid for the power mean method. Per-command default when
    /// absent (sweeps: {0, +-1, +-2, +-5, +-10}, benchmark: {-1,-2,-5,-10}).
    #[serde(default)]
    pub p_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub methods: Option<Vec<Method>>,
    #[serde(default)]
    pub out: Option<PathBuf>,

    // case1-sweep geometry
    #[serde(default = "d_cluster_size")]
    pub cluster_size: usize,
    #[serde(default = "d_k")]
    pub k: usize,
    /// (p_in, p_out) of the stationary informative layer.
    #[serde(default = "d_fixed_layer")]
    pub fixed_layer: (f64, f64),
    /// Swept layer endpoints; interpolated linearly over `sweep_points`.
    #[serde(default = "d_sweep_from")]
    pub sweep_from: (f64, f64),
    #[serde(default = "d_sweep_to")]
    pub sweep_to: (f64, f64),
    #[serde(default = "d_sweep_points")]
    pub sweep_points: usize,

    // case2 edge probabilities
    #[serde(default = "d_p_in")]
    pub p_in: f64,
    #[serde(default = "d_p_out")]
    pub p_out: f64,

    // case3-grid model
    #[serde(default = "d_n")]
    pub n: usize,
    #[serde(default = "d_layers")]
    pub layers: usize,
    #[serde(default = "d_degree")]
    pub degree: f64,
    #[serde(default = "d_p_tilde_grid")]
    pub p_tilde_grid: Vec<f64>,
    #[serde(default = "d_mu_grid")]
    pub mu_grid: Vec<f64>,

    /// Which sweep/grid point `generate` materializes.
    #[serde(default)]
    pub generate_point: usize,

    // benchmark
    #[serde(default = "d_sizes")]
    pub sizes: Vec<usize>,
    /// Wall-clock budget per benchmark point, seconds. Exceeding it aborts
    /// the point's remaining runs with error rows.
    #[serde(default = "d_point_budget")]
    pub point_budget_secs: u64,

    // cluster-files inputs
    #[serde(default)]
    pub bundle: Option<PathBuf>,
    #[serde(default)]
    pub features: Vec<PathBuf>,
    #[serde(default)]
    pub knn: Option<usize>,
    /// Single exponent for cmd_cluster (default -10).
    #[serde(default)]
    pub exponent: Option<f64>,
}

impl ExperimentConfig {
    /// All-defaults config with the given kind.
    pub fn default_for(kind: Kind) -> Self {
        let mut cfg: ExperimentConfig =
            serde_json::from_str("{}").expect("defaults always deserialize");
        cfg.kind = kind;
        cfg
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(ps) = &self.p_grid {
            for &p in ps {
                if !p.is_finite() {
                    bail!("p grid values must be finite, got {p}");
                }
            }
        }
        if self.sweep_points == 0 {
            bail!("sweep_points must be positive");
        }
        if self.cluster_size == 0 || self.k == 0 {
            bail!("cluster_size and k must be positive");
        }
        for (name, (a, b)) in [
            ("fixed_layer", self.fixed_layer),
            ("sweep_from", self.sweep_from),
            ("sweep_to", self.sweep_to),
        ] {
            for v in [a, b] {
                if !(0.0..=1.0).contains(&v) {
                    bail!("{name} probabilities must lie in [0, 1], got {v}");
                }
            }
        }
        Ok(())
    }

    /// One-line canonical JSON form; hashed into the CSV metadata and embedded
    /// verbatim so any output file can be reproduced from its own header.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn sha256(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.canonical_json().as_bytes());
        let digest = h.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Sweep defaults: 50 runs per point as in the source experiments.
    pub fn sweep_runs(&self) -> usize {
        self.runs.unwrap_or(50)
    }

    pub fn benchmark_runs(&self) -> usize {
        self.runs.unwrap_or(10)
    }

    pub fn sweep_p_grid(&self) -> Vec<f64> {
        self.p_grid
            .clone()
            .unwrap_or_else(|| vec![-10.0, -5.0, -2.0, -1.0, 0.0, 1.0, 2.0, 5.0, 10.0])
    }

    pub fn benchmark_p_grid(&self) -> Vec<f64> {
        self.p_grid
            .clone()
            .unwrap_or_else(|| vec![-1.0, -2.0, -5.0, -10.0])
    }

    pub fn sweep_methods(&self) -> Vec<Method> {
        self.methods
            .clone()
            .unwrap_or_else(|| vec![Method::Power, Method::Arithmetic, Method::Agg])
    }
}

/// Flag overrides shared by every subcommand; flags win over the config file.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    /// JSON experiment config; omitted fields take defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master seed; every run derives its own stream from it.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Comma-separated exponent grid, e.g. --p=-10,-1,0,1,10.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true, num_args = 1..)]
    pub p: Option<Vec<f64>>,
    /// Methods to run (power expands over the p grid).
    #[arg(long, global = true, value_delimiter = ',', num_args = 1..)]
    pub methods: Option<Vec<Method>>,
    /// Runs per point.
    #[arg(long, global = true)]
    pub runs: Option<usize>,
    /// Output path (CSV for sweeps/benchmark/cluster, directory for generate).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

impl Overrides {
    /// Config file if given, else per-command defaults; then apply flags.
    pub fn resolve(&self, default_kind: Kind) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default_for(default_kind),
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(p) = &self.p {
            cfg.p_grid = Some(p.clone());
        }
        if let Some(m) = &self.methods {
            cfg.methods = Some(m.clone());
        }
        if let Some(r) = self.runs {
            cfg.runs = Some(r);
        }
        if let Some(out) = &self.out {
            cfg.out = Some(out.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
