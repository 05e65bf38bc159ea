//! Stochastic block model generators for multilayer graphs, in the three
//! configurations used throughout the experiments, plus their expectation
//! matrices (whose eigenstructure is known in closed form and serves as test
//! oracle).
//!
//! All samplers draw Bernoulli edges independently for i < j, exclude
//! self-loops, and resample a layer (up to a bounded number of attempts) if
//! it contains an isolated vertex, since the normalized Laplacian needs
//! positive degrees. Expectation matrices keep `p_in` on the diagonal; the
//! resulting degrees `|C| (p_in + (k-1) p_out)` make the closed-form algebra
//! exact, and the O(1/n) mismatch with the sampled graphs is far below every
//! test tolerance.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graphs::MultilayerGraph;
use crate::linalg::{DenseSymMatrix, SparseSymMatrix};
use crate::rng::rng_for;

const MAX_ATTEMPTS: usize = 100;

// Tags separating the samplers' seed streams.
const TAG_CASE1: u64 = 1;
const TAG_CASE2: u64 = 2;
const TAG_CASE3_EDGES: u64 = 3;
const TAG_CASE3_LABELS: u64 = 4;

/// k equal clusters; layer t connects within clusters with `layers[t].0` and
/// across with `layers[t].1`.
#[derive(Debug, Clone)]
pub struct Case1Params {
    pub k: usize,
    pub cluster_size: usize,
    /// (p_in, p_out) per layer; the layer count is the vector length.
    pub layers: Vec<(f64, f64)>,
    pub seed: u64,
}

impl Case1Params {
    fn validate(&self) -> Result<()> {
        if self.k == 0 || self.cluster_size == 0 {
            return Err(Error::InvalidParameter(
                "need at least one cluster of at least one vertex".into(),
            ));
        }
        if self.layers.is_empty() {
            return Err(Error::InvalidParameter("need at least one layer".into()));
        }
        for &(p_in, p_out) in &self.layers {
            if !(0.0..=1.0).contains(&p_in) || !(0.0..=1.0).contains(&p_out) {
                return Err(Error::InvalidParameter(format!(
                    "probabilities ({p_in}, {p_out}) outside [0, 1]"
                )));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.k * self.cluster_size
    }

    /// rho_t = (p_in - p_out) / (p_in + (k-1) p_out), the layer's
    /// assortativity; the recovery condition is phrased in these.
    pub fn rho(&self, t: usize) -> f64 {
        let (p_in, p_out) = self.layers[t];
        (p_in - p_out) / (p_in + (self.k as f64 - 1.0) * p_out)
    }
}

/// Three clusters of equal size, three layers; layer t separates cluster t
/// from the rest: weight `p_in` within C_t and within its complement, `p_out`
/// across.
#[derive(Debug, Clone)]
pub struct Case2Params {
    pub cluster_size: usize,
    pub p_in: f64,
    pub p_out: f64,
    pub seed: u64,
}

impl Case2Params {
    fn validate(&self) -> Result<()> {
        if self.cluster_size == 0 {
            return Err(Error::InvalidParameter("empty clusters".into()));
        }
        if !(self.p_out > 0.0 && self.p_out <= self.p_in && self.p_in <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < p_out <= p_in <= 1, got p_in = {}, p_out = {}",
                self.p_in, self.p_out
            )));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        3 * self.cluster_size
    }
}

/// Planted partition whose labels drift across layers: layer 1 labels are
/// uniform over K communities, each later layer copies a vertex's label with
/// probability `p_copy` and resamples it uniformly otherwise.
///
/// Edge probabilities follow the one-parameter mixing form with uniform
/// expected degree c:
///
/// ```text
/// p_in  = c (1 - mu + mu/K) K / n,     p_out = c mu / n
/// ```
#[derive(Debug, Clone)]
pub struct Case3Params {
    pub n: usize,
    pub t: usize,
    pub k: usize,
    pub p_copy: f64,
    pub mu: f64,
    pub c: f64,
    pub seed: u64,
}

impl Case3Params {
    fn validate(&self) -> Result<()> {
        if self.n == 0 || self.t == 0 || self.k == 0 {
            return Err(Error::InvalidParameter(
                "need n >= 1, T >= 1, K >= 1".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.p_copy) || !(0.0..=1.0).contains(&self.mu) {
            return Err(Error::InvalidParameter(
                "copy probability and mixing must lie in [0, 1]".into(),
            ));
        }
        if !(self.c > 0.0) {
            return Err(Error::InvalidParameter(
                "expected degree must be positive".into(),
            ));
        }
        let (p_in, p_out) = self.edge_probs();
        if p_in > 1.0 || p_out > 1.0 {
            return Err(Error::InvalidParameter(format!(
                "derived edge probabilities exceed 1: p_in = {p_in}, p_out = {p_out}; \
                 lower c or raise n"
            )));
        }
        Ok(())
    }

    pub fn edge_probs(&self) -> (f64, f64) {
        let k = self.k as f64;
        let n = self.n as f64;
        let p_in = self.c * (1.0 - self.mu + self.mu / k) * k / n;
        let p_out = self.c * self.mu / n;
        (p_in, p_out)
    }
}

/// Planted labels. Cases 1 and 2 carry one partition; Case 3 additionally
/// keeps the per-layer labels, with `labels` holding the per-vertex mode
/// across layers (ties resolved toward the smaller label).
#[derive(Debug, Clone)]
pub struct GroundTruth {
    pub labels: Vec<usize>,
    pub per_layer: Option<Vec<Vec<usize>>>,
}

pub fn expected_adjacency_case1(params: &Case1Params, t: usize) -> Result<DenseSymMatrix> {
    params.validate()?;
    let (p_in, p_out) = *params
        .layers
        .get(t)
        .ok_or_else(|| Error::InvalidParameter(format!("layer {t} out of range")))?;
    let c = params.cluster_size;
    Ok(DenseSymMatrix::from_fn(params.n(), |i, j| {
        if i / c == j / c {
            p_in
        } else {
            p_out
        }
    }))
}

pub fn expected_adjacency_case2(params: &Case2Params, t: usize) -> Result<DenseSymMatrix> {
    params.validate()?;
    if t >= 3 {
        return Err(Error::InvalidParameter(format!(
            "case-2 graphs have exactly 3 layers, layer {t} out of range"
        )));
    }
    let c = params.cluster_size;
    let (p_in, p_out) = (params.p_in, params.p_out);
    Ok(DenseSymMatrix::from_fn(params.n(), |i, j| {
        // Same side of the C_t | complement split: weight p_in.
        if (i / c == t) == (j / c == t) {
            p_in
        } else {
            p_out
        }
    }))
}

pub fn sample_case1(params: &Case1Params) -> Result<(MultilayerGraph, GroundTruth)> {
    params.validate()?;
    let n = params.n();
    let c = params.cluster_size;
    let labels: Vec<usize> = (0..n).map(|i| i / c).collect();
    let mut layers = Vec::with_capacity(params.layers.len());
    for (t, &(p_in, p_out)) in params.layers.iter().enumerate() {
        let layer = sample_layer_with_retry(n, params.seed, TAG_CASE1, t, |rng, edges| {
            for i in 0..n {
                let cluster_end = (i / c + 1) * c;
                sample_range(rng, i, i + 1, cluster_end, p_in, edges);
                sample_range(rng, i, cluster_end, n, p_out, edges);
            }
        })?;
        layers.push(layer);
    }
    Ok((
        MultilayerGraph::new(layers)?,
        GroundTruth {
            labels,
            per_layer: None,
        },
    ))
}

pub fn sample_case2(params: &Case2Params) -> Result<(MultilayerGraph, GroundTruth)> {
    params.validate()?;
    let n = params.n();
    let c = params.cluster_size;
    let labels: Vec<usize> = (0..n).map(|i| i / c).collect();
    let mut layers = Vec::with_capacity(3);
    for t in 0..3 {
        let layer = sample_layer_with_retry(n, params.seed, TAG_CASE2, t, |rng, edges| {
            for i in 0..n {
                let side_i = i / c == t;
                // The three cluster blocks after i, each homogeneous.
                for cluster in i / c..3 {
                    let lo = ((cluster * c).max(i + 1)).min(n);
                    let hi = (cluster + 1) * c;
                    let p = if (cluster == t) == side_i {
                        params.p_in
                    } else {
                        params.p_out
                    };
                    sample_range(rng, i, lo, hi, p, edges);
                }
            }
        })?;
        layers.push(layer);
    }
    Ok((
        MultilayerGraph::new(layers)?,
        GroundTruth {
            labels,
            per_layer: None,
        },
    ))
}

pub fn sample_case3(params: &Case3Params) -> Result<(MultilayerGraph, GroundTruth)> {
    params.validate()?;
    let n = params.n;
    let (p_in, p_out) = params.edge_probs();

    // Label chains first; they must not depend on edge sampling retries.
    let mut label_rng = rng_for(params.seed, &[TAG_CASE3_LABELS]);
    let mut per_layer: Vec<Vec<usize>> = Vec::with_capacity(params.t);
    let first: Vec<usize> = (0..n).map(|_| label_rng.random_range(0..params.k)).collect();
    per_layer.push(first);
    for _ in 1..params.t {
        let prev = per_layer.last().expect("at least one layer");
        let next: Vec<usize> = prev
            .iter()
            .map(|&l| {
                if label_rng.random::<f64>() < params.p_copy {
                    l
                } else {
                    label_rng.random_range(0..params.k)
                }
            })
            .collect();
        per_layer.push(next);
    }

    let consensus = modal_labels(&per_layer, n);
    let mut layers = Vec::with_capacity(params.t);
    for (t, labels) in per_layer.iter().enumerate() {
        // Vertices grouped by label so same-community pairs are contiguous.
        let mut by_label: Vec<u32> = (0..n as u32).collect();
        by_label.sort_by_key(|&v| (labels[v as usize], v));
        let mut starts = vec![0usize; params.k + 1];
        for &v in &by_label {
            starts[labels[v as usize] + 1] += 1;
        }
        for l in 0..params.k {
            starts[l + 1] += starts[l];
        }
        let layer = sample_layer_with_retry(n, params.seed, TAG_CASE3_EDGES, t, |rng, edges| {
            // Background across everything at p_out, extra mass within
            // communities so that same-label pairs reach p_in in union.
            if p_out >= 1.0 {
                for i in 0..n {
                    sample_range(rng, i, i + 1, n, 1.0, edges);
                }
                return;
            }
            for i in 0..n {
                sample_range(rng, i, i + 1, n, p_out, edges);
            }
            let q = (p_in - p_out) / (1.0 - p_out);
            if q > 0.0 {
                for l in 0..params.k {
                    let group = &by_label[starts[l]..starts[l + 1]];
                    let mut extra: Vec<(u32, u32)> = Vec::new();
                    for gi in 0..group.len() {
                        sample_range(rng, gi, gi + 1, group.len(), q, &mut extra);
                    }
                    for (gi, gj) in extra {
                        let (u, v) = (group[gi as usize], group[gj as usize]);
                        edges.push(if u < v { (u, v) } else { (v, u) });
                    }
                }
                edges.sort_unstable();
                edges.dedup();
            }
        })?;
        layers.push(layer);
    }
    Ok((
        MultilayerGraph::new(layers)?,
        GroundTruth {
            labels: consensus,
            per_layer: Some(per_layer),
        },
    ))
}

fn modal_labels(per_layer: &[Vec<usize>], n: usize) -> Vec<usize> {
    let k = per_layer
        .iter()
        .flat_map(|l| l.iter().copied())
        .max()
        .unwrap_or(0)
        + 1;
    (0..n)
        .map(|v| {
            let mut counts = vec![0usize; k];
            for layer in per_layer {
                counts[layer[v]] += 1;
            }
            counts
                .iter()
                .enumerate()
                .max_by_key(|&(l, &c)| (c, std::cmp::Reverse(l)))
                .map(|(l, _)| l)
                .expect("k >= 1")
        })
        .collect()
}

/// Samples one layer, retrying with a fresh substream whenever an isolated
/// vertex shows up.
fn sample_layer_with_retry(
    n: usize,
    seed: u64,
    case_tag: u64,
    layer: usize,
    mut fill: impl FnMut(&mut ChaCha8Rng, &mut Vec<(u32, u32)>),
) -> Result<SparseSymMatrix> {
    let mut edges: Vec<(u32, u32)> = Vec::new();
    for attempt in 0..MAX_ATTEMPTS {
        edges.clear();
        let mut rng = rng_for(seed, &[case_tag, layer as u64, attempt as u64]);
        fill(&mut rng, &mut edges);
        let mut covered = vec![false; n];
        for &(i, j) in &edges {
            covered[i as usize] = true;
            covered[j as usize] = true;
        }
        if covered.iter().all(|&c| c) {
            return SparseSymMatrix::from_unit_edges(n, &edges);
        }
    }
    Err(Error::SamplerExhausted {
        layer,
        attempts: MAX_ATTEMPTS,
    })
}

/// Appends edges (row, j) for j in [lo, hi) drawn Bernoulli(p), by geometric
/// gap skipping: O(expected edges), exact distribution.
fn sample_range(rng: &mut ChaCha8Rng, row: usize, lo: usize, hi: usize, p: f64, out: &mut Vec<(u32, u32)>) {
    if lo >= hi || p <= 0.0 {
        return;
    }
    if p >= 1.0 {
        for j in lo..hi {
            out.push((row as u32, j as u32));
        }
        return;
    }
    let log_q = (1.0 - p).ln();
    let mut j = lo;
    loop {
        // u in (0, 1]; skip ~ Geometric(p)
        let u = 1.0 - rng.random::<f64>();
        let skip = (u.ln() / log_q).floor();
        if skip >= (hi - j) as f64 {
            return;
        }
        j += skip as usize;
        out.push((row as u32, j as u32));
        j += 1;
        if j >= hi {
            return;
        }
    }
}
