//! Spectral clustering on the power mean Laplacian, the aggregate baselines,
//! and the permutation-invariant error measure used to score a clustering
//! against planted labels.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::graphs::MultilayerGraph;
use crate::linalg::SparseSymMatrix;
use crate::powermean::{power_mean_eigs, PowerMeanOp, PowerMeanSolveSpec};
use crate::rng::{derive_seed, rng_for};

use rand::Rng;

const TAG_KMEANS_RESTART: u64 = 0x6b6d;
const TAG_EMBED_KMEANS: u64 = 0x6b63;

pub const DEFAULT_KMEANS_RESTARTS: usize = 20;
const MAX_LLOYD_ITERS: usize = 100;

/// Shift used when the aggregate baseline reuses the negative-p solver; any
/// positive value works because the shifted operator shares eigenvectors
/// with the plain normalized Laplacian.
const AGG_SHIFT: f64 = 1.0;

/// Output of a spectral clustering run. `embedding` holds the k orthonormal
/// eigenvector columns the labels were computed from (no row normalization),
/// `eigenvalues` the matching spectrum, and the remaining fields surface the
/// eigensolver diagnostics. `degenerate` flags a clustering that uses fewer
/// than k distinct labels, which can happen when k-means cannot fill every
/// cluster.
#[derive(Debug, Clone)]
pub struct ClusteringResult {
    pub labels: Vec<usize>,
    pub embedding: Vec<Vec<f64>>,
    pub eigenvalues: Vec<f64>,
    pub converged: bool,
    pub outer_iterations: usize,
    pub residuals: Vec<f64>,
    pub krylov_dims: Vec<usize>,
    pub degenerate: bool,
}

/// Lloyd's algorithm with k-means++ seeding, restarted `restarts` times; the
/// labeling with the lowest within-cluster sum of squares wins. Ties in both
/// seeding and assignment resolve toward the lower index, so the result is a
/// deterministic function of the inputs.
///
/// An empty cluster is repaired by re-seeding its centroid from the point
/// farthest from its current centroid.
pub fn kmeans(points: &[Vec<f64>], k: usize, seed: u64, restarts: usize) -> Result<Vec<usize>> {
    let n = points.len();
    if n == 0 || k == 0 {
        return Err(Error::InvalidParameter(
            "k-means needs at least one point and one cluster".into(),
        ));
    }
    if k > n {
        return Err(Error::InvalidParameter(format!(
            "cannot split {n} points into {k} clusters"
        )));
    }
    if restarts == 0 {
        return Err(Error::InvalidParameter("need at least one restart".into()));
    }
    let d = points[0].len();
    if d == 0 || points.iter().any(|p| p.len() != d) {
        return Err(Error::InvalidParameter(
            "points must share a positive dimension".into(),
        ));
    }

    let mut best: Option<(f64, Vec<usize>)> = None;
    for restart in 0..restarts {
        let mut rng = rng_for(seed, &[TAG_KMEANS_RESTART, restart as u64]);
        let centroids = seed_plus_plus(points, k, &mut rng);
        let (wcss, labels) = lloyd(points, centroids);
        if best.as_ref().map_or(true, |(b, _)| wcss < *b) {
            best = Some((wcss, labels));
        }
    }
    Ok(best.expect("restarts >= 1").1)
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn seed_plus_plus(points: &[Vec<f64>], k: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut chosen = vec![false; n];
    let first = rng.random_range(0..n);
    chosen[first] = true;
    let mut centroids = vec![points[first].clone()];
    let mut d2: Vec<f64> = points.iter().map(|p| dist2(p, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let idx = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                if target < w {
                    pick = i;
                    break;
                }
                target -= w;
            }
            pick
        } else {
            // All remaining mass is zero (duplicate points); take the first
            // index not already used so the centroid count still reaches k.
            (0..n).find(|&i| !chosen[i]).unwrap_or(0)
        };
        chosen[idx] = true;
        centroids.push(points[idx].clone());
        for (i, p) in points.iter().enumerate() {
            let dd = dist2(p, centroids.last().expect("nonempty"));
            if dd < d2[i] {
                d2[i] = dd;
            }
        }
    }
    centroids
}

fn lloyd(points: &[Vec<f64>], mut centroids: Vec<Vec<f64>>) -> (f64, Vec<usize>) {
    let n = points.len();
    let k = centroids.len();
    let d = points[0].len();
    let mut labels = vec![0usize; n];
    for _ in 0..MAX_LLOYD_ITERS {
        let mut changed = false;
        for (i, p) in points.iter().enumerate() {
            let mut best = 0usize;
            let mut best_d = dist2(p, &centroids[0]);
            for (c, cent) in centroids.iter().enumerate().skip(1) {
                let dd = dist2(p, cent);
                if dd < best_d {
                    best_d = dd;
                    best = c;
                }
            }
            if labels[i] != best {
                labels[i] = best;
                changed = true;
            }
        }

        let mut counts = vec![0usize; k];
        let mut sums = vec![vec![0.0f64; d]; k];
        for (p, &l) in points.iter().zip(&labels) {
            counts[l] += 1;
            for (s, x) in sums[l].iter_mut().zip(p) {
                *s += x;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                for s in &mut sums[c] {
                    *s /= counts[c] as f64;
                }
                centroids[c] = std::mem::take(&mut sums[c]);
            }
        }
        // Re-seed empty clusters from the farthest point whose cluster can
        // spare it; forces another sweep.
        let mut stolen = vec![false; n];
        for c in 0..k {
            if counts[c] > 0 {
                continue;
            }
            let mut far = None;
            let mut far_d = -1.0;
            for (i, p) in points.iter().enumerate() {
                if stolen[i] || counts[labels[i]] <= 1 {
                    continue;
                }
                let dd = dist2(p, &centroids[labels[i]]);
                if dd > far_d {
                    far_d = dd;
                    far = Some(i);
                }
            }
            if let Some(i) = far {
                stolen[i] = true;
                counts[labels[i]] -= 1;
                counts[c] = 1;
                centroids[c] = points[i].clone();
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let wcss = points
        .iter()
        .zip(&labels)
        .map(|(p, &l)| dist2(p, &centroids[l]))
        .sum();
    (wcss, labels)
}

/// Clusters a multilayer graph from the bottom-k eigenvectors of the power
/// mean Laplacian configured by `spec` (`spec.k` is overridden by `k`).
///
/// Solver non-convergence is reported through the diagnostics, not as an
/// error; the labels are still computed from the best available subspace.
pub fn spectral_cluster(
    graph: &MultilayerGraph,
    k: usize,
    spec: PowerMeanSolveSpec,
) -> Result<ClusteringResult> {
    let mut spec = spec;
    spec.k = k;
    let kmeans_seed = derive_seed(spec.seed, &[TAG_EMBED_KMEANS]);
    let op = PowerMeanOp::new(graph, spec)?;
    let solve = power_mean_eigs(&op)?;
    finish_clustering(graph.n(), k, kmeans_seed, solve.eigenvalues, solve.eigenvectors, solve.converged, solve.outer_iterations, solve.residuals, solve.krylov_dims)
}

/// Spectral clustering of the arithmetic mean Laplacian, i.e. the power mean
/// at p = 1.
pub fn baseline_arithmetic(graph: &MultilayerGraph, k: usize, seed: u64) -> Result<ClusteringResult> {
    spectral_cluster(graph, k, PowerMeanSolveSpec::new(1.0, k, seed))
}

/// Spectral clustering of the normalized Laplacian of the layer-mean
/// adjacency matrix.
///
/// Implemented through the single-layer power mean at p = -1 with a fixed
/// positive shift: that operator is exactly the shifted normalized Laplacian
/// of the mean graph, so the scalable matrix-free path applies, and the shift
/// is subtracted from the reported eigenvalues afterwards.
pub fn baseline_agg(graph: &MultilayerGraph, k: usize, seed: u64) -> Result<ClusteringResult> {
    let mean = SparseSymMatrix::mean(graph.layers())?;
    let single = MultilayerGraph::new(vec![mean])?;
    let mut spec = PowerMeanSolveSpec::new(-1.0, k, seed);
    spec.eps = AGG_SHIFT;
    let kmeans_seed = derive_seed(seed, &[TAG_EMBED_KMEANS]);
    let op = PowerMeanOp::new(&single, spec)?;
    let mut solve = power_mean_eigs(&op)?;
    for v in &mut solve.eigenvalues {
        *v -= AGG_SHIFT;
    }
    finish_clustering(single.n(), k, kmeans_seed, solve.eigenvalues, solve.eigenvectors, solve.converged, solve.outer_iterations, solve.residuals, solve.krylov_dims)
}

#[allow(clippy::too_many_arguments)]
fn finish_clustering(
    n: usize,
    k: usize,
    kmeans_seed: u64,
    eigenvalues: Vec<f64>,
    embedding: Vec<Vec<f64>>,
    converged: bool,
    outer_iterations: usize,
    residuals: Vec<f64>,
    krylov_dims: Vec<usize>,
) -> Result<ClusteringResult> {
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| embedding.iter().map(|col| col[i]).collect())
        .collect();
    let labels = kmeans(&rows, k, kmeans_seed, DEFAULT_KMEANS_RESTARTS)?;
    let mut seen = vec![false; k];
    for &l in &labels {
        seen[l] = true;
    }
    let degenerate = seen.iter().any(|&s| !s);
    Ok(ClusteringResult {
        labels,
        embedding,
        eigenvalues,
        converged,
        outer_iterations,
        residuals,
        krylov_dims,
        degenerate,
    })
}

/// Fraction of vertices misclassified under the best label permutation,
/// computed exactly from the confusion matrix. Exhaustive over label
/// permutations, so it requires at most 8 distinct labels.
pub fn clustering_error(pred: &[usize], truth: &[usize]) -> Result<f64> {
    if pred.is_empty() || pred.len() != truth.len() {
        return Err(Error::InvalidParameter(format!(
            "label vectors must be nonempty and equal length, got {} and {}",
            pred.len(),
            truth.len()
        )));
    }
    let k = pred
        .iter()
        .chain(truth)
        .copied()
        .max()
        .expect("nonempty")
        + 1;
    if k > 8 {
        return Err(Error::TooManyLabels { k });
    }
    let mut confusion = vec![vec![0usize; k]; k];
    for (&p, &t) in pred.iter().zip(truth) {
        confusion[p][t] += 1;
    }
    let best_matches = (0..k)
        .permutations(k)
        .map(|perm| {
            perm.iter()
                .enumerate()
                .map(|(p, &t)| confusion[p][t])
                .sum::<usize>()
        })
        .max()
        .expect("k >= 1");
    Ok(1.0 - best_matches as f64 / pred.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sbm::{sample_case1, Case1Params};

    #[test]
    fn error_of_identical_labelings_is_zero() {
        let a = vec![0, 1, 2, 0, 1, 2];
        assert_eq!(clustering_error(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn error_is_invariant_under_relabeling() {
        let truth = vec![0, 0, 1, 1, 2, 2];
        let pred = vec![2, 2, 0, 0, 1, 1];
        assert_eq!(clustering_error(&pred, &truth).unwrap(), 0.0);
    }

    #[test]
    fn error_counts_single_flip() {
        let truth = vec![0, 0, 0, 0, 0, 1, 1, 1, 1, 1];
        let pred = vec![0, 0, 0, 0, 1, 1, 1, 1, 1, 1];
        assert!((clustering_error(&pred, &truth).unwrap() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn error_rejects_many_labels() {
        let labels: Vec<usize> = (0..9).collect();
        match clustering_error(&labels, &labels) {
            Err(Error::TooManyLabels { k }) => assert_eq!(k, 9),
            other => panic!("expected label-count error, got {other:?}"),
        }
    }

    #[test]
    fn error_rejects_length_mismatch() {
        assert!(clustering_error(&[0, 1], &[0, 1, 0]).is_err());
    }

    #[test]
    fn kmeans_separates_blobs() {
        let mut points = Vec::new();
        for i in 0..10 {
            points.push(vec![0.0 + 0.01 * i as f64, 0.0]);
        }
        for i in 0..10 {
            points.push(vec![5.0 + 0.01 * i as f64, 1.0]);
        }
        let labels = kmeans(&points, 2, 1, 5).unwrap();
        let truth: Vec<usize> = (0..20).map(|i| i / 10).collect();
        assert_eq!(clustering_error(&labels, &truth).unwrap(), 0.0);
    }

    #[test]
    fn kmeans_rejects_more_clusters_than_points() {
        let points = vec![vec![0.0], vec![1.0]];
        assert!(kmeans(&points, 3, 0, 1).is_err());
    }

    #[test]
    fn kmeans_handles_duplicate_points() {
        // Two distinct values, k = 2: the duplicates collapse cleanly.
        let points = vec![vec![1.0], vec![1.0], vec![4.0], vec![4.0]];
        let labels = kmeans(&points, 2, 0, 3).unwrap();
        assert_eq!(labels[0], labels[1]);
        assert_eq!(labels[2], labels[3]);
        assert_ne!(labels[0], labels[2]);
    }

    #[test]
    fn kmeans_is_reproducible() {
        let points: Vec<Vec<f64>> = (0..30)
            .map(|i| vec![(i % 7) as f64, (i % 5) as f64])
            .collect();
        let a = kmeans(&points, 4, 123, 10).unwrap();
        let b = kmeans(&points, 4, 123, 10).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn noise_free_two_cluster_graph_is_recovered_exactly() {
        // Expectation adjacency of an assortative two-cluster model, fed
        // through the negative-power pipeline: zero error.
        let params = Case1Params {
            k: 2,
            cluster_size: 20,
            layers: vec![(0.1, 0.02)],
            seed: 0,
        };
        let w = crate::sbm::expected_adjacency_case1(&params, 0).unwrap();
        let graph = MultilayerGraph::new(vec![w.to_sparse().unwrap()]).unwrap();
        let spec = PowerMeanSolveSpec::new(-2.0, 2, 7);
        let result = spectral_cluster(&graph, 2, spec).unwrap();
        let truth: Vec<usize> = (0..40).map(|i| i / 20).collect();
        assert_eq!(clustering_error(&result.labels, &truth).unwrap(), 0.0);
        assert!(result.converged);
        assert!(!result.degenerate);
    }

    #[test]
    fn baselines_match_single_layer_clustering() {
        let params = Case1Params {
            k: 2,
            cluster_size: 50,
            layers: vec![(0.4, 0.05)],
            seed: 21,
        };
        let (graph, truth) = sample_case1(&params).unwrap();
        let direct = spectral_cluster(&graph, 2, PowerMeanSolveSpec::new(1.0, 2, 3)).unwrap();
        let agg = baseline_agg(&graph, 2, 3).unwrap();
        let arith = baseline_arithmetic(&graph, 2, 3).unwrap();
        assert_eq!(clustering_error(&direct.labels, &truth.labels).unwrap(), 0.0);
        assert_eq!(clustering_error(&agg.labels, &truth.labels).unwrap(), 0.0);
        assert_eq!(clustering_error(&arith.labels, &truth.labels).unwrap(), 0.0);
    }

    #[test]
    fn identical_layers_match_single_layer_aggregate() {
        let params = Case1Params {
            k: 2,
            cluster_size: 40,
            layers: vec![(0.4, 0.05)],
            seed: 5,
        };
        let (single, truth) = sample_case1(&params).unwrap();
        let w = single.layers()[0].clone();
        let repeated = MultilayerGraph::new(vec![w.clone(), w.clone(), w]).unwrap();
        let a = baseline_agg(&repeated, 2, 9).unwrap();
        let b = baseline_agg(&single, 2, 9).unwrap();
        assert_eq!(clustering_error(&a.labels, &b.labels).unwrap(), 0.0);
        assert_eq!(clustering_error(&a.labels, &truth.labels).unwrap(), 0.0);
    }

    #[test]
    fn aggregate_eigenvalues_sit_in_laplacian_range() {
        let params = Case1Params {
            k: 2,
            cluster_size: 30,
            layers: vec![(0.5, 0.1), (0.5, 0.1)],
            seed: 2,
        };
        let (graph, _) = sample_case1(&params).unwrap();
        let agg = baseline_agg(&graph, 3, 0).unwrap();
        for &v in &agg.eigenvalues {
            assert!((-1e-9..=2.0 + 1e-9).contains(&v), "eigenvalue {v}");
        }
        assert!(agg.eigenvalues[0].abs() < 1e-6, "lambda_1 of L_agg is 0");
    }
}
