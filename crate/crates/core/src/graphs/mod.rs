//! Multilayer graphs and the shifted normalized Laplacian.

pub mod io;

use crate::error::{Error, Result};
use crate::linalg::{DenseSymMatrix, SparseSymMatrix};

/// A stack of undirected weighted layers over one vertex set.
#[derive(Debug, Clone)]
pub struct MultilayerGraph {
    layers: Vec<SparseSymMatrix>,
}

impl MultilayerGraph {
    pub fn new(layers: Vec<SparseSymMatrix>) -> Result<Self> {
        let first = layers
            .first()
            .ok_or_else(|| Error::InvalidParameter("a graph needs at least one layer".into()))?;
        let n = first.n();
        if layers.iter().any(|l| l.n() != n) {
            return Err(Error::InvalidParameter(
                "all layers must share the vertex count".into(),
            ));
        }
        Ok(Self { layers })
    }

    pub fn n(&self) -> usize {
        self.layers[0].n()
    }

    /// Number of layers.
    pub fn t(&self) -> usize {
        self.layers.len()
    }

    pub fn layers(&self) -> &[SparseSymMatrix] {
        &self.layers
    }

    pub fn into_layers(self) -> Vec<SparseSymMatrix> {
        self.layers
    }
}

/// Diagonal shift applied to the normalized Laplacian before taking matrix
/// powers: log(1 + |p|) for negative exponents (keeps the matrix safely
/// positive definite), a hair above zero for the geometric mean, nothing for
/// positive exponents.
pub fn shift_for(p: f64) -> f64 {
    if p < 0.0 {
        (1.0 + p.abs()).ln()
    } else if p == 0.0 {
        1e-6
    } else {
        0.0
    }
}

/// Matrix-free action of L_sym + eps*I = (1 + eps) I - D^{-1/2} W D^{-1/2}.
///
/// Holds the inverse square-root degrees; `apply` costs one spmv. Every
/// eigenvalue lies in [eps, 2 + eps].
#[derive(Debug, Clone)]
pub struct ShiftedLaplacianOp<'a> {
    w: &'a SparseSymMatrix,
    inv_sqrt_deg: Vec<f64>,
    eps: f64,
}

/// Builds the operator, rejecting graphs with isolated vertices (their
/// normalized Laplacian row is undefined). The error lists every isolated
/// vertex so callers can report or drop them in one go.
pub fn shifted_laplacian(w: &SparseSymMatrix, eps: f64) -> Result<ShiftedLaplacianOp<'_>> {
    if !(eps >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "diagonal shift must be nonnegative, got {eps}"
        )));
    }
    let degrees = w.row_sums();
    let isolated: Vec<usize> = degrees
        .iter()
        .enumerate()
        .filter(|(_, &d)| d <= 0.0)
        .map(|(i, _)| i)
        .collect();
    if !isolated.is_empty() {
        return Err(Error::IsolatedVertices { indices: isolated });
    }
    let inv_sqrt_deg = degrees.iter().map(|&d| 1.0 / d.sqrt()).collect();
    Ok(ShiftedLaplacianOp {
        w,
        inv_sqrt_deg,
        eps,
    })
}

impl ShiftedLaplacianOp<'_> {
    pub fn n(&self) -> usize {
        self.w.n()
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// y = (1 + eps) x - D^{-1/2} W D^{-1/2} x
    pub fn apply(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        let n = self.n();
        if x.len() != n || y.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: if x.len() != n { x.len() } else { y.len() },
            });
        }
        let scaled: Vec<f64> = x
            .iter()
            .zip(&self.inv_sqrt_deg)
            .map(|(xi, di)| xi * di)
            .collect();
        self.w.spmv(&scaled, y)?;
        for i in 0..n {
            y[i] = (1.0 + self.eps) * x[i] - self.inv_sqrt_deg[i] * y[i];
        }
        Ok(())
    }
}

/// Dense assembly of the same operator, for the reference route and small
/// oracle computations. `w` must have strictly positive row sums.
pub fn dense_shifted_laplacian(w: &DenseSymMatrix, eps: f64) -> Result<DenseSymMatrix> {
    if !(eps >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "diagonal shift must be nonnegative, got {eps}"
        )));
    }
    let n = w.n();
    let mut degrees = vec![0.0; n];
    for i in 0..n {
        degrees[i] = (0..n).map(|j| w.get(i, j)).sum();
    }
    let isolated: Vec<usize> = (0..n).filter(|&i| degrees[i] <= 0.0).collect();
    if !isolated.is_empty() {
        return Err(Error::IsolatedVertices { indices: isolated });
    }
    let inv: Vec<f64> = degrees.iter().map(|&d| 1.0 / d.sqrt()).collect();
    Ok(DenseSymMatrix::from_fn(n, |i, j| {
        let diag = if i == j { 1.0 + eps } else { 0.0 };
        diag - inv[i] * w.get(i, j) * inv[j]
    }))
}

/// Row-major feature matrix; one row per sample.
#[derive(Debug, Clone)]
pub struct FeatureMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl FeatureMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidParameter(
                "feature rows must have equal length".into(),
            ));
        }
        Ok(Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
}

/// Unweighted k-nearest-neighbour graph under Pearson correlation between
/// sample rows, symmetrized by union.
///
/// Each vertex links to the k distinct rows with the highest correlation;
/// exact ties are broken by ascending index so the graph is reproducible.
pub fn knn_graph(features: &FeatureMatrix, k: usize) -> Result<SparseSymMatrix> {
    let n = features.rows();
    if n < 2 {
        return Err(Error::InvalidParameter(
            "k-NN graph needs at least two samples".into(),
        ));
    }
    if k == 0 || k >= n {
        return Err(Error::InvalidParameter(format!(
            "k must satisfy 1 <= k <= n - 1, got k = {k} with n = {n}"
        )));
    }
    if n > u32::MAX as usize {
        return Err(Error::InvalidParameter("too many samples".into()));
    }
    let d = features.cols();
    // Center and normalize once; correlation becomes a plain dot product.
    let mut centered = vec![0.0; n * d];
    for i in 0..n {
        let row = features.row(i);
        let mean = row.iter().sum::<f64>() / d as f64;
        let mut sq = 0.0;
        for (j, &x) in row.iter().enumerate() {
            let c = x - mean;
            centered[i * d + j] = c;
            sq += c * c;
        }
        if sq <= 0.0 {
            return Err(Error::ZeroVariance { row: i });
        }
        let inv = 1.0 / sq.sqrt();
        for j in 0..d {
            centered[i * d + j] *= inv;
        }
    }
    let mut edges: Vec<(u32, u32)> = Vec::new();
    let mut order: Vec<usize> = Vec::with_capacity(n - 1);
    for i in 0..n {
        let ri = &centered[i * d..(i + 1) * d];
        let corrs: Vec<f64> = (0..n)
            .map(|j| {
                let rj = &centered[j * d..(j + 1) * d];
                ri.iter().zip(rj).map(|(a, b)| a * b).sum()
            })
            .collect();
        order.clear();
        order.extend((0..n).filter(|&j| j != i));
        order.sort_by(|&a, &b| corrs[b].total_cmp(&corrs[a]).then(a.cmp(&b)));
        for &j in order.iter().take(k) {
            let (lo, hi) = if i < j { (i, j) } else { (j, i) };
            edges.push((lo as u32, hi as u32));
        }
    }
    edges.sort_unstable();
    edges.dedup();
    SparseSymMatrix::from_unit_edges(n, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dense_sym_eig;

    #[test]
    fn shift_values() {
        assert!((shift_for(-10.0) - 11.0f64.ln()).abs() < 1e-15);
        assert!((shift_for(-1.0) - 2.0f64.ln()).abs() < 1e-15);
        assert_eq!(shift_for(0.0), 1e-6);
        assert_eq!(shift_for(2.0), 0.0);
    }

    #[test]
    fn single_edge_laplacian_action() {
        // K2: L_sym = [[1,-1],[-1,1]], eigenpairs (0, (1,1)) and (2, (1,-1)).
        let w = SparseSymMatrix::from_edges(2, &[(0, 1, 1.0)]).unwrap();
        let op = shifted_laplacian(&w, 0.0).unwrap();
        let mut y = vec![0.0; 2];
        op.apply(&[1.0, -1.0], &mut y).unwrap();
        assert!((y[0] - 2.0).abs() < 1e-15);
        assert!((y[1] + 2.0).abs() < 1e-15);
        op.apply(&[1.0, 1.0], &mut y).unwrap();
        assert!(y[0].abs() < 1e-15);
        assert!(y[1].abs() < 1e-15);
    }

    #[test]
    fn shift_moves_spectrum() {
        let w = SparseSymMatrix::from_edges(2, &[(0, 1, 1.0)]).unwrap();
        let op = shifted_laplacian(&w, 0.5).unwrap();
        let mut y = vec![0.0; 2];
        op.apply(&[1.0, 1.0], &mut y).unwrap();
        assert!((y[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn isolated_vertices_are_listed() {
        let w = SparseSymMatrix::from_edges(4, &[(1, 2, 1.0)]).unwrap();
        match shifted_laplacian(&w, 0.0) {
            Err(Error::IsolatedVertices { indices }) => assert_eq!(indices, vec![0, 3]),
            other => panic!("expected isolated-vertex error, got {other:?}"),
        }
    }

    #[test]
    fn matrix_free_matches_dense_assembly() {
        let w = SparseSymMatrix::from_edges(
            5,
            &[
                (0, 1, 1.0),
                (0, 2, 2.0),
                (1, 2, 1.0),
                (2, 3, 0.5),
                (3, 4, 1.0),
                (1, 4, 3.0),
            ],
        )
        .unwrap();
        let eps = 0.7;
        let op = shifted_laplacian(&w, eps).unwrap();
        let dense = dense_shifted_laplacian(&DenseSymMatrix::from_sparse(&w), eps).unwrap();
        let x: Vec<f64> = (0..5).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut y = vec![0.0; 5];
        op.apply(&x, &mut y).unwrap();
        let mut z = vec![0.0; 5];
        dense.matvec(&x, &mut z);
        for (a, b) in y.iter().zip(&z) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn rayleigh_quotient_stays_in_range() {
        let w = SparseSymMatrix::from_edges(
            6,
            &[
                (0, 1, 1.0),
                (1, 2, 1.0),
                (2, 3, 1.0),
                (3, 4, 1.0),
                (4, 5, 1.0),
                (5, 0, 1.0),
                (0, 3, 1.0),
            ],
        )
        .unwrap();
        let eps = 1.3;
        let op = shifted_laplacian(&w, eps).unwrap();
        let mut y = vec![0.0; 6];
        for s in 0..20 {
            let x: Vec<f64> = (0..6).map(|i| ((i * 7 + s * 13) as f64 * 0.61).cos()).collect();
            let nrm2: f64 = x.iter().map(|v| v * v).sum();
            op.apply(&x, &mut y).unwrap();
            let q = x.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>() / nrm2;
            assert!(q >= eps - 1e-10 && q <= 2.0 + eps + 1e-10, "rayleigh {q}");
        }
    }

    #[test]
    fn spectrum_of_shifted_laplacian_case() {
        // Expected two-block graph with within 0.8 / across 0.2, 4 vertices
        // per block, self-weights kept: eigenvalues {eps, 1 - rho + eps, rest 1 + eps}.
        let per = 4;
        let (p_in, p_out) = (0.8, 0.2);
        let n = 2 * per;
        let w = DenseSymMatrix::from_fn(n, |i, j| {
            if (i < per) == (j < per) {
                p_in
            } else {
                p_out
            }
        });
        let eps = 0.25;
        let l = dense_shifted_laplacian(&w, eps).unwrap();
        let eig = dense_sym_eig(&l).unwrap();
        let rho = (p_in - p_out) / (p_in + p_out);
        assert!((eig.values[0] - eps).abs() < 1e-12);
        assert!((eig.values[1] - (1.0 - rho + eps)).abs() < 1e-12);
        for v in &eig.values[2..] {
            assert!((v - (1.0 + eps)).abs() < 1e-12);
        }
    }

    #[test]
    fn knn_proportional_rows() {
        // Rows 0 and 1 perfectly correlated, row 2 anti-correlated with both.
        let f = FeatureMatrix::from_rows(vec![
            vec![1.0, 2.0, 3.0],
            vec![2.0, 4.0, 6.0],
            vec![-1.0, -2.0, -3.0],
        ])
        .unwrap();
        let g = knn_graph(&f, 1).unwrap();
        let got: Vec<_> = g.upper_entries().map(|(i, j, _)| (i, j)).collect();
        assert_eq!(got, vec![(0, 1), (0, 2)]);
    }

    #[test]
    fn knn_identical_rows_tie_break() {
        // All pairwise correlations are 1; each vertex picks the lowest other
        // index, so the union is the star {0,1}, {0,2}.
        let f = FeatureMatrix::from_rows(vec![
            vec![1.0, 2.0, 3.0],
            vec![1.0, 2.0, 3.0],
            vec![1.0, 2.0, 3.0],
        ])
        .unwrap();
        let g = knn_graph(&f, 1).unwrap();
        let got: Vec<_> = g.upper_entries().map(|(i, j, _)| (i, j)).collect();
        assert_eq!(got, vec![(0, 1), (0, 2)]);
    }

    #[test]
    fn knn_full_k_is_complete() {
        let f = FeatureMatrix::from_rows(vec![
            vec![1.0, 0.0, 2.0],
            vec![0.5, 1.0, 0.0],
            vec![0.0, 2.0, 1.0],
            vec![2.0, 1.0, 0.0],
        ])
        .unwrap();
        let g = knn_graph(&f, 3).unwrap();
        assert_eq!(g.nnz(), 12);
    }

    #[test]
    fn knn_degree_lower_bound_and_symmetry() {
        let rows: Vec<Vec<f64>> = (0..12)
            .map(|i| {
                (0..5)
                    .map(|j| ((i * 5 + j) as f64 * 0.7).sin() + 0.1 * (i as f64))
                    .collect()
            })
            .collect();
        let f = FeatureMatrix::from_rows(rows).unwrap();
        for k in [1, 3, 6] {
            let g = knn_graph(&f, k).unwrap();
            for i in 0..12 {
                assert!(g.row(i).0.len() >= k, "vertex {i} degree below {k}");
            }
        }
    }

    #[test]
    fn knn_rejects_constant_row() {
        let f = FeatureMatrix::from_rows(vec![vec![1.0, 1.0, 1.0], vec![1.0, 2.0, 3.0]]).unwrap();
        match knn_graph(&f, 1) {
            Err(Error::ZeroVariance { row }) => assert_eq!(row, 0),
            other => panic!("expected zero-variance error, got {other:?}"),
        }
    }

    #[test]
    fn knn_rejects_bad_k() {
        let f = FeatureMatrix::from_rows(vec![vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(knn_graph(&f, 0).is_err());
        assert!(knn_graph(&f, 2).is_err());
    }
}
