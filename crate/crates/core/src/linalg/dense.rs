use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::sparse::SparseSymMatrix;

/// Dense symmetric matrix, full row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSymMatrix {
    n: usize,
    data: Vec<f64>,
}

/// Relative symmetry tolerance accepted by the constructors.
const SYM_TOL: f64 = 1e-12;

impl DenseSymMatrix {
    /// Validates that `data` (row-major, length n*n) is symmetric to within
    /// `1e-12` relative to its largest entry.
    pub fn from_rows(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: data.len(),
            });
        }
        let scale = data.iter().fold(0.0f64, |m, &v| m.max(v.abs())).max(1.0);
        let mut max_dev = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                max_dev = max_dev.max((data[i * n + j] - data[j * n + i]).abs());
            }
        }
        if max_dev > SYM_TOL * scale {
            return Err(Error::NotSymmetric { max_dev });
        }
        Ok(Self { n, data })
    }

    /// Fills entry (i, j) with `f(i, j)` for i <= j and mirrors it.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        Self { n, data }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Sets (i, j) and (j, i).
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        for i in 0..self.n {
            let row = &self.data[i * self.n..(i + 1) * self.n];
            y[i] = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    /// A + B scaled: self + alpha * other.
    pub fn add_scaled(&mut self, other: &Self, alpha: f64) {
        assert_eq!(self.n, other.n);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
    }

    pub fn scale(&mut self, alpha: f64) {
        for a in &mut self.data {
            *a *= alpha;
        }
    }

    pub fn to_sparse(&self) -> Result<SparseSymMatrix> {
        let mut edges = Vec::new();
        for i in 0..self.n {
            for j in i..self.n {
                let v = self.get(i, j);
                if v != 0.0 {
                    edges.push((i, j, v));
                }
            }
        }
        SparseSymMatrix::from_edges(self.n, &edges)
    }

    pub fn from_sparse(a: &SparseSymMatrix) -> Self {
        let n = a.n();
        let mut m = Self::zeros(n);
        for i in 0..n {
            let (cols, vals) = a.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                m.data[i * n + j as usize] = v;
            }
        }
        m
    }
}

/// Eigendecomposition of a symmetric matrix: `values` ascending, `vectors[k]`
/// the orthonormal eigenvector column for `values[k]`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

impl EigenDecomposition {
    /// V diag(f(lambda)) V^T, symmetrized against roundoff.
    pub fn assemble(&self, f: impl Fn(f64) -> f64) -> DenseSymMatrix {
        let n = self.vectors.first().map_or(0, Vec::len);
        let mut m = DenseSymMatrix::zeros(n);
        for (lam, v) in self.values.iter().zip(&self.vectors) {
            let fl = f(*lam);
            if fl == 0.0 {
                continue;
            }
            for i in 0..n {
                let s = fl * v[i];
                for j in i..n {
                    m.data[i * n + j] += s * v[j];
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                m.data[j * n + i] = m.data[i * n + j];
            }
        }
        m
    }
}

/// Full eigendecomposition via symmetric tridiagonalization + implicit QL.
///
/// This is the reference route the iterative solvers are tested against, so
/// it shares no code with the Krylov path.
pub fn dense_sym_eig(a: &DenseSymMatrix) -> Result<EigenDecomposition> {
    let n = a.n;
    if n == 0 {
        return Ok(EigenDecomposition {
            values: vec![],
            vectors: vec![],
        });
    }
    let m = DMatrix::from_fn(n, n, |i, j| a.get(i, j));
    let eig = m
        .symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&i| eig.eigenvectors.column(i).iter().copied().collect())
        .collect();
    for v in &mut vectors {
        canonical_sign(v);
    }
    Ok(EigenDecomposition { values, vectors })
}

/// Flips the vector so its largest-magnitude entry is positive. Purely to
/// make decompositions reproducible for tests; spans are unaffected.
fn canonical_sign(v: &mut [f64]) {
    let mut best = 0usize;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() + 1e-15 {
            best = i;
        }
    }
    if v[best] < 0.0 {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}

/// H^p through the eigendecomposition, always: H = V diag(l) V^T maps to
/// V diag(l^p) V^T.
///
/// Domain rules: p < 0 requires the smallest eigenvalue > 1e-12; fractional
/// p >= 0 tolerates eigenvalues in [-1e-12, 0] by clamping them to zero
/// (positive semi-definite up to roundoff) and rejects anything more
/// negative; integer p >= 0 is defined for any symmetric input.
pub fn sym_matrix_power(a: &DenseSymMatrix, p: f64) -> Result<DenseSymMatrix> {
    if !p.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "matrix power requires finite exponent, got {p}"
        )));
    }
    if p == 0.0 {
        return Ok(DenseSymMatrix::identity(a.n));
    }
    let eig = dense_sym_eig(a)?;
    let lambda_min = eig.values.first().copied().unwrap_or(0.0);
    let integer_p = p.fract() == 0.0;
    if p < 0.0 && lambda_min <= 1e-12 {
        return Err(Error::Singular { lambda_min });
    }
    if p > 0.0 && !integer_p && lambda_min < -1e-12 {
        return Err(Error::NotPositiveSemiDefinite { lambda_min });
    }
    let f = |l: f64| {
        if p > 0.0 && !integer_p {
            l.max(0.0).powf(p)
        } else {
            l.powf(p)
        }
    };
    Ok(eig.assemble(f))
}
