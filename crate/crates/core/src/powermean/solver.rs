//! Matrix-free computation of the smallest eigenpairs of the power mean
//! Laplacian L_p for p < 0.
//!
//! Since x -> x^(1/p) reverses order for negative p, the smallest eigenpairs
//! of L_p are the dominant eigenpairs of
//!
//! ```text
//! M = L_p^p = (1/T) sum_t (L_sym^(t) + eps I)^p
//! ```
//!
//! which block power iteration reaches with nothing but operator
//! applications: each outer step applies M to the current orthonormal block
//! (T independent Krylov solves per column), diagonalizes the k x k Rayleigh
//! quotient, and power-steps the rotated block. Eigenvalues of L_p come back
//! as Ritz values to the power 1/p.
//!
//! Nonnegative exponents fall back to the dense route; see the module-level
//! notes on `dense_power_mean`.

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graphs::{shift_for, MultilayerGraph, ShiftedLaplacianOp};
use crate::linalg::{axpy, dense_sym_eig, dot, norm, orthonormalize, sym_eig_small};
use crate::powermean::dense::dense_power_mean_laplacian;
use crate::powermean::krylov::pksm_apply;
use crate::rng::rng_for;

/// Assembling the dense fallback beyond this size would dwarf every other
/// cost; positive exponents are a desk-scale tool here.
const DENSE_FALLBACK_LIMIT: usize = 2000;

/// Everything the solver needs besides the graph itself.
#[derive(Debug, Clone)]
pub struct PowerMeanSolveSpec {
    /// Exponent of the mean. Finite; the matrix-free path handles p < 0.
    pub p: f64,
    /// Diagonal shift. Must be positive when p <= 0.
    pub eps: f64,
    /// Number of eigenpairs.
    pub k: usize,
    /// Relative stall tolerance of the inner Krylov solves.
    pub krylov_tol: f64,
    pub krylov_max_dim: usize,
    /// Relative subspace residual at which the outer iteration stops.
    pub outer_tol: f64,
    pub outer_max_iter: usize,
    pub seed: u64,
}

impl PowerMeanSolveSpec {
    /// Defaults: eps from [`shift_for`], outer tolerance 1e-8 with the inner
    /// Krylov tolerance a decade tighter so inner error never dominates the
    /// outer residual, Krylov dimension cap 60, at most 2000 outer steps.
    pub fn new(p: f64, k: usize, seed: u64) -> Self {
        let outer_tol = 1e-8;
        Self {
            p,
            eps: shift_for(p),
            k,
            krylov_tol: outer_tol / 10.0,
            krylov_max_dim: 60,
            outer_tol,
            outer_max_iter: 2000,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if !self.p.is_finite() {
            return Err(Error::InvalidParameter(
                "matrix solves need a finite exponent; infinite p exists only for scalar means"
                    .into(),
            ));
        }
        if self.k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        if !(self.krylov_tol > 0.0) || !(self.outer_tol > 0.0) {
            return Err(Error::InvalidParameter("tolerances must be positive".into()));
        }
        if self.krylov_max_dim == 0 || self.outer_max_iter == 0 {
            return Err(Error::InvalidParameter(
                "iteration limits must be at least 1".into(),
            ));
        }
        if !(self.eps >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "shift must be nonnegative, got {}",
                self.eps
            )));
        }
        if self.p <= 0.0 && self.eps <= 0.0 {
            return Err(Error::InvalidParameter(
                "p <= 0 needs a positive shift to keep the Laplacians invertible".into(),
            ));
        }
        Ok(())
    }
}

/// The T shifted layer Laplacians plus the solve parameters. The mean power
/// operator is never materialized; its action is T Krylov solves.
pub struct PowerMeanOp<'a> {
    graph: &'a MultilayerGraph,
    layers: Vec<ShiftedLaplacianOp<'a>>,
    spec: PowerMeanSolveSpec,
}

impl<'a> PowerMeanOp<'a> {
    pub fn new(graph: &'a MultilayerGraph, spec: PowerMeanSolveSpec) -> Result<Self> {
        spec.validate()?;
        if spec.k > graph.n() {
            return Err(Error::InvalidParameter(format!(
                "cannot extract k = {} eigenpairs from an n = {} graph",
                spec.k,
                graph.n()
            )));
        }
        let layers = graph
            .layers()
            .iter()
            .map(|w| crate::graphs::shifted_laplacian(w, spec.eps))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            graph,
            layers,
            spec,
        })
    }

    pub fn spec(&self) -> &PowerMeanSolveSpec {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn t(&self) -> usize {
        self.layers.len()
    }
}

/// Smallest-k eigenpairs of L_p.
#[derive(Debug, Clone)]
pub struct EigenSolveResult {
    /// Eigenvalues of L_p, ascending.
    pub eigenvalues: Vec<f64>,
    /// Matching orthonormal eigenvector columns.
    pub eigenvectors: Vec<Vec<f64>>,
    pub converged: bool,
    pub outer_iterations: usize,
    /// Relative residuals ||M v - theta v|| / |theta| of the returned pairs,
    /// measured on M = L_p^p.
    pub residuals: Vec<f64>,
    /// Largest Krylov dimension each layer needed (matrix-free path only).
    pub krylov_dims: Vec<usize>,
}

pub fn power_mean_eigs(op: &PowerMeanOp<'_>) -> Result<EigenSolveResult> {
    if op.spec.p < 0.0 {
        matrix_free_eigs(op)
    } else {
        dense_fallback_eigs(op)
    }
}

fn dense_fallback_eigs(op: &PowerMeanOp<'_>) -> Result<EigenSolveResult> {
    let n = op.n();
    if n > DENSE_FALLBACK_LIMIT {
        return Err(Error::InvalidParameter(format!(
            "p = {} takes the dense route, which is capped at n = {DENSE_FALLBACK_LIMIT} \
             (graph has n = {n}); negative exponents run matrix-free",
            op.spec.p
        )));
    }
    let lp = dense_power_mean_laplacian(op.graph, op.spec.p, op.spec.eps)?;
    let eig = dense_sym_eig(&lp)?;
    let k = op.spec.k;
    Ok(EigenSolveResult {
        eigenvalues: eig.values[..k].to_vec(),
        eigenvectors: eig.vectors[..k].to_vec(),
        converged: true,
        outer_iterations: 0,
        residuals: vec![0.0; k],
        krylov_dims: vec![0; op.t()],
    })
}

fn matrix_free_eigs(op: &PowerMeanOp<'_>) -> Result<EigenSolveResult> {
    let spec = &op.spec;
    let n = op.n();
    let k = spec.k;
    let mut rng = rng_for(spec.seed, &[0x706d]);
    let fresh = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<f64> {
        (0..n).map(|_| StandardNormal.sample(rng)).collect()
    };

    let mut v: Vec<Vec<f64>> = (0..k).map(|_| fresh(&mut rng)).collect();
    orthonormalize_with_repair(&mut v, &mut || fresh(&mut rng))?;

    let mut krylov_dims = vec![0usize; op.t()];
    let mut last: Option<(Vec<f64>, Vec<Vec<f64>>, Vec<f64>)> = None;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < spec.outer_max_iter {
        iterations += 1;
        let y = apply_mean_power(op, &v, &mut krylov_dims)?;

        // k x k Rayleigh quotient of M on span(V), symmetrized.
        let mut s = vec![0.0; k * k];
        for i in 0..k {
            for j in 0..k {
                s[i * k + j] = dot(&v[i], &y[j]);
            }
        }
        for i in 0..k {
            for j in (i + 1)..k {
                let m = 0.5 * (s[i * k + j] + s[j * k + i]);
                s[i * k + j] = m;
                s[j * k + i] = m;
            }
        }
        let (theta_asc, q_asc) = sym_eig_small(k, &s);
        // Dominant Ritz values of M first; those are the smallest of L_p.
        let thetas: Vec<f64> = theta_asc.iter().rev().copied().collect();
        let q: Vec<Vec<f64>> = q_asc.iter().rev().cloned().collect();

        let z = rotate_block(&v, &q);
        let mz = rotate_block(&y, &q);
        let residuals: Vec<f64> = (0..k)
            .map(|j| {
                let mut r = mz[j].clone();
                axpy(-thetas[j], &z[j], &mut r);
                norm(&r) / thetas[j].abs().max(f64::MIN_POSITIVE)
            })
            .collect();

        let done = residuals.iter().all(|&r| r <= spec.outer_tol);
        last = Some((thetas, z, residuals));
        if done {
            converged = true;
            break;
        }
        // Power step: next subspace is span(M V), kept in Ritz order so
        // columns track individual eigenpairs.
        v = mz;
        orthonormalize_with_repair(&mut v, &mut || fresh(&mut rng))?;
    }

    let (thetas, z, residuals) = last.expect("at least one outer iteration ran");
    let mut eigenvalues = Vec::with_capacity(k);
    for &theta in &thetas {
        if theta <= 0.0 {
            // M is positive definite; a nonpositive Ritz value means the
            // operator application is broken, not the problem.
            return Err(Error::Singular { lambda_min: theta });
        }
        eigenvalues.push(theta.powf(1.0 / spec.p));
    }
    let mut eigenvectors = z;
    for col in &mut eigenvectors {
        canonical_sign(col);
    }
    Ok(EigenSolveResult {
        eigenvalues,
        eigenvectors,
        converged,
        outer_iterations: iterations,
        residuals,
        krylov_dims,
    })
}

/// y_j = (1/T) sum_t (L_t + eps I)^p v_j. The T*k Krylov solves run
/// independently (possibly in parallel); the reduction always sums in layer
/// order, so results do not depend on scheduling.
fn apply_mean_power(
    op: &PowerMeanOp<'_>,
    cols: &[Vec<f64>],
    krylov_dims: &mut [usize],
) -> Result<Vec<Vec<f64>>> {
    let spec = &op.spec;
    let t = op.t();
    let k = cols.len();
    let tasks: Vec<(usize, usize)> = (0..t)
        .flat_map(|ti| (0..k).map(move |j| (ti, j)))
        .collect();
    let results: Vec<(Vec<f64>, usize)> = tasks
        .par_iter()
        .map(|&(ti, j)| {
            let (x, info) = pksm_apply(
                &op.layers[ti],
                &cols[j],
                spec.p,
                spec.krylov_tol,
                spec.krylov_max_dim,
            )?;
            Ok((x, info.dim))
        })
        .collect::<Result<_>>()?;
    let scale = 1.0 / t as f64;
    let n = cols[0].len();
    let mut out = vec![vec![0.0; n]; k];
    for ti in 0..t {
        for j in 0..k {
            let (x, dim) = &results[ti * k + j];
            axpy(scale, x, &mut out[j]);
            krylov_dims[ti] = krylov_dims[ti].max(*dim);
        }
    }
    Ok(out)
}

/// out_j = sum_i q[j][i] * cols_i  (columns rotated by the small matrix Q).
fn rotate_block(cols: &[Vec<f64>], q: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = cols[0].len();
    q.iter()
        .map(|qj| {
            let mut out = vec![0.0; n];
            for (coeff, col) in qj.iter().zip(cols) {
                axpy(*coeff, col, &mut out);
            }
            out
        })
        .collect()
}

/// Orthonormalizes, replacing any collapsed column with a fresh random draw.
/// Collapse is measure-zero for random blocks but can happen transiently when
/// two Ritz columns coincide; bail out if it persists.
fn orthonormalize_with_repair(
    cols: &mut Vec<Vec<f64>>,
    fresh: &mut dyn FnMut() -> Vec<f64>,
) -> Result<()> {
    for _ in 0..50 {
        match orthonormalize(cols) {
            Ok(()) => return Ok(()),
            Err(Error::RankDeficient { column }) => {
                cols[column] = fresh();
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::InvalidParameter(
        "could not build an orthonormal block; the operator keeps collapsing columns".into(),
    ))
}

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
