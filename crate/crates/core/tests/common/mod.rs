//! Helpers shared by the integration suites.
#![allow(dead_code)]

use pml_core::linalg::{orthonormalize, DenseSymMatrix};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn gaussian_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

/// Orthonormal basis of the indicator span for k contiguous clusters of
/// equal size.
pub fn indicator_span(k: usize, cluster_size: usize) -> Vec<Vec<f64>> {
    let n = k * cluster_size;
    let mut cols = Vec::with_capacity(k);
    for c in 0..k {
        let mut v = vec![0.0; n];
        for i in 0..cluster_size {
            v[c * cluster_size + i] = 1.0;
        }
        cols.push(v);
    }
    orthonormalize(&mut cols).expect("indicators are independent");
    cols
}

/// Orthonormal basis of span{1, 1_C2 - 1_C1, 1_C3 - 1_C1} for three
/// contiguous clusters of equal size (same span as the indicators, but the
/// basis the three-cluster eigenvector statements are phrased in).
pub fn case2_span(cluster_size: usize) -> Vec<Vec<f64>> {
    let m = cluster_size;
    let n = 3 * m;
    let ones = vec![1.0; n];
    let mut d21 = vec![0.0; n];
    let mut d31 = vec![0.0; n];
    for i in 0..m {
        d21[i] = -1.0;
        d21[m + i] = 1.0;
        d31[i] = -1.0;
        d31[2 * m + i] = 1.0;
    }
    let mut cols = vec![ones, d21, d31];
    orthonormalize(&mut cols).expect("independent");
    cols
}

/// Symmetric matrices sharing a random orthonormal eigenbasis, with the
/// spectra returned alongside (spectra[t][l] belongs to common eigenvector l).
pub fn commuting_family(
    rng: &mut ChaCha8Rng,
    n: usize,
    t: usize,
    lo: f64,
    hi: f64,
) -> (Vec<DenseSymMatrix>, Vec<Vec<f64>>) {
    let mut q: Vec<Vec<f64>> = (0..n).map(|_| gaussian_vec(rng, n)).collect();
    orthonormalize(&mut q).expect("gaussian block has full rank");
    let spectra: Vec<Vec<f64>> = (0..t)
        .map(|_| (0..n).map(|_| lo + rng.random::<f64>() * (hi - lo)).collect())
        .collect();
    let mats = spectra
        .iter()
        .map(|d| {
            let mut data = vec![0.0; n * n];
            for (l, ql) in q.iter().enumerate() {
                let dl = d[l];
                for i in 0..n {
                    let qi = dl * ql[i];
                    for j in 0..n {
                        data[i * n + j] += qi * ql[j];
                    }
                }
            }
            // symmetrize away accumulation round-off before the constructor
            for i in 0..n {
                for j in (i + 1)..n {
                    let s = 0.5 * (data[i * n + j] + data[j * n + i]);
                    data[i * n + j] = s;
                    data[j * n + i] = s;
                }
            }
            DenseSymMatrix::from_rows(n, data).expect("symmetrized")
        })
        .collect();
    (mats, spectra)
}

/// Per-layer (p_in, p_out) realizing the requested assortativity coefficients
/// with p_in + (k-1) p_out = s held fixed, so the expected degree is uniform
/// across layers.
pub fn layers_from_rhos(k: usize, rhos: &[f64], s: f64) -> Vec<(f64, f64)> {
    let kf = k as f64;
    rhos.iter()
        .map(|&r| {
            let p_in = s * (1.0 + (kf - 1.0) * r) / kf;
            let p_out = s * (1.0 - r) / kf;
            (p_in, p_out)
        })
        .collect()
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}
