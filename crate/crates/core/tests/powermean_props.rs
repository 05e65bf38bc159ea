//! Oracle tests for the Krylov matrix-power kernel and the matrix-free
//! eigensolver on graphs whose spectra are known in closed form.

mod common;

use common::{indicator_span, layers_from_rhos};
use pml_core::graphs::{
    dense_shifted_laplacian, shift_for, shifted_laplacian, MultilayerGraph,
};
use pml_core::linalg::{
    max_principal_angle, sym_matrix_power, DenseSymMatrix, SparseSymMatrix,
};
use pml_core::powermean::{
    pksm_apply, power_mean_eigs, scalar_power_mean, PowerMeanOp, PowerMeanSolveSpec,
};
use pml_core::rng::rng_for;
use pml_core::sbm::{expected_adjacency_case1, sample_case1, Case1Params};
use proptest::prelude::*;

fn dense_to_sparse(d: &DenseSymMatrix) -> SparseSymMatrix {
    let n = d.n();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i..n {
            let v = d.get(i, j);
            if v != 0.0 {
                edges.push((i, j, v));
            }
        }
    }
    SparseSymMatrix::from_edges(n, &edges).unwrap()
}

/// The Lanczos kernel reproduces the dense matrix power action on a sampled
/// two-cluster graph for every negative exponent in the working range.
#[test]
fn pksm_matches_dense_matrix_power() {
    let params = Case1Params {
        k: 2,
        cluster_size: 100,
        layers: vec![(0.3, 0.05)],
        seed: 11,
    };
    let (graph, _) = sample_case1(&params).unwrap();
    let w = &graph.layers()[0];
    let mut rng = rng_for(0x9c5, &[]);
    for &p in &[-1.0, -2.0, -5.0, -10.0] {
        let eps = shift_for(p);
        let op = shifted_laplacian(w, eps).unwrap();
        let dense = sym_matrix_power(
            &dense_shifted_laplacian(&DenseSymMatrix::from_sparse(w), eps).unwrap(),
            p,
        )
        .unwrap();
        for _ in 0..5 {
            let y = common::gaussian_vec(&mut rng, graph.n());
            let (x, info) = pksm_apply(&op, &y, p, 1e-12, 120).unwrap();
            assert!(info.converged, "p={p}");
            let mut want = vec![0.0; graph.n()];
            dense.matvec(&y, &mut want);
            let err = x
                .iter()
                .zip(&want)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            let scale = want.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!(err <= 1e-8 * scale, "p={p}: relative error {:.2e}", err / scale);
        }
    }
}

/// Single expected two-cluster layer: the solver returns exactly
/// {eps, 1 - rho + eps} and the indicator span.
#[test]
fn matrix_free_solver_exact_on_expected_two_cluster_graph() {
    let params = Case1Params {
        k: 2,
        cluster_size: 50,
        layers: vec![(0.4, 0.1)],
        seed: 0,
    };
    let w = dense_to_sparse(&expected_adjacency_case1(&params, 0).unwrap());
    let graph = MultilayerGraph::new(vec![w]).unwrap();
    let p = -10.0;
    let eps = shift_for(p);
    let rho = (0.4 - 0.1) / (0.4 + 0.1);
    let op = PowerMeanOp::new(&graph, PowerMeanSolveSpec::new(p, 2, 3)).unwrap();
    let res = power_mean_eigs(&op).unwrap();
    assert!(res.converged);
    assert!((res.eigenvalues[0] - eps).abs() < 1e-9, "{:?}", res.eigenvalues);
    assert!(
        (res.eigenvalues[1] - (1.0 - rho + eps)).abs() < 1e-9,
        "{:?}",
        res.eigenvalues
    );
    let angle = max_principal_angle(&res.eigenvectors, &indicator_span(2, 50)).unwrap();
    assert!(angle < 1e-7, "angle {angle:.2e}");
}

/// Expected Case-1 layers share one eigenbasis, so the matrix-free solve must
/// produce the scalar power mean of the per-layer eigenvalues: the bottom
/// three values are eps (constant vector) and a double m_p(1 - rho_t + eps).
#[test]
fn matrix_free_solver_combines_commuting_layers() {
    let rhos = [0.8, 0.55, 0.3];
    let params = Case1Params {
        k: 3,
        cluster_size: 20,
        layers: layers_from_rhos(3, &rhos, 0.6),
        seed: 0,
    };
    let layers: Vec<SparseSymMatrix> = (0..3)
        .map(|t| dense_to_sparse(&expected_adjacency_case1(&params, t).unwrap()))
        .collect();
    let graph = MultilayerGraph::new(layers).unwrap();
    for &p in &[-1.0, -2.0, -5.0] {
        let eps = shift_for(p);
        let shifted: Vec<f64> = rhos.iter().map(|r| 1.0 - r + eps).collect();
        let m = scalar_power_mean(&shifted, p).unwrap();
        assert!(m < 1.0 + eps, "test premise: informative values below the bulk");
        let op = PowerMeanOp::new(&graph, PowerMeanSolveSpec::new(p, 3, 5)).unwrap();
        let res = power_mean_eigs(&op).unwrap();
        assert!(res.converged, "p={p}");
        assert!((res.eigenvalues[0] - eps).abs() < 1e-8, "p={p}: {:?}", res.eigenvalues);
        for v in &res.eigenvalues[1..] {
            assert!((v - m).abs() < 1e-8, "p={p}: got {v}, want {m}");
        }
        let angle = max_principal_angle(&res.eigenvectors, &indicator_span(3, 20)).unwrap();
        assert!(angle < 1e-6, "p={p}: angle {angle:.2e}");
    }
}

/// The dense fallback for nonnegative exponents agrees with the same oracle.
#[test]
fn dense_fallback_combines_commuting_layers() {
    let rhos = [0.9, 0.6];
    let params = Case1Params {
        k: 2,
        cluster_size: 30,
        layers: layers_from_rhos(2, &rhos, 0.5),
        seed: 0,
    };
    let layers: Vec<SparseSymMatrix> = (0..2)
        .map(|t| dense_to_sparse(&expected_adjacency_case1(&params, t).unwrap()))
        .collect();
    let graph = MultilayerGraph::new(layers).unwrap();
    for &p in &[0.0, 1.0, 2.0] {
        let eps = shift_for(p);
        let shifted: Vec<f64> = rhos.iter().map(|r| 1.0 - r + eps).collect();
        let m = scalar_power_mean(&shifted, p).unwrap();
        let op = PowerMeanOp::new(&graph, PowerMeanSolveSpec::new(p, 2, 5)).unwrap();
        let res = power_mean_eigs(&op).unwrap();
        assert!(res.converged);
        // the smallest eigenvalue sits at eps (0 for p > 0); the final 1/p-th
        // root maps a roundoff-level eigenvalue to ~eps_mach^(1/p), so only
        // ~1e-7 absolute accuracy is attainable there for p = 2
        assert!(
            (res.eigenvalues[0] - eps).abs() < 5e-7,
            "p={p}: {:?}",
            res.eigenvalues
        );
        assert!((res.eigenvalues[1] - m).abs() < 1e-9, "p={p}");
    }
}

/// On a sampled multilayer graph (no special structure) the matrix-free
/// eigenvalues carry small residuals measured against the dense operator.
#[test]
fn sampled_graph_residuals_are_reported_small() {
    let params = Case1Params {
        k: 2,
        cluster_size: 60,
        layers: vec![(0.4, 0.08), (0.35, 0.1)],
        seed: 21,
    };
    let (graph, _) = sample_case1(&params).unwrap();
    let op = PowerMeanOp::new(&graph, PowerMeanSolveSpec::new(-5.0, 2, 1)).unwrap();
    let res = power_mean_eigs(&op).unwrap();
    assert!(res.converged);
    assert_eq!(res.residuals.len(), 2);
    for r in &res.residuals {
        assert!(*r <= 1e-8, "residual {r:.2e}");
    }
    assert!(!res.krylov_dims.is_empty());
    assert!(res.krylov_dims.iter().all(|&d| d >= 1));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn scalar_mean_monotone_and_bounded(
        xs in prop::collection::vec(1e-3..1e3f64, 1..6),
        pair in (0usize..11, 0usize..11),
    ) {
        let grid = [-50.0, -10.0, -5.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 10.0];
        let (i, j) = pair;
        let (lo_p, hi_p) = (grid[i.min(j)], grid[i.max(j)]);
        let a = scalar_power_mean(&xs, lo_p).unwrap();
        let b = scalar_power_mean(&xs, hi_p).unwrap();
        prop_assert!(a <= b * (1.0 + 1e-12), "m_{lo_p} = {a} > m_{hi_p} = {b}");
        let mn = xs.iter().cloned().fold(f64::INFINITY, f64::min);
        let mx = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(a >= mn * (1.0 - 1e-12) && b <= mx * (1.0 + 1e-12));
    }

    #[test]
    fn scalar_mean_scale_equivariant(
        xs in prop::collection::vec(0.1..10.0f64, 1..5),
        c in 0.1..10.0f64,
        p_idx in 0usize..9,
    ) {
        let grid = [-10.0, -2.0, -1.0, 0.0, 0.5, 1.0, 2.0, 10.0, f64::INFINITY];
        let p = grid[p_idx];
        let scaled: Vec<f64> = xs.iter().map(|x| c * x).collect();
        let a = scalar_power_mean(&scaled, p).unwrap();
        let b = scalar_power_mean(&xs, p).unwrap();
        prop_assert!((a - c * b).abs() <= 1e-12 * a.abs().max(1.0));
    }
}
