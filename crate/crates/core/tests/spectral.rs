mod common;

use asecluster::bounds::{beta, model_constants};
use asecluster::graph_models::{presets, sample_adjacency, AdjacencySample, StorageKind};
use asecluster::spectral::{
    align, ase, eig_sym, project_sphere, two_to_infty_norm, EigenMethod, EigenOptions,
};
use asecluster::Error;
use common::{bisection_eigenvalues, random_orthogonal, scalar_two_to_infty, Uniform};
use nalgebra::{dmatrix, DMatrix};
use proptest::prelude::*;

fn complete_graph(n: usize) -> AdjacencySample {
    let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
    AdjacencySample::from_edges(n, 0, edges, StorageKind::Auto).unwrap()
}

fn both_methods() -> [EigenOptions; 2] {
    [
        EigenOptions::default().with_method(EigenMethod::Dense),
        EigenOptions::default().with_method(EigenMethod::Lanczos),
    ]
}

#[test]
fn identity_eigenpairs() {
    for opts in both_methods() {
        let m = DMatrix::<f64>::identity(5, 5);
        let e = eig_sym(&m, 2, &opts).unwrap();
        assert!(e.values.iter().all(|v| (v - 1.0).abs() < 1e-12));
        let gram = e.vectors.transpose() * &e.vectors;
        assert!((gram - DMatrix::identity(2, 2)).amax() < 1e-10);
    }
}

#[test]
fn complete_graph_top_pair() {
    for opts in both_methods() {
        let e = eig_sym(&complete_graph(4), 1, &opts).unwrap();
        assert!((e.values[0] - 3.0).abs() < 1e-10);
        for i in 0..4 {
            assert!((e.vectors[(i, 0)] - 0.5).abs() < 1e-8);
        }
    }
}

#[test]
fn six_by_six_against_bisection() {
    let mut rng = Uniform(2024);
    let r = rng.matrix(6, 6, -1.0, 1.0);
    let m = (&r + r.transpose()) * 0.5;
    let mut oracle = bisection_eigenvalues(&m);
    oracle.reverse();
    for opts in both_methods() {
        let e = eig_sym(&m, 6, &opts).unwrap();
        for (a, b) in e.values.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
    }
}

#[test]
fn residuals_are_small_on_a_sampled_graph() {
    let spec = presets::dense_two_block().build(700, 0).unwrap();
    let a = sample_adjacency(&spec.latent_positions().unwrap(), 3).unwrap();
    let dense = asecluster::SymmetricOperator::to_dense(&a);
    for opts in both_methods() {
        let e = eig_sym(&a, 3, &opts).unwrap();
        assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        for j in 0..3 {
            let v = e.vectors.column(j);
            let r = (&dense * v - v * e.values[j]).norm();
            assert!(r <= 1e-8 * e.norm_estimate, "residual {r}");
        }
    }
}

#[test]
fn ase_of_complete_graph() {
    let emb = ase(&complete_graph(4), 1, &EigenOptions::default()).unwrap();
    for i in 0..4 {
        assert!((emb.xhat[(i, 0)] - 3f64.sqrt() / 2.0).abs() < 1e-10);
    }
}

#[test]
fn ase_reports_nonpositive_spectrum() {
    // K_2 has eigenvalues 1 and -1.
    let err = ase(&complete_graph(2), 2, &EigenOptions::default()).unwrap_err();
    match err {
        Error::NonPositiveSpectrum { index, value } => {
            assert_eq!(index, 1);
            assert!((value + 1.0).abs() < 1e-12);
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn noiseless_embedding_recovers_every_preset() {
    for cfg in presets::all() {
        let spec = cfg.build(100, 4).unwrap();
        let x = spec.latent_positions().unwrap();
        let p = x.probability_matrix();
        for opts in both_methods() {
            let emb = ase(&p, cfg.embed_dim(&spec), &opts).unwrap();
            let al = align(&emb.xhat, x.matrix()).unwrap();
            assert!(al.residual_f <= 1e-8, "{}: {}", cfg.id, al.residual_f);
        }
    }
}

#[test]
fn embedding_invariants() {
    let spec = presets::dense_two_block().build(600, 0).unwrap();
    let a = sample_adjacency(&spec.latent_positions().unwrap(), 8).unwrap();
    let emb = ase(&a, 2, &EigenOptions::default()).unwrap();
    let gram = emb.vhat.transpose() * &emb.vhat;
    assert!((gram - DMatrix::identity(2, 2)).amax() < 1e-8);
    assert!(emb.eigenvalues[0] >= emb.eigenvalues[1]);
    let rebuilt = &emb.vhat
        * DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            2,
            emb.eigenvalues.iter().map(|v| v.sqrt()),
        ));
    assert!((rebuilt - &emb.xhat).amax() < 1e-10);
}

#[test]
fn gram_is_independent_of_start_vector() {
    let spec = presets::dense_two_block().build(800, 0).unwrap();
    let a = sample_adjacency(&spec.latent_positions().unwrap(), 1).unwrap();
    let base = EigenOptions::default().with_method(EigenMethod::Lanczos);
    let e1 = ase(&a, 2, &base.clone().with_start_seed(1)).unwrap();
    let e2 = ase(&a, 2, &base.with_start_seed(99)).unwrap();
    let g1 = &e1.xhat * e1.xhat.transpose();
    let g2 = &e2.xhat * e2.xhat.transpose();
    assert!((g1 - g2).amax() < 1e-10);
}

#[test]
fn rank_recovery_on_p() {
    let spec = presets::dense_two_block().build(300, 0).unwrap();
    let p = spec.latent_positions().unwrap().probability_matrix();
    let e = eig_sym(&p, 300, &EigenOptions::default()).unwrap();
    let norm = e.values[0].abs();
    let big = e.values.iter().filter(|v| **v > 1e-8 * norm).count();
    let small = e.values.iter().filter(|v| v.abs() <= 1e-8 * norm).count();
    assert_eq!((big, small), (2, 298));
}

#[test]
fn alignment_examples() {
    let mut rng = Uniform(5);
    let x = rng.matrix(40, 3, -1.0, 1.0);
    let same = align(&x, &x).unwrap();
    assert!((&same.w - DMatrix::identity(3, 3)).amax() < 1e-12);
    assert!(same.residual_f < 1e-12 && same.residual_2inf < 1e-12);

    let q = random_orthogonal(3, &mut rng);
    let rotated = align(&(&x * &q), &x).unwrap();
    assert!(rotated.residual_f <= 1e-10);
    assert!((rotated.w.transpose() * &rotated.w - DMatrix::identity(3, 3)).amax() <= 1e-10);

    let mut e = rng.matrix(40, 3, -1.0, 1.0);
    let scale = 0.01 / e.norm();
    e *= scale;
    let noisy = &x * &q + &e;
    let fit = align(&noisy, &x).unwrap();
    assert!(fit.residual_f <= 0.01 + 1e-10);
    for _ in 0..100 {
        let w = random_orthogonal(3, &mut rng);
        assert!(fit.residual_f <= (&noisy - &x * &w).norm() + 1e-12);
    }
}

#[test]
fn sphere_projection_examples() {
    let y = project_sphere(&dmatrix![3.0, 4.0]).unwrap();
    assert!((y[(0, 0)] - 0.6).abs() < 1e-15 && (y[(0, 1)] - 0.8).abs() < 1e-15);
    let unit = dmatrix![0.2, 2.0 * 6f64.sqrt() / 5.0];
    assert!((project_sphere(&unit).unwrap() - &unit).amax() < 1e-15);
    assert_eq!(
        project_sphere(&dmatrix![1.0, 0.0; 0.0, 0.0]).unwrap_err(),
        Error::ZeroRow { index: 1 }
    );
}

#[test]
fn sphere_error_within_twice_measured_error_over_c_min() {
    let cfg = presets::degree_corrected_two_block();
    for seed in 0..20u64 {
        let spec = cfg.build(200, seed).unwrap();
        let x = spec.latent_positions().unwrap();
        let a = sample_adjacency(&x, seed + 1000).unwrap();
        let Ok(emb) = ase(&a, 2, &EigenOptions::default()) else {
            continue;
        };
        let al = align(&emb.xhat, x.matrix()).unwrap();
        let c_min = spec
            .degree_factors()
            .unwrap()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        let yhat = project_sphere(&emb.xhat).unwrap();
        let ytilde = project_sphere(&al.apply(x.matrix())).unwrap();
        let lhs = two_to_infty_norm(&(yhat - ytilde));
        assert!(lhs <= 2.0 * al.residual_2inf / c_min + 1e-12, "seed {seed}");
    }
}

#[test]
fn error_below_beta_in_most_trials() {
    let cfg = presets::dense_two_block();
    let spec = cfg.build(1000, 0).unwrap();
    let x = spec.latent_positions().unwrap();
    let c = model_constants(&x, spec.tau()).unwrap();
    let b = beta(2, 1000, 0.05, c.delta, c.gamma).unwrap().value;
    let below = (0..200u64)
        .filter(|&s| {
            let a = sample_adjacency(&x, s).unwrap();
            let emb = ase(&a, 2, &EigenOptions::default()).unwrap();
            align(&emb.xhat, x.matrix()).unwrap().residual_2inf < b
        })
        .count();
    assert!(below >= 190, "{below} of 200");
}

#[test]
fn two_to_infty_examples() {
    assert_eq!(two_to_infty_norm(&DMatrix::zeros(3, 2)), 0.0);
    assert_eq!(two_to_infty_norm(&dmatrix![3.0, 4.0; 1.0, 0.0]), 5.0);
    let m = Uniform(77).matrix(50, 3, -2.0, 2.0);
    assert_eq!(two_to_infty_norm(&m), scalar_two_to_infty(&m));
}

proptest! {
    #[test]
    fn norm_sandwich(n in 1usize..30, d in 1usize..5, seed in any::<u64>()) {
        let m = Uniform(seed).matrix(n, d, -3.0, 3.0);
        let t = two_to_infty_norm(&m);
        let f = m.norm();
        prop_assert!(t <= f + 1e-12);
        prop_assert!(f <= (n as f64).sqrt() * t + 1e-12);
    }

    #[test]
    fn sphere_projection_is_idempotent(n in 1usize..20, d in 1usize..5, seed in any::<u64>()) {
        let m = Uniform(seed).matrix(n, d, 0.1, 2.0);
        let once = project_sphere(&m).unwrap();
        let twice = project_sphere(&once).unwrap();
        prop_assert!((&twice - &once).amax() <= 1e-12);
        for row in once.row_iter() {
            prop_assert!((row.norm() - 1.0).abs() <= 1e-12);
        }
    }
}
