//! Graph and eigensolver checks against brute-force references.

use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectral_vote_core::eigen::{smallest_generalized_eigenpairs, EigenBasis};
use spectral_vote_core::graph::{build_graph, AffinityGraph};
use spectral_vote_core::FeatureMap;

fn random_features(rng: &mut ChaCha8Rng, max_cells: usize) -> FeatureMap {
    let h = rng.random_range(1..=4);
    let w = rng.random_range(1..=(max_cells / h).max(1));
    let d = rng.random_range(2..=6);
    let data: Vec<f64> = (0..h * w * d).map(|_| rng.random_range(-1.0..1.0)).collect();
    FeatureMap::new(h, w, d, data).unwrap()
}

fn dense(graph: &AffinityGraph) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = graph.n();
    let l = DMatrix::from_row_slice(n, n, graph.laplacian());
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(graph.degrees()));
    (l, d)
}

/// Eigenvalues of the non-symmetric `D⁻¹L` through a real Schur form.
fn schur_spectrum(graph: &AffinityGraph) -> Vec<f64> {
    let (l, d) = dense(graph);
    let dinv = d.try_inverse().unwrap();
    let mut ev: Vec<f64> = (dinv * l).schur().eigenvalues().expect("real spectrum").iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

fn max_principal_angle(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let s = (a.transpose() * b).singular_values();
    let min_cos = s.iter().copied().fold(f64::INFINITY, f64::min).min(1.0);
    min_cos.acos()
}

fn check_basis(graph: &AffinityGraph, basis: &EigenBasis) {
    let n = graph.n();
    let (l, d) = dense(graph);
    let u = DMatrix::from_row_slice(n, basis.k(), basis.vectors());
    let fro = graph.laplacian_frobenius();
    for j in 0..basis.k() {
        let col = u.column(j);
        let r = &l * col - basis.eigenvalues()[j] * (&d * col);
        assert!(r.norm() <= 1e-8 * fro.max(1.0), "residual {}", r.norm());
    }
    let gram = u.transpose() * &d * &u;
    for i in 0..basis.k() {
        for j in 0..basis.k() {
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((gram[(i, j)] - want).abs() < 1e-8);
        }
    }
    assert!(basis.eigenvalues().windows(2).all(|p| p[0] <= p[1]));
    assert!(basis.eigenvalues()[0] >= -1e-8);
}

#[test]
fn matches_dense_oracles_on_small_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..200 {
        let fm = random_features(&mut rng, 16);
        let graph = build_graph(&fm).unwrap();
        let n = graph.n();
        let basis = smallest_generalized_eigenpairs(&graph, n).unwrap();
        check_basis(&graph, &basis);

        // Full decomposition by an independent symmetric solver.
        let (l, d) = dense(&graph);
        let half = d.map(|x| if x > 0.0 { 1.0 / x.sqrt() } else { 0.0 });
        let sym = SymmetricEigen::new(&half * l * &half);
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| sym.eigenvalues[a].total_cmp(&sym.eigenvalues[b]));
        let reference: Vec<f64> = idx.iter().map(|&i| sym.eigenvalues[i]).collect();
        for (got, want) in basis.eigenvalues().iter().zip(&reference) {
            assert!((got - want).abs() < 1e-8, "{got} vs {want}");
        }
        // Clamped-cosine graphs keep the generalised spectrum in [0, 2].
        assert!(basis.eigenvalues().iter().all(|&l| (-1e-8..=2.0 + 1e-8).contains(&l)));

        // Subspace agreement wherever a spectral gap makes the leading
        // subspace well defined.
        let ours = half.map(|x| if x > 0.0 { 1.0 / x } else { 0.0 })
            * DMatrix::from_row_slice(n, n, basis.vectors());
        for k in 1..n {
            if reference[k] - reference[k - 1] < 1e-6 {
                continue;
            }
            let theirs = DMatrix::from_fn(n, k, |r, c| sym.eigenvectors[(r, idx[c])]);
            let mine = ours.columns(0, k).into_owned();
            assert!(max_principal_angle(&mine, &theirs) <= 1e-6);
        }
    }
}

#[test]
fn disconnected_components_span_indicators() {
    // Two cliques of 3 joined by nothing; null space is 2-dimensional.
    let mut w = vec![0.0; 36];
    for i in 0..6 {
        for j in 0..6 {
            if (i < 3) == (j < 3) {
                w[i * 6 + j] = 0.5 + 0.1 * ((i + j) % 3) as f64;
            }
        }
    }
    let g = AffinityGraph::from_weights(6, w).unwrap();
    let basis = smallest_generalized_eigenpairs(&g, 2).unwrap();
    assert!(basis.eigenvalues()[1].abs() < 1e-12);
    // Project each indicator onto span(u0, u1) in the D inner product.
    let u = DMatrix::from_row_slice(6, 2, basis.vectors());
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(g.degrees()));
    for first in [true, false] {
        let ind = nalgebra::DVector::from_fn(6, |i, _| if (i < 3) == first { 1.0 } else { 0.0 });
        let coeffs = u.transpose() * &d * &ind;
        let resid = &ind - &u * coeffs;
        assert!(resid.norm() < 1e-10);
    }
}

#[test]
fn path_graph_oracle() {
    let w = vec![0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0];
    let g = AffinityGraph::from_weights(3, w).unwrap();
    let reference = schur_spectrum(&g);
    let basis = smallest_generalized_eigenpairs(&g, 3).unwrap();
    for ((a, b), c) in basis.eigenvalues().iter().zip(&reference).zip([0.0, 1.0, 2.0]) {
        assert!((a - b).abs() < 1e-12 && (a - c).abs() < 1e-12);
    }
}

#[test]
fn quadratic_form_matches_double_loop() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let fm = random_features(&mut rng, 30);
        let g = build_graph(&fm).unwrap();
        let n = g.n();
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        let mut brute = 0.0;
        for i in 0..n {
            for j in 0..n {
                brute += 0.5 * g.weight(i, j) * (x[i] - x[j]).powi(2);
            }
        }
        assert!((g.laplacian_quadratic(&x).unwrap() - brute).abs() < 1e-9);
    }
}

proptest! {
    #[test]
    fn graph_invariants(
        (h, w, d, data) in (1usize..5, 1usize..5, 1usize..5).prop_flat_map(|(h, w, d)| {
            (Just(h), Just(w), Just(d), prop::collection::vec(0.05f64..1.0, h * w * d))
        }),
        signs in prop::collection::vec(any::<bool>(), 100),
        x in prop::collection::vec(-10.0f64..10.0, 25),
    ) {
        let data: Vec<f64> = data.iter().zip(signs.iter().cycle()).map(|(v, &s)| if s { *v } else { -*v }).collect();
        let fm = FeatureMap::new(h, w, d, data).unwrap();
        let g = build_graph(&fm).unwrap();
        let n = g.n();
        for i in 0..n {
            prop_assert_eq!(g.weight(i, i), 1.0);
            let row: f64 = (0..n).map(|j| g.laplacian_at(i, j)).sum();
            prop_assert!(row.abs() <= 1e-10 * n as f64);
            let deg: f64 = (0..n).map(|j| g.weight(i, j)).sum();
            prop_assert_eq!(deg, g.degrees()[i]);
            for j in 0..n {
                prop_assert_eq!(g.weight(i, j), g.weight(j, i));
                prop_assert!((0.0..=1.0).contains(&g.weight(i, j)));
            }
        }
        let x = &x[..n];
        let max_sq = x.iter().map(|v| v * v).fold(0.0, f64::max);
        prop_assert!(g.laplacian_quadratic(x).unwrap() >= -1e-12 * n as f64 * max_sq);
    }

    #[test]
    fn cell_permutation_permutes_weights(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fm = random_features(&mut rng, 12);
        let n = fm.cells();
        let d = fm.channels();
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, rng.random_range(0..=i));
        }
        let mut data = Vec::with_capacity(n * d);
        for &p in &perm {
            data.extend_from_slice(fm.cell(p));
        }
        let permuted = FeatureMap::new(1, n, d, data).unwrap();
        let (g, gp) = (build_graph(&fm).unwrap(), build_graph(&permuted).unwrap());
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(gp.weight(i, j), g.weight(perm[i], perm[j]));
                // Degrees sum in a different order, so the diagonal may move by an ulp.
                prop_assert!((gp.laplacian_at(i, j) - g.laplacian_at(perm[i], perm[j])).abs() < 1e-12);
            }
        }
    }
}
