mod common;

use nalgebra::DMatrix;

use common::{gaussian_symmetric, min_norm_relaxation, rng};
use relaxmatch::graph::apply_isomorphism;
use relaxmatch::harness::{random_friendly_graph, random_permutation, random_symmetric_instance};
use relaxmatch::projection::project_to_permutation;
use relaxmatch::solver::{
    certify_uniqueness, check_seed_conditions, first_invariant_symmetry, generate_seeds, solve_doubly_stochastic,
    solve_pseudo_stochastic, solve_seeded,
};
use relaxmatch::{ConstraintKind, Graph, Permutation, PermutationSet, SeedSet, SetKind, SolverOptions};

fn opts() -> SolverOptions {
    SolverOptions::default()
}

fn indicator(n: usize, vertices: &[usize]) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(n, vertices.len());
    for (c, &v) in vertices.iter().enumerate() {
        d[(v, c)] = 1.0;
    }
    d
}

/// Two copies of a weighted triangle with distinct weights, joined by weight 0.3 edges
/// between corresponding vertices; the copy swap is the only non-trivial symmetry.
fn twin_triangles() -> Graph {
    let tri = [(0, 1, 1.0), (1, 2, 2.0), (0, 2, 3.5)];
    let mut edges = Vec::new();
    for off in [0, 3] {
        edges.extend(tri.iter().map(|&(i, j, w)| (i + off, j + off, w)));
    }
    edges.extend((0..3).map(|i| (i, i + 3, 0.3)));
    Graph::from_edges(6, &edges).unwrap()
}

#[test]
fn friendly_self_match_is_the_identity() {
    let (a, _) = random_friendly_graph(7, 1).unwrap();
    let sol = solve_pseudo_stochastic(&a, &a, &opts()).unwrap();
    assert!((&sol.p - DMatrix::identity(7, 7)).norm() < 1e-8);
    assert_eq!(sol.unique, Some(true));
    let ds = solve_doubly_stochastic(&a, &a, &SolverOptions {
        constraint: ConstraintKind::DoublyStochastic,
        ..opts()
    })
    .unwrap();
    assert!(ds.converged);
    assert!((&ds.p - DMatrix::identity(7, 7)).norm() < 1e-6);
}

#[test]
fn planted_permutation_is_the_relaxed_minimizer() {
    for seed in 0..120u64 {
        let n = 6 + (seed as usize % 11);
        let (a, _) = random_friendly_graph(n, 200 + seed).unwrap();
        let p = random_permutation(n, 300 + seed);
        let b = apply_isomorphism(&a, &p).unwrap();
        let sol = solve_pseudo_stochastic(&a, &b, &opts()).unwrap();
        assert!((&sol.p - p.to_matrix()).norm() < 1e-5, "seed {seed}");
    }
}

#[test]
fn min_norm_solution_for_two_identical_edges() {
    let g = Graph::from_edges(4, &[(0, 1, 2.0), (2, 3, 2.0)]).unwrap();
    let sol = solve_pseudo_stochastic(&g, &g, &opts()).unwrap();
    let oracle = min_norm_relaxation(&g, &g, None);
    assert!((&sol.p - &oracle).norm() < 1e-9);
    // The minimum-norm point spreads evenly over all four vertices.
    assert!((&sol.p - DMatrix::from_element(4, 4, 0.25)).norm() < 1e-9);
    assert_eq!(sol.unique, Some(false));
    assert!(sol.objective < 1e-20);
}

#[test]
fn solutions_match_the_explicit_least_squares_oracle() {
    let mut r = rng(12);
    for t in 0..40 {
        let n = 3 + t % 6;
        let a = Graph::new(gaussian_symmetric(n, &mut r)).unwrap();
        let b = Graph::new(gaussian_symmetric(n, &mut r)).unwrap();
        let sol = solve_pseudo_stochastic(&a, &b, &opts()).unwrap();
        assert!(sol.row_sum_error() < 1e-10);
        assert!(sol.kkt_residual <= 1e-6 * (1.0 + b.frobenius_norm().powi(2)));
        if certify_uniqueness(&b, None, &opts()).unwrap().full_rank {
            let oracle = min_norm_relaxation(&a, &b, None);
            assert!((&sol.p - &oracle).norm() < 1e-5, "n={n}: {}", (&sol.p - &oracle).norm());
        }
    }
}

#[test]
fn relabeling_the_first_graph_relabels_the_solution() {
    let mut r = rng(13);
    for t in 0..10u64 {
        let n = 5 + t as usize % 4;
        let a = Graph::new(gaussian_symmetric(n, &mut r)).unwrap();
        let b = Graph::new(gaussian_symmetric(n, &mut r)).unwrap();
        let s = random_permutation(n, t);
        let a2 = apply_isomorphism(&a, &s).unwrap();
        let p = solve_pseudo_stochastic(&a, &b, &opts()).unwrap().p;
        let p2 = solve_pseudo_stochastic(&a2, &b, &opts()).unwrap().p;
        assert!((p2 * s.to_matrix() - p).norm() < 1e-6);
    }
}

#[test]
fn doubly_stochastic_agrees_on_isomorphic_pairs() {
    let (a, _) = random_friendly_graph(8, 44).unwrap();
    let p = random_permutation(8, 45);
    let b = apply_isomorphism(&a, &p).unwrap();
    let ps = solve_pseudo_stochastic(&a, &b, &opts()).unwrap();
    let ds = solve_doubly_stochastic(&a, &b, &SolverOptions {
        constraint: ConstraintKind::DoublyStochastic,
        ..opts()
    })
    .unwrap();
    assert!((&ps.p - &ds.p).norm() < 1e-4);
    assert!(ds.p.iter().all(|&x| x >= -1e-12));
    assert!(ds.row_sum_error() < 1e-9 && ds.column_sum_error() < 1e-9);
}

#[test]
fn one_seed_breaks_a_component_swap() {
    let a = twin_triangles();
    let swap = Permutation::from_map(vec![3, 4, 5, 0, 1, 2]).unwrap();
    assert_eq!(apply_isomorphism(&a, &swap).unwrap(), a);
    let p = random_permutation(6, 3);
    let b = apply_isomorphism(&a, &p).unwrap();
    let d = indicator(6, &[p.inverse().get(0)]);
    assert!(check_seed_conditions(&b, &d).unwrap().pass);
    for mu in [1e-3, 1.0, 1e3] {
        let seeds = SeedSet::covariant(d.clone(), &p, mu).unwrap();
        let sol = solve_seeded(&a, &b, &seeds, &opts()).unwrap();
        assert!((&sol.p - p.to_matrix()).norm() < 1e-5, "mu={mu}");
        assert!(sol.degenerate_rows.is_empty());
        assert_eq!(project_to_permutation(&sol.p).perm, p);
    }
}

#[test]
fn seeded_solution_matches_the_explicit_oracle() {
    let mut r = rng(14);
    for t in 0..20 {
        let n = 3 + t % 5;
        let a = Graph::new(gaussian_symmetric(n, &mut r)).unwrap();
        let b = Graph::new(gaussian_symmetric(n, &mut r)).unwrap();
        let c = DMatrix::from_fn(n, 2, |i, j| ((i + 2 * j) % 3) as f64);
        let d = DMatrix::from_fn(n, 2, |i, j| ((i * j + 1) % 4) as f64 * 0.5);
        let mu = [0.1, 1.0, 10.0][t % 3];
        let seeds = SeedSet::new(c.clone(), d.clone(), mu).unwrap();
        let sol = solve_seeded(&a, &b, &seeds, &opts()).unwrap();
        let oracle = min_norm_relaxation(&a, &b, Some((&c, &d, mu)));
        assert!((&sol.p - &oracle).norm() < 1e-6, "t={t}: {}", (&sol.p - &oracle).norm());
        assert!(sol.kkt_residual <= 1e-6 * (1.0 + b.frobenius_norm().powi(2)));
    }
}

#[test]
fn vanishing_seed_weight_approaches_the_unseeded_solution() {
    let (a, _) = random_friendly_graph(6, 50).unwrap();
    let (b, _) = random_friendly_graph(6, 51).unwrap();
    let base = solve_pseudo_stochastic(&a, &b, &opts()).unwrap();
    assert_eq!(base.unique, Some(true));
    let c = indicator(6, &[0, 3]);
    let d = indicator(6, &[2, 5]);
    let mut last = f64::INFINITY;
    for mu in [1e-2, 1e-4, 1e-6] {
        let seeds = SeedSet::new(c.clone(), d.clone(), mu).unwrap();
        let gap = (&solve_seeded(&a, &b, &seeds, &opts()).unwrap().p - &base.p).norm();
        assert!(gap < last);
        last = gap;
    }
    assert!(last < 1e-4);
}

#[test]
fn seeded_recovery_on_designed_symmetries() {
    for (n, l) in [(6, 1), (9, 2), (8, 3), (8, 7)] {
        for seed in 0..5u64 {
            let (a, sym_a) = random_symmetric_instance(n, l, seed).unwrap();
            let p = random_permutation(n, 40 + seed);
            let b = apply_isomorphism(&a, &p).unwrap();
            let inv = p.inverse();
            let sym_b = PermutationSet::new(
                sym_a.elements.iter().map(|s| p.compose(s).compose(&inv)).collect(),
                SetKind::Symmetries,
            );
            for s in &sym_b.elements {
                assert_eq!(apply_isomorphism(&b, s).unwrap(), b);
            }
            let d = (0..100)
                .map(|k| generate_seeds(&b, &sym_b, l, 1000 * seed + k).unwrap())
                .find(|d| check_seed_conditions(&b, d).unwrap().pass)
                .expect("seeds passing the conditions");
            assert!(first_invariant_symmetry(&d, &sym_b).is_none());
            for mu in [1e-3, 1.0, 1e3] {
                let seeds = SeedSet::covariant(d.clone(), &p, mu).unwrap();
                if mu == 1.0 {
                    assert!(certify_uniqueness(&b, Some(&seeds), &opts()).unwrap().full_rank, "n={n} l={l}");
                }
                let sol = solve_seeded(&a, &b, &seeds, &opts()).unwrap();
                assert!((&sol.p - p.to_matrix()).norm() < 1e-5, "n={n} l={l} mu={mu}");
            }
        }
    }
}

#[test]
fn unseeded_relaxation_is_not_unique_on_symmetric_graphs() {
    let (g, _) = random_symmetric_instance(8, 3, 2).unwrap();
    let cert = certify_uniqueness(&g, None, &opts()).unwrap();
    assert!(!cert.full_rank);
    let sol = solve_pseudo_stochastic(&g, &g, &opts()).unwrap();
    assert_eq!(sol.unique, Some(false));
    assert!((&sol.p - DMatrix::identity(8, 8)).norm() > 0.1);
}

#[test]
fn rejects_mismatched_inputs() {
    let (a, _) = random_friendly_graph(4, 1).unwrap();
    let (b, _) = random_friendly_graph(5, 1).unwrap();
    assert!(solve_pseudo_stochastic(&a, &b, &opts()).is_err());
    assert!(solve_doubly_stochastic(&a, &b, &opts()).is_err());
    let seeds = SeedSet::new(DMatrix::zeros(5, 1), DMatrix::zeros(5, 1), 1.0).unwrap();
    assert!(solve_seeded(&a, &a, &seeds, &opts()).is_err());
}
