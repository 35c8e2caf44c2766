use std::collections::BTreeSet;

use nalgebra::DMatrix;
use proptest::prelude::*;

use cyclicality::oracle::{decompose_closed_walk, enumerate_simple_cycles, walk_value};
use cyclicality::spectral::{column_sum_bounds, row_sum_bounds};
use cyclicality::{
    influence_of_subset, influence_vector, perron_vectors, spectral_radius, trace_radius_estimate,
    SpectralOptions, VertexSet, WeightedDigraph,
};

fn opts() -> SpectralOptions {
    SpectralOptions::default()
}

/// Sparse non-negative matrices: each entry is absent or uniform on (0.05, 2).
fn sparse_graph(max_n: usize) -> impl Strategy<Value = WeightedDigraph> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(proptest::option::weighted(0.5, 0.05f64..2.0), n * n).prop_map(
            move |cells| {
                let rows = cells
                    .chunks(n)
                    .map(|r| r.iter().map(|c| c.unwrap_or(0.0)).collect())
                    .collect();
                WeightedDigraph::from_unlabeled(rows).unwrap()
            },
        )
    })
}

fn positive_graph(max_n: usize) -> impl Strategy<Value = WeightedDigraph> {
    (2..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(0.05f64..2.0, n * n).prop_map(move |cells| {
            WeightedDigraph::from_unlabeled(cells.chunks(n).map(<[f64]>::to_vec).collect()).unwrap()
        })
    })
}

fn graph_and_subset(max_n: usize) -> impl Strategy<Value = (WeightedDigraph, VertexSet)> {
    sparse_graph(max_n).prop_flat_map(|g| {
        let n = g.n();
        proptest::collection::vec(any::<bool>(), n).prop_map(move |mask| {
            let s = mask
                .iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .map(|(i, _)| i)
                .collect();
            (g.clone(), s)
        })
    })
}

fn eigen_radius(w: &DMatrix<f64>) -> f64 {
    if w.nrows() == 0 {
        return 0.0;
    }
    w.complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn restrict_is_delete_of_complement((g, s) in graph_and_subset(7)) {
        let a = g.restrict_to(&s).unwrap();
        let b = g.delete_vertices(&s.complement(g.n())).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn deletions_compose((g, s) in graph_and_subset(7)) {
        // Delete s in two stages: first its smallest member, then the rest
        // (re-indexed after the first deletion).
        prop_assume!(s.len() >= 2);
        let first = s.indices()[0];
        let stage1 = g.delete_vertices(&VertexSet::singleton(first)).unwrap();
        let rest: VertexSet = s.indices()[1..].iter().map(|&i| i - 1).collect();
        let stage2 = stage1.delete_vertices(&rest).unwrap();
        prop_assert_eq!(stage2, g.delete_vertices(&s).unwrap());
    }

    #[test]
    fn components_partition_the_vertices(g in sparse_graph(8)) {
        let comps = g.strongly_connected_components();
        let mut seen = BTreeSet::new();
        for c in &comps {
            prop_assert!(!c.is_empty());
            for v in c.iter() {
                prop_assert!(seen.insert(v));
            }
        }
        prop_assert_eq!(seen.len(), g.n());
        prop_assert_eq!(g.is_irreducible(), comps.len() == 1);
    }

    #[test]
    fn radius_matches_eigenvalues(g in sparse_graph(7)) {
        let r = spectral_radius(&g, &opts()).unwrap().radius;
        let e = eigen_radius(g.weights());
        // General eigensolvers lose accuracy near defective eigenvalues, so the
        // comparison is looser than the solver tolerance.
        prop_assert!(close(r, e, 1e-6), "solver {} vs eigenvalues {}", r, e);
    }

    #[test]
    fn radius_sandwiched_by_sums(g in sparse_graph(8)) {
        let r = spectral_radius(&g, &opts()).unwrap().radius;
        for b in [row_sum_bounds(&g), column_sum_bounds(&g)] {
            prop_assert!(r >= b.min * (1.0 - 1e-10) - 1e-12);
            prop_assert!(r <= b.max * (1.0 + 1e-10) + 1e-12);
        }
    }

    #[test]
    fn radius_and_influence_are_scale_invariant(g in sparse_graph(6), c in 1e-3f64..1e3) {
        let r = spectral_radius(&g, &opts()).unwrap().radius;
        let rc = spectral_radius(&g.scaled(c), &opts()).unwrap().radius;
        prop_assert!(close(rc, c * r, 1e-9));
        let a = influence_vector(&g, &opts()).unwrap();
        let b = influence_vector(&g.scaled(c), &opts()).unwrap();
        for (x, y) in a.per_vertex.iter().zip(&b.per_vertex) {
            prop_assert!((x - y).abs() <= 1e-8, "{} vs {}", x, y);
        }
    }

    #[test]
    fn relabelling_permutes_influence(
        g in sparse_graph(6),
        perm in Just((0..8).collect::<Vec<usize>>()).prop_shuffle()
    ) {
        let perm: Vec<usize> = perm.into_iter().filter(|&p| p < g.n()).collect();
        let h = g.permuted(&perm);
        let a = influence_vector(&g, &opts()).unwrap();
        let b = influence_vector(&h, &opts()).unwrap();
        prop_assert!(close(a.base_radius, b.base_radius, 1e-10));
        for (k, &p) in perm.iter().enumerate() {
            prop_assert!((b.per_vertex[k] - a.per_vertex[p]).abs() <= 1e-8);
        }
    }

    #[test]
    fn influence_is_bounded_and_sums_to_cyclicality(g in sparse_graph(7)) {
        let r = influence_vector(&g, &opts()).unwrap();
        for &x in &r.per_vertex {
            prop_assert!((0.0..=1.0).contains(&x));
        }
        prop_assert!(r.cyclicality <= g.n() as f64 + 1e-12);
        if g.n() > 1 {
            let sum: f64 = r.per_vertex.iter().sum();
            prop_assert!((sum - r.cyclicality).abs() <= 1e-12);
        }
    }

    #[test]
    fn influence_is_monotone_in_the_subset((g, s) in graph_and_subset(6)) {
        prop_assume!(!s.is_empty() && s.len() < g.n());
        let small = VertexSet::singleton(s.indices()[0]);
        let a = influence_of_subset(&g, &small, &opts()).unwrap();
        let b = influence_of_subset(&g, &s, &opts()).unwrap();
        prop_assert!(b >= a - 1e-9);
    }

    #[test]
    fn perron_vectors_are_eigenvectors(g in positive_graph(7)) {
        let p = perron_vectors(&g, &opts()).unwrap();
        let w = g.weights();
        let v = nalgebra::DVector::from_vec(p.right.clone());
        let u = nalgebra::DVector::from_vec(p.left.clone());
        let rv = (w * &v - &v * p.radius).amax();
        let lu = (w.transpose() * &u - &u * p.radius).amax();
        prop_assert!(rv <= 1e-9 * p.radius * v.amax(), "right residual {}", rv);
        prop_assert!(lu <= 1e-9 * p.radius * u.amax(), "left residual {}", lu);
        prop_assert!(p.right.iter().all(|&x| x > 0.0));
        prop_assert!(p.left.iter().all(|&x| x > 0.0));
        prop_assert!((v.sum() - 1.0).abs() < 1e-12);
        prop_assert!((u.dot(&v) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn oracle_matches_exhaustive_search(g in sparse_graph(5)) {
        let catalog = enumerate_simple_cycles(&g, g.n()).unwrap();
        let found: BTreeSet<Vec<usize>> = catalog.cycles.iter().map(|c| c.vertices.clone()).collect();
        prop_assert_eq!(found.len(), catalog.cycles.len());
        prop_assert_eq!(found, brute_force_cycles(&g));
        for c in &catalog.cycles {
            let mut walk = c.vertices.clone();
            walk.push(walk[0]);
            prop_assert!(close(c.value, walk_value(&g, &walk), 1e-12));
        }
    }

    #[test]
    fn closed_walk_decomposition_preserves_value(
        n in 2usize..6,
        steps in proptest::collection::vec(0usize..6, 1..12),
        weights in proptest::collection::vec(0.1f64..3.0, 36),
    ) {
        let rows = (0..n).map(|i| (0..n).map(|j| weights[i * 6 + j]).collect()).collect();
        let g = WeightedDigraph::from_unlabeled(rows).unwrap();
        let mut walk: Vec<usize> = steps.iter().map(|&s| s % n).collect();
        walk.push(walk[0]);
        let parts = decompose_closed_walk(&g, &walk).unwrap();
        let product: f64 = parts.iter().map(|c| c.value).product();
        prop_assert!(close(product, walk_value(&g, &walk), 1e-10));
        let arcs: usize = parts.iter().map(|c| c.len()).sum();
        prop_assert_eq!(arcs, walk.len() - 1);
    }
}

/// Every simple cycle, as the vertex sequence starting at its minimum vertex.
fn brute_force_cycles(g: &WeightedDigraph) -> BTreeSet<Vec<usize>> {
    fn extend(g: &WeightedDigraph, path: &mut Vec<usize>, out: &mut BTreeSet<Vec<usize>>) {
        let start = path[0];
        let last = *path.last().unwrap();
        if g.has_arc(last, start) {
            out.insert(path.clone());
        }
        for next in start + 1..g.n() {
            if !path.contains(&next) && g.has_arc(last, next) {
                path.push(next);
                extend(g, path, out);
                path.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    for s in 0..g.n() {
        extend(g, &mut vec![s], &mut out);
    }
    out
}

#[test]
fn trace_estimate_survives_huge_weights() {
    let g = WeightedDigraph::from_unlabeled(vec![vec![1e307; 3]; 3]).unwrap();
    let est = trace_radius_estimate(&g, 64).unwrap();
    assert!(est.is_finite());
    assert!(rel_close(est, 3e307, 1e-12), "{est}");
    let r = spectral_radius(&g, &opts()).unwrap().radius;
    assert!(rel_close(r, 3e307, 1e-12));
}

#[test]
fn tiny_weights_are_not_flushed() {
    let g = WeightedDigraph::from_unlabeled(vec![vec![0.0, 1e-300], vec![1e-300, 0.0]]).unwrap();
    let r = spectral_radius(&g, &opts()).unwrap().radius;
    assert!(rel_close(r, 1e-300, 1e-12), "{r}");
    assert!((influence_vector(&g, &opts()).unwrap().cyclicality - 2.0).abs() < 1e-12);
}

#[test]
fn tiny_weights_on_larger_cycles() {
    let t = 1e-300;
    let g = WeightedDigraph::from_unlabeled(vec![
        vec![0.0, t, 0.0],
        vec![0.0, 0.0, t],
        vec![t, 0.0, t / 2.0],
    ])
    .unwrap();
    let r = spectral_radius(&g, &opts()).unwrap().radius;
    let scaled = spectral_radius(&g.scaled(1e300), &opts()).unwrap().radius;
    assert!(rel_close(r, scaled * 1e-300, 1e-10), "{r} vs {scaled}");
}
