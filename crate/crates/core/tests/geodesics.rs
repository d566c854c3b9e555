mod common;

use alexandrov::delaunay::Triangulation;
use alexandrov::fixtures;
use alexandrov::paths::{all_pairs_distances, run_mmp};
use alexandrov::Surface;
use proptest::prelude::*;

fn check_against_oracle(surface: &Surface, k: usize, rel: f64) {
    for s in 0..surface.vertex_count() {
        let field = run_mmp(surface, &[s]).unwrap();
        let oracle = common::dense_graph_distances(surface, s, k);
        for (v, (&d, &o)) in field.vertex_distances().iter().zip(&oracle).enumerate() {
            if v == s {
                assert_eq!(d, 0.0);
                continue;
            }
            // The graph only overestimates.
            assert!(
                d <= o * (1.0 + 1e-9),
                "source {s} vertex {v}: mmp {d} > oracle {o}"
            );
            assert!(
                (o - d) / d <= rel,
                "source {s} vertex {v}: mmp {d}, oracle {o}"
            );
        }
    }
}

#[test]
fn fixtures_match_dense_graph() {
    check_against_oracle(
        &Surface::new(&fixtures::tetrahedron_metric()).unwrap(),
        10,
        0.01,
    );
    check_against_oracle(&Surface::new(&fixtures::cube_metric()).unwrap(), 10, 0.01);
    check_against_oracle(
        &Surface::new(&fixtures::octahedron_metric()).unwrap(),
        10,
        0.01,
    );
}

#[test]
fn random_hulls_match_dense_graph() {
    for seed in 0..6 {
        let m = fixtures::random_sphere_metric(6 + (seed as usize % 6), seed).unwrap();
        check_against_oracle(&Surface::new(&m).unwrap(), 12, 0.01);
    }
}

#[test]
fn oracle_error_shrinks_with_refinement() {
    let s = Surface::new(&fixtures::random_sphere_metric(8, 42).unwrap()).unwrap();
    let exact = run_mmp(&s, &[0]).unwrap().vertex_distances();
    let err = |k: usize| {
        let o = common::dense_graph_distances(&s, 0, k);
        exact.iter().zip(&o).map(|(d, o)| o - d).fold(0.0, f64::max)
    };
    assert!(err(16) <= err(2) + 1e-12);
}

#[test]
fn symmetry_and_triangle_inequality() {
    for seed in [3u64, 17, 29] {
        let s = Surface::new(&fixtures::random_sphere_metric(10, seed).unwrap()).unwrap();
        let d = all_pairs_distances(&s).unwrap();
        let n = d.len();
        for a in 0..n {
            for b in 0..n {
                assert!((d[a][b] - d[b][a]).abs() <= 1e-9, "{a} {b}");
                for c in 0..n {
                    assert!(d[a][c] <= d[a][b] + d[b][c] + 1e-9);
                }
            }
        }
    }
}

#[test]
fn interior_window_distances_realized_by_oracle_points() {
    // Every edge midpoint distance from the field is at most the oracle's
    // distance through the midpoint's neighbours.
    let s = Surface::new(&fixtures::cube_metric()).unwrap();
    let field = run_mmp(&s, &[0]).unwrap();
    for he in 0..s.mesh().half_edge_count() {
        let len = s.mesh().length(he);
        let d = field.edge_distance(he, 0.5 * len).unwrap();
        let o = field.vertex(s.mesh().origin(he)).distance + 0.5 * len;
        assert!(d <= o + 1e-12);
    }
}

#[test]
fn intervals_cover_edges_and_extraction_is_monotone() {
    for (name, m) in [
        ("cube", fixtures::cube_metric()),
        ("random", fixtures::random_sphere_metric(9, 5).unwrap()),
    ] {
        let s = Surface::new(&m).unwrap();
        let field = run_mmp(&s, &[0]).unwrap();
        assert!(field.stats().monotone, "{name}");
        let mesh = s.mesh();
        for he in 0..mesh.half_edge_count() {
            let len = mesh.length(he);
            let mut spans: Vec<(f64, f64)> = field.intervals(he).map(|w| (w.b0, w.b1)).collect();
            spans.sort_by(|a, b| a.0.total_cmp(&b.0));
            let tol = 1e-12 * len.max(1.0);
            let mut reach = 0.0;
            for (b0, b1) in spans {
                assert!(
                    b0 >= reach - tol,
                    "{name} he {he}: overlap at {b0} < {reach}"
                );
                assert!(
                    b0 <= reach + tol,
                    "{name} he {he}: gap from {reach} to {b0}"
                );
                reach = b1;
            }
            assert!(
                (reach - len).abs() <= tol,
                "{name} he {he}: covered to {reach} of {len}"
            );
        }
    }
}

#[test]
fn cube_opposite_corner_is_root_five() {
    // Vertex 7 is the corner opposite vertex 0; unfolding two faces into a
    // 1 x 2 rectangle gives the straight path of length sqrt(5).
    let s = Surface::new(&fixtures::cube_metric()).unwrap();
    let d = run_mmp(&s, &[0]).unwrap().vertex_distances();
    assert!((d[7] - 5f64.sqrt()).abs() <= 1e-6, "{}", d[7]);
    for v in [1, 2, 4] {
        assert!((d[v] - 1.0).abs() <= 1e-12);
    }
    for v in [3, 5, 6] {
        assert!((d[v] - 2f64.sqrt()).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn distances_survive_intrinsic_flips(seed in 0u64..1000, picks in proptest::collection::vec(0usize..1000, 1..8)) {
        let m = fixtures::random_sphere_metric(8, seed).unwrap();
        let s = Surface::new(&m).unwrap();
        let before = all_pairs_distances(&s).unwrap();
        let mut t = Triangulation::from_surface(&s);
        let mut flipped = 0;
        for p in picks {
            let e = p % t.mesh().edge_count();
            let degree_ok = {
                let h = t.mesh().edge_half(e);
                t.mesh().degree(t.mesh().origin(h)) > 3 && t.mesh().degree(t.mesh().target(h)) > 3
            };
            if degree_ok && t.flip_edge(e).is_ok() {
                flipped += 1;
            }
        }
        let s2 = Surface::new(&t.to_metric()).unwrap();
        let after = all_pairs_distances(&s2).unwrap();
        for a in 0..before.len() {
            for b in 0..before.len() {
                let scale = before[a][b].max(1.0);
                prop_assert!((before[a][b] - after[a][b]).abs() <= 1e-9 * scale,
                    "{} flips: d({a},{b}) {} vs {}", flipped, before[a][b], after[a][b]);
            }
        }
    }
}
