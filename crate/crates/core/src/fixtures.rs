//! Point sets and metrics used as reference inputs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geom::Vec3;
use crate::hull::{hull_metric, intrinsic_from_hull, HullMetric};
use crate::metric::{MetricError, PolyhedralMetric};

/// Regular tetrahedron with unit edges.
pub fn tetrahedron_points() -> Vec<Vec3> {
    let h = (2.0f64 / 3.0).sqrt();
    vec![
        Vec3::new(0.0, 0.0, 0.0),
        Vec3::new(1.0, 0.0, 0.0),
        Vec3::new(0.5, 3f64.sqrt() / 2.0, 0.0),
        Vec3::new(0.5, 3f64.sqrt() / 6.0, h),
    ]
}

/// Unit cube corners, vertex `i` at `(i & 1, (i >> 1) & 1, (i >> 2) & 1)`.
pub fn cube_points() -> Vec<Vec3> {
    (0..8)
        .map(|i| Vec3::new((i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64))
        .collect()
}

/// Regular octahedron with unit edges.
pub fn octahedron_points() -> Vec<Vec3> {
    let a = 1.0 / 2f64.sqrt();
    vec![
        Vec3::new(a, 0.0, 0.0),
        Vec3::new(-a, 0.0, 0.0),
        Vec3::new(0.0, a, 0.0),
        Vec3::new(0.0, -a, 0.0),
        Vec3::new(0.0, 0.0, a),
        Vec3::new(0.0, 0.0, -a),
    ]
}

/// `n` points on the unit sphere, uniformly distributed, with pairwise chord
/// distance at least `0.8 / sqrt(n)` so that generated metrics stay well shaped.
pub fn random_sphere_points(n: usize, seed: u64) -> Vec<Vec3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let min_sep = 0.8 / (n.max(1) as f64).sqrt();
    let mut points: Vec<Vec3> = Vec::with_capacity(n);
    let mut attempts = 0usize;
    while points.len() < n {
        let p = loop {
            let v = Vec3::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            let r = v.norm();
            if r > 1e-3 && r <= 1.0 {
                break v / r;
            }
        };
        attempts += 1;
        if attempts < 100_000 && points.iter().any(|q| (p - q).norm() < min_sep) {
            continue;
        }
        points.push(p);
    }
    points
}

pub fn tetrahedron_metric() -> PolyhedralMetric {
    intrinsic_from_hull(&tetrahedron_points()).expect("tetrahedron hull")
}

pub fn cube_metric() -> PolyhedralMetric {
    intrinsic_from_hull(&cube_points()).expect("cube hull")
}

pub fn octahedron_metric() -> PolyhedralMetric {
    intrinsic_from_hull(&octahedron_points()).expect("octahedron hull")
}

pub fn random_sphere_hull(n: usize, seed: u64) -> Result<HullMetric, MetricError> {
    hull_metric(&random_sphere_points(n, seed))
}

pub fn random_sphere_metric(n: usize, seed: u64) -> Result<PolyhedralMetric, MetricError> {
    random_sphere_hull(n, seed).map(|h| h.metric)
}
