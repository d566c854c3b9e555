#![allow(dead_code)]

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use alexandrov::geom::{Vec2, Vec3};
use alexandrov::{PolyhedralMetric, Surface};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Vertex-to-vertex distances on a graph with `k` Steiner points per edge and
/// every pair of boundary points of each face joined by its chord.
pub fn dense_graph_distances(surface: &Surface, source: usize, k: usize) -> Vec<f64> {
    let mesh = surface.mesh();
    let n = surface.vertex_count();
    // Node ids: vertices first, then k per edge in the direction of edge_half(e).
    let node_on = |he: usize, i: usize| -> usize {
        let e = mesh.edge_of(he);
        let forward = mesh.edge_half(e) == he;
        let j = if forward { i } else { k - 1 - i };
        n + e * k + j
    };
    let total = n + mesh.edge_count() * k;
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); total];
    for f in 0..mesh.face_count() {
        let tri = mesh.triangle(f);
        let chart = tri.chart();
        let mut pts: Vec<(usize, Vec2)> = Vec::new();
        for s in 0..3 {
            pts.push((tri.v[s], chart[s]));
            let (a, b) = (chart[s], chart[(s + 1) % 3]);
            for i in 0..k {
                let t = (i + 1) as f64 / (k + 1) as f64;
                pts.push((node_on(3 * f + s, i), a + (b - a) * t));
            }
        }
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                let d = (pts[i].1 - pts[j].1).norm();
                adj[pts[i].0].push((pts[j].0, d));
                adj[pts[j].0].push((pts[i].0, d));
            }
        }
    }
    let mut dist = vec![f64::INFINITY; total];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Reverse((Key(0.0), source)));
    while let Some(Reverse((Key(d), u))) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for &(v, w) in &adj[u] {
            let nd = d + w;
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(Reverse((Key(nd), v)));
            }
        }
    }
    dist.truncate(n);
    dist
}

#[derive(Clone, Copy, PartialEq, PartialOrd)]
pub struct Key(pub f64);

impl Eq for Key {}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Squared distances from a random convex combination of the points, so the
/// apex lies inside the hull.
pub fn apex_weights(points: &[Vec3], seed: u64) -> Vec<f64> {
    apex_radii(points, seed).iter().map(|r| r * r).collect()
}

pub fn apex_radii(points: &[Vec3], seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c: Vec<f64> = points.iter().map(|_| rng.gen_range(0.05..1.0)).collect();
    let sum: f64 = c.iter().sum();
    let o = points
        .iter()
        .zip(&c)
        .fold(Vec3::zeros(), |acc, (p, w)| acc + p * (w / sum));
    points.iter().map(|p| (p - o).norm()).collect()
}

/// Squared radii `R + eta_i` with `R` a few edge lengths and `|eta_i|` at
/// most `amp` times the shortest edge.
pub fn perturbed_uniform_weights(surface: &Surface, seed: u64) -> Vec<f64> {
    perturbed_uniform_weights_amp(surface, seed, 1e-3)
}

pub fn perturbed_uniform_weights_amp(surface: &Surface, seed: u64, amp: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mesh = surface.mesh();
    let shortest = (0..mesh.edge_count())
        .map(|e| mesh.edge_length(e))
        .fold(f64::INFINITY, f64::min);
    let base = 4.0 * surface.max_edge_length();
    (0..surface.vertex_count())
        .map(|_| (base + amp * shortest * rng.gen_range(-1.0..1.0)).powi(2))
        .collect()
}

/// The same metric with new vertex `i` standing for old vertex `perm[i]`.
pub fn relabel(metric: &PolyhedralMetric, perm: &[usize]) -> PolyhedralMetric {
    let mut inv = vec![0; perm.len()];
    for (new, &old) in perm.iter().enumerate() {
        inv[old] = new;
    }
    let mut out = metric.clone();
    for t in &mut out.triangles {
        t.v = t.v.map(|v| inv[v]);
    }
    out
}

/// Good solver states along the trajectory of a random hull, taken after
/// each iteration cap in `caps`.
pub fn trajectory_states(
    n: usize,
    seed: u64,
    caps: &[usize],
) -> Vec<(
    Surface,
    alexandrov::delaunay::Triangulation,
    alexandrov::star::RadiusAssignment,
)> {
    use alexandrov::delaunay::delaunay_triangulation;
    use alexandrov::solver::{initial_radii, solve_from, SolverConfig};
    let s = Surface::new(&alexandrov::fixtures::random_sphere_metric(n, seed).unwrap()).unwrap();
    let seed_t = delaunay_triangulation(&s).unwrap();
    let mut out = Vec::new();
    for &cap in caps {
        let config = SolverConfig {
            eps: 1e-9,
            max_iters: cap,
            ..SolverConfig::default()
        };
        let (r, t, _) = initial_radii(&s, &seed_t, &config).unwrap();
        let state = match solve_from(&s, &seed_t, r, t, &config) {
            Ok(o) => (o.triangulation, o.radii),
            Err(e) => {
                let o = e.partial().expect("partial output").clone();
                (o.triangulation, o.radii)
            }
        };
        out.push((s.clone(), state.0, state.1));
    }
    out
}

pub fn tet_lengths(p: &[Vec3; 4]) -> alexandrov::star::TetLengths {
    let d = |i: usize, j: usize| (p[i] - p[j]).norm();
    [d(0, 1), d(0, 2), d(0, 3), d(1, 2), d(1, 3), d(2, 3)]
}

/// Dihedral along AB from the face normals.
pub fn normal_dihedral(p: &[Vec3; 4]) -> f64 {
    let ab = p[1] - p[0];
    let n1 = ab.cross(&(p[2] - p[0]));
    let n2 = ab.cross(&(p[3] - p[0]));
    n1.cross(&n2).norm().atan2(n1.dot(&n2))
}

/// Random tetrahedra with volume not too small against their longest side.
pub fn random_tets(count: usize, seed: u64) -> Vec<[Vec3; 4]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let p: [Vec3; 4] = std::array::from_fn(|_| {
            Vec3::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            )
        });
        let vol = (p[1] - p[0])
            .cross(&(p[2] - p[0]))
            .dot(&(p[3] - p[0]))
            .abs()
            / 6.0;
        let side = tet_lengths(&p).iter().copied().fold(0.0, f64::max);
        if vol > 1e-2 * side.powi(3) {
            out.push(p);
        }
    }
    out
}
