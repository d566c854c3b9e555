//! Delaunay triangulations of a polyhedral metric, unweighted (dual to the
//! Voronoi diagram) and weighted (by lowering vertex weights one at a time and
//! flipping).

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{cross2, Vec2};
use crate::mesh::{side_of, tri_of, TriMesh, Triangle};
use crate::metric::{MetricError, PolyhedralMetric, SideRef, Surface};
use crate::paths::PathError;
use crate::voronoi::{voronoi_diagram, VoronoiDiagram};

#[derive(Debug, Error)]
pub enum DelaunayError {
    #[error("degenerate triangle {0:?}")]
    DegenerateTriangle([f64; 3]),
    #[error("edge {0} does not border two distinct triangles")]
    NotInterior(usize),
    #[error("quadrilateral of edge {0} is not convex")]
    NonConvexQuad(usize),
    #[error("new weight {new} is above the current weight {old}")]
    WeightIncrease { old: f64, new: f64 },
    #[error("point at {param} is off edge of length {length}")]
    OffEdge { param: f64, length: f64 },
    #[error("weight vector has {found} entries, expected {expected}")]
    WeightCount { expected: usize, found: usize },
    #[error("flip precondition violated at edge {edge}: {reason}")]
    Precondition { edge: usize, reason: String },
    #[error("malformed Voronoi diagram: {0}")]
    MalformedDiagram(String),
    #[error(transparent)]
    Paths(#[from] PathError),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeOrigin {
    /// An edge of the input complex.
    Input,
    /// Dual to a Voronoi edge.
    VoronoiDerived,
    /// Diagonal added inside the polygon of a Voronoi vertex of degree > 3.
    DiagonalFill,
    /// Produced by a flip.
    FlipCreated,
}

/// Triangles over the vertex set with stored geodesic side lengths.
#[derive(Clone, Debug, PartialEq)]
pub struct Triangulation {
    mesh: TriMesh,
    origin: Vec<EdgeOrigin>,
}

/// Serialized form: the metric schema with explicit gluing plus weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriangulationDoc {
    pub vertices: usize,
    pub triangles: Vec<Triangle>,
    pub gluing: Vec<[SideRef; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

impl Triangulation {
    pub fn new(mesh: TriMesh, origin: Vec<EdgeOrigin>) -> Self {
        debug_assert_eq!(origin.len(), mesh.edge_count());
        Triangulation { mesh, origin }
    }

    /// The input complex of a surface, as a triangulation.
    pub fn from_surface(surface: &Surface) -> Self {
        let mesh = surface.mesh().clone();
        let origin = vec![EdgeOrigin::Input; mesh.edge_count()];
        Triangulation { mesh, origin }
    }

    pub fn mesh(&self) -> &TriMesh {
        &self.mesh
    }

    pub fn vertex_count(&self) -> usize {
        self.mesh.vertex_count()
    }

    pub fn edge_origin(&self, e: usize) -> EdgeOrigin {
        self.origin[e]
    }

    /// The triangulation as a metric document with explicit gluing.
    pub fn to_metric(&self) -> PolyhedralMetric {
        let mut gluing = Vec::new();
        for he in 0..self.mesh.half_edge_count() {
            let tw = self.mesh.twin(he);
            if he < tw {
                gluing.push([[tri_of(he), side_of(he)], [tri_of(tw), side_of(tw)]]);
            }
        }
        PolyhedralMetric {
            vertex_count: self.mesh.vertex_count(),
            triangles: self.mesh.triangles().to_vec(),
            gluing: Some(gluing),
        }
    }

    pub fn to_doc(&self, weights: Option<&[f64]>) -> TriangulationDoc {
        let metric = self.to_metric();
        TriangulationDoc {
            vertices: metric.vertex_count,
            triangles: metric.triangles,
            gluing: metric.gluing.unwrap_or_default(),
            weights: weights.map(|w| w.to_vec()),
        }
    }

    /// Rebuild from a document; returns the weights if present.
    pub fn from_doc(
        doc: TriangulationDoc,
    ) -> Result<(Triangulation, Option<Vec<f64>>), DelaunayError> {
        let metric = PolyhedralMetric {
            vertex_count: doc.vertices,
            triangles: doc.triangles,
            gluing: Some(doc.gluing),
        };
        metric.check_structure()?;
        let surface = Surface::new(&metric)?;
        if let Some(w) = &doc.weights {
            if w.len() != doc.vertices {
                return Err(DelaunayError::WeightCount {
                    expected: doc.vertices,
                    found: w.len(),
                });
            }
        }
        Ok((Triangulation::from_surface(&surface), doc.weights))
    }

    pub fn to_json(&self, weights: Option<&[f64]>) -> String {
        serde_json::to_string_pretty(&self.to_doc(weights)).expect("triangulation serializes")
    }

    pub fn from_json(text: &str) -> Result<(Triangulation, Option<Vec<f64>>), DelaunayError> {
        let doc: TriangulationDoc =
            serde_json::from_str(text).map_err(|e| MetricError::Malformed(e.to_string()))?;
        Self::from_doc(doc)
    }

    /// Undirected edges as sorted vertex pairs with lengths, sorted; used to
    /// compare triangulations.
    pub fn edge_list(&self) -> Vec<(usize, usize, f64)> {
        let mut out: Vec<(usize, usize, f64)> = (0..self.mesh.edge_count())
            .map(|e| {
                let h = self.mesh.edge_half(e);
                let (a, b) = (self.mesh.origin(h), self.mesh.target(h));
                (a.min(b), a.max(b), self.mesh.edge_length(e))
            })
            .collect();
        out.sort_by(|x, y| x.0.cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.total_cmp(&y.2)));
        out
    }

    /// Positions `[a, b, c, d]` of the quadrilateral around edge `e`: the edge
    /// runs `a -> b` on the x axis, `c` is the apex above it and `d` the apex
    /// of the neighbouring triangle below it.
    pub fn quad(&self, e: usize) -> Result<[Vec2; 4], DelaunayError> {
        let h = self.mesh.edge_half(e);
        self.quad_of(h)
    }

    fn quad_of(&self, h: usize) -> Result<[Vec2; 4], DelaunayError> {
        let g = self.mesh.twin(h);
        if tri_of(g) == tri_of(h) {
            return Err(DelaunayError::NotInterior(self.mesh.edge_of(h)));
        }
        let [a, b, c] = self.mesh.side_chart(h);
        let d = self.mesh.across(g).apply(&self.mesh.side_chart(g)[2]);
        Ok([a, b, c, d])
    }

    /// Flip edge `e` to the other diagonal of its quadrilateral, which must be
    /// strictly convex.
    pub fn flip_edge(&mut self, e: usize) -> Result<(), DelaunayError> {
        let q = self.quad(e)?;
        let quad = [q[0], q[3], q[1], q[2]];
        if diagonal_crossing(&quad).is_none() {
            return Err(DelaunayError::NonConvexQuad(e));
        }
        self.flip(self.mesh.edge_half(e))
    }

    fn flip(&mut self, h: usize) -> Result<(), DelaunayError> {
        let e = self.mesh.edge_of(h);
        let [_, _, c, d] = self.quad_of(h)?;
        // The mesh flips relative to its representative half-edge; the new
        // diagonal length is symmetric so either orientation gives the same.
        self.mesh.flip(e, (c - d).norm());
        self.origin[e] = EdgeOrigin::FlipCreated;
        Ok(())
    }
}

/// Center and power of a triangle under vertex weights.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrianglePower {
    /// In the triangle's chart (corner 0 at the origin, corner 1 on +x).
    pub center: Vec2,
    pub power: f64,
}

/// The point with equal power `|p - v|^2 - w(v)` to three weighted points.
pub fn power_center(p: &[Vec2; 3], w: &[f64; 3]) -> Option<(Vec2, f64)> {
    let e1 = p[1] - p[0];
    let e2 = p[2] - p[0];
    let det = 2.0 * cross2(&e1, &e2);
    let scale = e1.norm_squared().max(e2.norm_squared());
    if det.abs() <= 1e-12 * scale {
        return None;
    }
    // 2 x . e_i = |e_i|^2 + w0 - w_i, with x = center - p0.
    let r1 = e1.norm_squared() + w[0] - w[1];
    let r2 = e2.norm_squared() + w[0] - w[2];
    let x = Vec2::new((r1 * e2.y - r2 * e1.y) / det, (e1.x * r2 - e2.x * r1) / det);
    Some((p[0] + x, x.norm_squared() - w[0]))
}

pub fn triangle_center_power(len: [f64; 3], w: [f64; 3]) -> Result<TrianglePower, DelaunayError> {
    let tri = Triangle { v: [0, 1, 2], len };
    let bad = (0..3).any(|s| len[s] >= len[(s + 1) % 3] + len[(s + 2) % 3] || len[s] <= 0.0);
    if bad {
        return Err(DelaunayError::DegenerateTriangle(len));
    }
    power_center(&tri.chart(), &w)
        .map(|(center, power)| TrianglePower { center, power })
        .ok_or(DelaunayError::DegenerateTriangle(len))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Convexity {
    Strict,
    Equality,
    Violated,
}

/// Relative tolerance of the local convexity test.
pub const CONVEXITY_TOL: f64 = 1e-10;

fn classify(quad: &[Vec2; 4], w: [f64; 4]) -> Result<Convexity, ()> {
    let [a, b, c, d] = quad;
    let (center, power) = power_center(&[*a, *b, *c], &[w[0], w[1], w[2]]).ok_or(())?;
    let pd = (center - d).norm_squared() - w[3];
    let size = [a, b, c, d]
        .iter()
        .flat_map(|p| [a, b, c, d].map(|q| (*p - q).norm_squared()))
        .fold(0.0, f64::max);
    let tol = CONVEXITY_TOL * power.abs().max(pd.abs()).max(size);
    Ok(if pd > power + tol {
        Convexity::Strict
    } else if pd >= power - tol {
        Convexity::Equality
    } else {
        Convexity::Violated
    })
}

/// Local convexity of edge `e` under weights `w`: the fourth vertex of the
/// quadrilateral has power at least the triangle power at the center of the
/// other triangle.
pub fn is_locally_convex(
    t: &Triangulation,
    w: &[f64],
    e: usize,
) -> Result<Convexity, DelaunayError> {
    check_weights(t, w)?;
    let h = t.mesh.edge_half(e);
    let quad = t.quad_of(h)?;
    let m = &t.mesh;
    let weights = [
        w[m.origin(h)],
        w[m.target(h)],
        w[m.apex(h)],
        w[m.apex(m.twin(h))],
    ];
    let len = [
        m.length(h),
        m.length(crate::mesh::next(h)),
        m.length(crate::mesh::prev(h)),
    ];
    classify(&quad, weights).map_err(|_| DelaunayError::DegenerateTriangle(len))
}

/// Classification of every edge (`None` for edges bounded twice by one
/// triangle).
pub fn classify_all(t: &Triangulation, w: &[f64]) -> Result<Vec<Option<Convexity>>, DelaunayError> {
    (0..t.mesh.edge_count())
        .map(|e| match is_locally_convex(t, w, e) {
            Ok(c) => Ok(Some(c)),
            Err(DelaunayError::NotInterior(_)) => Ok(None),
            Err(err) => Err(err),
        })
        .collect()
}

pub fn is_delaunay(t: &Triangulation, w: &[f64]) -> Result<bool, DelaunayError> {
    Ok(classify_all(t, w)?
        .iter()
        .all(|c| *c != Some(Convexity::Violated)))
}

fn check_weights(t: &Triangulation, w: &[f64]) -> Result<(), DelaunayError> {
    if w.len() != t.vertex_count() {
        return Err(DelaunayError::WeightCount {
            expected: t.vertex_count(),
            found: w.len(),
        });
    }
    Ok(())
}

/// Height of the piecewise quadratic lift at the point of segment `XY` at
/// distance `px` from `X`.
pub fn segment_height(len: f64, wx: f64, wy: f64, px: f64) -> f64 {
    let py = len - px;
    (py * wx + px * wy) / len - px * py
}

/// Height at the point of the edge of half-edge `he` at distance `param` from
/// its origin.
pub fn height_at(
    t: &Triangulation,
    w: &[f64],
    he: usize,
    param: f64,
) -> Result<f64, DelaunayError> {
    check_weights(t, w)?;
    let m = &t.mesh;
    let len = m.length(he);
    let slack = 1e-12 * len;
    if !(param >= -slack && param <= len + slack) {
        return Err(DelaunayError::OffEdge { param, length: len });
    }
    Ok(segment_height(
        len,
        w[m.origin(he)],
        w[m.target(he)],
        param.clamp(0.0, len),
    ))
}

/// Intersection of diagonals `WY` and `XZ` of a quadrilateral, as the
/// distances `(PW, PY, PX, PZ)`; `None` unless it is interior to both.
fn diagonal_crossing(q: &[Vec2; 4]) -> Option<(f64, f64, f64, f64, Vec2)> {
    let [pw, px, py, pz] = q;
    let r = py - pw;
    let s = pz - px;
    let denom = cross2(&r, &s);
    let scale = r.norm() * s.norm();
    if denom.abs() <= 1e-12 * scale {
        return None;
    }
    let t = cross2(&(px - pw), &s) / denom;
    let u = cross2(&(px - pw), &r) / denom;
    let eps = 1e-12;
    if t <= eps || t >= 1.0 - eps || u <= eps || u >= 1.0 - eps {
        return None;
    }
    let p = pw + r * t;
    Some((
        (p - pw).norm(),
        (p - py).norm(),
        (p - px).norm(),
        (p - pz).norm(),
        p,
    ))
}

/// The weight of `W` at which quadrilateral `WXYZ` switches diagonals, given
/// the weights of `X`, `Y`, `Z`: diagonal `WY` is preferred iff `w(W) > t`.
pub fn flip_threshold(quad: &[Vec2; 4], wx: f64, wy: f64, wz: f64) -> Result<f64, DelaunayError> {
    let (pw, py, px, pz, _) =
        diagonal_crossing(quad).ok_or(DelaunayError::NonConvexQuad(usize::MAX))?;
    let wy_len = pw + py;
    let xz_len = px + pz;
    let h_xz = (pz * wx + px * wz) / xz_len - px * pz;
    Ok(wy_len / py * (h_xz - pw * wy / wy_len + pw * py))
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct FlipStats {
    pub flips: usize,
    /// Flips skipped because an endpoint would drop below degree 3.
    pub blocked: usize,
    /// Flips that did not strictly raise the height at the diagonal crossing.
    pub height_violations: usize,
    /// Rounds the weight drop was split into.
    pub rounds: usize,
}

impl FlipStats {
    fn absorb(&mut self, other: &FlipStats) {
        self.flips += other.flips;
        self.blocked += other.blocked;
        self.height_violations += other.height_violations;
        self.rounds = self.rounds.max(other.rounds);
    }
}

#[derive(Clone, Copy, Debug)]
struct Pending {
    threshold: f64,
    edge: usize,
    generation: u64,
}

impl PartialEq for Pending {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Pending {}
impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Pending {
    fn cmp(&self, other: &Self) -> Ordering {
        self.threshold
            .total_cmp(&other.threshold)
            .then(other.edge.cmp(&self.edge))
            .then(self.generation.cmp(&other.generation))
    }
}

enum Threshold {
    Value(f64),
    /// The flip would leave an endpoint of degree < 3, or the edge is bounded
    /// twice by one triangle.
    Blocked,
    NonConvex,
}

fn threshold_of(t: &Triangulation, w: &[f64], h: usize) -> Threshold {
    let m = &t.mesh;
    let Ok(q) = t.quad_of(h) else {
        return Threshold::Blocked;
    };
    // W = origin(h), Y = target(h), Z = apex above, X = apex below.
    let quad = [q[0], q[3], q[1], q[2]];
    let (x, y, z) = (m.apex(m.twin(h)), m.target(h), m.apex(h));
    match flip_threshold(&quad, w[x], w[y], w[z]) {
        Err(_) => Threshold::NonConvex,
        Ok(value) => {
            if m.degree(m.origin(h)) <= 3 || m.degree(y) <= 3 {
                Threshold::Blocked
            } else {
                Threshold::Value(value)
            }
        }
    }
}

/// Lower the weight of `v` to `new_weight`, flipping edges at `v` in order of
/// decreasing threshold until the triangulation is Delaunay again. `w` holds
/// the current weights and is updated.
pub fn reweight_vertex(
    t: &mut Triangulation,
    w: &mut [f64],
    v: usize,
    new_weight: f64,
) -> Result<FlipStats, DelaunayError> {
    check_weights(t, w)?;
    if new_weight > w[v] {
        return Err(DelaunayError::WeightIncrease {
            old: w[v],
            new: new_weight,
        });
    }
    let mut stats = FlipStats::default();
    if new_weight == w[v] {
        return Ok(stats);
    }
    w[v] = new_weight;
    let size = t
        .mesh
        .outgoing(v)
        .iter()
        .map(|&h| t.mesh.length(h))
        .fold(0.0, f64::max);
    let wtol = 1e-12 * size * size.max(1.0) + 1e-12 * new_weight.abs();

    let mut generation = vec![0u64; t.mesh.edge_count()];
    let mut heap = BinaryHeap::new();
    let push_all = |t: &Triangulation,
                    w: &[f64],
                    heap: &mut BinaryHeap<Pending>,
                    generation: &mut Vec<u64>| {
        for h in t.mesh.outgoing(v) {
            let e = t.mesh.edge_of(h);
            generation[e] += 1;
            if let Threshold::Value(threshold) = threshold_of(t, w, h) {
                heap.push(Pending {
                    threshold,
                    edge: e,
                    generation: generation[e],
                });
            }
        }
    };
    push_all(t, w, &mut heap, &mut generation);
    let limit = 4 * t.mesh.edge_count() * t.mesh.edge_count() + 16;
    while let Some(top) = heap.pop() {
        if top.generation != generation[top.edge] {
            continue;
        }
        if new_weight >= top.threshold - wtol {
            break;
        }
        // The half-edge of the edge leaving v.
        let h0 = t.mesh.edge_half(top.edge);
        let h = if t.mesh.origin(h0) == v {
            h0
        } else {
            t.mesh.twin(h0)
        };
        if t.mesh.origin(h) != v {
            continue;
        }
        let q = t.quad_of(h)?;
        let quad = [q[0], q[3], q[1], q[2]];
        let m = &t.mesh;
        let (x, y, z) = (m.apex(m.twin(h)), m.target(h), m.apex(h));
        if let Some((pw, py, px, pz, _)) = diagonal_crossing(&quad) {
            let before = segment_height(pw + py, w[v], w[y], pw);
            let after = segment_height(px + pz, w[x], w[z], px);
            if after <= before {
                stats.height_violations += 1;
            }
        }
        t.flip(h)?;
        stats.flips += 1;
        if stats.flips > limit {
            return Err(DelaunayError::Precondition {
                edge: top.edge,
                reason: "flip loop does not terminate".into(),
            });
        }
        push_all(t, w, &mut heap, &mut generation);
    }

    // Anything still violated at v must be explained by a blocked flip.
    for h in t.mesh.outgoing(v) {
        let e = t.mesh.edge_of(h);
        match is_locally_convex(t, w, e) {
            Ok(Convexity::Violated) => match threshold_of(t, w, h) {
                Threshold::NonConvex => {
                    return Err(DelaunayError::Precondition {
                        edge: e,
                        reason: "violated edge has a nonconvex quadrilateral".into(),
                    })
                }
                Threshold::Blocked => stats.blocked += 1,
                Threshold::Value(value) => {
                    return Err(DelaunayError::Precondition {
                        edge: e,
                        reason: format!("violated edge left with threshold {value}"),
                    })
                }
            },
            Ok(_) | Err(DelaunayError::NotInterior(_)) => {}
            Err(err) => return Err(err),
        }
    }
    Ok(stats)
}

/// Most rounds tried by [`lower_weights`] before giving up.
pub const MAX_ROUNDS: usize = 256;

/// Weighted Delaunay triangulation for `w`, starting from any triangulation
/// `seed` of the surface. All weights start at the maximum of `w` and are
/// lowered one vertex at a time.
pub fn weighted_delaunay(
    seed: &Triangulation,
    w: &[f64],
) -> Result<(Triangulation, FlipStats), DelaunayError> {
    check_weights(seed, w)?;
    let top = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    lower_weights(seed, &vec![top; w.len()], w)
}

/// Update a triangulation that is Delaunay for `old` to one Delaunay for
/// `new`, by shifting `new` so no weight increases and then lowering.
pub fn retriangulate(
    t: &Triangulation,
    old: &[f64],
    new: &[f64],
) -> Result<(Triangulation, FlipStats), DelaunayError> {
    check_weights(t, old)?;
    check_weights(t, new)?;
    let shift = old
        .iter()
        .zip(new)
        .map(|(o, n)| n - o)
        .fold(f64::NEG_INFINITY, f64::max);
    let target: Vec<f64> = old
        .iter()
        .zip(new)
        .map(|(o, n)| (n - shift).min(*o))
        .collect();
    lower_weights(t, old, &target)
}

/// Lower every weight from `from` (for which `t` is Delaunay) to `to`,
/// vertex by vertex in index order.
///
/// A single pass can strand a vertex far below its neighbours, where the
/// needed flips have nonconvex quadrilaterals. On such a failure the drop is
/// split into 2, 4, ... rounds, each lowering every vertex by an equal share,
/// up to [`MAX_ROUNDS`]. The returned stats are for the successful attempt.
pub fn lower_weights(
    t: &Triangulation,
    from: &[f64],
    to: &[f64],
) -> Result<(Triangulation, FlipStats), DelaunayError> {
    check_weights(t, from)?;
    check_weights(t, to)?;
    if let Some(v) = (0..to.len()).find(|&v| to[v] > from[v]) {
        return Err(DelaunayError::WeightIncrease {
            old: from[v],
            new: to[v],
        });
    }
    let mut rounds = 1;
    loop {
        match lower_in_rounds(t, from, to, rounds) {
            Ok(out) => return Ok(out),
            Err(e) if rounds >= MAX_ROUNDS => return Err(e),
            Err(DelaunayError::Precondition { .. }) => rounds *= 2,
            Err(e) => return Err(e),
        }
    }
}

fn lower_in_rounds(
    t: &Triangulation,
    from: &[f64],
    to: &[f64],
    rounds: usize,
) -> Result<(Triangulation, FlipStats), DelaunayError> {
    let mut current = from.to_vec();
    let mut out = t.clone();
    let mut stats = FlipStats {
        rounds,
        ..FlipStats::default()
    };
    for k in 1..=rounds {
        let s = k as f64 / rounds as f64;
        for v in 0..to.len() {
            let target = if k == rounds {
                to[v]
            } else {
                from[v] + s * (to[v] - from[v])
            };
            if target < current[v] {
                let r = reweight_vertex(&mut out, &mut current, v, target)?;
                stats.absorb(&r);
            }
        }
    }
    if stats.blocked > 0 {
        if let Some(e) = classify_all(&out, to)?
            .iter()
            .position(|c| *c == Some(Convexity::Violated))
        {
            return Err(DelaunayError::Precondition {
                edge: e,
                reason: "blocked flip left a violated edge".into(),
            });
        }
    }
    Ok((out, stats))
}

/// Delaunay triangulation dual to the Voronoi diagram of all vertices.
pub fn unweighted_delaunay(
    surface: &Surface,
    vor: &VoronoiDiagram,
) -> Result<Triangulation, DelaunayError> {
    let n = surface.vertex_count();
    if vor.cells.len() != n {
        return Err(DelaunayError::MalformedDiagram(format!(
            "{} cells for {} vertices",
            vor.cells.len(),
            n
        )));
    }
    let mut triangles: Vec<Triangle> = Vec::new();
    let mut origin_of_side: Vec<EdgeOrigin> = Vec::new();
    // Half-edge of the boundary chord (vertex, contact index).
    let mut chord_he: Vec<Vec<usize>> = vor.vertices.iter().map(|v| vec![0; v.degree()]).collect();
    let mut twin: Vec<usize> = Vec::new();
    for (vi, vert) in vor.vertices.iter().enumerate() {
        let d = vert.degree();
        if d < 3 {
            return Err(DelaunayError::MalformedDiagram(format!(
                "Voronoi vertex {vi} has degree {d}"
            )));
        }
        let first = triangles.len();
        for k in 1..d - 1 {
            let ids = [0, k, k + 1];
            let pos = ids.map(|i| vert.contacts[i].pos);
            let len = [
                (pos[1] - pos[0]).norm(),
                (pos[2] - pos[1]).norm(),
                (pos[0] - pos[2]).norm(),
            ];
            triangles.push(Triangle {
                v: ids.map(|i| vert.contacts[i].source),
                len,
            });
            twin.extend([usize::MAX; 3]);
            origin_of_side.extend([EdgeOrigin::VoronoiDerived; 3]);
            let t = first + k - 1;
            // Side 1 is the boundary chord k -> k+1.
            chord_he[vi][k] = 3 * t + 1;
            if k == 1 {
                chord_he[vi][0] = 3 * t;
            } else {
                // Diagonal 0 -> k shared with the previous fan triangle.
                let prev_side = 3 * (t - 1) + 2;
                twin[3 * t] = prev_side;
                twin[prev_side] = 3 * t;
                origin_of_side[3 * t] = EdgeOrigin::DiagonalFill;
                origin_of_side[prev_side] = EdgeOrigin::DiagonalFill;
            }
            if k == d - 2 {
                chord_he[vi][d - 1] = 3 * t + 2;
            }
        }
    }
    for edge in &vor.edges {
        let (p, i) = edge.chords[0];
        let (q, j) = edge.chords[1];
        let a = chord_he[p][i];
        let b = chord_he[q][j];
        twin[a] = b;
        twin[b] = a;
    }
    if let Some(he) = twin.iter().position(|&x| x == usize::MAX) {
        return Err(DelaunayError::MalformedDiagram(format!(
            "chord of triangle {} side {} has no partner",
            tri_of(he),
            side_of(he)
        )));
    }
    // Make glued lengths agree exactly.
    for he in 0..twin.len() {
        let tw = twin[he];
        if he < tw {
            let (a, b) = (
                triangles[tri_of(he)].len[side_of(he)],
                triangles[tri_of(tw)].len[side_of(tw)],
            );
            if (a - b).abs() > 1e-7 * a.max(b) {
                return Err(DelaunayError::MalformedDiagram(format!(
                    "chord lengths {a} and {b} disagree"
                )));
            }
            let mean = 0.5 * (a + b);
            triangles[tri_of(he)].len[side_of(he)] = mean;
            triangles[tri_of(tw)].len[side_of(tw)] = mean;
        }
    }
    let mesh = TriMesh::from_parts(n, triangles, twin);
    let mut origin = vec![EdgeOrigin::VoronoiDerived; mesh.edge_count()];
    for he in 0..mesh.half_edge_count() {
        origin[mesh.edge_of(he)] = origin_of_side[he];
    }
    if mesh.edge_count() != 3 * n - 6 || mesh.face_count() != 2 * n - 4 {
        return Err(DelaunayError::MalformedDiagram(format!(
            "{} edges and {} faces for {} vertices",
            mesh.edge_count(),
            mesh.face_count(),
            n
        )));
    }
    let totals = mesh.total_angles();
    for v in 0..n {
        if (totals[v] - surface.cone_angle(v)).abs() > 1e-6 {
            return Err(DelaunayError::MalformedDiagram(format!(
                "total angle {} at vertex {v} differs from cone angle {}",
                totals[v],
                surface.cone_angle(v)
            )));
        }
    }
    Ok(Triangulation::new(mesh, origin))
}

/// Voronoi diagram of all vertices followed by its dual triangulation.
pub fn delaunay_triangulation(surface: &Surface) -> Result<Triangulation, DelaunayError> {
    let all: Vec<usize> = (0..surface.vertex_count()).collect();
    let vor = voronoi_diagram(surface, &all)?;
    unweighted_delaunay(surface, &vor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn unit_square() -> Triangulation {
        // Front (0,1,2),(0,2,3) with back copies: a flat pillow.
        let s = 2f64.sqrt();
        let triangles = vec![
            Triangle {
                v: [0, 1, 2],
                len: [1.0, 1.0, s],
            },
            Triangle {
                v: [0, 2, 3],
                len: [s, 1.0, 1.0],
            },
            Triangle {
                v: [0, 2, 1],
                len: [s, 1.0, 1.0],
            },
            Triangle {
                v: [0, 3, 2],
                len: [1.0, 1.0, s],
            },
        ];
        let mut twin = vec![0; 12];
        for (a, b) in [(2, 3), (0, 8), (1, 7), (4, 10), (5, 9), (6, 11)] {
            twin[a] = b;
            twin[b] = a;
        }
        let mesh = TriMesh::from_parts(4, triangles, twin);
        let n = mesh.edge_count();
        Triangulation::new(mesh, vec![EdgeOrigin::Input; n])
    }

    #[test]
    fn center_power_examples() {
        let p = triangle_center_power([1.0; 3], [0.0; 3]).unwrap();
        assert!((p.power - 1.0 / 3.0).abs() < 1e-12);
        assert!((p.center - Vec2::new(0.5, 3f64.sqrt() / 6.0)).norm() < 1e-12);
        let q = triangle_center_power([1.0; 3], [0.375; 3]).unwrap();
        assert!((q.power + 1.0 / 24.0).abs() < 1e-12);
        let r = triangle_center_power([3.0, 4.0, 5.0], [0.1, 0.7, -0.2]).unwrap();
        let s = triangle_center_power([3.0, 4.0, 5.0], [2.1, 2.7, 1.8]).unwrap();
        assert!((r.power - s.power - 2.0).abs() < 1e-12);
        assert!((r.center - s.center).norm() < 1e-12);
        assert!(triangle_center_power([1.0, 2.0, 3.0], [0.0; 3]).is_err());
    }

    #[test]
    fn square_is_cocircular() {
        let t = unit_square();
        let e = t.mesh().edge_of(2);
        assert_eq!(
            is_locally_convex(&t, &[0.0; 4], e).unwrap(),
            Convexity::Equality
        );
    }

    #[test]
    fn weight_on_diagonal_vertex_decides() {
        let mut t = unit_square();
        let e = t.mesh().edge_of(2);
        let w = [0.1, 0.0, 0.0, 0.0];
        let front = is_locally_convex(&t, &w, e).unwrap();
        t.flip(t.mesh().edge_half(e)).unwrap();
        let flipped = is_locally_convex(&t, &w, e).unwrap();
        // Diagonal 0-2 touches the heavy vertex and wins.
        assert_eq!(front, Convexity::Strict);
        assert_eq!(flipped, Convexity::Violated);
    }

    #[test]
    fn threshold_examples() {
        let sq = [
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(0.0, 1.0),
        ];
        assert!(flip_threshold(&sq, 0.0, 0.0, 0.0).unwrap().abs() < 1e-12);
        let c = 0.37;
        let shifted = flip_threshold(&sq, 0.2 + c, -0.1 + c, 0.05 + c).unwrap();
        let base = flip_threshold(&sq, 0.2, -0.1, 0.05).unwrap();
        assert!((shifted - base - c).abs() < 1e-12);
        let dart = [
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(0.2, 0.2),
            Vec2::new(0.0, 1.0),
        ];
        assert!(flip_threshold(&dart, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn heights() {
        let t = unit_square();
        // Half-edge 0 runs 0 -> 1 with length 1.
        assert!((height_at(&t, &[0.0; 4], 0, 0.5).unwrap() + 0.25).abs() < 1e-15);
        assert!((height_at(&t, &[0.7, 0.0, 0.0, 0.0], 0, 0.0).unwrap() - 0.7).abs() < 1e-15);
        assert!((height_at(&t, &[1.0, 1.0, 0.0, 0.0], 0, 0.3).unwrap() - 0.79).abs() < 1e-12);
        assert!(height_at(&t, &[0.0; 4], 0, 1.5).is_err());
    }

    #[test]
    fn tetrahedron_delaunay_is_input() {
        let s = Surface::new(&fixtures::tetrahedron_metric()).unwrap();
        let t = delaunay_triangulation(&s).unwrap();
        assert_eq!(t.mesh().face_count(), 4);
        assert!(t.edge_list().iter().all(|e| (e.2 - 1.0).abs() < 1e-9));
        for e in 0..6 {
            assert_eq!(
                is_locally_convex(&t, &[0.0; 4], e).unwrap(),
                Convexity::Strict
            );
        }
        let mut t2 = t.clone();
        let mut w = vec![0.0; 4];
        let stats = reweight_vertex(&mut t2, &mut w, 1, -0.9).unwrap();
        assert_eq!(stats.flips, 0);
        assert_eq!(t2.edge_list(), t.edge_list());
    }

    #[test]
    fn cube_delaunay_counts() {
        let s = Surface::new(&fixtures::cube_metric()).unwrap();
        let t = delaunay_triangulation(&s).unwrap();
        assert_eq!(t.mesh().edge_count(), 18);
        assert_eq!(t.mesh().face_count(), 12);
        let diagonals = t
            .edge_list()
            .iter()
            .filter(|e| (e.2 - 2f64.sqrt()).abs() < 1e-9)
            .count();
        assert_eq!(diagonals, 6);
        let fills = (0..18)
            .filter(|&e| t.edge_origin(e) == EdgeOrigin::DiagonalFill)
            .count();
        assert_eq!(fills, 6);
        assert!(is_delaunay(&t, &[0.0; 8]).unwrap());
    }

    #[test]
    fn cube_lowered_corner_pulls_diagonals_away() {
        let s = Surface::new(&fixtures::cube_metric()).unwrap();
        let seed = delaunay_triangulation(&s).unwrap();
        let mut w = vec![1.0; 8];
        w[0] = 0.5;
        let (t, _) = weighted_delaunay(&seed, &w).unwrap();
        assert!(is_delaunay(&t, &w).unwrap());
        // No face diagonal touches the lowered corner.
        for (a, b, len) in t.edge_list() {
            if (len - 2f64.sqrt()).abs() < 1e-9 {
                assert!(a != 0 && b != 0, "diagonal {a}-{b}");
            }
        }
        let mut w2 = vec![0.0; 8];
        w2[0] = -0.5;
        let (t2, _) = weighted_delaunay(&seed, &w2).unwrap();
        assert_eq!(t.edge_list(), t2.edge_list());
    }

    #[test]
    fn uniform_weights_keep_seed() {
        let s = Surface::new(&fixtures::random_sphere_metric(9, 4).unwrap()).unwrap();
        let seed = delaunay_triangulation(&s).unwrap();
        let (t, stats) = weighted_delaunay(&seed, &[2.5; 9]).unwrap();
        assert_eq!(stats.flips, 0);
        assert_eq!(t, seed);
    }

    #[test]
    fn rejects_weight_increase() {
        let s = Surface::new(&fixtures::tetrahedron_metric()).unwrap();
        let mut t = Triangulation::from_surface(&s);
        let mut w = vec![0.0; 4];
        assert!(matches!(
            reweight_vertex(&mut t, &mut w, 0, 1.0),
            Err(DelaunayError::WeightIncrease { .. })
        ));
        assert!(reweight_vertex(&mut t, &mut w, 0, 0.0).unwrap().flips == 0);
    }

    #[test]
    fn json_round_trip() {
        let s = Surface::new(&fixtures::cube_metric()).unwrap();
        let t = delaunay_triangulation(&s).unwrap();
        let w: Vec<f64> = (0..8).map(|i| i as f64 * 0.1).collect();
        let (back, weights) = Triangulation::from_json(&t.to_json(Some(&w))).unwrap();
        assert_eq!(weights.unwrap(), w);
        assert_eq!(back.mesh().triangles(), t.mesh().triangles());
    }
}
