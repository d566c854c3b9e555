//! Convex polyhedral metrics: parsing, validation, defects and size parameters.

use std::collections::{HashMap, VecDeque};
use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mesh::{prev, side_of, tri_of, TriMesh, Triangle};

const TWO_PI: f64 = 2.0 * PI;
/// Relative tolerance for equalities checked during validation.
pub const VALIDATION_TOL: f64 = 1e-9;

/// A side of a triangle: `(triangle index, side index)`.
pub type SideRef = [usize; 2];

/// Triangles with side lengths, glued along their sides into a sphere.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyhedralMetric {
    #[serde(rename = "vertices")]
    pub vertex_count: usize,
    pub triangles: Vec<Triangle>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gluing: Option<Vec<[SideRef; 2]>>,
}

#[derive(Debug, Error)]
pub enum MetricError {
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error("triangle {triangle}: vertex index {index} out of range")]
    IndexOutOfRange { triangle: usize, index: usize },
    #[error("triangle {triangle}: nonpositive length {length}")]
    NonpositiveLength { triangle: usize, length: f64 },
    #[error("invalid metric: {0}")]
    Invalid(ValidationReport),
    #[error("distance table has {found} rows, expected {expected}")]
    MissingDistances { expected: usize, found: usize },
    #[error("hull: {0}")]
    Hull(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ViolationKind {
    BadGluing,
    EdgeLengthMismatch,
    TriangleInequality,
    NonOrientable,
    EulerCharacteristic,
    Disconnected,
    UnusedVertex,
    NonManifoldVertex,
    NonpositiveDefect,
}

impl ViolationKind {
    pub fn label(self) -> &'static str {
        match self {
            ViolationKind::BadGluing => "bad gluing",
            ViolationKind::EdgeLengthMismatch => "edge length mismatch",
            ViolationKind::TriangleInequality => "triangle inequality",
            ViolationKind::NonOrientable => "non-orientable",
            ViolationKind::EulerCharacteristic => "euler characteristic",
            ViolationKind::Disconnected => "disconnected",
            ViolationKind::UnusedVertex => "unused vertex",
            ViolationKind::NonManifoldVertex => "non-manifold vertex",
            ViolationKind::NonpositiveDefect => "nonpositive defect",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }

    fn push(&mut self, kind: ViolationKind, message: String) {
        self.violations.push(Violation { kind, message });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .violations
            .iter()
            .map(|v| format!("{}: {}", v.kind.label(), v.message))
            .collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Per-vertex angle deficits `2π - total angle`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DefectVector {
    pub delta: Vec<f64>,
}

impl DefectVector {
    pub fn total(&self) -> f64 {
        self.delta.iter().sum()
    }

    pub fn min(&self) -> f64 {
        self.delta.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.delta.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricParams {
    pub n: usize,
    /// Smallest surface distance between two vertices.
    pub ell: f64,
    /// Longest input edge.
    #[serde(rename = "L")]
    pub max_edge: f64,
    /// Largest surface distance between two vertices.
    #[serde(rename = "D")]
    pub diameter: f64,
    /// `max(D, L) / ell`.
    #[serde(rename = "S")]
    pub spread: f64,
    pub eps1: f64,
    pub eps8: f64,
}

impl PolyhedralMetric {
    /// Parse a metric document, performing structural checks only.
    pub fn from_json(text: &str) -> Result<Self, MetricError> {
        let metric: PolyhedralMetric =
            serde_json::from_str(text).map_err(|e| MetricError::Malformed(e.to_string()))?;
        metric.check_structure()?;
        Ok(metric)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("metric serializes")
    }

    pub fn check_structure(&self) -> Result<(), MetricError> {
        for (t, tri) in self.triangles.iter().enumerate() {
            if let Some(&index) = tri.v.iter().find(|&&i| i >= self.vertex_count) {
                return Err(MetricError::IndexOutOfRange { triangle: t, index });
            }
            if let Some(&length) = tri.len.iter().find(|&&l| !(l > 0.0 && l.is_finite())) {
                return Err(MetricError::NonpositiveLength {
                    triangle: t,
                    length,
                });
            }
        }
        if let Some(gluing) = &self.gluing {
            for pair in gluing {
                for &[t, s] in pair {
                    if t >= self.triangles.len() || s >= 3 {
                        return Err(MetricError::Malformed(format!(
                            "gluing references side [{t}, {s}] that does not exist"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Check every Alexandrov condition; an empty report means the metric is a
    /// valid convex polyhedral metric on the sphere.
    pub fn validate(&self) -> ValidationReport {
        match self.assemble() {
            Ok((_, report)) => report,
            Err(report) => report,
        }
    }

    fn twin_map(&self, report: &mut ValidationReport) -> Option<Vec<usize>> {
        let sides = 3 * self.triangles.len();
        let mut twin = vec![usize::MAX; sides];
        let endpoints = |he: usize| {
            let t = &self.triangles[tri_of(he)];
            (t.v[side_of(he)], t.v[(side_of(he) + 1) % 3])
        };
        match &self.gluing {
            Some(gluing) => {
                for pair in gluing {
                    let a = 3 * pair[0][0] + pair[0][1];
                    let b = 3 * pair[1][0] + pair[1][1];
                    if a == b || twin[a] != usize::MAX || twin[b] != usize::MAX {
                        report.push(
                            ViolationKind::BadGluing,
                            format!("side {:?} or {:?} glued more than once", pair[0], pair[1]),
                        );
                        return None;
                    }
                    let (pa, qa) = endpoints(a);
                    let (pb, qb) = endpoints(b);
                    if !((pa == qb && qa == pb) || (pa == pb && qa == qb)) {
                        report.push(
                            ViolationKind::BadGluing,
                            format!(
                                "sides {:?} and {:?} join different vertices",
                                pair[0], pair[1]
                            ),
                        );
                        return None;
                    }
                    twin[a] = b;
                    twin[b] = a;
                }
            }
            None => {
                let mut by_pair: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
                for he in 0..sides {
                    let (p, q) = endpoints(he);
                    by_pair.entry((p.min(q), p.max(q))).or_default().push(he);
                }
                let mut keys: Vec<_> = by_pair.keys().copied().collect();
                keys.sort_unstable();
                for key in keys {
                    let list = &by_pair[&key];
                    if list.len() != 2 {
                        report.push(
                            ViolationKind::BadGluing,
                            format!(
                                "vertex pair {:?} bounds {} sides; gluing cannot be inferred",
                                key,
                                list.len()
                            ),
                        );
                        return None;
                    }
                    twin[list[0]] = list[1];
                    twin[list[1]] = list[0];
                }
            }
        }
        if let Some(he) = twin.iter().position(|&t| t == usize::MAX) {
            report.push(
                ViolationKind::BadGluing,
                format!("side [{}, {}] is not glued", tri_of(he), side_of(he)),
            );
            return None;
        }
        Some(twin)
    }

    /// Resolve gluing and orientation, returning the oriented mesh and the report
    /// of violated invariants (empty iff valid).
    fn assemble(&self) -> Result<(TriMesh, ValidationReport), ValidationReport> {
        let mut report = ValidationReport::default();
        if self.check_structure().is_err() {
            report.push(ViolationKind::BadGluing, "structurally malformed".into());
            return Err(report);
        }
        if self.triangles.is_empty() {
            report.push(ViolationKind::EulerCharacteristic, "no triangles".into());
            return Err(report);
        }
        for (t, tri) in self.triangles.iter().enumerate() {
            for s in 0..3 {
                let l = tri.len[s];
                let others = tri.len[(s + 1) % 3] + tri.len[(s + 2) % 3];
                if l >= others * (1.0 - 1e-12) {
                    report.push(
                        ViolationKind::TriangleInequality,
                        format!(
                            "triangle {t}: side {s} of length {l} is not shorter than {others}"
                        ),
                    );
                }
            }
        }
        let Some(twin) = self.twin_map(&mut report) else {
            return Err(report);
        };
        for he in 0..twin.len() {
            let other = twin[he];
            if he < other {
                let a = self.triangles[tri_of(he)].len[side_of(he)];
                let b = self.triangles[tri_of(other)].len[side_of(other)];
                if (a - b).abs() > VALIDATION_TOL * a.max(b) {
                    report.push(
                        ViolationKind::EdgeLengthMismatch,
                        format!(
                            "edge length mismatch: side [{}, {}] has {a}, side [{}, {}] has {b}",
                            tri_of(he),
                            side_of(he),
                            tri_of(other),
                            side_of(other)
                        ),
                    );
                }
            }
        }

        // Orient triangles consistently by breadth-first search.
        let nt = self.triangles.len();
        let mut flipped: Vec<Option<bool>> = vec![None; nt];
        let mut components = 0;
        for root in 0..nt {
            if flipped[root].is_some() {
                continue;
            }
            components += 1;
            flipped[root] = Some(false);
            let mut queue = VecDeque::from([root]);
            while let Some(t) = queue.pop_front() {
                let ft = flipped[t].unwrap();
                for s in 0..3 {
                    let he = 3 * t + s;
                    let other = twin[he];
                    let u = tri_of(other);
                    let tv = &self.triangles[t].v;
                    let uv = &self.triangles[u].v;
                    let (p, q) = (tv[s], tv[(s + 1) % 3]);
                    let (a, b) = (uv[side_of(other)], uv[(side_of(other) + 1) % 3]);
                    let opposite = p == b && q == a;
                    let need = if opposite { ft } else { !ft };
                    match flipped[u] {
                        None => {
                            flipped[u] = Some(need);
                            queue.push_back(u);
                        }
                        Some(fu) if fu != need && p != q => {
                            report.push(
                                ViolationKind::NonOrientable,
                                format!("triangles {t} and {u} cannot be oriented consistently"),
                            );
                            return Err(report);
                        }
                        _ => {}
                    }
                }
            }
        }
        if components > 1 {
            report.push(
                ViolationKind::Disconnected,
                format!("triangle adjacency has {components} components"),
            );
        }

        // Apply the orientation: reversing (v0, v1, v2) to (v0, v2, v1) maps
        // sides 0, 1, 2 to 2, 1, 0.
        let side_map = |t: usize, s: usize| -> usize {
            if flipped[t] == Some(true) {
                2 - s
            } else {
                s
            }
        };
        let triangles: Vec<Triangle> = self
            .triangles
            .iter()
            .enumerate()
            .map(|(t, tri)| {
                if flipped[t] == Some(true) {
                    Triangle {
                        v: [tri.v[0], tri.v[2], tri.v[1]],
                        len: [tri.len[2], tri.len[1], tri.len[0]],
                    }
                } else {
                    tri.clone()
                }
            })
            .collect();
        let mut oriented_twin = vec![0; twin.len()];
        for he in 0..twin.len() {
            let (t, s) = (tri_of(he), side_of(he));
            let other = twin[he];
            oriented_twin[3 * t + side_map(t, s)] =
                3 * tri_of(other) + side_map(tri_of(other), side_of(other));
        }
        // Use the mean of the two stored lengths for each glued pair so that the
        // mesh is exactly symmetric.
        let mut triangles = triangles;
        for he in 0..oriented_twin.len() {
            let other = oriented_twin[he];
            if he < other {
                let a = triangles[tri_of(he)].len[side_of(he)];
                let b = triangles[tri_of(other)].len[side_of(other)];
                let m = 0.5 * (a + b);
                triangles[tri_of(he)].len[side_of(he)] = m;
                triangles[tri_of(other)].len[side_of(other)] = m;
            }
        }
        let mesh = TriMesh::from_parts(self.vertex_count, triangles, oriented_twin);

        // Vertex fans and Euler characteristic.
        let mut used = vec![false; self.vertex_count];
        for tri in mesh.triangles() {
            for &v in &tri.v {
                used[v] = true;
            }
        }
        for (v, &u) in used.iter().enumerate() {
            if !u {
                report.push(
                    ViolationKind::UnusedVertex,
                    format!("vertex {v} is in no triangle"),
                );
            }
        }
        let mut corners_seen = vec![false; mesh.half_edge_count()];
        let mut fans = vec![0usize; self.vertex_count];
        for he in 0..mesh.half_edge_count() {
            if corners_seen[he] {
                continue;
            }
            let v = mesh.origin(he);
            fans[v] += 1;
            let mut h = he;
            loop {
                corners_seen[h] = true;
                h = mesh.twin(prev(h));
                if h == he || corners_seen[h] {
                    break;
                }
            }
        }
        for (v, &count) in fans.iter().enumerate() {
            if count > 1 {
                report.push(
                    ViolationKind::NonManifoldVertex,
                    format!("vertex {v} has {count} separate fans"),
                );
            }
        }
        let chi = self.vertex_count as i64 - mesh.edge_count() as i64 + mesh.face_count() as i64;
        if chi != 2 {
            report.push(
                ViolationKind::EulerCharacteristic,
                format!(
                    "V - E + F = {} - {} + {} = {chi}, expected 2",
                    self.vertex_count,
                    mesh.edge_count(),
                    mesh.face_count()
                ),
            );
        }
        let totals = mesh.total_angles();
        for (v, &total) in totals.iter().enumerate() {
            if used[v] && total >= TWO_PI * (1.0 - 1e-12) {
                report.push(
                    ViolationKind::NonpositiveDefect,
                    format!("nonpositive defect at vertex {v}: total angle {total}"),
                );
            }
        }
        Ok((mesh, report))
    }
}

/// A validated metric with its oriented mesh and per-vertex angular data.
#[derive(Clone, Debug)]
pub struct Surface {
    metric: PolyhedralMetric,
    mesh: TriMesh,
    defects: DefectVector,
    cone_angle: Vec<f64>,
    /// Angular coordinate (around `origin(he)`) of the direction along `he`.
    corner_start: Vec<f64>,
}

impl Surface {
    pub fn new(metric: &PolyhedralMetric) -> Result<Self, MetricError> {
        let (mesh, report) = metric.assemble().map_err(MetricError::Invalid)?;
        if !report.is_valid() {
            return Err(MetricError::Invalid(report));
        }
        let cone_angle = mesh.total_angles();
        let defects = DefectVector {
            delta: cone_angle.iter().map(|a| TWO_PI - a).collect(),
        };
        let mut corner_start = vec![0.0; mesh.half_edge_count()];
        for v in 0..mesh.vertex_count() {
            let mut acc = 0.0;
            for h in mesh.outgoing(v) {
                corner_start[h] = acc;
                acc += mesh.corner_angle(h);
            }
        }
        Ok(Surface {
            metric: metric.clone(),
            mesh,
            defects,
            cone_angle,
            corner_start,
        })
    }

    pub fn metric(&self) -> &PolyhedralMetric {
        &self.metric
    }

    pub fn mesh(&self) -> &TriMesh {
        &self.mesh
    }

    pub fn vertex_count(&self) -> usize {
        self.mesh.vertex_count()
    }

    pub fn defects(&self) -> &DefectVector {
        &self.defects
    }

    pub fn cone_angle(&self, v: usize) -> f64 {
        self.cone_angle[v]
    }

    pub fn corner_start(&self, he: usize) -> f64 {
        self.corner_start[he]
    }

    pub fn max_edge_length(&self) -> f64 {
        self.mesh
            .triangles()
            .iter()
            .flat_map(|t| t.len)
            .fold(0.0, f64::max)
    }
}

/// Angle deficits of a valid metric.
pub fn compute_defects(metric: &PolyhedralMetric) -> Result<DefectVector, MetricError> {
    Ok(Surface::new(metric)?.defects().clone())
}

/// Size parameters of a metric given all vertex-pair surface distances.
pub fn metric_params(surface: &Surface, dist: &[Vec<f64>]) -> Result<MetricParams, MetricError> {
    let n = surface.vertex_count();
    if dist.len() != n || dist.iter().any(|row| row.len() != n) {
        return Err(MetricError::MissingDistances {
            expected: n,
            found: dist.len(),
        });
    }
    let mut ell = f64::INFINITY;
    let mut diameter: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let d = 0.5 * (dist[i][j] + dist[j][i]);
            ell = ell.min(d);
            diameter = diameter.max(d);
        }
    }
    let max_edge = surface.max_edge_length();
    let delta = surface.defects();
    Ok(MetricParams {
        n,
        ell,
        max_edge,
        diameter,
        spread: diameter.max(max_edge) / ell,
        eps1: delta.min(),
        eps8: TWO_PI - delta.max(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn tetra_doc() -> &'static str {
        r#"{"vertices":4,"triangles":[
            {"v":[0,1,2],"len":[1,1,1]},
            {"v":[0,3,1],"len":[1,1,1]},
            {"v":[1,3,2],"len":[1,1,1]},
            {"v":[0,2,3],"len":[1,1,1]}]}"#
    }

    #[test]
    fn parses_regular_tetrahedron() {
        let m = PolyhedralMetric::from_json(tetra_doc()).unwrap();
        assert_eq!(m.vertex_count, 4);
        assert_eq!(m.triangles.len(), 4);
        assert!(m.validate().is_valid());
    }

    #[test]
    fn rejects_zero_length() {
        let doc = tetra_doc().replacen("[1,1,1]", "[1,0,1]", 1);
        let err = PolyhedralMetric::from_json(&doc).unwrap_err();
        assert!(matches!(err, MetricError::NonpositiveLength { .. }));
        assert!(err.to_string().contains("nonpositive length"));
    }

    #[test]
    fn rejects_out_of_range_index() {
        let doc = tetra_doc().replacen("[0,1,2]", "[0,1,7]", 1);
        assert!(matches!(
            PolyhedralMetric::from_json(&doc),
            Err(MetricError::IndexOutOfRange { index: 7, .. })
        ));
    }

    #[test]
    fn malformed_document() {
        assert!(matches!(
            PolyhedralMetric::from_json("{\"vertices\": 3}"),
            Err(MetricError::Malformed(_))
        ));
    }

    #[test]
    fn cube_document_parses() {
        let cube = fixtures::cube_metric();
        let m = PolyhedralMetric::from_json(&cube.to_json()).unwrap();
        assert_eq!(m.vertex_count, 8);
        assert_eq!(m.triangles.len(), 12);
    }

    #[test]
    fn detects_edge_length_mismatch() {
        let mut m = PolyhedralMetric::from_json(tetra_doc()).unwrap();
        // Edge {0,1} is side 0 of triangle 0 and side 2 of triangle 1.
        m.triangles[0].len[0] = 1.1;
        let report = m.validate();
        assert!(report.has(ViolationKind::EdgeLengthMismatch), "{report}");
        assert!(report.to_string().contains("edge length mismatch"));
    }

    #[test]
    fn detects_nonpositive_defect() {
        // A square pyramid whose apex total angle is 2π + 0.1.
        let theta = (TWO_PI + 0.1) / 4.0;
        // Isosceles triangles apex angle theta with legs 1: base = 2 sin(theta/2).
        let base = 2.0 * (theta / 2.0).sin();
        let diag = base * 2f64.sqrt();
        let m = PolyhedralMetric {
            vertex_count: 5,
            triangles: vec![
                Triangle {
                    v: [0, 1, 2],
                    len: [1.0, base, 1.0],
                },
                Triangle {
                    v: [0, 2, 3],
                    len: [1.0, base, 1.0],
                },
                Triangle {
                    v: [0, 3, 4],
                    len: [1.0, base, 1.0],
                },
                Triangle {
                    v: [0, 4, 1],
                    len: [1.0, base, 1.0],
                },
                Triangle {
                    v: [1, 4, 3],
                    len: [base, base, diag],
                },
                Triangle {
                    v: [1, 3, 2],
                    len: [diag, base, base],
                },
            ],
            gluing: None,
        };
        let report = m.validate();
        assert!(report.has(ViolationKind::NonpositiveDefect), "{report}");
    }

    #[test]
    fn detects_bad_topology() {
        let mut m = PolyhedralMetric::from_json(tetra_doc()).unwrap();
        m.triangles.pop();
        assert!(m.validate().has(ViolationKind::BadGluing));
        let two = PolyhedralMetric {
            vertex_count: 3,
            triangles: vec![
                Triangle {
                    v: [0, 1, 2],
                    len: [1.0; 3],
                },
                Triangle {
                    v: [0, 2, 1],
                    len: [1.0; 3],
                },
            ],
            gluing: None,
        };
        // A doubled triangle has V - E + F = 3 - 3 + 2 = 2 but zero-area cone
        // angles of 2π/3 each: it is valid topologically, with defect 4π/3 each.
        assert!(two.validate().is_valid());
    }

    #[test]
    fn reorients_inconsistent_input() {
        let mut m = PolyhedralMetric::from_json(tetra_doc()).unwrap();
        // Reverse triangle 2 while keeping its lengths attached to the same sides.
        let t = &m.triangles[2];
        m.triangles[2] = Triangle {
            v: [t.v[0], t.v[2], t.v[1]],
            len: [t.len[2], t.len[1], t.len[0]],
        };
        assert!(m.validate().is_valid());
        let surface = Surface::new(&m).unwrap();
        for he in 0..surface.mesh().half_edge_count() {
            let tw = surface.mesh().twin(he);
            assert_eq!(surface.mesh().origin(he), surface.mesh().target(tw));
        }
    }

    #[test]
    fn explicit_gluing_supports_multigraph_edges() {
        // Doubled triangle given with explicit gluing.
        let m = PolyhedralMetric {
            vertex_count: 3,
            triangles: vec![
                Triangle {
                    v: [0, 1, 2],
                    len: [1.0, 1.2, 0.9],
                },
                Triangle {
                    v: [0, 2, 1],
                    len: [0.9, 1.2, 1.0],
                },
            ],
            gluing: Some(vec![[[0, 0], [1, 2]], [[0, 1], [1, 1]], [[0, 2], [1, 0]]]),
        };
        assert!(m.validate().is_valid());
        let d = compute_defects(&m).unwrap();
        assert!((d.total() - 4.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn defects_of_fixtures() {
        let tet = compute_defects(&fixtures::tetrahedron_metric()).unwrap();
        for d in &tet.delta {
            assert!((d - PI).abs() < 1e-12);
        }
        let cube = compute_defects(&fixtures::cube_metric()).unwrap();
        for d in &cube.delta {
            assert!((d - PI / 2.0).abs() < 1e-12);
        }
        let random = fixtures::random_sphere_metric(10, 3).unwrap();
        assert!((compute_defects(&random).unwrap().total() - 4.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn corner_angles_sum_to_pi() {
        let m = fixtures::random_sphere_metric(10, 11).unwrap();
        for tri in &m.triangles {
            let angles = [tri.angle(0), tri.angle(1), tri.angle(2)];
            assert!(angles.iter().all(|&a| a > 0.0 && a < PI));
            assert!((angles.iter().sum::<f64>() - PI).abs() < 1e-12);
        }
    }

    #[test]
    fn params_from_distance_table() {
        let s = Surface::new(&fixtures::tetrahedron_metric()).unwrap();
        let dist = vec![vec![0.0, 1.0, 1.0, 1.0]; 4]
            .into_iter()
            .enumerate()
            .map(|(i, _)| (0..4).map(|j| if i == j { 0.0 } else { 1.0 }).collect())
            .collect::<Vec<Vec<f64>>>();
        let p = metric_params(&s, &dist).unwrap();
        assert_eq!(
            (p.ell, p.max_edge, p.diameter, p.spread),
            (1.0, 1.0, 1.0, 1.0)
        );
        assert!((p.eps1 - PI).abs() < 1e-12 && (p.eps8 - PI).abs() < 1e-12);
        assert!(metric_params(&s, &dist[..2]).is_err());
    }
}
