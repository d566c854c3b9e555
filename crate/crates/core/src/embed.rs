//! 3D coordinates from a solved star: unfold the apex tetrahedra breadth
//! first, then collapse the copies of each vertex to their centroid.

use std::collections::VecDeque;
use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::delaunay::Triangulation;
use crate::geom::Vec3;
use crate::mesh::{next, prev, side_of, tri_of};
use crate::star::RadiusAssignment;

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("{found} radii for {expected} vertices")]
    RadiusCount { expected: usize, found: usize },
    #[error("face {0} is not reachable from the root face")]
    Disconnected(usize),
    #[error("cannot place the apex tetrahedron over face {0}")]
    Placement(usize),
    #[error("embedding has {found} points, expected {expected}")]
    CountMismatch { expected: usize, found: usize },
}

/// How one face's tetrahedron was placed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FacePlacement {
    /// Parent face and the half-edge of the parent shared with this face.
    pub parent: Option<(usize, usize)>,
    pub depth: usize,
    /// Placed corners in face order.
    pub corners: [Vec3; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Embedding {
    pub coords: Vec<Vec3>,
    pub apex: Vec3,
    /// Indexed by face.
    pub placements: Vec<FacePlacement>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    /// Largest relative edge-length distortion.
    pub accuracy: f64,
    /// Smallest signed exterior dihedral angle over interior edges, radians.
    pub convexity_slack: f64,
    /// Largest diameter of the placed copies of a vertex.
    pub max_vertex_scatter: f64,
}

/// Point `x` at distances `d` from `p[0]`, `p[1]`, `p[2]`, chosen so that
/// `p[0]` lies below the oriented triangle `p[1], p[2], x`.
fn trilaterate(p: [Vec3; 3], d: [f64; 3]) -> Option<Vec3> {
    let ex = p[1] - p[0];
    let dist = ex.norm();
    if dist <= 0.0 {
        return None;
    }
    let ex = ex / dist;
    let q = p[2] - p[0];
    let i = ex.dot(&q);
    let ey = q - ex * i;
    let j = ey.norm();
    if j <= 1e-12 * dist {
        return None;
    }
    let ey = ey / j;
    let ez = ex.cross(&ey);
    let x = (d[0] * d[0] - d[1] * d[1] + dist * dist) / (2.0 * dist);
    let y = (d[0] * d[0] - d[2] * d[2] + i * i + j * j) / (2.0 * j) - i * x / j;
    let z2 = d[0] * d[0] - x * x - y * y;
    let scale = d[0] * d[0];
    if z2 <= 1e-14 * scale {
        return None;
    }
    let z = z2.sqrt();
    let base = p[0] + ex * x + ey * y;
    let below = |cand: Vec3| {
        let n = (p[2] - p[1]).cross(&(cand - p[1]));
        n.dot(&(p[0] - p[1]))
    };
    let up = base + ez * z;
    let down = base - ez * z;
    Some(if below(up) < below(down) { up } else { down })
}

/// Embed every apex tetrahedron, starting from face 0.
pub fn embed_mesh(
    t: &Triangulation,
    r: &RadiusAssignment,
) -> Result<(Embedding, QualityReport), EmbedError> {
    embed_mesh_from(t, r, 0)
}

pub fn embed_mesh_from(
    t: &Triangulation,
    r: &RadiusAssignment,
    root: usize,
) -> Result<(Embedding, QualityReport), EmbedError> {
    let mesh = t.mesh();
    let n = t.vertex_count();
    if r.len() != n {
        return Err(EmbedError::RadiusCount {
            expected: n,
            found: r.len(),
        });
    }
    let r = &r.r;
    let apex = Vec3::zeros();
    let faces = mesh.face_count();
    let mut placed: Vec<Option<FacePlacement>> = vec![None; faces];

    // Root: first corner on +x, second in the upper xy half-plane.
    let tri = mesh.triangle(root);
    let [a, b, c] = tri.v;
    let pa = Vec3::new(r[a], 0.0, 0.0);
    let bx = (r[a] * r[a] + r[b] * r[b] - tri.len[0] * tri.len[0]) / (2.0 * r[a]);
    let by2 = r[b] * r[b] - bx * bx;
    if by2 <= 0.0 {
        return Err(EmbedError::Placement(root));
    }
    let pb = Vec3::new(bx, by2.sqrt(), 0.0);
    let pc = trilaterate([apex, pa, pb], [r[c], tri.len[2], tri.len[1]])
        .ok_or(EmbedError::Placement(root))?;
    placed[root] = Some(FacePlacement {
        parent: None,
        depth: 0,
        corners: [pa, pb, pc],
    });

    let mut queue = VecDeque::from([root]);
    while let Some(f) = queue.pop_front() {
        let (corners, depth) = {
            let p = placed[f].as_ref().unwrap();
            (p.corners, p.depth)
        };
        for s in 0..3 {
            let h = 3 * f + s;
            let g = mesh.twin(h);
            let nf = tri_of(g);
            if placed[nf].is_some() {
                continue;
            }
            // g runs b -> a in the neighbour, with apex d.
            let (pa, pb) = (corners[s], corners[(s + 1) % 3]);
            let d = mesh.apex(g);
            let pd = trilaterate(
                [apex, pb, pa],
                [r[d], mesh.length(prev(g)), mesh.length(next(g))],
            )
            .ok_or(EmbedError::Placement(nf))?;
            let gs = side_of(g);
            let mut nc = [Vec3::zeros(); 3];
            nc[gs] = pb;
            nc[(gs + 1) % 3] = pa;
            nc[(gs + 2) % 3] = pd;
            placed[nf] = Some(FacePlacement {
                parent: Some((f, h)),
                depth: depth + 1,
                corners: nc,
            });
            queue.push_back(nf);
        }
    }
    let placements: Vec<FacePlacement> = placed
        .into_iter()
        .enumerate()
        .map(|(f, p)| p.ok_or(EmbedError::Disconnected(f)))
        .collect::<Result<_, _>>()?;

    let copies = vertex_copies(t, &placements);
    let coords = copies
        .iter()
        .map(|c| c.iter().fold(Vec3::zeros(), |acc, p| acc + p) / c.len().max(1) as f64)
        .collect();
    let emb = Embedding {
        coords,
        apex,
        placements,
    };
    let report = embedding_quality(t, &emb)?;
    Ok((emb, report))
}

fn vertex_copies(t: &Triangulation, placements: &[FacePlacement]) -> Vec<Vec<Vec3>> {
    let mut copies = vec![Vec::new(); t.vertex_count()];
    for (f, p) in placements.iter().enumerate() {
        let v = t.mesh().triangle(f).v;
        for k in 0..3 {
            copies[v[k]].push(p.corners[k]);
        }
    }
    copies
}

/// Signed exterior dihedral angle along the edge of half-edge `h`, from the
/// final coordinates; negative for a reflex edge.
pub fn exterior_angle(t: &Triangulation, coords: &[Vec3], h: usize) -> f64 {
    let m = t.mesh();
    let g = m.twin(h);
    let (i, j, k, l) = (m.origin(h), m.target(h), m.apex(h), m.apex(g));
    let (vi, vj, vk, vl) = (coords[i], coords[j], coords[k], coords[l]);
    let n1 = (vj - vi).cross(&(vk - vi));
    let n2 = (vi - vj).cross(&(vl - vj));
    let cos = n1.dot(&n2) / (n1.norm() * n2.norm());
    let angle = cos.clamp(-1.0, 1.0).acos();
    // The tetrahedron l, i, j, k has positive signed volume at a convex edge.
    let volume = (vi - vl).dot(&(vj - vl).cross(&(vk - vl)));
    if volume >= 0.0 {
        angle
    } else {
        -angle
    }
}

pub fn embedding_quality(t: &Triangulation, emb: &Embedding) -> Result<QualityReport, EmbedError> {
    let m = t.mesh();
    if emb.coords.len() != t.vertex_count() || emb.placements.len() != m.face_count() {
        return Err(EmbedError::CountMismatch {
            expected: t.vertex_count(),
            found: emb.coords.len(),
        });
    }
    let mut accuracy: f64 = 0.0;
    let mut slack = PI;
    for e in 0..m.edge_count() {
        let h = m.edge_half(e);
        let placed = (emb.coords[m.origin(h)] - emb.coords[m.target(h)]).norm();
        accuracy = accuracy.max((placed / m.length(h) - 1.0).abs());
        if tri_of(h) != tri_of(m.twin(h)) {
            slack = slack.min(exterior_angle(t, &emb.coords, h));
        }
    }
    let mut scatter: f64 = 0.0;
    for c in vertex_copies(t, &emb.placements) {
        for (a, p) in c.iter().enumerate() {
            for q in &c[a + 1..] {
                scatter = scatter.max((p - q).norm());
            }
        }
    }
    Ok(QualityReport {
        accuracy,
        convexity_slack: slack,
        max_vertex_scatter: scatter,
    })
}

fn sorted_distances(points: &[Vec3]) -> Vec<f64> {
    let mut d: Vec<f64> = points
        .iter()
        .enumerate()
        .flat_map(|(i, p)| points[i + 1..].iter().map(move |q| (p - q).norm()))
        .collect();
    d.sort_by(f64::total_cmp);
    d
}

/// Largest relative mismatch between the sorted pairwise-distance multisets
/// of two point sets, relative to the smaller of each matched pair.
pub fn congruence_check(points: &[Vec3], reference: &[Vec3]) -> Result<f64, EmbedError> {
    if points.len() != reference.len() {
        return Err(EmbedError::CountMismatch {
            expected: reference.len(),
            found: points.len(),
        });
    }
    let a = sorted_distances(points);
    let b = sorted_distances(reference);
    Ok(a.iter()
        .zip(&b)
        .map(|(x, y)| {
            let lo = x.min(*y);
            if lo > 0.0 {
                (x - y).abs() / lo
            } else if x == y {
                0.0
            } else {
                f64::INFINITY
            }
        })
        .fold(0.0, f64::max))
}

/// Text mesh: `v x y z` per vertex, then `f a b c` (1-based) per triangle.
pub fn export_obj(emb: &Embedding, t: &Triangulation) -> Vec<u8> {
    let mut s = String::new();
    for p in &emb.coords {
        writeln!(s, "v {} {} {}", p.x, p.y, p.z).unwrap();
    }
    for tri in t.mesh().triangles() {
        writeln!(s, "f {} {} {}", tri.v[0] + 1, tri.v[1] + 1, tri.v[2] + 1).unwrap();
    }
    s.into_bytes()
}
