//! Surface Voronoi diagram of the vertex set.
//!
//! Voronoi vertices are found face by face: within one face chart every
//! shortest path from a source is a straight segment from one of the unfolded
//! source copies ("sites") visible in that face, so a Voronoi vertex is a
//! circumcenter of three sites whose common distance equals the field minimum.
//! Each Voronoi vertex keeps its contacts: the sites realizing the minimum,
//! counter-clockwise around it, with the direction at which each contact's
//! shortest path leaves its source vertex. Voronoi edges are recovered by
//! matching the chords between consecutive contacts of two Voronoi vertices.

use serde::Serialize;

use crate::geom::{arg, circumcenter, wrap_angle, wrap_pi, Rigid2, Vec2};
use crate::metric::Surface;
use crate::paths::{run_mmp, DistanceField, FaceSite, PathError};

/// A source touching the empty disk of a Voronoi vertex.
#[derive(Clone, Debug, Serialize)]
pub struct VoronoiContact {
    pub source: usize,
    /// Position of the unfolded source in the chart of the vertex's face.
    pub pos: Vec2,
    /// Angular coordinate at `source` of the shortest path to the vertex, in
    /// `[0, cone angle)`.
    pub angle: f64,
}

impl VoronoiContact {
    /// Angular coordinate at the source of the direction towards chart point
    /// `q`, for a `q` seen from the source within a half turn of the vertex.
    pub fn angle_towards(&self, vertex_pos: &Vec2, q: &Vec2, cone: f64) -> f64 {
        let turn = wrap_pi(arg(&(q - self.pos)) - arg(&(vertex_pos - self.pos)));
        wrap_angle(self.angle + turn, cone)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VoronoiVertex {
    pub face: usize,
    /// Position in the face chart.
    pub pos: Vec2,
    /// Common distance to the contacts.
    pub radius: f64,
    /// Counter-clockwise around `pos`, starting at the lowest source id.
    pub contacts: Vec<VoronoiContact>,
}

impl VoronoiVertex {
    pub fn degree(&self) -> usize {
        self.contacts.len()
    }
}

/// A straight piece of a Voronoi edge inside one face, in that face's chart.
#[derive(Clone, Debug, Serialize)]
pub struct VoronoiArc {
    pub face: usize,
    pub from: Vec2,
    pub to: Vec2,
}

/// A boundary between the cells of two sources, running between two Voronoi
/// vertices.
#[derive(Clone, Debug, Serialize)]
pub struct VoronoiEdge {
    /// `cells[0]` lies to the left when walking from `ends[0]` to `ends[1]`.
    pub cells: [usize; 2],
    pub ends: [usize; 2],
    /// `(vertex, contact index)` of the chord dual to this edge at each end:
    /// the chord runs from contact `i` to contact `i + 1` of that vertex.
    pub chords: [(usize, usize); 2],
    pub arcs: Vec<VoronoiArc>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VoronoiCell {
    pub source: usize,
    /// Voronoi vertices on the cell boundary, ordered by angle at the source.
    pub vertices: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VoronoiDiagram {
    pub cells: Vec<VoronoiCell>,
    pub edges: Vec<VoronoiEdge>,
    pub vertices: Vec<VoronoiVertex>,
}

struct Site {
    pos: Vec2,
    source: usize,
    gates: Vec<FaceSite>,
}

impl Site {
    fn distance_to(&self, q: &Vec2, slack: f64) -> Option<f64> {
        self.gates
            .iter()
            .filter_map(|g| g.distance_to(q, slack))
            .min_by(f64::total_cmp)
    }
}

/// Angular difference on a circle of circumference `period`.
fn circular_gap(a: f64, b: f64, period: f64) -> f64 {
    let d = wrap_angle(a - b, period);
    d.min(period - d)
}

/// Voronoi diagram with all vertices as sources, or the trivial diagram of a
/// single source.
pub fn voronoi_diagram(surface: &Surface, sources: &[usize]) -> Result<VoronoiDiagram, PathError> {
    let n = surface.vertex_count();
    if sources.len() == 1 {
        run_mmp(surface, sources)?;
        return Ok(VoronoiDiagram {
            cells: vec![VoronoiCell {
                source: sources[0],
                vertices: Vec::new(),
            }],
            edges: Vec::new(),
            vertices: Vec::new(),
        });
    }
    let mut sorted = sources.to_vec();
    sorted.sort_unstable();
    if sorted != (0..n).collect::<Vec<_>>() {
        return Err(PathError::Unsupported(
            "Voronoi diagrams are built for a single source or for all vertices".into(),
        ));
    }
    let field = run_mmp(surface, &sorted)?;
    voronoi_from_field(surface, &field)
}

pub fn voronoi_from_field(
    surface: &Surface,
    field: &DistanceField,
) -> Result<VoronoiDiagram, PathError> {
    let mesh = surface.mesh();
    let scale = surface.max_edge_length();
    let vtol = 1e-8 * scale;
    let slack = 1e-9 * scale;
    let snap = 1e-7 * scale;

    struct Candidate {
        key: Location,
        face: usize,
        pos: Vec2,
        radius: f64,
        contacts: Vec<VoronoiContact>,
    }
    let mut candidates: Vec<Candidate> = Vec::new();

    for face in 0..mesh.face_count() {
        let raw = field.face_sites(surface, face);
        let mut sites: Vec<Site> = Vec::new();
        for s in raw {
            if s.pseudo {
                // Shortest paths never pass through a cone point of positive
                // defect, so bent paths only duplicate straight ones.
                continue;
            }
            match sites
                .iter_mut()
                .find(|x| x.source == s.source && (x.pos - s.pos).norm() <= snap)
            {
                Some(x) => x.gates.push(s),
                None => sites.push(Site {
                    pos: s.pos,
                    source: s.source,
                    gates: vec![s],
                }),
            }
        }
        let chart = mesh.triangle(face).chart();
        let area2 = crate::geom::cross2(&(chart[1] - chart[0]), &(chart[2] - chart[0]));
        let field_min = |q: &Vec2| -> f64 {
            sites
                .iter()
                .filter_map(|s| s.distance_to(q, slack))
                .fold(f64::INFINITY, f64::min)
        };
        for i in 0..sites.len() {
            for j in (i + 1)..sites.len() {
                for k in (j + 1)..sites.len() {
                    let Some(p) = circumcenter(&sites[i].pos, &sites[j].pos, &sites[k].pos) else {
                        continue;
                    };
                    // Inside the closed face.
                    let mut bary = [0.0; 3];
                    for s in 0..3 {
                        let a = chart[(s + 1) % 3];
                        let b = chart[(s + 2) % 3];
                        bary[s] = crate::geom::cross2(&(b - a), &(p - a)) / area2;
                    }
                    let side_len = |s: usize| (chart[(s + 2) % 3] - chart[(s + 1) % 3]).norm();
                    if (0..3).any(|s| bary[s] * area2 / side_len(s) < -snap) {
                        continue;
                    }
                    let r = (p - sites[i].pos).norm();
                    let visible = [i, j, k]
                        .iter()
                        .all(|&x| sites[x].distance_to(&p, slack).is_some());
                    if !visible {
                        continue;
                    }
                    let m = field_min(&p);
                    if r > m + vtol {
                        continue;
                    }
                    let contacts: Vec<VoronoiContact> = sites
                        .iter()
                        .filter(|s| matches!(s.distance_to(&p, slack), Some(d) if d <= m + vtol))
                        .map(|s| {
                            let d = p - s.pos;
                            VoronoiContact {
                                source: s.source,
                                pos: s.pos,
                                angle: wrap_angle(
                                    s.gates[0].angle_of(&d),
                                    surface.cone_angle(s.source),
                                ),
                            }
                        })
                        .collect();
                    let key = locate(surface, face, &p, &bary, area2, snap);
                    candidates.push(Candidate {
                        key,
                        face,
                        pos: p,
                        radius: m,
                        contacts,
                    });
                }
            }
        }
    }

    // Cluster candidates describing the same point. A point on an edge is seen
    // from both faces; ties on the edge itself can hide a contact from one of
    // them, so the contact lists of a cluster are merged.
    candidates.sort_by_key(|c| c.face);
    let mut clusters: Vec<Candidate> = Vec::new();
    for c in candidates {
        let Some(rep) = clusters.iter_mut().find(|k| k.key.same(&c.key, snap)) else {
            clusters.push(c);
            continue;
        };
        let motion = if rep.face == c.face {
            Rigid2::identity()
        } else {
            let Location::Edge(e, _) = rep.key else {
                unreachable!("face locations only cluster within one face")
            };
            let (h_rep, h_c) = halves_in(surface, e, rep.face, c.face);
            mesh.side_to_face(h_rep)
                .compose(&mesh.across(h_c))
                .compose(&mesh.side_to_face(h_c).inverse())
        };
        for contact in c.contacts {
            let pos = motion.apply(&contact.pos);
            if rep
                .contacts
                .iter()
                .any(|x| x.source == contact.source && (x.pos - pos).norm() <= snap)
            {
                continue;
            }
            rep.contacts.push(VoronoiContact {
                source: contact.source,
                pos,
                angle: contact.angle,
            });
        }
    }
    let mut vertices: Vec<VoronoiVertex> = Vec::new();
    for mut c in clusters {
        let p = c.pos;
        c.contacts.sort_by(|a, b| {
            let da = a.pos - p;
            let db = b.pos - p;
            da.y.atan2(da.x).total_cmp(&db.y.atan2(db.x))
        });
        let start = (0..c.contacts.len())
            .min_by_key(|&i| c.contacts[i].source)
            .unwrap();
        c.contacts.rotate_left(start);
        vertices.push(VoronoiVertex {
            face: c.face,
            pos: c.pos,
            radius: c.radius,
            contacts: c.contacts,
        });
    }

    // Chords between consecutive contacts, matched across vertices.
    struct Chord {
        vertex: usize,
        index: usize,
        from: usize,
        to: usize,
        angle_from: f64,
        angle_to: f64,
    }
    let mut chords = Vec::new();
    for (vi, v) in vertices.iter().enumerate() {
        let d = v.degree();
        for i in 0..d {
            let a = &v.contacts[i];
            let b = &v.contacts[(i + 1) % d];
            chords.push(Chord {
                vertex: vi,
                index: i,
                from: a.source,
                to: b.source,
                angle_from: a.angle_towards(&v.pos, &b.pos, surface.cone_angle(a.source)),
                angle_to: b.angle_towards(&v.pos, &a.pos, surface.cone_angle(b.source)),
            });
        }
    }
    let atol = 1e-6;
    let mut partner = vec![usize::MAX; chords.len()];
    for x in 0..chords.len() {
        if partner[x] != usize::MAX {
            continue;
        }
        let cx = &chords[x];
        let matches: Vec<usize> = (0..chords.len())
            .filter(|&y| {
                let cy = &chords[y];
                y != x
                    && partner[y] == usize::MAX
                    && cy.from == cx.to
                    && cy.to == cx.from
                    && circular_gap(cy.angle_from, cx.angle_to, surface.cone_angle(cx.to)) < atol
                    && circular_gap(cy.angle_to, cx.angle_from, surface.cone_angle(cx.from)) < atol
            })
            .collect();
        if matches.len() != 1 {
            return Err(PathError::PropagationFailure(format!(
                "Voronoi vertex {} chord {}->{} has {} partners",
                cx.vertex,
                cx.from,
                cx.to,
                matches.len()
            )));
        }
        partner[x] = matches[0];
        partner[matches[0]] = x;
    }

    let mut edges = Vec::new();
    for x in 0..chords.len() {
        let y = partner[x];
        if x > y {
            continue;
        }
        let (cx, cy) = (&chords[x], &chords[y]);
        let (p, q) = (&vertices[cx.vertex], &vertices[cy.vertex]);
        let offset = |v: &VoronoiVertex, index: usize| -> (f64, Vec2) {
            let a = v.contacts[index].pos;
            let b = v.contacts[(index + 1) % v.degree()].pos;
            let ab = (b - a).normalize();
            let normal = Vec2::new(-ab.y, ab.x);
            ((v.pos - 0.5 * (a + b)).dot(&normal), normal)
        };
        let (sp, np) = offset(p, cx.index);
        let (sq, _) = offset(q, cy.index);
        let arcs = trace_straight(surface, p.face, p.pos, -np, (sp + sq).max(0.0));
        // Walking from p along -normal, the chord's start (cx.from) is on the right.
        edges.push(VoronoiEdge {
            cells: [cx.to, cx.from],
            ends: [cx.vertex, cy.vertex],
            chords: [(cx.vertex, cx.index), (cy.vertex, cy.index)],
            arcs,
        });
    }

    let mut cells: Vec<VoronoiCell> = (0..surface.vertex_count())
        .map(|s| VoronoiCell {
            source: s,
            vertices: Vec::new(),
        })
        .collect();
    let mut around: Vec<Vec<(f64, usize)>> = vec![Vec::new(); surface.vertex_count()];
    for (vi, v) in vertices.iter().enumerate() {
        for c in &v.contacts {
            around[c.source].push((c.angle, vi));
        }
    }
    for (s, list) in around.iter_mut().enumerate() {
        list.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        cells[s].vertices = list.iter().map(|x| x.1).collect();
    }
    Ok(VoronoiDiagram {
        cells,
        edges,
        vertices,
    })
}

/// The half-edges of edge `e` lying in faces `f` and `g`.
fn halves_in(surface: &Surface, e: usize, f: usize, g: usize) -> (usize, usize) {
    let mesh = surface.mesh();
    let h = mesh.edge_half(e);
    let t = mesh.twin(h);
    if crate::mesh::tri_of(h) == f && crate::mesh::tri_of(t) == g {
        (h, t)
    } else {
        (t, h)
    }
}

/// Canonical location of a point for deduplication across faces.
#[derive(Clone, Copy, Debug)]
enum Location {
    Face(usize, Vec2),
    Edge(usize, f64),
}

impl Location {
    fn same(&self, other: &Location, tol: f64) -> bool {
        match (self, other) {
            (Location::Face(f, p), Location::Face(g, q)) => f == g && (p - q).norm() <= tol,
            (Location::Edge(e, s), Location::Edge(g, t)) => e == g && (s - t).abs() <= tol,
            _ => false,
        }
    }
}

fn locate(
    surface: &Surface,
    face: usize,
    p: &Vec2,
    bary: &[f64; 3],
    area2: f64,
    snap: f64,
) -> Location {
    let mesh = surface.mesh();
    let chart = mesh.triangle(face).chart();
    for s in 0..3 {
        // bary[s] vanishes on the side opposite corner s: from s+1 to s+2.
        let side = (s + 1) % 3;
        let a = chart[side];
        let b = chart[(side + 1) % 3];
        let dist = bary[s] * area2 / (b - a).norm();
        if dist.abs() <= snap {
            let he = 3 * face + side;
            let e = mesh.edge_of(he);
            let t = (p - a).dot(&(b - a)) / (b - a).norm();
            let param = if mesh.edge_half(e) == he {
                t
            } else {
                mesh.length(he) - t
            };
            return Location::Edge(e, param);
        }
    }
    Location::Face(face, *p)
}

/// Walk a straight line of length `length` from `start` (chart of `face`) in
/// direction `dir`, returning the pieces per face.
pub fn trace_straight(
    surface: &Surface,
    face: usize,
    start: Vec2,
    dir: Vec2,
    length: f64,
) -> Vec<VoronoiArc> {
    let mesh = surface.mesh();
    let scale = surface.max_edge_length();
    let mut arcs = Vec::new();
    let (mut face, mut p, mut d) = (face, start, dir.normalize());
    let mut remaining = length;
    let mut entered: Option<usize> = None;
    for _ in 0..10_000 {
        if remaining <= 1e-14 * scale {
            break;
        }
        let chart = mesh.triangle(face).chart();
        let mut exit: Option<(f64, usize)> = None;
        for s in 0..3 {
            if Some(3 * face + s) == entered {
                continue;
            }
            let a = chart[s];
            let b = chart[(s + 1) % 3];
            let e = b - a;
            let outward = Vec2::new(e.y, -e.x);
            let speed = d.dot(&outward);
            if speed <= 0.0 {
                continue;
            }
            let tau = (a - p).dot(&outward) / speed;
            let tau = tau.max(0.0);
            if exit.is_none_or(|(t, _)| tau < t) {
                exit = Some((tau, s));
            }
        }
        let Some((tau, s)) = exit else {
            break;
        };
        if tau >= remaining {
            arcs.push(VoronoiArc {
                face,
                from: p,
                to: p + d * remaining,
            });
            break;
        }
        let q = p + d * tau;
        if tau > 1e-14 * scale {
            arcs.push(VoronoiArc {
                face,
                from: p,
                to: q,
            });
        }
        remaining -= tau;
        let he = 3 * face + s;
        let tw = mesh.twin(he);
        let motion: Rigid2 = mesh
            .side_to_face(tw)
            .compose(&mesh.across(he))
            .compose(&mesh.side_to_face(he).inverse());
        p = motion.apply(&q);
        d = motion.rotate(&d);
        face = crate::mesh::tri_of(tw);
        entered = Some(tw);
    }
    arcs
}
