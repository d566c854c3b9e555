//! Exact surface distances by continuous Dijkstra (window propagation).
//!
//! A window lives on a half-edge `h` and describes straight paths that cross the
//! edge and continue into the triangle of `h`. Coordinates are in the chart of
//! `h` (origin of `h` at `(0,0)`, target at `(len,0)`, its triangle above the
//! axis); the unfolded (pseudo)source sits below the axis. The distance at edge
//! parameter `x` is `sigma + |(x,0) - src|`.
//!
//! Edges of the input complex need not be shortest paths: windows only ever
//! describe paths entering a face through one of its sides, so the propagation
//! rule is the same whether or not the sides are geodesics.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::geom::{arg, wrap_pi, Rigid2, Vec2};
use crate::mesh::{next, prev, tri_of};
use crate::metric::Surface;

#[derive(Debug, Error)]
pub enum PathError {
    #[error("no sources given")]
    NoSources,
    #[error("source {0} listed twice")]
    DuplicateSource(usize),
    #[error("source {0} is not a vertex")]
    SourceOutOfRange(usize),
    #[error("propagation failure: {0}")]
    PropagationFailure(String),
    #[error("point is not on the surface: {0}")]
    PointOffSurface(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

/// A point of the surface given by a face and barycentric coordinates with
/// respect to that face's corners `v[0], v[1], v[2]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SurfacePoint {
    pub face: usize,
    pub bary: [f64; 3],
}

impl SurfacePoint {
    pub fn vertex_corner(face: usize, corner: usize) -> Self {
        let mut bary = [0.0; 3];
        bary[corner] = 1.0;
        SurfacePoint { face, bary }
    }

    /// Position in the face chart of `face`.
    pub fn position(&self, surface: &Surface) -> Vec2 {
        let c = surface.mesh().triangle(self.face).chart();
        c[0] * self.bary[0] + c[1] * self.bary[1] + c[2] * self.bary[2]
    }
}

/// A window: paths entering the triangle of `he` across the edge.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Window {
    pub he: usize,
    pub b0: f64,
    pub b1: f64,
    /// Unfolded (pseudo)source in the chart of `he`.
    pub src: Vec2,
    /// Path length accumulated before the pseudosource.
    pub sigma: f64,
    /// Originating source vertex.
    pub source: usize,
    /// Vertex acting as pseudosource, if the paths bend around one.
    pub pseudo: Option<usize>,
    /// Angular coordinate, around the emitting vertex, of the ray through the
    /// middle of the span. Not reduced modulo the cone angle.
    pub ray_angle: f64,
}

impl Window {
    pub fn distance_at(&self, x: f64) -> f64 {
        self.sigma + (x - self.src.x).hypot(self.src.y)
    }

    pub fn min_distance(&self) -> f64 {
        self.distance_at(self.src.x.clamp(self.b0, self.b1))
    }

    pub fn mid_direction(&self) -> f64 {
        arg(&(Vec2::new(0.5 * (self.b0 + self.b1), 0.0) - self.src))
    }

    /// Angular coordinate at the emitter of the chart direction `d`, which must
    /// be within a half turn of the window's rays.
    pub fn angle_of(&self, d: &Vec2) -> f64 {
        self.ray_angle + wrap_pi(arg(d) - self.mid_direction())
    }

    /// The same window restricted to `[b0, b1]`.
    pub fn with_span(&self, b0: f64, b1: f64) -> Window {
        let mut w = self.clone();
        w.b0 = b0;
        w.b1 = b1;
        w.ray_angle = self.angle_of(&(Vec2::new(0.5 * (b0 + b1), 0.0) - self.src));
        w
    }

    /// Vertex at which the unfolded paths start.
    pub fn emitter(&self) -> usize {
        self.pseudo.unwrap_or(self.source)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VertexRecord {
    pub distance: f64,
    pub source: usize,
    /// Window that realized the distance (`None` at sources).
    pub window: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PropagationStats {
    pub windows_created: usize,
    pub windows_propagated: usize,
    pub pseudosource_events: usize,
    /// Whether keys extracted from the queue were nondecreasing.
    pub monotone: bool,
}

/// Result of a run: final window lists per half-edge and vertex distances.
#[derive(Clone, Debug)]
pub struct DistanceField {
    sources: Vec<usize>,
    windows: Vec<Window>,
    lists: Vec<Vec<usize>>,
    vertices: Vec<VertexRecord>,
    stats: PropagationStats,
    scale: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum EventKind {
    Window(usize),
    Vertex(usize),
}

#[derive(Clone, Copy, Debug)]
struct Event {
    key: f64,
    source: usize,
    edge: usize,
    start: f64,
    kind: EventKind,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Event {}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Event {
    /// Reversed so that `BinaryHeap` pops the lexicographically smallest
    /// `(key, source, edge, start)`.
    fn cmp(&self, other: &Self) -> Ordering {
        let kind_rank = |k: &EventKind| match k {
            EventKind::Vertex(v) => (0, *v),
            EventKind::Window(w) => (1, *w),
        };
        other
            .key
            .total_cmp(&self.key)
            .then(other.source.cmp(&self.source))
            .then(other.edge.cmp(&self.edge))
            .then(other.start.total_cmp(&self.start))
            .then(kind_rank(&other.kind).cmp(&kind_rank(&self.kind)))
    }
}

/// Options for a propagation run.
#[derive(Clone, Copy, Debug)]
pub struct MmpOptions {
    /// Abort once this many windows have been created.
    pub max_windows: usize,
}

impl Default for MmpOptions {
    fn default() -> Self {
        MmpOptions {
            max_windows: 2_000_000,
        }
    }
}

struct Run<'a> {
    surface: &'a Surface,
    windows: Vec<Window>,
    alive: Vec<bool>,
    propagated: Vec<bool>,
    lists: Vec<Vec<usize>>,
    heap: BinaryHeap<Event>,
    vertices: Vec<VertexRecord>,
    is_source: Vec<bool>,
    spawned: Vec<f64>,
    scale: f64,
    max_windows: usize,
    stats: PropagationStats,
}

/// Run continuous Dijkstra from a set of source vertices.
pub fn run_mmp(surface: &Surface, sources: &[usize]) -> Result<DistanceField, PathError> {
    run_mmp_with(surface, sources, MmpOptions::default())
}

pub fn run_mmp_with(
    surface: &Surface,
    sources: &[usize],
    options: MmpOptions,
) -> Result<DistanceField, PathError> {
    if sources.is_empty() {
        return Err(PathError::NoSources);
    }
    let n = surface.vertex_count();
    let mut is_source = vec![false; n];
    for &s in sources {
        if s >= n {
            return Err(PathError::SourceOutOfRange(s));
        }
        if is_source[s] {
            return Err(PathError::DuplicateSource(s));
        }
        is_source[s] = true;
    }
    let mesh = surface.mesh();
    let mut run = Run {
        surface,
        windows: Vec::new(),
        alive: Vec::new(),
        propagated: Vec::new(),
        lists: vec![Vec::new(); mesh.half_edge_count()],
        heap: BinaryHeap::new(),
        vertices: vec![
            VertexRecord {
                distance: f64::INFINITY,
                source: usize::MAX,
                window: None,
            };
            n
        ],
        is_source,
        spawned: vec![f64::INFINITY; n],
        scale: surface.max_edge_length(),
        max_windows: options.max_windows,
        stats: PropagationStats {
            windows_created: 0,
            windows_propagated: 0,
            pseudosource_events: 0,
            monotone: true,
        },
    };
    for &s in sources {
        run.vertices[s] = VertexRecord {
            distance: 0.0,
            source: s,
            window: None,
        };
        run.push_vertex_event(s);
    }
    run.process()?;
    let Run {
        windows,
        alive,
        lists,
        vertices,
        stats,
        scale,
        ..
    } = run;
    // Compact the arena to the surviving windows.
    let mut remap = vec![usize::MAX; windows.len()];
    let mut kept = Vec::new();
    for (i, w) in windows.into_iter().enumerate() {
        if alive[i] {
            remap[i] = kept.len();
            kept.push(w);
        }
    }
    let lists = lists
        .into_iter()
        .map(|l| {
            let mut l: Vec<usize> = l.into_iter().map(|i| remap[i]).collect();
            l.sort_by(|&a, &b| kept[a].b0.total_cmp(&kept[b].b0));
            l
        })
        .collect();
    let vertices = vertices
        .into_iter()
        .map(|mut r| {
            r.window = r
                .window
                .and_then(|w| (remap[w] != usize::MAX).then(|| remap[w]));
            r
        })
        .collect();
    Ok(DistanceField {
        sources: sources.to_vec(),
        windows: kept,
        lists,
        vertices,
        stats,
        scale,
    })
}

impl<'a> Run<'a> {
    fn tol(&self) -> f64 {
        1e-12 * self.scale
    }

    fn push_vertex_event(&mut self, v: usize) {
        self.heap.push(Event {
            key: self.vertices[v].distance,
            source: self.vertices[v].source,
            edge: usize::MAX,
            start: 0.0,
            kind: EventKind::Vertex(v),
        });
    }

    fn offer_vertex(&mut self, v: usize, distance: f64, source: usize, window: Option<usize>) {
        let tol = self.tol();
        let rec = &mut self.vertices[v];
        if distance < rec.distance - tol {
            *rec = VertexRecord {
                distance,
                source,
                window,
            };
            self.push_vertex_event(v);
        } else if distance <= rec.distance + tol && source < rec.source {
            rec.source = source;
            rec.distance = rec.distance.min(distance);
            rec.window = window;
        } else if distance < rec.distance {
            rec.distance = distance;
            rec.window = window;
        }
    }

    fn process(&mut self) -> Result<(), PathError> {
        let mut last_key = f64::NEG_INFINITY;
        while let Some(event) = self.heap.pop() {
            match event.kind {
                EventKind::Vertex(v) => {
                    let d = self.vertices[v].distance;
                    if event.key > d + self.tol() || self.spawned[v] <= d + self.tol() {
                        continue;
                    }
                    if event.key < last_key - 1e-9 * self.scale {
                        self.stats.monotone = false;
                    }
                    last_key = last_key.max(event.key);
                    self.spawned[v] = d;
                    self.stats.pseudosource_events += 1;
                    self.spawn_from_vertex(v)?;
                }
                EventKind::Window(id) => {
                    if !self.alive[id] || self.propagated[id] {
                        continue;
                    }
                    let key = self.windows[id].min_distance();
                    if (key - event.key).abs() > self.tol() {
                        continue;
                    }
                    if event.key < last_key - 1e-9 * self.scale {
                        self.stats.monotone = false;
                    }
                    last_key = last_key.max(event.key);
                    self.propagated[id] = true;
                    self.stats.windows_propagated += 1;
                    self.propagate(id)?;
                }
            }
        }
        Ok(())
    }

    /// Emit windows from vertex `v` into every incident triangle.
    fn spawn_from_vertex(&mut self, v: usize) -> Result<(), PathError> {
        let mesh = self.surface.mesh();
        let rec = self.vertices[v];
        let pseudo = if self.is_source[v] && rec.distance == 0.0 {
            None
        } else {
            Some(v)
        };
        for h0 in mesh.outgoing(v) {
            let opp = next(h0);
            let len = mesh.length(opp);
            let apex = mesh.side_chart(opp)[2];
            let tw = mesh.twin(opp);
            let src = mesh.across(opp).apply(&apex);
            // target(h0) is the target of the twin of `opp`, at (len, 0).
            let towards = Vec2::new(len, 0.0) - src;
            let mid = Vec2::new(0.5 * len, 0.0) - src;
            let ray_angle = self.surface.corner_start(h0) + wrap_pi(arg(&mid) - arg(&towards));
            let w = Window {
                he: tw,
                b0: 0.0,
                b1: mesh.length(tw),
                src,
                sigma: rec.distance,
                source: rec.source,
                pseudo,
                ray_angle,
            };
            self.insert(w)?;
            // Paths running along the two sides at v. The source lies on the
            // axis, so these windows never propagate; they make the interval
            // lists exact on the sides incident to v.
            let along = Window {
                he: h0,
                b0: 0.0,
                b1: mesh.length(h0),
                src: Vec2::zeros(),
                sigma: rec.distance,
                source: rec.source,
                pseudo,
                ray_angle: self.surface.corner_start(h0),
            };
            self.insert(along)?;
            let back = prev(h0);
            let back_len = mesh.length(back);
            let along_back = Window {
                he: back,
                b0: 0.0,
                b1: back_len,
                src: Vec2::new(back_len, 0.0),
                sigma: rec.distance,
                source: rec.source,
                pseudo,
                ray_angle: self.surface.corner_start(h0) + mesh.corner_angle(h0),
            };
            self.insert(along_back)?;
            // Neighbours across the incident sides.
            let dist_t = rec.distance + mesh.length(h0);
            self.offer_vertex(mesh.target(h0), dist_t, rec.source, None);
        }
        Ok(())
    }

    fn propagate(&mut self, id: usize) -> Result<(), PathError> {
        let mesh = self.surface.mesh();
        let w = self.windows[id].clone();
        let h = w.he;
        let [_, b, c] = mesh.side_chart(h);
        let s = w.src;
        if s.y > -self.tol() * 1e-3 {
            return Ok(());
        }
        let x_c = s.x + (c.x - s.x) * (-s.y) / (c.y - s.y);
        let apex = mesh.apex(h);
        if x_c >= w.b0 && x_c <= w.b1 {
            let d = w.sigma + (c - s).norm();
            self.offer_vertex(apex, d, w.source, Some(id));
        }
        // Side B -> C.
        let lo = w.b0.max(x_c);
        if w.b1 - lo > self.tol() {
            self.emit_child(&w, next(h), b, lo, w.b1)?;
        }
        // Side C -> A.
        let hi = w.b1.min(x_c);
        if hi - w.b0 > self.tol() {
            self.emit_child(&w, prev(h), c, w.b0, hi)?;
        }
        Ok(())
    }

    /// Send the rays of `w` through `[x0, x1]` across side `side` (whose origin
    /// is at `origin` in the chart of `w.he`).
    fn emit_child(
        &mut self,
        w: &Window,
        side: usize,
        origin: Vec2,
        x0: f64,
        x1: f64,
    ) -> Result<(), PathError> {
        let mesh = self.surface.mesh();
        let [_, _, apex] = mesh.side_chart(w.he);
        let target = if side == next(w.he) {
            apex
        } else {
            Vec2::zeros()
        };
        let to_side = Rigid2::frame(origin, target);
        let s = to_side.apply(&w.src);
        let len = mesh.length(side);
        let hit = |x: f64| -> Option<f64> {
            let p = to_side.apply(&Vec2::new(x, 0.0));
            let dy = s.y - p.y;
            if dy <= 0.0 {
                return None;
            }
            Some((s.x + (p.x - s.x) * s.y / dy).clamp(0.0, len))
        };
        let (Some(u0), Some(u1)) = (hit(x0), hit(x1)) else {
            return Ok(());
        };
        let tw = mesh.twin(side);
        let across = mesh.across(side);
        let motion = across.compose(&to_side);
        let src = motion.apply(&w.src);
        let (p0, p1) = ((len - u0).min(len - u1), (len - u0).max(len - u1));
        if p1 - p0 <= self.tol() {
            return Ok(());
        }
        let mut child = Window {
            he: tw,
            b0: p0.max(0.0),
            b1: p1.min(mesh.length(tw)),
            src,
            sigma: w.sigma,
            source: w.source,
            pseudo: w.pseudo,
            ray_angle: 0.0,
        };
        let parent_dir = motion.rotate(&(Vec2::new(0.5 * (w.b0 + w.b1), 0.0) - w.src));
        child.ray_angle = w.ray_angle + wrap_pi(child.mid_direction() - arg(&parent_dir));
        self.insert(child)
    }

    /// Insert a candidate window, trimming it and the existing windows on the
    /// same half-edge so that each parameter keeps its best window.
    fn insert(&mut self, cand: Window) -> Result<(), PathError> {
        let tol = self.tol();
        let he = cand.he;
        let mut keep: Vec<(f64, f64)> = vec![(cand.b0, cand.b1)];
        let existing: Vec<usize> = self.lists[he].clone();
        let mut replaced: Vec<(usize, Vec<(f64, f64)>)> = Vec::new();
        for eid in existing {
            let e = &self.windows[eid];
            let lo = cand.b0.max(e.b0);
            let hi = cand.b1.min(e.b1);
            if hi - lo <= tol {
                continue;
            }
            let wins = winning_pieces(&cand, e, lo, hi, tol);
            let losses = subtract(&[(lo, hi)], &wins);
            keep = subtract(&keep, &losses);
            if !wins.is_empty() {
                let rest = subtract(&[(e.b0, e.b1)], &wins);
                replaced.push((eid, rest));
            }
        }
        let keep: Vec<(f64, f64)> = keep.into_iter().filter(|(a, b)| b - a > tol).collect();
        if keep.is_empty() {
            return Ok(());
        }
        for (eid, rest) in replaced {
            self.alive[eid] = false;
            self.lists[he].retain(|&x| x != eid);
            let was_propagated = self.propagated[eid];
            for (a, b) in rest {
                if b - a <= tol {
                    continue;
                }
                let piece = self.windows[eid].with_span(a, b);
                self.add_window(piece, was_propagated)?;
            }
        }
        for (a, b) in keep {
            let piece = cand.with_span(a, b);
            let id = self.add_window(piece, false)?;
            let mesh = self.surface.mesh();
            let len = mesh.length(he);
            let w = &self.windows[id];
            let (d0, d1, source) = (w.distance_at(0.0), w.distance_at(len), w.source);
            if a <= tol {
                self.offer_vertex(mesh.origin(he), d0, source, Some(id));
            }
            if b >= len - tol {
                self.offer_vertex(mesh.target(he), d1, source, Some(id));
            }
        }
        Ok(())
    }

    fn add_window(&mut self, w: Window, propagated: bool) -> Result<usize, PathError> {
        if self.windows.len() >= self.max_windows {
            return Err(PathError::PropagationFailure(format!(
                "window limit {} reached while inserting on half-edge {} span [{:.6}, {:.6}] from source {}",
                self.max_windows, w.he, w.b0, w.b1, w.source
            )));
        }
        let id = self.windows.len();
        let event = Event {
            key: w.min_distance(),
            source: w.source,
            edge: self.surface.mesh().edge_of(w.he),
            start: w.b0,
            kind: EventKind::Window(id),
        };
        self.lists[w.he].push(id);
        self.windows.push(w);
        self.alive.push(true);
        self.propagated.push(propagated);
        self.stats.windows_created += 1;
        if !propagated {
            self.heap.push(event);
        }
        Ok(id)
    }
}

/// Sub-intervals of `[lo, hi]` where `a` is strictly shorter than `b`.
fn winning_pieces(a: &Window, b: &Window, lo: f64, hi: f64, tol: f64) -> Vec<(f64, f64)> {
    let mut cuts = vec![lo, hi];
    cuts.extend(
        equidistance_roots(a, b)
            .into_iter()
            .filter(|&x| x > lo && x < hi),
    );
    cuts.sort_by(f64::total_cmp);
    let mut out: Vec<(f64, f64)> = Vec::new();
    for pair in cuts.windows(2) {
        let (x0, x1) = (pair[0], pair[1]);
        if x1 - x0 <= 0.0 {
            continue;
        }
        let mid = 0.5 * (x0 + x1);
        if a.distance_at(mid) < b.distance_at(mid) - tol {
            match out.last_mut() {
                Some(last) if last.1 >= x0 => last.1 = x1,
                _ => out.push((x0, x1)),
            }
        }
    }
    out
}

/// Parameters where the two distance functions may coincide: roots of the
/// quadratic obtained by squaring `sigma_a + |x - s_a| = sigma_b + |x - s_b|`
/// twice.
fn equidistance_roots(a: &Window, b: &Window) -> Vec<f64> {
    let delta = b.sigma - a.sigma;
    let (a1, c1) = (a.src.x, a.src.y * a.src.y);
    let (a2, c2) = (b.src.x, b.src.y * b.src.y);
    let alpha = -2.0 * (a1 - a2);
    let gamma = a1 * a1 - a2 * a2 + c1 - c2 - delta * delta;
    let d2 = delta * delta;
    let qa = alpha * alpha - 4.0 * d2;
    let qb = 2.0 * alpha * gamma + 8.0 * d2 * a2;
    let qc = gamma * gamma - 4.0 * d2 * (a2 * a2 + c2);
    let scale = qa.abs().max(qb.abs()).max(qc.abs());
    if scale == 0.0 {
        return Vec::new();
    }
    let (qa, qb, qc) = (qa / scale, qb / scale, qc / scale);
    let zero = |x: f64| x.abs() < 1e-12;
    if zero(qa) {
        if zero(qb) {
            return Vec::new();
        }
        return vec![-qc / qb];
    }
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        if disc > -1e-12 {
            return vec![-qb / (2.0 * qa)];
        }
        return Vec::new();
    }
    let sq = disc.sqrt();
    // Numerically stable pair of roots.
    let q = -0.5 * (qb + qb.signum() * sq);
    let mut roots = vec![];
    if q != 0.0 {
        roots.push(q / qa);
        roots.push(qc / q);
    } else {
        roots.push(0.0);
    }
    roots
}

/// Remove the union of `cut` from the union of `from` (both lists of closed
/// intervals); result sorted.
fn subtract(from: &[(f64, f64)], cut: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = from.to_vec();
    for &(c0, c1) in cut {
        let mut next_out = Vec::with_capacity(out.len() + 1);
        for (a, b) in out {
            if c1 <= a || c0 >= b {
                next_out.push((a, b));
                continue;
            }
            if c0 > a {
                next_out.push((a, c0));
            }
            if c1 < b {
                next_out.push((c1, b));
            }
        }
        out = next_out;
    }
    out.sort_by(|x, y| x.0.total_cmp(&y.0));
    out
}

/// A site visible from a face: an unfolded source copy in the face chart.
#[derive(Clone, Debug)]
pub(crate) struct FaceSite {
    pub pos: Vec2,
    pub sigma: f64,
    pub source: usize,
    pub pseudo: bool,
    /// Angular coordinate at the emitter of a reference ray, and that ray's
    /// direction in the face chart; directions within the site's wedge are
    /// measured from it.
    pub ray_angle: f64,
    pub ray_dir: f64,
    /// For window sites, the half-edge and its span (mapped into the face chart
    /// as the segment `lo..hi`); `None` for corner sites.
    pub gate: Option<(Vec2, Vec2)>,
}

impl FaceSite {
    /// Angular coordinate at the emitter of the chart direction `d`, not
    /// reduced modulo the cone angle.
    pub fn angle_of(&self, d: &Vec2) -> f64 {
        self.ray_angle + wrap_pi(arg(d) - self.ray_dir)
    }

    /// Path length to `q` (face chart) through this site, if the site sees `q`.
    pub fn distance_to(&self, q: &Vec2, slack: f64) -> Option<f64> {
        if let Some((g0, g1)) = &self.gate {
            // The ray from pos through q must cross the gate segment.
            let d = q - self.pos;
            let e = g1 - g0;
            let denom = crate::geom::cross2(&d, &e);
            if denom.abs() < 1e-300 {
                return None;
            }
            let w = g0 - self.pos;
            let t = crate::geom::cross2(&w, &e) / denom;
            let u = crate::geom::cross2(&w, &d) / denom;
            let len = e.norm();
            if t < -slack / d.norm().max(1e-300) || t > 1.0 + slack / d.norm().max(1e-300) {
                return None;
            }
            if u * len < -slack || u * len > len + slack {
                return None;
            }
        }
        Some(self.sigma + (q - self.pos).norm())
    }
}

impl DistanceField {
    pub fn sources(&self) -> &[usize] {
        &self.sources
    }

    pub fn stats(&self) -> &PropagationStats {
        &self.stats
    }

    pub fn windows(&self) -> &[Window] {
        &self.windows
    }

    /// Window ids on a half-edge, sorted by span start.
    pub fn intervals(&self, he: usize) -> impl Iterator<Item = &Window> {
        self.lists[he].iter().map(move |&i| &self.windows[i])
    }

    pub fn vertex(&self, v: usize) -> &VertexRecord {
        &self.vertices[v]
    }

    pub fn vertex_distances(&self) -> Vec<f64> {
        self.vertices.iter().map(|r| r.distance).collect()
    }

    /// Minimum over the covering windows at parameter `x` of half-edge `he`.
    pub fn edge_distance(&self, he: usize, x: f64) -> Option<f64> {
        let slack = 1e-9 * self.scale;
        self.intervals(he)
            .filter(|w| x >= w.b0 - slack && x <= w.b1 + slack)
            .map(|w| w.distance_at(x))
            .min_by(f64::total_cmp)
    }

    pub(crate) fn face_sites(&self, surface: &Surface, face: usize) -> Vec<FaceSite> {
        let mesh = surface.mesh();
        let chart = mesh.triangle(face).chart();
        let mut sites = Vec::new();
        for k in 0..3 {
            let v = mesh.triangle(face).v[k];
            let rec = self.vertices[v];
            if !rec.distance.is_finite() {
                continue;
            }
            let he = 3 * face + k;
            let along = chart[(k + 1) % 3] - chart[k];
            sites.push(FaceSite {
                pos: chart[k],
                sigma: rec.distance,
                source: rec.source,
                pseudo: rec.distance > 0.0,
                ray_angle: surface.corner_start(he),
                ray_dir: arg(&along),
                gate: None,
            });
        }
        for k in 0..3 {
            let he = 3 * face + k;
            let to_face = mesh.side_to_face(he);
            for w in self.intervals(he) {
                // Windows along a side are represented by the corner sites.
                if w.src.y.abs() <= 1e-12 * self.scale {
                    continue;
                }
                sites.push(FaceSite {
                    pos: to_face.apply(&w.src),
                    sigma: w.sigma,
                    source: w.source,
                    pseudo: w.pseudo.is_some(),
                    ray_angle: w.ray_angle,
                    ray_dir: arg(&to_face.rotate(&(Vec2::new(0.5 * (w.b0 + w.b1), 0.0) - w.src))),
                    gate: Some((
                        to_face.apply(&Vec2::new(w.b0, 0.0)),
                        to_face.apply(&Vec2::new(w.b1, 0.0)),
                    )),
                });
            }
        }
        sites
    }
}

/// Distance from the nearest source to `point`, with the nearest source.
/// Ties within `1e-12` relative go to the lowest source id.
pub fn query_distance(
    surface: &Surface,
    field: &DistanceField,
    point: &SurfacePoint,
) -> Result<(f64, usize), PathError> {
    if point.face >= surface.mesh().face_count() {
        return Err(PathError::PointOffSurface(format!(
            "face {} does not exist",
            point.face
        )));
    }
    let sum: f64 = point.bary.iter().sum();
    if point.bary.iter().any(|&b| b < -1e-9) || (sum - 1.0).abs() > 1e-9 {
        return Err(PathError::PointOffSurface(format!(
            "barycentric coordinates {:?} are outside the face",
            point.bary
        )));
    }
    let q = point.position(surface);
    let slack = 1e-9 * field.scale;
    let mut best: Option<(f64, usize)> = None;
    for site in field.face_sites(surface, point.face) {
        let Some(d) = site.distance_to(&q, slack) else {
            continue;
        };
        best = Some(match best {
            None => (d, site.source),
            Some((bd, bs)) => {
                let tie = (d - bd).abs() <= 1e-12 * field.scale.max(bd);
                if tie {
                    (bd.min(d), bs.min(site.source))
                } else if d < bd {
                    (d, site.source)
                } else {
                    (bd, bs)
                }
            }
        });
    }
    best.ok_or_else(|| PathError::PointOffSurface("no window reaches the point".into()))
}

/// All vertex-to-vertex surface distances; row `s` comes from a run with source
/// `s`. Runs execute in parallel and are collected in source order.
pub fn all_pairs_distances(surface: &Surface) -> Result<Vec<Vec<f64>>, PathError> {
    (0..surface.vertex_count())
        .into_par_iter()
        .map(|s| run_mmp(surface, &[s]).map(|f| f.vertex_distances()))
        .collect()
}

/// Largest and smallest surface distance over vertex pairs: `(D, ell)`.
pub fn surface_diameter(surface: &Surface) -> Result<(f64, f64), PathError> {
    let dist = all_pairs_distances(surface)?;
    let mut d_max: f64 = 0.0;
    let mut d_min = f64::INFINITY;
    for (i, row) in dist.iter().enumerate() {
        for (j, &d) in row.iter().enumerate() {
            if i != j {
                d_max = d_max.max(d);
                d_min = d_min.min(d);
            }
        }
    }
    Ok((d_max, d_min))
}

/// Flat record of one interval for debug dumps.
#[derive(Clone, Debug, Serialize)]
pub struct IntervalRecord {
    pub edge: usize,
    pub face: usize,
    pub span: [f64; 2],
    pub source: usize,
    pub offset: f64,
}

pub fn interval_dump(surface: &Surface, field: &DistanceField) -> Vec<IntervalRecord> {
    let mesh = surface.mesh();
    (0..mesh.half_edge_count())
        .flat_map(|he| {
            field.intervals(he).map(move |w| IntervalRecord {
                edge: mesh.edge_of(he),
                face: tri_of(he),
                span: [w.b0, w.b1],
                source: w.source,
                offset: w.sigma,
            })
        })
        .collect()
}
