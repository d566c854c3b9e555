//! Glued, consistently oriented triangle complexes.
//!
//! Half-edges are addressed as `3 * triangle + side`; side `s` of a triangle runs
//! from `v[s]` to `v[(s + 1) % 3]` and carries `len[s]`. Every triangle is
//! counter-clockwise, so a half-edge and its twin run in opposite directions.
//! Edges get stable ids that survive flips, which the reweighting queue relies on.

use serde::{Deserialize, Serialize};

use crate::geom::{angle_opposite, apex_position, Rigid2, Vec2};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Triangle {
    pub v: [usize; 3],
    pub len: [f64; 3],
}

impl Triangle {
    /// Positions of the three corners with `v[0]` at the origin and `v[1]` on the
    /// positive x axis.
    pub fn chart(&self) -> [Vec2; 3] {
        let [l0, l1, l2] = self.len;
        [Vec2::zeros(), Vec2::new(l0, 0.0), apex_position(l0, l2, l1)]
    }

    /// Interior angle at corner `i`.
    pub fn angle(&self, i: usize) -> f64 {
        let a = self.len[i];
        let b = self.len[(i + 2) % 3];
        let opposite = self.len[(i + 1) % 3];
        angle_opposite(a, b, opposite)
    }
}

#[inline]
pub fn tri_of(he: usize) -> usize {
    he / 3
}

#[inline]
pub fn side_of(he: usize) -> usize {
    he % 3
}

#[inline]
pub fn next(he: usize) -> usize {
    3 * (he / 3) + (he % 3 + 1) % 3
}

#[inline]
pub fn prev(he: usize) -> usize {
    3 * (he / 3) + (he % 3 + 2) % 3
}

#[derive(Clone, Debug, PartialEq)]
pub struct TriMesh {
    vertex_count: usize,
    triangles: Vec<Triangle>,
    twin: Vec<usize>,
    edge: Vec<usize>,
    edge_he: Vec<usize>,
}

impl TriMesh {
    /// Assemble a mesh from oriented triangles and an involutive twin map.
    /// The caller guarantees consistency (see `metric::Surface`).
    pub fn from_parts(vertex_count: usize, triangles: Vec<Triangle>, twin: Vec<usize>) -> Self {
        debug_assert_eq!(twin.len(), 3 * triangles.len());
        let mut edge = vec![usize::MAX; twin.len()];
        let mut edge_he = Vec::with_capacity(twin.len() / 2);
        for he in 0..twin.len() {
            if edge[he] == usize::MAX {
                edge[he] = edge_he.len();
                edge[twin[he]] = edge_he.len();
                edge_he.push(he.min(twin[he]));
            }
        }
        TriMesh {
            vertex_count,
            triangles,
            twin,
            edge,
            edge_he,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn triangle(&self, t: usize) -> &Triangle {
        &self.triangles[t]
    }

    pub fn face_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn half_edge_count(&self) -> usize {
        self.twin.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_he.len()
    }

    pub fn twin(&self, he: usize) -> usize {
        self.twin[he]
    }

    pub fn twins(&self) -> &[usize] {
        &self.twin
    }

    pub fn edge_of(&self, he: usize) -> usize {
        self.edge[he]
    }

    /// A representative half-edge of edge `e`.
    pub fn edge_half(&self, e: usize) -> usize {
        self.edge_he[e]
    }

    pub fn origin(&self, he: usize) -> usize {
        self.triangles[tri_of(he)].v[side_of(he)]
    }

    pub fn target(&self, he: usize) -> usize {
        self.triangles[tri_of(he)].v[(side_of(he) + 1) % 3]
    }

    /// The corner opposite the half-edge within its triangle.
    pub fn apex(&self, he: usize) -> usize {
        self.triangles[tri_of(he)].v[(side_of(he) + 2) % 3]
    }

    pub fn length(&self, he: usize) -> f64 {
        self.triangles[tri_of(he)].len[side_of(he)]
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        self.length(self.edge_he[e])
    }

    /// Interior angle at `origin(he)` inside the triangle of `he`.
    pub fn corner_angle(&self, he: usize) -> f64 {
        self.triangles[tri_of(he)].angle(side_of(he))
    }

    /// Corner positions `[origin, target, apex]` in the chart of `he`: origin at
    /// `(0,0)`, target on the positive x axis, apex in the upper half plane.
    pub fn side_chart(&self, he: usize) -> [Vec2; 3] {
        let t = &self.triangles[tri_of(he)];
        let s = side_of(he);
        let base = t.len[s];
        let right = t.len[(s + 1) % 3];
        let left = t.len[(s + 2) % 3];
        [
            Vec2::zeros(),
            Vec2::new(base, 0.0),
            apex_position(base, left, right),
        ]
    }

    /// Rigid motion from the chart of `he` to the face chart of its triangle.
    pub fn side_to_face(&self, he: usize) -> Rigid2 {
        let chart = self.triangles[tri_of(he)].chart();
        let s = side_of(he);
        Rigid2::frame(chart[s], chart[(s + 1) % 3]).inverse()
    }

    /// Rigid motion from the chart of `he` to the chart of `twin(he)`.
    pub fn across(&self, he: usize) -> Rigid2 {
        Rigid2::new(std::f64::consts::PI, Vec2::new(self.length(he), 0.0))
    }

    /// Outgoing half-edges of `v` in counter-clockwise order, starting from the
    /// lowest-numbered one. Assumes the fan around `v` closes up.
    pub fn outgoing(&self, v: usize) -> Vec<usize> {
        let Some(start) = (0..self.twin.len()).find(|&h| self.origin(h) == v) else {
            return Vec::new();
        };
        let mut out = vec![start];
        let mut h = self.twin[prev(start)];
        while h != start {
            out.push(h);
            h = self.twin[prev(h)];
            if out.len() > self.twin.len() {
                break;
            }
        }
        out
    }

    pub fn degree(&self, v: usize) -> usize {
        self.outgoing(v).len()
    }

    /// Sum of corner angles at every vertex.
    pub fn total_angles(&self) -> Vec<f64> {
        let mut total = vec![0.0; self.vertex_count];
        for he in 0..self.twin.len() {
            total[self.origin(he)] += self.corner_angle(he);
        }
        total
    }

    /// Replace the diagonal `e` of the quadrilateral formed by its two triangles
    /// with the opposite diagonal of length `new_len`. The edge keeps its id.
    /// Returns the half-edges of the new diagonal.
    pub fn flip(&mut self, e: usize, new_len: f64) -> (usize, usize) {
        let h = self.edge_he[e];
        let g = self.twin[h];
        let (t, u) = (tri_of(h), tri_of(g));
        assert_ne!(t, u, "cannot flip an edge bounded twice by one triangle");
        // t = (a, b, c) with h = a->b; u = (b, a, d) with g = b->a.
        let a = self.origin(h);
        let b = self.target(h);
        let c = self.apex(h);
        let d = self.apex(g);
        let (h_bc, h_ca) = (next(h), prev(h));
        let (h_ad, h_db) = (next(g), prev(g));
        let outer = [h_bc, h_ca, h_ad, h_db];
        let outer_twin = outer.map(|x| self.twin[x]);
        let outer_len = outer.map(|x| self.length(x));
        let outer_edge = outer.map(|x| self.edge[x]);

        // New t = (c, a, d): sides c->a, a->d, d->c. New u = (d, b, c): d->b, b->c, c->d.
        self.triangles[t] = Triangle {
            v: [c, a, d],
            len: [outer_len[1], outer_len[2], new_len],
        };
        self.triangles[u] = Triangle {
            v: [d, b, c],
            len: [outer_len[3], outer_len[0], new_len],
        };
        let new_pos = [3 * u + 1, 3 * t, 3 * t + 1, 3 * u];
        let remap = |x: usize| -> usize {
            match outer.iter().position(|&o| o == x) {
                Some(i) => new_pos[i],
                None => x,
            }
        };
        for i in 0..4 {
            let tw = remap(outer_twin[i]);
            self.twin[new_pos[i]] = tw;
            self.twin[tw] = new_pos[i];
            self.edge[new_pos[i]] = outer_edge[i];
        }
        let (dc, cd) = (3 * t + 2, 3 * u + 2);
        self.twin[dc] = cd;
        self.twin[cd] = dc;
        self.edge[dc] = e;
        self.edge[cd] = e;
        for he in [3 * t, 3 * t + 1, 3 * t + 2, 3 * u, 3 * u + 1, 3 * u + 2] {
            let edge = self.edge[he];
            self.edge_he[edge] = he.min(self.twin[he]);
        }
        (dc, cd)
    }
}
