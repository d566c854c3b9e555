//! Geometry of the star of apex tetrahedra over a triangulation: dihedral
//! angles, curvatures and the curvature Jacobian in the radii.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::delaunay::{triangle_center_power, DelaunayError, Triangulation};
use crate::metric::Surface;

#[derive(Debug, Error)]
pub enum StarError {
    #[error("degenerate tetrahedron with side lengths {0:?}")]
    Degenerate([f64; 6]),
    #[error("face {face} has nonnegative power {power} under the squared radii")]
    NonnegativePower { face: usize, power: f64 },
    #[error("radius {index} is not a positive finite number: {value}")]
    BadRadius { index: usize, value: f64 },
    #[error("{found} radii for {expected} vertices")]
    RadiusCount { expected: usize, found: usize },
    #[error(transparent)]
    Delaunay(#[from] DelaunayError),
}

/// Per-vertex distances from the apex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusAssignment {
    pub r: Vec<f64>,
}

impl RadiusAssignment {
    pub fn new(r: Vec<f64>) -> Result<Self, StarError> {
        for (index, &value) in r.iter().enumerate() {
            if !(value.is_finite() && value > 0.0) {
                return Err(StarError::BadRadius { index, value });
            }
        }
        Ok(RadiusAssignment { r })
    }

    pub fn uniform(n: usize, radius: f64) -> Result<Self, StarError> {
        Self::new(vec![radius; n])
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// Weights `r_i^2` for the weighted Delaunay triangulation.
    pub fn weights(&self) -> Vec<f64> {
        self.r.iter().map(|r| r * r).collect()
    }
}

/// Side lengths of a tetrahedron `ABCD` in the order `AB, AC, AD, BC, BD, CD`.
pub type TetLengths = [f64; 6];

struct Gram {
    uu: f64,
    cc: f64,
    dd: f64,
    uc: f64,
    ud: f64,
    cd: f64,
}

impl Gram {
    /// Gram matrix of `u = BA`, `c = BC`, `d = BD`. Based at `B` so that, for
    /// apex tetrahedra with `A` far away, the long sides only enter through
    /// the differences `AB - AC` and `AB - AD`.
    fn new(l: &TetLengths) -> Self {
        let [ab, ac, ad, bc, bd, cd] = *l;
        Gram {
            uu: ab * ab,
            cc: bc * bc,
            dd: bd * bd,
            uc: 0.5 * (bc * bc + (ab - ac) * (ab + ac)),
            ud: 0.5 * (bd * bd + (ab - ad) * (ab + ad)),
            cd: 0.5 * (bc * bc + bd * bd - cd * cd),
        }
    }

    fn det(&self) -> f64 {
        self.uu * (self.cc * self.dd - self.cd * self.cd)
            - self.uc * (self.uc * self.dd - self.cd * self.ud)
            + self.ud * (self.uc * self.cd - self.cc * self.ud)
    }
}

/// Relative cut for the volume and face-area tests, against the products of
/// the Gram diagonal.
const DEGENERACY_TOL: f64 = 1e-14;

fn check_tet(l: &TetLengths) -> Result<Gram, StarError> {
    if l.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(StarError::Degenerate(*l));
    }
    let g = Gram::new(l);
    // det = 36 [ABCD]^2 and uu cc - uc^2 = 4 [ABC]^2, each bounded by the
    // product of the diagonal entries involved.
    let det = g.det();
    let abc = g.uu * g.cc - g.uc * g.uc;
    let abd = g.uu * g.dd - g.ud * g.ud;
    if det <= DEGENERACY_TOL * g.uu * g.cc * g.dd
        || abc <= DEGENERACY_TOL * g.uu * g.cc
        || abd <= DEGENERACY_TOL * g.uu * g.dd
    {
        return Err(StarError::Degenerate(*l));
    }
    Ok(g)
}

/// Dihedral angle of `ABCD` along `AB`, in `(0, pi)`.
pub fn dihedral_angle(l: &TetLengths) -> Result<f64, StarError> {
    let g = check_tet(l)?;
    let n = g.uu * g.cd - g.uc * g.ud;
    let s = (g.uu * g.det()).sqrt();
    Ok(s.atan2(n))
}

/// Partial derivatives of the dihedral angle along `AB` in `AB`, `AC`, `AD`.
pub fn dihedral_gradient(l: &TetLengths) -> Result<[f64; 3], StarError> {
    let g = check_tet(l)?;
    let det = g.det();
    let n = g.uu * g.cd - g.uc * g.ud;
    let s = (g.uu * det).sqrt();
    let norm2 = n * n + s * s;
    // Derivatives of the determinant in each (symmetric) Gram entry.
    let d_uu = g.cc * g.dd - g.cd * g.cd;
    let d_cc = g.uu * g.dd - g.ud * g.ud;
    let d_dd = g.uu * g.cc - g.uc * g.uc;
    let d_uc = 2.0 * (g.cd * g.ud - g.uc * g.dd);
    let d_ud = 2.0 * (g.uc * g.cd - g.cc * g.ud);
    let d_cd = 2.0 * (g.uc * g.ud - g.uu * g.cd);
    let (x, y, z) = (l[0], l[1], l[2]);
    // Entry derivatives (uu, cc, dd, uc, ud, cd) per variable.
    let partials = [
        [2.0 * x, 0.0, 0.0, x, x, 0.0],
        [0.0, 0.0, 0.0, -y, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, -z, 0.0],
    ];
    Ok(partials.map(|[uu, cc, dd, uc, ud, cd]| {
        let dn = uu * g.cd + g.uu * cd - uc * g.ud - g.uc * ud;
        let ddet = d_uu * uu + d_cc * cc + d_dd * dd + d_uc * uc + d_ud * ud + d_cd * cd;
        let ds = (uu * det + g.uu * ddet) / (2.0 * s);
        (n * ds - s * dn) / norm2
    }))
}

/// Central finite-difference version of [`dihedral_gradient`].
pub fn dihedral_gradient_fd(l: &TetLengths) -> Result<[f64; 3], StarError> {
    let mut out = [0.0; 3];
    for (k, slot) in out.iter_mut().enumerate() {
        let h = 1e-6 * l[k];
        let mut plus = *l;
        let mut minus = *l;
        plus[k] += h;
        minus[k] -= h;
        *slot = (dihedral_angle(&plus)? - dihedral_angle(&minus)?) / (2.0 * h);
    }
    Ok(out)
}

/// Volume of a tetrahedron from its side lengths.
pub fn tet_volume(l: &TetLengths) -> f64 {
    Gram::new(l).det().max(0.0).sqrt() / 6.0
}

/// Area of a triangle from its side lengths.
pub fn triangle_area_from_lengths(a: f64, b: f64, c: f64) -> f64 {
    let s = 0.5 * (a + b + c);
    (s * (s - a) * (s - b) * (s - c)).max(0.0).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StarDiagnostics {
    /// Smallest defect-curvature gap `delta_i - kappa_i`.
    pub eps2: f64,
    /// Smallest apex angle between adjacent vertices.
    pub eps3: f64,
    /// Largest curvature.
    pub eps4: f64,
    /// Smallest corner angle of the base triangles.
    pub eps5: f64,
    /// Curvature skew `max(kappa/delta) / min(kappa/delta) - 1`; infinite if
    /// some curvature is not positive.
    pub eps7: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StarState {
    pub kappa: Vec<f64>,
    /// Indexed by triangulation edge.
    pub phi: Vec<f64>,
    /// Indexed by face.
    pub altitudes: Vec<f64>,
    /// Dihedral angle along the apex edge of each face corner, indexed like the
    /// face corners.
    pub dihedrals: Vec<[f64; 3]>,
    pub diagnostics: StarDiagnostics,
}

fn check_radii(t: &Triangulation, r: &RadiusAssignment) -> Result<(), StarError> {
    if r.len() != t.vertex_count() {
        return Err(StarError::RadiusCount {
            expected: t.vertex_count(),
            found: r.len(),
        });
    }
    RadiusAssignment::new(r.r.clone()).map(|_| ())
}

/// Lengths of the apex tetrahedron `O v_a v_b v_c` with the dihedral along
/// `O v_a` in front, for corner `k` of a face.
fn corner_tet(t: &Triangulation, r: &[f64], face: usize, k: usize) -> TetLengths {
    let tri = t.mesh().triangle(face);
    let (a, b, c) = (k, (k + 1) % 3, (k + 2) % 3);
    [
        r[tri.v[a]],
        r[tri.v[b]],
        r[tri.v[c]],
        tri.len[a],
        tri.len[c],
        tri.len[b],
    ]
}

struct FaceResult {
    altitude: f64,
    dihedrals: [f64; 3],
    min_angle: f64,
}

fn face_result(
    t: &Triangulation,
    r: &RadiusAssignment,
    face: usize,
) -> Result<FaceResult, StarError> {
    let tri = t.mesh().triangle(face);
    let w = tri.v.map(|v| r.r[v] * r.r[v]);
    let power = triangle_center_power(tri.len, w)?.power;
    let scale = tri.len.iter().copied().fold(0.0, f64::max);
    if !(power < -1e-14 * scale * scale) {
        return Err(StarError::NonnegativePower { face, power });
    }
    let mut dihedrals = [0.0; 3];
    for (k, slot) in dihedrals.iter_mut().enumerate() {
        *slot = dihedral_angle(&corner_tet(t, &r.r, face, k))?;
    }
    let min_angle = (0..3).map(|k| tri.angle(k)).fold(f64::INFINITY, f64::min);
    Ok(FaceResult {
        altitude: (-power).sqrt(),
        dihedrals,
        min_angle,
    })
}

/// Curvatures, apex angles and altitudes of the star `(M, T, r)`.
pub fn star_state(
    surface: &Surface,
    t: &Triangulation,
    r: &RadiusAssignment,
) -> Result<StarState, StarError> {
    check_radii(t, r)?;
    let mesh = t.mesh();
    let faces: Vec<FaceResult> = (0..mesh.face_count())
        .into_par_iter()
        .map(|f| face_result(t, r, f))
        .collect::<Result<_, _>>()?;
    let n = t.vertex_count();
    let mut kappa = vec![2.0 * PI; n];
    for (f, res) in faces.iter().enumerate() {
        let tri = mesh.triangle(f);
        for k in 0..3 {
            kappa[tri.v[k]] -= res.dihedrals[k];
        }
    }
    let phi: Vec<f64> = (0..mesh.edge_count())
        .map(|e| {
            let h = mesh.edge_half(e);
            let (ri, rj) = (r.r[mesh.origin(h)], r.r[mesh.target(h)]);
            let l = mesh.length(h);
            ((ri * ri + rj * rj - l * l) / (2.0 * ri * rj))
                .clamp(-1.0, 1.0)
                .acos()
        })
        .collect();
    let delta = &surface.defects().delta;
    let eps2 = (0..n)
        .map(|i| delta[i] - kappa[i])
        .fold(f64::INFINITY, f64::min);
    let eps3 = phi.iter().copied().fold(f64::INFINITY, f64::min);
    let eps4 = kappa.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let eps5 = faces
        .iter()
        .map(|f| f.min_angle)
        .fold(f64::INFINITY, f64::min);
    let ratios = (0..n).map(|i| kappa[i] / delta[i]);
    let (lo, hi) = ratios.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
        (lo.min(x), hi.max(x))
    });
    let eps7 = if lo > 0.0 {
        hi / lo - 1.0
    } else {
        f64::INFINITY
    };
    Ok(StarState {
        kappa,
        phi,
        altitudes: faces.iter().map(|f| f.altitude).collect(),
        dihedrals: faces.iter().map(|f| f.dihedrals).collect(),
        diagnostics: StarDiagnostics {
            eps2,
            eps3,
            eps4,
            eps5,
            eps7,
        },
    })
}

/// Jacobian `d kappa_i / d r_j`, assembled from per-corner dihedral gradients.
pub fn jacobian(t: &Triangulation, r: &RadiusAssignment) -> Result<DMatrix<f64>, StarError> {
    check_radii(t, r)?;
    let mesh = t.mesh();
    let grads: Vec<[[f64; 3]; 3]> = (0..mesh.face_count())
        .into_par_iter()
        .map(|f| {
            let mut g = [[0.0; 3]; 3];
            for (k, slot) in g.iter_mut().enumerate() {
                *slot = dihedral_gradient(&corner_tet(t, &r.r, f, k))?;
            }
            Ok(g)
        })
        .collect::<Result<_, StarError>>()?;
    let n = t.vertex_count();
    let mut j = DMatrix::zeros(n, n);
    for (f, g) in grads.iter().enumerate() {
        let v = mesh.triangle(f).v;
        for k in 0..3 {
            let (a, b, c) = (v[k], v[(k + 1) % 3], v[(k + 2) % 3]);
            j[(a, a)] -= g[k][0];
            j[(a, b)] -= g[k][1];
            j[(a, c)] -= g[k][2];
        }
    }
    Ok(j)
}
