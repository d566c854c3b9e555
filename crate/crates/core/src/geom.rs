//! Small planar and spatial helpers shared by the surface algorithms.

use nalgebra::{Vector2, Vector3};

pub type Vec2 = Vector2<f64>;
pub type Vec3 = Vector3<f64>;

/// Angle at the vertex opposite side `c` in a triangle with sides `a`, `b`, `c`
/// (law of cosines, argument clamped to [-1, 1]).
pub fn angle_opposite(a: f64, b: f64, c: f64) -> f64 {
    let cos = (a * a + b * b - c * c) / (2.0 * a * b);
    cos.clamp(-1.0, 1.0).acos()
}

/// Place the apex of a triangle over the base `(0,0)-(base,0)` with the apex in
/// the upper half plane. `left` is the distance from the origin, `right` from
/// `(base, 0)`.
pub fn apex_position(base: f64, left: f64, right: f64) -> Vec2 {
    let x = (base * base + left * left - right * right) / (2.0 * base);
    let y = (left * left - x * x).max(0.0).sqrt();
    Vec2::new(x, y)
}

pub fn cross2(a: &Vec2, b: &Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Orientation-preserving rigid motion of the plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rigid2 {
    pub angle: f64,
    cos: f64,
    sin: f64,
    pub shift: Vec2,
}

impl Rigid2 {
    pub fn identity() -> Self {
        Self::new(0.0, Vec2::zeros())
    }

    pub fn new(angle: f64, shift: Vec2) -> Self {
        Rigid2 {
            angle,
            cos: angle.cos(),
            sin: angle.sin(),
            shift,
        }
    }

    /// The motion taking `origin` to `(0,0)` and the direction `towards - origin`
    /// onto the positive x axis.
    pub fn frame(origin: Vec2, towards: Vec2) -> Self {
        let d = towards - origin;
        let angle = -d.y.atan2(d.x);
        let rot = Rigid2::new(angle, Vec2::zeros());
        let shift = -rot.rotate(&origin);
        Rigid2::new(angle, shift)
    }

    pub fn rotate(&self, v: &Vec2) -> Vec2 {
        Vec2::new(
            self.cos * v.x - self.sin * v.y,
            self.sin * v.x + self.cos * v.y,
        )
    }

    pub fn apply(&self, p: &Vec2) -> Vec2 {
        self.rotate(p) + self.shift
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Rigid2) -> Rigid2 {
        Rigid2::new(self.angle + other.angle, self.apply(&other.shift))
    }

    pub fn inverse(&self) -> Rigid2 {
        let rot = Rigid2::new(-self.angle, Vec2::zeros());
        Rigid2::new(-self.angle, -rot.rotate(&self.shift))
    }
}

/// Reduce an angle into `[0, period)`.
pub fn wrap_angle(a: f64, period: f64) -> f64 {
    let r = a.rem_euclid(period);
    if r >= period {
        0.0
    } else {
        r
    }
}

/// Reduce an angle into `(-π, π]`.
pub fn wrap_pi(a: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let r = a - two_pi * (a / two_pi).round();
    if r <= -std::f64::consts::PI {
        r + two_pi
    } else {
        r
    }
}

/// Argument of a planar vector.
pub fn arg(v: &Vec2) -> f64 {
    v.y.atan2(v.x)
}

/// Circumcenter of three planar points, `None` when they are (nearly) collinear.
pub fn circumcenter(a: &Vec2, b: &Vec2, c: &Vec2) -> Option<Vec2> {
    let ab = b - a;
    let ac = c - a;
    let d = 2.0 * cross2(&ab, &ac);
    let scale = ab.norm_squared().max(ac.norm_squared());
    if d.abs() <= 1e-12 * scale {
        return None;
    }
    let ab2 = ab.norm_squared();
    let ac2 = ac.norm_squared();
    let ux = (ac.y * ab2 - ab.y * ac2) / d;
    let uy = (ab.x * ac2 - ac.x * ab2) / d;
    Some(a + Vec2::new(ux, uy))
}

/// Heron's formula, robust ordering (Kahan).
pub fn triangle_area(a: f64, b: f64, c: f64) -> f64 {
    let mut s = [a, b, c];
    s.sort_by(|x, y| y.total_cmp(x));
    let [a, b, c] = s;
    let p = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
    0.25 * p.max(0.0).sqrt()
}
