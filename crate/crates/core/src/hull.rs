//! Intrinsic metric of the boundary of a 3D convex hull.
//!
//! Facets are found by brute force over point triples, which is plenty for the
//! fixture sizes this is used with (tens of points).

use std::collections::BTreeSet;

use crate::geom::Vec3;
use crate::mesh::Triangle;
use crate::metric::{MetricError, PolyhedralMetric};

/// A hull metric together with the hull points it was built from, reindexed so
/// that vertex `i` of the metric is `points[i]`.
#[derive(Clone, Debug)]
pub struct HullMetric {
    pub metric: PolyhedralMetric,
    pub points: Vec<Vec3>,
    /// For each metric vertex, the index of that point in the caller's input.
    pub source_index: Vec<usize>,
}

/// Build the intrinsic metric of the convex hull surface of `points`.
///
/// Points that are not hull vertices (interior points, or points in the relative
/// interior of a facet or hull edge) are dropped and the rest renumbered in
/// input order. Each facet polygon is fan-triangulated from its lowest-index
/// vertex.
pub fn intrinsic_from_hull(points: &[Vec3]) -> Result<PolyhedralMetric, MetricError> {
    hull_metric(points).map(|h| h.metric)
}

pub fn hull_metric(points: &[Vec3]) -> Result<HullMetric, MetricError> {
    let n = points.len();
    if n < 4 {
        return Err(MetricError::Hull(format!(
            "need at least 4 points, got {n}"
        )));
    }
    let scale = points
        .iter()
        .flat_map(|p| points.iter().map(move |q| (p - q).norm()))
        .fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(MetricError::Hull("points are not full-dimensional".into()));
    }
    let tol = 1e-10 * scale;

    // Supporting planes, deduplicated by the set of points they contain.
    let mut facets: Vec<(Vec3, Vec<usize>)> = Vec::new();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let normal = (points[j] - points[i]).cross(&(points[k] - points[i]));
                let norm = normal.norm();
                if norm <= 1e-12 * scale * scale {
                    continue;
                }
                let mut normal = normal / norm;
                let offset = |p: &Vec3| normal.dot(&(p - points[i]));
                let (mut above, mut below) = (false, false);
                for p in points {
                    let s = offset(p);
                    above |= s > tol;
                    below |= s < -tol;
                }
                if above && below {
                    continue;
                }
                if !above && !below {
                    return Err(MetricError::Hull("points are not full-dimensional".into()));
                }
                if above {
                    normal = -normal;
                }
                let on: Vec<usize> = (0..n)
                    .filter(|&m| normal.dot(&(points[m] - points[i])).abs() <= tol)
                    .collect();
                if seen.insert(on.clone()) {
                    facets.push((normal, on));
                }
            }
        }
    }
    if facets.is_empty() {
        return Err(MetricError::Hull("points are not full-dimensional".into()));
    }

    let polygons: Vec<Vec<usize>> = facets
        .iter()
        .map(|(normal, on)| facet_polygon(points, normal, on, tol))
        .collect();
    let mut is_vertex = vec![false; n];
    for poly in &polygons {
        for &v in poly {
            is_vertex[v] = true;
        }
    }
    let source_index: Vec<usize> = (0..n).filter(|&i| is_vertex[i]).collect();
    if source_index.len() < 4 {
        return Err(MetricError::Hull(format!(
            "only {} hull vertices",
            source_index.len()
        )));
    }
    let mut new_index = vec![usize::MAX; n];
    for (k, &i) in source_index.iter().enumerate() {
        new_index[i] = k;
    }

    let mut triangles = Vec::new();
    for poly in &polygons {
        let start = (0..poly.len()).min_by_key(|&k| poly[k]).unwrap();
        let rotated: Vec<usize> = (0..poly.len())
            .map(|k| poly[(start + k) % poly.len()])
            .collect();
        for k in 1..rotated.len() - 1 {
            let tri = [rotated[0], rotated[k], rotated[k + 1]];
            let len = [
                (points[tri[1]] - points[tri[0]]).norm(),
                (points[tri[2]] - points[tri[1]]).norm(),
                (points[tri[0]] - points[tri[2]]).norm(),
            ];
            triangles.push(Triangle {
                v: tri.map(|i| new_index[i]),
                len,
            });
        }
    }
    Ok(HullMetric {
        metric: PolyhedralMetric {
            vertex_count: source_index.len(),
            triangles,
            gluing: None,
        },
        points: source_index.iter().map(|&i| points[i]).collect(),
        source_index,
    })
}

/// Extreme points of a planar facet in counter-clockwise order seen from
/// outside (along `normal`).
fn facet_polygon(points: &[Vec3], normal: &Vec3, on: &[usize], tol: f64) -> Vec<usize> {
    let origin = points[on[0]];
    let helper = if normal.x.abs() < 0.9 {
        Vec3::x()
    } else {
        Vec3::y()
    };
    let e1 = normal.cross(&helper).normalize();
    let e2 = normal.cross(&e1);
    let planar: Vec<(f64, f64, usize)> = on
        .iter()
        .map(|&i| {
            let d = points[i] - origin;
            (d.dot(&e1), d.dot(&e2), i)
        })
        .collect();
    // Monotone chain with collinear points removed.
    let mut sorted = planar.clone();
    sorted.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then(a.1.total_cmp(&b.1))
            .then(a.2.cmp(&b.2))
    });
    let cross = |o: &(f64, f64, usize), a: &(f64, f64, usize), b: &(f64, f64, usize)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    // tol is 1e-10 of the point-set diameter; compare areas at the same scale.
    let area_tol = tol * tol * 1e10;
    let mut hull: Vec<(f64, f64, usize)> = Vec::new();
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &(f64, f64, usize)>> = if pass == 0 {
            Box::new(sorted.iter())
        } else {
            Box::new(sorted.iter().rev())
        };
        for p in iter {
            while hull.len() >= start + 2
                && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= area_tol
            {
                hull.pop();
            }
            hull.push(*p);
        }
        hull.pop();
    }
    // e1 x e2 = normal, so counter-clockwise in (e1, e2) is counter-clockwise
    // seen from outside.
    hull.into_iter().map(|p| p.2).collect()
}
