//! Embedding convex polyhedral metrics as convex polyhedra.
//!
//! The pipeline: validate a [`metric::PolyhedralMetric`], compute surface
//! distances and a Delaunay triangulation, drive the apex curvatures to zero by
//! adjusting per-vertex radii, and read off 3D coordinates.

pub mod delaunay;
pub mod embed;
pub mod fixtures;
pub mod geom;
pub mod hull;
pub mod mesh;
pub mod metric;
pub mod paths;
pub mod solver;
pub mod star;
pub mod voronoi;

pub use metric::{MetricError, PolyhedralMetric, Surface};
