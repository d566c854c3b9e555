//! Radius solver: drives every apex curvature below a target by damped
//! Newton steps in curvature space, keeping the assignment good along the way.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::delaunay::{
    delaunay_triangulation, retriangulate, weighted_delaunay, DelaunayError, Triangulation,
};
use crate::metric::Surface;
use crate::star::{jacobian, star_state, RadiusAssignment, StarError, StarState};

/// Largest step size the controller will use; above it the target curvature
/// can go negative.
pub const MAX_STEP: f64 = 0.5;
const MIN_STEP: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub eps: f64,
    pub max_iters: usize,
    pub p0: f64,
    pub radius_growth: f64,
    pub full_retriangulate: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            eps: 1e-6,
            max_iters: 10_000,
            p0: 0.1,
            radius_growth: 2.0,
            full_retriangulate: false,
        }
    }
}

impl SolverConfig {
    pub fn check(&self) -> Result<(), SolverError> {
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(SolverError::Config(format!(
                "eps must be positive, got {}",
                self.eps
            )));
        }
        if !(self.p0 > 0.0 && self.p0 < 1.0) {
            return Err(SolverError::Config(format!(
                "p0 must be in (0, 1), got {}",
                self.p0
            )));
        }
        if !(self.radius_growth > 1.0 && self.radius_growth.is_finite()) {
            return Err(SolverError::Config(format!(
                "radius growth must exceed 1, got {}",
                self.radius_growth
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error("no good equal-radius start found up to radius {limit}")]
    Initialization { limit: f64 },
    #[error("no convergence after {} iterations (max curvature {})", .0.iterations, .0.star.diagnostics.eps4)]
    MaxIterations(Box<SolveOutput>),
    #[error("step size collapsed below {} at max curvature {}", MIN_STEP, .0.star.diagnostics.eps4)]
    StepCollapse(Box<SolveOutput>),
    #[error("linear solve failed: {0}")]
    LinearSolve(String),
    #[error(transparent)]
    Star(#[from] StarError),
    #[error(transparent)]
    Delaunay(#[from] DelaunayError),
}

impl SolverError {
    /// The partial result of a run that did not converge.
    pub fn partial(&self) -> Option<&SolveOutput> {
        match self {
            SolverError::MaxIterations(out) | SolverError::StepCollapse(out) => Some(out),
            _ => None,
        }
    }
}

/// One step attempt.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iter: usize,
    pub p: f64,
    pub eps2: f64,
    pub eps4: f64,
    pub eps7: f64,
    pub accepted: bool,
    pub flips: usize,
    /// Realized `|kappa' - kappa*|_inf`, or `null` if the candidate was invalid.
    pub error: Option<f64>,
    pub bound: f64,
    /// Step size for the next attempt.
    pub p_next: f64,
}

#[derive(Clone, Debug)]
pub struct SolverState {
    pub r: RadiusAssignment,
    pub t: Triangulation,
    pub star: StarState,
    pub p: f64,
    pub iter: usize,
    pub trace: Vec<TraceRecord>,
}

#[derive(Clone, Debug)]
pub struct SolveOutput {
    pub radii: RadiusAssignment,
    pub triangulation: Triangulation,
    pub star: StarState,
    pub iterations: usize,
    pub trace: Vec<TraceRecord>,
}

/// Defect bounds used by the goodness test: `(eps1, eps8)`, the smallest
/// defect and the smallest cone angle.
pub fn defect_bounds(surface: &Surface) -> (f64, f64) {
    let delta = &surface.defects().delta;
    let eps1 = delta.iter().copied().fold(f64::INFINITY, f64::min);
    let eps8 = delta
        .iter()
        .map(|d| 2.0 * PI - d)
        .fold(f64::INFINITY, f64::min);
    (eps1, eps8)
}

/// Skew bound `eps7 < eps8 / 4 pi` and a positive defect-curvature gap.
pub fn is_good(surface: &Surface, star: &StarState) -> bool {
    let (_, eps8) = defect_bounds(surface);
    let d = &star.diagnostics;
    d.eps7 < eps8 / (4.0 * PI) && d.eps2 > 0.0
}

/// Equal radii, grown geometrically from the longest edge until the star is
/// valid and good.
pub fn initial_radii(
    surface: &Surface,
    seed: &Triangulation,
    config: &SolverConfig,
) -> Result<(RadiusAssignment, Triangulation, StarState), SolverError> {
    config.check()?;
    let n = surface.vertex_count();
    let limit = 1e6 * surface_extent(surface);
    let mut radius = surface.max_edge_length();
    while radius <= limit {
        let r = RadiusAssignment::uniform(n, radius)?;
        if let Ok(star) = star_state(surface, seed, &r) {
            let below = (0..n).all(|i| star.kappa[i] < surface.defects().delta[i]);
            if below && is_good(surface, &star) {
                return Ok((r, seed.clone(), star));
            }
        }
        radius *= config.radius_growth;
    }
    Err(SolverError::Initialization { limit })
}

/// Upper bound on the surface diameter: the total edge length.
fn surface_extent(surface: &Surface) -> f64 {
    let mesh = surface.mesh();
    (0..mesh.edge_count()).map(|e| mesh.edge_length(e)).sum()
}

/// Target curvatures `kappa* = kappa - p kappa - p (kappa - delta min(kappa/delta))`.
pub fn step_target(kappa: &[f64], delta: &[f64], p: f64) -> Vec<f64> {
    let m = kappa
        .iter()
        .zip(delta)
        .map(|(k, d)| k / d)
        .fold(f64::INFINITY, f64::min);
    kappa
        .iter()
        .zip(delta)
        .map(|(k, d)| k - p * k - p * (k - d * m))
        .collect()
}

/// Solve `J x = b`, falling back to a Tikhonov-regularized least-squares
/// solve when `J` is badly conditioned.
pub fn solve_linear(j: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>, SolverError> {
    let svd = j.clone().svd(false, false);
    let sv = &svd.singular_values;
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if !(smax > 0.0 && smax.is_finite()) {
        return Err(SolverError::LinearSolve(
            "zero or non-finite Jacobian".into(),
        ));
    }
    if smin > 1e-12 * smax {
        if let Some(x) = j.clone().lu().solve(b) {
            return Ok(x);
        }
    }
    let lambda = (1e-12 * smax).powi(2);
    let jt = j.transpose();
    let mut normal = &jt * j;
    for i in 0..normal.nrows() {
        normal[(i, i)] += lambda;
    }
    normal
        .cholesky()
        .map(|c| c.solve(&(&jt * b)))
        .ok_or_else(|| {
            SolverError::LinearSolve("regularized system is not positive definite".into())
        })
}

#[derive(Clone, Debug)]
pub struct Candidate {
    pub r: RadiusAssignment,
    pub t: Triangulation,
    pub star: StarState,
    pub target: Vec<f64>,
    /// `|kappa' - kappa*|_inf`.
    pub error: f64,
    pub flips: usize,
}

/// Newton step toward the target curvatures for step size `p`. Returns
/// `None` when the candidate radii do not give a valid star.
pub fn propose_step(
    surface: &Surface,
    seed: &Triangulation,
    state: &SolverState,
    p: f64,
    full_retriangulate: bool,
) -> Result<Option<Candidate>, SolverError> {
    let delta = &surface.defects().delta;
    let target = step_target(&state.star.kappa, delta, p);
    let b = DVector::from_iterator(
        target.len(),
        target.iter().zip(&state.star.kappa).map(|(t, k)| t - k),
    );
    let j = jacobian(&state.t, &state.r)?;
    let dr = solve_linear(&j, &b)?;
    let new_r: Vec<f64> = state
        .r
        .r
        .iter()
        .zip(dr.iter())
        .map(|(r, d)| r + d)
        .collect();
    let Ok(r) = RadiusAssignment::new(new_r) else {
        return Ok(None);
    };
    let w = r.weights();
    let retri = if full_retriangulate {
        weighted_delaunay(seed, &w)
    } else {
        retriangulate(&state.t, &state.r.weights(), &w)
    };
    let (t, stats) = match retri {
        Ok(x) => x,
        Err(DelaunayError::Precondition { .. } | DelaunayError::NonConvexQuad(_)) => {
            return Ok(None)
        }
        Err(e) => return Err(e.into()),
    };
    #[cfg(debug_assertions)]
    if !full_retriangulate {
        if let Ok((full, _)) = weighted_delaunay(seed, &w) {
            let a = crate::delaunay::classify_all(&full, &w)?;
            let b = crate::delaunay::classify_all(&t, &w)?;
            let violated = |c: &Vec<Option<crate::delaunay::Convexity>>| {
                c.iter()
                    .any(|x| *x == Some(crate::delaunay::Convexity::Violated))
            };
            debug_assert_eq!(violated(&a), violated(&b));
        }
    }
    let star = match star_state(surface, &t, &r) {
        Ok(s) => s,
        Err(StarError::NonnegativePower { .. } | StarError::Degenerate(_)) => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let error = star
        .kappa
        .iter()
        .zip(&target)
        .map(|(k, t)| (k - t).abs())
        .fold(0.0, f64::max);
    Ok(Some(Candidate {
        r,
        t,
        star,
        target,
        error,
        flips: stats.flips,
    }))
}

/// Largest acceptable `|kappa' - kappa*|_inf` at step size `p`.
pub fn acceptance_bound(surface: &Surface, star: &StarState, p: f64, eps: f64) -> f64 {
    let (eps1, _) = defect_bounds(surface);
    let eps4 = star.diagnostics.eps4;
    let mut min_kappa = star.kappa.iter().copied().fold(f64::INFINITY, f64::min);
    if min_kappa < eps / 10.0 {
        min_kappa = eps / 10.0;
    }
    (p * eps4 / 2.0)
        .min(p * eps1 / 2.0)
        .min(p * eps1 / (4.0 * PI) * min_kappa)
}

/// Solve for radii with maximum curvature at most `config.eps`, starting
/// from the unweighted Delaunay triangulation of the surface.
pub fn solve_radii(surface: &Surface, config: &SolverConfig) -> Result<SolveOutput, SolverError> {
    let seed = delaunay_triangulation(surface)?;
    solve_radii_with_seed(surface, &seed, config)
}

pub fn solve_radii_with_seed(
    surface: &Surface,
    seed: &Triangulation,
    config: &SolverConfig,
) -> Result<SolveOutput, SolverError> {
    let (r, t, _) = initial_radii(surface, seed, config)?;
    solve_from(surface, seed, r, t, config)
}

/// Run the step loop from a given assignment and triangulation (Delaunay for
/// the squared radii).
pub fn solve_from(
    surface: &Surface,
    seed: &Triangulation,
    r: RadiusAssignment,
    t: Triangulation,
    config: &SolverConfig,
) -> Result<SolveOutput, SolverError> {
    config.check()?;
    let star = star_state(surface, &t, &r)?;
    let mut state = SolverState {
        r,
        t,
        star,
        p: config.p0.min(MAX_STEP),
        iter: 0,
        trace: Vec::new(),
    };
    let finish = |state: SolverState| SolveOutput {
        radii: state.r,
        triangulation: state.t,
        star: state.star,
        iterations: state.iter,
        trace: state.trace,
    };
    while state.star.diagnostics.eps4 > config.eps {
        if state.iter >= config.max_iters {
            return Err(SolverError::MaxIterations(Box::new(finish(state))));
        }
        state.iter += 1;
        let p = state.p;
        let bound = acceptance_bound(surface, &state.star, p, config.eps);
        let cand = propose_step(surface, seed, &state, p, config.full_retriangulate)?;
        let accepted = cand.as_ref().is_some_and(|c| {
            c.error <= bound
                && c.star.diagnostics.eps4 < state.star.diagnostics.eps4
                && is_good(surface, &c.star)
        });
        let error = cand.as_ref().map(|c| c.error);
        let flips = cand.as_ref().map_or(0, |c| c.flips);
        if accepted {
            let c = cand.unwrap();
            if c.error < bound / 2.0 {
                state.p = (2.0 * p).min(MAX_STEP);
            }
            state.r = c.r;
            state.t = c.t;
            state.star = c.star;
        } else {
            state.p = p / 2.0;
        }
        let d = &state.star.diagnostics;
        state.trace.push(TraceRecord {
            iter: state.iter,
            p,
            eps2: d.eps2,
            eps4: d.eps4,
            eps7: d.eps7,
            accepted,
            flips,
            error,
            bound,
            p_next: state.p,
        });
        if state.p < MIN_STEP {
            return Err(SolverError::StepCollapse(Box::new(finish(state))));
        }
    }
    Ok(finish(state))
}
