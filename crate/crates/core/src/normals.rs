//! Unit normal systems balancing prescribed weights.
//!
//! Given `alpha` strictly inside the volume cone, [`solve_normals`] finds
//! pairwise distinct unit vectors `u_1, ..., u_n` spanning `R^d` with
//! `sum alpha_i u_i = 0`. With `alpha` sorted ascending, the first `n - 1`
//! vectors are scaled by their weights and moved along a path on the product
//! of spheres of radii `alpha_i`, from the aligned configuration (where
//! `|phi| > alpha_n`) to the alternating one (where `|phi| <= alpha_n`).
//! Here `phi` is the sum map. A sign change of `|phi| - alpha_n` is bracketed
//! and bisected, and the last normal closes the sum.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::cone::{cone_membership, CONE_TOL};
use crate::error::{Error, Result};
use crate::linalg::{axpy, columns, distance, dot, norm, normalized, numeric_rank, orthonormal_complement_basis, scale, Point, RANK_TOL};

/// Bracketing grid for the sign change of `g`.
const SCAN_POINTS: usize = 64;
/// Bisection stops once `|g| <= ROOT_TOL * sum(alpha)`.
const ROOT_TOL: f64 = 1e-13;
/// `g(1)` closer to zero than this (relative) counts as a tie; see [`solve_normals`].
const TIE_TOL: f64 = 1e-6;
const DESCENT_MAX_ITERS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Accept when `|sum alpha_i u_i| <= residual_tol * sum(alpha)`.
    pub residual_tol: f64,
    /// Minimum chordal distance between any two normals.
    pub distinct_tol: f64,
    pub rank_tol: f64,
    pub cone_tol: f64,
    pub max_restarts: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            residual_tol: 1e-11,
            distinct_tol: 1e-6,
            rank_tol: RANK_TOL,
            cone_tol: CONE_TOL,
            max_restarts: 100,
        }
    }
}

/// Unit vectors with positive weights; see [`UnitNormalSystem::validate`] for the invariants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitNormalSystem {
    pub dim: usize,
    pub weights: Vec<f64>,
    pub normals: Vec<Point>,
}

impl UnitNormalSystem {
    pub fn new(weights: Vec<f64>, normals: Vec<Point>) -> Result<Self> {
        let dim = normals.first().map_or(0, Vec::len);
        if dim < 2 {
            return Err(Error::InvalidSystem(format!("dimension {dim} is below 2")));
        }
        if weights.len() != normals.len() {
            return Err(Error::InvalidSystem(format!(
                "{} weights for {} normals",
                weights.len(),
                normals.len()
            )));
        }
        if let Some(u) = normals.iter().find(|u| u.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: u.len(),
            });
        }
        if weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidSystem("weights must be positive".into()));
        }
        Ok(Self {
            dim,
            weights,
            normals,
        })
    }

    pub fn len(&self) -> usize {
        self.normals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.normals.is_empty()
    }

    /// `|sum alpha_i u_i|`.
    pub fn residual(&self) -> f64 {
        norm(&weighted_sum(&self.normals, &self.weights))
    }

    pub fn min_pairwise_distance(&self) -> f64 {
        let mut min = f64::INFINITY;
        for (i, a) in self.normals.iter().enumerate() {
            for b in &self.normals[i + 1..] {
                min = min.min(distance(a, b));
            }
        }
        min
    }

    pub fn rank(&self, rel_tol: f64) -> usize {
        numeric_rank(&columns(&self.normals), rel_tol)
    }

    pub fn max_norm_defect(&self) -> f64 {
        self.normals
            .iter()
            .map(|u| (norm(u) - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Checks unit length, distinctness, full rank and the balance residual.
    pub fn validate(&self, opts: &SolveOptions) -> Result<()> {
        if self.len() < self.dim + 1 {
            return Err(Error::InvalidSystem(format!(
                "{} normals cannot positively span R^{}",
                self.len(),
                self.dim
            )));
        }
        let defect = self.max_norm_defect();
        if defect > 1e-12 {
            return Err(Error::InvalidSystem(format!(
                "normal deviates from unit length by {defect:e}"
            )));
        }
        let gap = self.min_pairwise_distance();
        if gap < opts.distinct_tol {
            return Err(Error::InvalidSystem(format!(
                "normals are not distinct (gap {gap:e})"
            )));
        }
        let rank = self.rank(opts.rank_tol);
        if rank < self.dim {
            return Err(Error::InvalidSystem(format!(
                "normals span only rank {rank} < {}",
                self.dim
            )));
        }
        let total: f64 = self.weights.iter().sum();
        let residual = self.residual();
        if residual > opts.residual_tol * total {
            return Err(Error::InvalidSystem(format!(
                "residual {residual:e} exceeds {:e}",
                opts.residual_tol * total
            )));
        }
        Ok(())
    }
}

/// JSON form of a normal system with its diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalSystemRecord {
    pub d: usize,
    pub alpha: Vec<f64>,
    pub normals: Vec<Point>,
    #[serde(default)]
    pub residual: f64,
    #[serde(default)]
    pub min_pairwise_distance: f64,
    #[serde(default)]
    pub rank: usize,
}

impl From<&UnitNormalSystem> for NormalSystemRecord {
    fn from(sys: &UnitNormalSystem) -> Self {
        Self {
            d: sys.dim,
            alpha: sys.weights.clone(),
            normals: sys.normals.clone(),
            residual: sys.residual(),
            min_pairwise_distance: sys.min_pairwise_distance(),
            rank: sys.rank(RANK_TOL),
        }
    }
}

impl TryFrom<NormalSystemRecord> for UnitNormalSystem {
    type Error = Error;

    fn try_from(rec: NormalSystemRecord) -> Result<Self> {
        let sys = UnitNormalSystem::new(rec.alpha, rec.normals)?;
        if sys.dim != rec.d {
            return Err(Error::DimensionMismatch {
                expected: rec.d,
                found: sys.dim,
            });
        }
        Ok(sys)
    }
}

/// Path on the product of spheres: component `i` is
/// `r_i (cos θ_i(t) v + sin θ_i(t) w_i)` with
/// `θ_i(t) = end_angle_i * t + excursion_i * sin(πt)`.
///
/// The alternating path has `end_angle = π` on odd (1-based) indices and `0`
/// elsewhere, so it runs from `(r_1 v, ..., r_{n-1} v)` to
/// `(-r_1 v, r_2 v, -r_3 v, ...)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpherePathConfig {
    pub base: Point,
    pub directions: Vec<Point>,
    pub end_angles: Vec<f64>,
    pub excursions: Vec<f64>,
}

impl SpherePathConfig {
    /// Odd (1-based) indices rotate by π; the others make an excursion of the given amplitude and return.
    pub fn alternating(base: Point, directions: Vec<Point>, excursions: Vec<f64>) -> Result<Self> {
        let end_angles = (0..directions.len())
            .map(|i| if i % 2 == 0 { PI } else { 0.0 })
            .collect();
        let cfg = Self {
            base,
            directions,
            end_angles,
            excursions,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.directions.len();
        if self.end_angles.len() != k || self.excursions.len() != k {
            return Err(Error::InvalidInput("path arrays differ in length".into()));
        }
        if (norm(&self.base) - 1.0).abs() > 1e-12 {
            return Err(Error::NotUnit(norm(&self.base)));
        }
        for w in &self.directions {
            if w.len() != self.base.len() {
                return Err(Error::DimensionMismatch {
                    expected: self.base.len(),
                    found: w.len(),
                });
            }
            if (norm(w) - 1.0).abs() > 1e-12 {
                return Err(Error::NotUnit(norm(w)));
            }
            if dot(w, &self.base).abs() > 1e-12 {
                return Err(Error::InvalidInput(
                    "rotation direction is not orthogonal to the base direction".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn is_rotating(&self, i: usize) -> bool {
        self.end_angles[i] == PI
    }
}

/// `sin(πt)` with exact values at `t ∈ {0, 1/2, 1}`.
fn sin_pi(t: f64) -> f64 {
    if t == 0.0 || t == 1.0 {
        0.0
    } else if t == 0.5 {
        1.0
    } else {
        (PI * t).sin()
    }
}

/// `(cos θ, sin θ)` with exact values at `0`, `π/2` and `π`.
fn cos_sin(theta: f64) -> (f64, f64) {
    if theta == 0.0 {
        (1.0, 0.0)
    } else if theta == PI {
        (-1.0, 0.0)
    } else if theta == 0.5 * PI {
        (0.0, 1.0)
    } else {
        (theta.cos(), theta.sin())
    }
}

/// The sum map `(x_1, ..., x_{n-1}) -> x_1 + ... + x_{n-1}`.
pub fn test_map_phi(x: &[Point]) -> Point {
    let d = x.first().map_or(0, Vec::len);
    let mut s = vec![0.0; d];
    for xi in x {
        axpy(&mut s, 1.0, xi);
    }
    s
}

/// Point at time `t ∈ [0, 1]` on the path, one component per radius.
pub fn path_point(t: f64, radii: &[f64], cfg: &SpherePathConfig) -> Vec<Point> {
    let wobble = sin_pi(t);
    radii
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let theta = if t == 1.0 {
                cfg.end_angles[i]
            } else {
                cfg.end_angles[i] * t + cfg.excursions[i] * wobble
            };
            let theta = if t == 0.5 && cfg.excursions[i] == 0.0 && cfg.end_angles[i] == PI {
                0.5 * PI
            } else {
                theta
            };
            let (c, s) = cos_sin(theta);
            let mut x = scale(&cfg.base, r * c);
            axpy(&mut x, r * s, &cfg.directions[i]);
            x
        })
        .collect()
}

fn weighted_sum(u: &[Point], weights: &[f64]) -> Point {
    let d = u.first().map_or(0, Vec::len);
    let mut s = vec![0.0; d];
    for (ui, &w) in u.iter().zip(weights) {
        axpy(&mut s, w, ui);
    }
    s
}

/// Projected gradient descent of `|sum alpha_i u_i|^2` over products of unit spheres.
///
/// The gradient is taken in the product metric weighted by `alpha`, so that
/// component `i` of the step is `-2 eta (s - <s,u_i> u_i)` with
/// `s = sum alpha_j u_j`: every normal turns at the same rate whatever its
/// weight. Steps halve whenever the residual would not decrease, so the
/// residual never increases. Stops once `|sum alpha_i u_i| <= tol`.
pub fn refine_descent(u: &[Point], alpha: &[f64], tol: f64) -> Result<Vec<Point>> {
    if u.len() != alpha.len() {
        return Err(Error::InvalidInput(format!(
            "{} vectors for {} weights",
            u.len(),
            alpha.len()
        )));
    }
    let mut u: Vec<Point> = u
        .iter()
        .map(|x| normalized(x).ok_or_else(|| Error::InvalidInput("zero vector".into())))
        .collect::<Result<_>>()?;
    let mut s = weighted_sum(&u, alpha);
    let mut r = dot(&s, &s);
    if !r.is_finite() {
        return Err(Error::InvalidInput("non-finite starting residual".into()));
    }
    let target = tol * tol;
    if r <= target {
        return Ok(u);
    }
    let total: f64 = alpha.iter().sum();
    let eta_floor = 1e-30 / total;
    let mut eta = 0.25 / total;
    for _ in 0..DESCENT_MAX_ITERS {
        let candidate: Vec<Point> = u
            .iter()
            .map(|ui| {
                let along = dot(&s, ui);
                let mut step = ui.clone();
                axpy(&mut step, -2.0 * eta, &s);
                axpy(&mut step, 2.0 * eta * along, ui);
                normalized(&step).unwrap_or_else(|| ui.clone())
            })
            .collect();
        let s_new = weighted_sum(&candidate, alpha);
        let r_new = dot(&s_new, &s_new);
        if r_new < r {
            u = candidate;
            s = s_new;
            r = r_new;
            eta *= 1.5;
            if r <= target {
                return Ok(u);
            }
        } else {
            eta *= 0.5;
            if eta < eta_floor {
                return Err(Error::NoProgress(r.sqrt()));
            }
        }
    }
    Err(Error::NoProgress(r.sqrt()))
}

/// Diagnostics from [`solve_normals_with_report`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    /// Restarts before the accepted attempt.
    pub restarts: usize,
    /// Root of `g` on the accepted path (`None` for the closed-form triangle).
    pub t_star: Option<f64>,
    /// `g(0)` and `g(1)` on the accepted path.
    pub g_ends: Option<(f64, f64)>,
    /// Whether the accepted path ended at a random endpoint instead of the alternating one.
    pub fallback_endpoint: bool,
}

pub fn solve_normals<R: Rng + ?Sized>(
    alpha: &[f64],
    d: usize,
    rng: &mut R,
    opts: &SolveOptions,
) -> Result<UnitNormalSystem> {
    solve_normals_with_report(alpha, d, rng, opts).map(|(sys, _)| sys)
}

/// Solves for a normal system and reports how the solution was found.
///
/// The alternating endpoint has `|phi| <= alpha_n`, and equality is possible
/// when sorted weights tie in pairs (for instance `alpha = (1, 1, 1, 1)`).
/// When `g(1)` is not clearly negative the path instead ends at random unit
/// vectors whose weighted sum is shorter than `alpha_n`.
pub fn solve_normals_with_report<R: Rng + ?Sized>(
    alpha: &[f64],
    d: usize,
    rng: &mut R,
    opts: &SolveOptions,
) -> Result<(UnitNormalSystem, SolveReport)> {
    let n = alpha.len();
    if d < 2 {
        return Err(Error::InvalidInput(format!("dimension must be at least 2, got {d}")));
    }
    if n < d + 1 {
        return Err(Error::InvalidInput(format!(
            "a {d}-polytope needs at least {} facets, got {n}",
            d + 1
        )));
    }
    let verdict = cone_membership(alpha, opts.cone_tol)?;
    if !verdict.is_inside() {
        return Err(Error::ConeViolation(verdict));
    }
    let total: f64 = alpha.iter().sum();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| alpha[a].total_cmp(&alpha[b]));
    let sorted: Vec<f64> = order.iter().map(|&i| alpha[i]).collect();
    let unsort = |u_sorted: Vec<Point>| -> Vec<Point> {
        let mut out = vec![Vec::new(); n];
        for (k, u) in u_sorted.into_iter().enumerate() {
            out[order[k]] = u;
        }
        out
    };

    if d == 2 && n == 3 {
        let u = triangle_normals(alpha, random_unit(2, rng));
        let sys = UnitNormalSystem::new(alpha.to_vec(), u)?;
        sys.validate(opts)?;
        let report = SolveReport {
            restarts: 0,
            t_star: None,
            g_ends: None,
            fallback_endpoint: false,
        };
        return Ok((sys, report));
    }

    let radii = &sorted[..n - 1];
    let target = sorted[n - 1];
    let g = |t: f64, cfg: &SpherePathConfig| norm(&test_map_phi(&path_point(t, radii, cfg))) - target;

    for restart in 0..opts.max_restarts {
        let v = random_unit(d, rng);
        let complement = orthonormal_complement_basis(&v)?;
        let directions: Vec<Point> = (0..n - 1)
            .map(|_| random_in_span(&complement, rng))
            .collect();
        let amplitude = Uniform::new(PI / 6.0, PI / 3.0).expect("valid range");
        let excursions: Vec<f64> = (0..n - 1)
            .map(|i| if i % 2 == 0 { 0.0 } else { rng.sample(amplitude) })
            .collect();
        let mut cfg = SpherePathConfig::alternating(v.clone(), directions, excursions)?;
        let g0 = g(0.0, &cfg);
        let mut g1 = g(1.0, &cfg);
        debug_assert!(g0 > 0.0, "aligned configuration must overshoot");
        if g0 <= 0.0 {
            return Err(Error::ConeViolation(verdict));
        }
        let mut fallback = false;
        if g1 > -TIE_TOL * total || restart >= opts.max_restarts / 2 {
            match random_endpoint(&v, radii, target, total, rng)? {
                Some(c) => {
                    cfg = c;
                    g1 = g(1.0, &cfg);
                    fallback = true;
                }
                None => continue,
            }
        }
        if g1 >= 0.0 {
            continue;
        }

        let Some(t_star) = bracket_and_bisect(|t| g(t, &cfg), ROOT_TOL * total) else {
            continue;
        };
        let x = path_point(t_star, radii, &cfg);
        let phi = test_map_phi(&x);
        let mut u: Vec<Point> = x
            .iter()
            .map(|xi| normalized(xi).expect("non-zero sphere point"))
            .collect();
        let Some(last) = normalized(&phi) else { continue };
        u.push(scale(&last, -1.0));

        let u = match refine_descent(&u, &sorted, opts.residual_tol * total) {
            Ok(u) => u,
            Err(Error::NoProgress(_)) => continue,
            Err(e) => return Err(e),
        };
        let sys = UnitNormalSystem::new(alpha.to_vec(), unsort(u))?;
        if sys.validate(opts).is_ok() {
            let report = SolveReport {
                restarts: restart,
                t_star: Some(t_star),
                g_ends: Some((g0, g1)),
                fallback_endpoint: fallback,
            };
            return Ok((sys, report));
        }
    }
    Err(Error::GenericityExhausted(opts.max_restarts))
}

/// First sign change of `g` on a uniform grid, refined by bisection.
fn bracket_and_bisect<F: Fn(f64) -> f64>(g: F, tol: f64) -> Option<f64> {
    let mut lo = 0.0;
    let mut g_lo = g(lo);
    let mut hi = None;
    for k in 1..=SCAN_POINTS {
        let t = k as f64 / SCAN_POINTS as f64;
        let gt = g(t);
        if gt <= 0.0 {
            hi = Some(t);
            break;
        }
        lo = t;
        g_lo = gt;
    }
    let mut hi = hi?;
    debug_assert!(g_lo > 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = g(mid);
        if gm.abs() <= tol {
            return Some(mid);
        }
        if gm > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (g_lo, g_hi) = (g(lo), g(hi));
    Some(if g_lo.abs() <= g_hi.abs() { lo } else { hi })
}

fn random_unit<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Point {
    loop {
        let x: Point = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        if let Some(u) = normalized(&x) {
            return u;
        }
    }
}

fn random_in_span<R: Rng + ?Sized>(basis: &[Point], rng: &mut R) -> Point {
    let coeffs = random_unit(basis.len(), rng);
    let mut w = vec![0.0; basis[0].len()];
    for (b, c) in basis.iter().zip(&coeffs) {
        axpy(&mut w, *c, b);
    }
    normalized(&w).expect("orthonormal combination of a unit coefficient vector")
}

/// Path from the aligned configuration to random unit vectors `y_i` with `|sum r_i y_i| < target`.
fn random_endpoint<R: Rng + ?Sized>(
    v: &[f64],
    radii: &[f64],
    target: f64,
    total: f64,
    rng: &mut R,
) -> Result<Option<SpherePathConfig>> {
    let d = v.len();
    for _ in 0..10_000 {
        let ys: Vec<Point> = radii.iter().map(|_| random_unit(d, rng)).collect();
        if norm(&weighted_sum(&ys, radii)) >= target - TIE_TOL * total {
            continue;
        }
        let mut directions = Vec::with_capacity(ys.len());
        let mut end_angles = Vec::with_capacity(ys.len());
        for y in &ys {
            let c = dot(y, v).clamp(-1.0, 1.0);
            let mut perp = y.clone();
            axpy(&mut perp, -c, v);
            let Some(w) = normalized(&perp) else { break };
            // re-orthogonalise against v to keep the path on the sphere
            let mut w = w;
            let drift = dot(&w, v);
            axpy(&mut w, -drift, v);
            directions.push(normalized(&w).expect("unit after projection"));
            end_angles.push(c.acos());
        }
        if directions.len() != ys.len() {
            continue;
        }
        let cfg = SpherePathConfig {
            base: v.to_vec(),
            directions,
            end_angles,
            excursions: vec![0.0; ys.len()],
        };
        cfg.validate()?;
        return Ok(Some(cfg));
    }
    Ok(None)
}

/// Outer edge normals of the triangle with side lengths `alpha`, rotated so that
/// the first edge direction is `frame`.
fn triangle_normals(alpha: &[f64], frame: Point) -> Vec<Point> {
    let (a, b, c) = (alpha[0], alpha[1], alpha[2]);
    let cos_c = ((a * a + b * b - c * c) / (2.0 * a * b)).clamp(-1.0, 1.0);
    // edges traversed counter-clockwise: turn left by the exterior angle at each corner
    let turn = PI - cos_c.acos();
    let e1 = vec![1.0, 0.0];
    let e2 = vec![turn.cos(), turn.sin()];
    let e3: Point = (0..2).map(|k| -(a * e1[k] + b * e2[k]) / c).collect();
    let rot = |p: &[f64]| vec![frame[0] * p[0] - frame[1] * p[1], frame[1] * p[0] + frame[0] * p[1]];
    [e1, e2, e3]
        .iter()
        .map(|e| {
            let e = normalized(e).expect("non-degenerate edge");
            rot(&[e[1], -e[0]])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplex::derived_rng;

    fn unit(v: &[f64]) -> Point {
        normalized(v).unwrap()
    }

    #[test]
    fn phi_sums() {
        assert_eq!(test_map_phi(&[vec![1.0, 0.0], vec![-1.0, 0.0]]), vec![0.0, 0.0]);
        assert_eq!(
            test_map_phi(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]),
            vec![2.0, 2.0]
        );
    }

    #[test]
    fn path_endpoints() {
        let v = vec![0.0, 0.0, 1.0];
        let ws = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], unit(&[1.0, 1.0, 0.0])];
        let cfg = SpherePathConfig::alternating(v.clone(), ws.clone(), vec![0.0; 3]).unwrap();
        let radii = [1.0, 2.0, 3.0];
        let a = path_point(0.0, &radii, &cfg);
        for (x, r) in a.iter().zip(radii) {
            assert_eq!(x, &scale(&v, r));
        }
        let b = path_point(1.0, &radii, &cfg);
        assert_eq!(b[0], scale(&v, -1.0));
        assert_eq!(b[1], scale(&v, 2.0));
        assert_eq!(b[2], scale(&v, -3.0));
        let mid = path_point(0.5, &radii, &cfg);
        assert_eq!(mid[0], scale(&ws[0], 1.0));
        assert_eq!(mid[2], scale(&ws[2], 3.0));
        for t in [0.1, 0.37, 0.5, 0.93] {
            for (x, r) in path_point(t, &radii, &cfg).iter().zip(radii) {
                assert!((norm(x) - r).abs() <= 1e-12 * r);
            }
        }
        // phi at the aligned end overshoots alpha_n for cone points
        let alpha_n = 5.0;
        assert!(norm(&test_map_phi(&a)) > alpha_n);
    }

    #[test]
    fn path_with_excursions_keeps_endpoints() {
        let v = vec![1.0, 0.0];
        let ws = vec![vec![0.0, 1.0], vec![0.0, -1.0]];
        let cfg = SpherePathConfig::alternating(v.clone(), ws, vec![0.0, 0.7]).unwrap();
        let radii = [1.0, 2.0];
        assert_eq!(path_point(0.0, &radii, &cfg)[1], vec![2.0, 0.0]);
        assert_eq!(path_point(1.0, &radii, &cfg)[1], vec![2.0, 0.0]);
        let mid = path_point(0.5, &radii, &cfg)[1].clone();
        assert!((mid[1] + 2.0 * 0.7f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn config_validation() {
        let bad = SpherePathConfig::alternating(vec![1.0, 0.0], vec![vec![1.0, 0.0]], vec![0.0]);
        assert!(bad.is_err());
    }

    #[test]
    fn equal_triangle_weights_give_120_degrees() {
        let sys = solve_normals(&[1.0, 1.0, 1.0], 2, &mut derived_rng(1, 0), &SolveOptions::default()).unwrap();
        for i in 0..3 {
            for j in i + 1..3 {
                assert!((dot(&sys.normals[i], &sys.normals[j]) + 0.5).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn right_triangle_normals() {
        let alpha = [5.0, 3.0, 4.0];
        let sys = solve_normals(&alpha, 2, &mut derived_rng(2, 0), &SolveOptions::default()).unwrap();
        assert!(sys.residual() <= 1e-11 * 12.0);
        // explicit triangle (0,0),(4,0),(0,3): edge opposite vertex i has length alpha_i
        // outer normals: hypotenuse (3,4)/5, leg x=0 -> (-1,0), leg y=0 -> (0,-1)
        let oracle = [unit(&[3.0, 4.0]), vec![-1.0, 0.0], vec![0.0, -1.0]];
        for i in 0..3 {
            for j in 0..3 {
                let c = dot(&sys.normals[i], &sys.normals[j]);
                assert!((c - dot(&oracle[i], &oracle[j])).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn tied_weights_in_3d() {
        let alpha = [1.0; 4];
        let (sys, report) =
            solve_normals_with_report(&alpha, 3, &mut derived_rng(3, 0), &SolveOptions::default()).unwrap();
        assert!(sys.residual() <= 4e-11);
        assert_eq!(sys.rank(RANK_TOL), 3);
        assert!(sys.min_pairwise_distance() >= 1e-6);
        // the alternating endpoint ties with alpha_n here
        assert!(report.fallback_endpoint);
    }

    #[test]
    fn determinism_and_scale_equivariance() {
        let alpha = [0.3, 0.5, 0.7, 0.4, 0.6];
        let opts = SolveOptions::default();
        let a = solve_normals(&alpha, 3, &mut derived_rng(9, 0), &opts).unwrap();
        let b = solve_normals(&alpha, 3, &mut derived_rng(9, 0), &opts).unwrap();
        assert_eq!(a, b);
        let scaled: Vec<f64> = alpha.iter().map(|x| x * 7.5).collect();
        let c = solve_normals(&scaled, 3, &mut derived_rng(9, 0), &opts).unwrap();
        for (u, w) in a.normals.iter().zip(&c.normals) {
            assert!(distance(u, w) <= 1e-12);
        }
    }

    #[test]
    fn rejects_points_off_the_cone() {
        let err = solve_normals(&[1.0, 1.0, 2.0], 2, &mut derived_rng(0, 0), &SolveOptions::default());
        assert!(matches!(err, Err(Error::ConeViolation(_))));
    }

    #[test]
    fn descent_keeps_exact_solutions() {
        let u: Vec<Point> = (0..3)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / 3.0;
                vec![t.cos(), t.sin()]
            })
            .collect();
        let out = refine_descent(&u, &[1.0; 3], 1e-12).unwrap();
        for (a, b) in out.iter().zip(&u) {
            assert!(distance(a, b) <= 1e-15);
        }
    }

    #[test]
    fn descent_repairs_perturbed_triangle() {
        let u: Vec<Point> = (0..3)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / 3.0 + 0.01 * (k as f64 + 1.0);
                vec![t.cos(), t.sin()]
            })
            .collect();
        let out = refine_descent(&u, &[1.0; 3], 1e-12).unwrap();
        assert!(norm(&weighted_sum(&out, &[1.0; 3])) <= 1e-12);
    }
}
