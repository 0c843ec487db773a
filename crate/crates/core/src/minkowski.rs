//! Polytopes with prescribed outer normals and facet volumes.
//!
//! [`reconstruct`] minimises `Psi(h) = sum w_i h_i - ln vol(P(h))` over support
//! numbers, where `w = d * alpha / sum(alpha)`. `ln vol` is concave in `h` and
//! `d vol / d h_i = area_i`, so the stationary points are exactly the
//! polytopes with `area_i = w_i * vol`, which a final homothety turns into
//! `area_i = alpha_i`. Steps are damped Newton steps using the analytic Hessian
//! of the volume, with the multiplicative update `h_i <- h_i (w_i / area_i)^gamma`
//! as a fallback.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, scale, sub, Point};
use crate::normals::{SolveOptions, UnitNormalSystem};
use crate::polytope::{polytope_geometry, HPolytope, PolytopeGeometry, VPolytope, TANGENT_AREA_TOL};

const WATCHDOG_STEPS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReconstructOptions {
    /// Target for `max_i |area_i - alpha_i| / alpha_i`.
    pub area_tol: f64,
    pub max_iters: usize,
    /// Initial exponent of the multiplicative fallback step.
    pub gamma: f64,
    /// Pull factor for halfspaces that lost their facet.
    pub beta: f64,
    /// Hypotheses checked on the input system.
    pub system: SolveOptions,
}

impl Default for ReconstructOptions {
    fn default() -> Self {
        Self {
            area_tol: 1e-8,
            max_iters: 500,
            gamma: 0.5,
            beta: 0.5,
            system: SolveOptions::default(),
        }
    }
}

/// Support numbers `h_i` of `P(h) = {x : <x, u_i> <= h_i}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportVector {
    pub h: Vec<f64>,
    pub normals: Vec<Point>,
}

impl SupportVector {
    pub fn to_hpolytope(&self) -> Result<HPolytope> {
        HPolytope::new(self.normals.clone(), self.h.clone())
    }

    /// Support numbers of the translate `P(h) - c`.
    pub fn translated(&self, c: &[f64]) -> SupportVector {
        let h = self
            .h
            .iter()
            .zip(&self.normals)
            .map(|(hi, u)| hi - dot(c, u))
            .collect();
        SupportVector {
            h,
            normals: self.normals.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reconstruction {
    pub support: SupportVector,
    pub geometry: PolytopeGeometry,
    pub iterations: usize,
    /// `Psi` after each accepted step, starting with the initial point.
    pub objective_history: Vec<f64>,
    /// Scale-free max relative area error after each accepted step.
    pub error_history: Vec<f64>,
}

impl Reconstruction {
    /// `max_i |area_i - alpha_i| / alpha_i` of the final polytope.
    pub fn max_relative_error(&self, alpha: &[f64]) -> f64 {
        max_relative_error(&self.geometry.facet_areas, alpha)
    }
}

/// JSON polytope format shared by the command-line tools.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolytopeRecord {
    pub d: usize,
    pub normals: Vec<Point>,
    pub h: Vec<f64>,
    #[serde(default)]
    pub vertices: Vec<Point>,
    #[serde(default)]
    pub facet_areas: Vec<f64>,
    #[serde(default)]
    pub volume: f64,
}

impl From<&PolytopeGeometry> for PolytopeRecord {
    fn from(g: &PolytopeGeometry) -> Self {
        Self {
            d: g.dim(),
            normals: g.normals.clone(),
            h: g.h.clone(),
            vertices: g.vertices.vertices.clone(),
            facet_areas: g.facet_areas.clone(),
            volume: g.volume,
        }
    }
}

impl PolytopeRecord {
    /// The halfspace description; stored vertices and areas are ignored.
    pub fn to_hpolytope(&self) -> Result<HPolytope> {
        let h = HPolytope::new(self.normals.clone(), self.h.clone())?;
        if h.ambient_dim != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                found: h.ambient_dim,
            });
        }
        Ok(h)
    }
}

pub fn max_relative_error(areas: &[f64], alpha: &[f64]) -> f64 {
    areas
        .iter()
        .zip(alpha)
        .map(|(a, w)| (a - w).abs() / w)
        .fold(0.0, f64::max)
}

/// Max relative error after the best uniform rescaling `kappa = sum(w) / sum(areas)`.
pub fn scale_free_error(areas: &[f64], w: &[f64]) -> f64 {
    let kappa = w.iter().sum::<f64>() / areas.iter().sum::<f64>();
    areas
        .iter()
        .zip(w)
        .map(|(a, wi)| (kappa * a - wi).abs() / wi)
        .fold(0.0, f64::max)
}

/// `J_ij = d area_i / d h_j` from the ridge volumes.
///
/// For adjacent facets at normal angle `theta`, `J_ij = vol(F_i ∩ F_j) / sin(theta)`,
/// and `J_ii = -sum_j cos(theta_ij) vol(F_i ∩ F_j) / sin(theta_ij)`.
pub fn area_jacobian(g: &PolytopeGeometry) -> DMatrix<f64> {
    let n = g.normals.len();
    let mut j = DMatrix::zeros(n, n);
    for &(a, b, ridge) in &g.ridges {
        let c = dot(&g.normals[a], &g.normals[b]).clamp(-1.0, 1.0);
        let s = (1.0 - c * c).sqrt();
        if s <= 1e-14 {
            continue;
        }
        let off = ridge / s;
        j[(a, b)] += off;
        j[(b, a)] += off;
        j[(a, a)] -= c * off;
        j[(b, b)] -= c * off;
    }
    j
}

/// Geometry of `P(h)` translated so its vertex centroid is the origin.
pub fn centred_geometry(support: &SupportVector) -> Result<(SupportVector, PolytopeGeometry)> {
    let g = polytope_geometry(&support.to_hpolytope()?)?;
    let c = g.vertex_centroid();
    let moved = support.translated(&c);
    let vertices: Vec<Point> = g.vertices.vertices.iter().map(|v| sub(v, &c)).collect();
    let g = PolytopeGeometry {
        h: moved.h.clone(),
        vertices: VPolytope {
            ambient_dim: g.vertices.ambient_dim,
            vertices,
        },
        ..g
    };
    Ok((moved, g))
}

struct Iterate {
    support: SupportVector,
    geometry: PolytopeGeometry,
    objective: f64,
    error: f64,
}

impl Iterate {
    fn new(support: &SupportVector, w: &[f64]) -> Result<Self> {
        let (support, geometry) = centred_geometry(support)?;
        let objective = dot(w, &support.h) - geometry.volume.ln();
        let error = scale_free_error(&geometry.facet_areas, w);
        Ok(Self {
            support,
            geometry,
            objective,
            error,
        })
    }

    fn all_facets_present(&self) -> bool {
        self.tangent().is_empty()
    }

    fn tangent(&self) -> Vec<usize> {
        let d = self.geometry.dim() as i32;
        let threshold = TANGENT_AREA_TOL * self.geometry.scale().powi(d - 1);
        (0..self.geometry.facet_areas.len())
            .filter(|&i| self.geometry.facet_areas[i] <= threshold)
            .collect()
    }
}

/// Finds `h` with facet areas `sys.weights` on the normals `sys.normals`.
pub fn reconstruct(sys: &UnitNormalSystem, opts: &ReconstructOptions) -> Result<Reconstruction> {
    sys.validate(&opts.system)?;
    let n = sys.len();
    let d = sys.dim;
    let total: f64 = sys.weights.iter().sum();
    let w: Vec<f64> = sys.weights.iter().map(|a| d as f64 * a / total).collect();

    let start = SupportVector {
        h: vec![1.0; n],
        normals: sys.normals.clone(),
    };
    let mut it = Iterate::new(&start, &w)?;
    let mut objective_history = vec![it.objective];
    let mut error_history = vec![it.error];
    let mut iterations = 0;
    let stop = 1e-2 * opts.area_tol;

    while it.error > stop {
        if iterations >= opts.max_iters {
            return Err(no_convergence(iterations, &it.geometry.facet_areas, &w));
        }
        iterations += 1;

        let tangent = it.tangent();
        if !tangent.is_empty() {
            let mut support = it.support.clone();
            for &i in &tangent {
                let reach = it
                    .geometry
                    .vertices
                    .vertices
                    .iter()
                    .map(|v| dot(v, &support.normals[i]))
                    .fold(f64::NEG_INFINITY, f64::max);
                support.h[i] = (1.0 - opts.beta) * support.h[i] + opts.beta * reach;
            }
            it = Iterate::new(&support, &w)?;
            continue;
        }

        let next = newton_step(&it, &w).or_else(|| multiplicative_step(&it, &w, opts.gamma));
        match next {
            Some(next) => {
                it = next;
                objective_history.push(it.objective);
                error_history.push(it.error);
            }
            None if it.error <= opts.area_tol => break,
            None => return Err(no_convergence(iterations, &it.geometry.facet_areas, &w)),
        }
    }

    let ratio_mean = sys
        .weights
        .iter()
        .zip(&it.geometry.facet_areas)
        .map(|(a, f)| a / f)
        .sum::<f64>()
        / n as f64;
    let lambda = ratio_mean.powf(1.0 / (d as f64 - 1.0));
    let scaled = SupportVector {
        h: scale(&it.support.h, lambda),
        normals: it.support.normals.clone(),
    };
    let (support, geometry) = centred_geometry(&scaled)?;
    let rel = relative_errors(&geometry.facet_areas, &sys.weights);
    let worst = rel.iter().copied().fold(0.0, f64::max);
    if !(worst <= opts.area_tol) {
        return Err(Error::NoConvergence {
            iterations,
            max_rel_error: worst,
            rel_errors: rel,
        });
    }
    Ok(Reconstruction {
        support,
        geometry,
        iterations,
        objective_history,
        error_history,
    })
}

fn relative_errors(areas: &[f64], alpha: &[f64]) -> Vec<f64> {
    areas.iter().zip(alpha).map(|(a, w)| (a - w).abs() / w).collect()
}

fn no_convergence(iterations: usize, areas: &[f64], w: &[f64]) -> Error {
    let kappa = w.iter().sum::<f64>() / areas.iter().sum::<f64>();
    let scaled: Vec<f64> = areas.iter().map(|a| kappa * a).collect();
    let rel = relative_errors(&scaled, w);
    Error::NoConvergence {
        iterations,
        max_rel_error: rel.iter().copied().fold(0.0, f64::max),
        rel_errors: rel,
    }
}

/// Armijo decrease of `Psi` with slope `slope` at step `t`, keeping every facet.
fn armijo(cur: &Iterate, trial: &Iterate, t: f64, slope: f64) -> bool {
    let slack = 1e-12 * (1.0 + cur.objective.abs());
    trial.all_facets_present() && trial.objective <= cur.objective + 1e-4 * t * slope + slack
}

/// Newton direction for `Psi` at `cur` and its directional derivative.
fn newton_direction(cur: &Iterate, w: &[f64]) -> Option<(Vec<f64>, f64)> {
    let g = &cur.geometry;
    let n = w.len();
    let vol = g.volume;
    let a = DVector::from_column_slice(&g.facet_areas);
    let grad = DVector::from_iterator(n, w.iter().zip(&g.facet_areas).map(|(wi, ai)| wi - ai / vol));
    let hess = -area_jacobian(g) / vol + (&a * a.transpose()) / (vol * vol);
    let svd = hess.svd(true, true);
    let cutoff = 1e-10 * svd.singular_values.max();
    let p = svd.solve(&(-&grad), cutoff).ok()?;
    let slope = grad.dot(&p);
    (slope < 0.0).then(|| (p.iter().copied().collect(), slope))
}

/// Backtracking search along `p` for a point satisfying `accept`.
fn line_search<F>(cur: &Iterate, w: &[f64], p: &[f64], accept: F) -> Option<Iterate>
where
    F: Fn(&Iterate, f64) -> bool,
{
    let mut t = 1.0;
    for _ in 0..40 {
        let mut h = cur.support.h.clone();
        axpy(&mut h, t, p);
        let trial = SupportVector {
            h,
            normals: cur.support.normals.clone(),
        };
        if let Ok(next) = Iterate::new(&trial, w) {
            if accept(&next, t) {
                return Some(next);
            }
        }
        t *= 0.5;
    }
    None
}

/// Damped Newton step whose result does not raise the area error.
///
/// The max error can rise for a step or two while `Psi` still decreases, so up
/// to [`WATCHDOG_STEPS`] Armijo steps are chained and the first one back below
/// the current error is returned. Otherwise the line search also demands a
/// non-increasing error.
fn newton_step(cur: &Iterate, w: &[f64]) -> Option<Iterate> {
    let (p, slope) = newton_direction(cur, w)?;
    let mut probe = line_search(cur, w, &p, |next, t| armijo(cur, next, t, slope));
    for _ in 0..WATCHDOG_STEPS {
        let Some(x) = probe else { break };
        if x.error <= cur.error {
            return Some(x);
        }
        probe = newton_direction(&x, w)
            .and_then(|(q, s)| line_search(&x, w, &q, |next, t| armijo(&x, next, t, s)));
    }
    line_search(cur, w, &p, |next, t| armijo(cur, next, t, slope) && next.error <= cur.error)
}

fn multiplicative_step(cur: &Iterate, w: &[f64], gamma: f64) -> Option<Iterate> {
    let areas = &cur.geometry.facet_areas;
    let kappa = w.iter().sum::<f64>() / areas.iter().sum::<f64>();
    let mut gamma = gamma;
    for _ in 0..30 {
        let h: Vec<f64> = cur
            .support
            .h
            .iter()
            .zip(w.iter().zip(areas))
            .map(|(hi, (wi, ai))| hi * (wi / (kappa * ai)).powf(gamma))
            .collect();
        let trial = SupportVector {
            h,
            normals: cur.support.normals.clone(),
        };
        if let Ok(next) = Iterate::new(&trial, w) {
            if next.all_facets_present() && next.error <= cur.error {
                return Some(next);
            }
        }
        gamma *= 0.5;
    }
    None
}
