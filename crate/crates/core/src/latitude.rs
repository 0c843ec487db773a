//! Equal-area latitude circles of triangles.
//!
//! In squared side lengths `s_i = a_i^2`, Heron's formula reads
//! `16 A^2 = (s_1 + s_2 + s_3)^2 - 2 (s_1^2 + s_2^2 + s_3^2)`. On the unit sphere
//! `sum s_i^2 = 1` the area therefore depends only on `sigma = sum s_i`, so each
//! circle `{sum s_i = sigma}` consists of triangles of equal area. Valid
//! triangles fill `sigma ∈ (sqrt 2, sqrt 3]`.

use std::f64::consts::{PI, SQRT_2};

use rand::Rng;
use serde::Serialize;

/// `16 A^2` from squared side lengths.
pub fn heron_closed_form_sq(s: [f64; 3]) -> f64 {
    let sum = s[0] + s[1] + s[2];
    sum * sum - 2.0 * (s[0] * s[0] + s[1] * s[1] + s[2] * s[2])
}

/// Area from side lengths (Kahan's ordering, stable near degeneracy). Zero for
/// degenerate or impossible side lengths.
pub fn heron_area(sides: [f64; 3]) -> f64 {
    let mut v = sides;
    v.sort_by(|x, y| y.total_cmp(x));
    let [a, b, c] = v;
    let p = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
    if p <= 0.0 {
        0.0
    } else {
        0.25 * p.sqrt()
    }
}

/// Heron area of the triangle with squared side lengths `s`.
pub fn heron_area_from_squared(s: [f64; 3]) -> f64 {
    heron_area([s[0].max(0.0).sqrt(), s[1].max(0.0).sqrt(), s[2].max(0.0).sqrt()])
}

/// The circle `{s : sum s_i = sigma, sum s_i^2 = 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LatitudeCircle {
    pub sigma: f64,
}

impl LatitudeCircle {
    pub const MIN_SIGMA: f64 = SQRT_2;
    pub const MAX_SIGMA: f64 = 1.732_050_807_568_877_2;

    pub fn new(sigma: f64) -> Option<Self> {
        (Self::MIN_SIGMA..=Self::MAX_SIGMA).contains(&sigma).then_some(Self { sigma })
    }

    pub fn radius(&self) -> f64 {
        (1.0 - self.sigma * self.sigma / 3.0).max(0.0).sqrt()
    }

    pub fn point(&self, theta: f64) -> [f64; 3] {
        let c = self.sigma / 3.0;
        let r = self.radius();
        let (x, y) = (r * theta.cos(), r * theta.sin());
        // orthonormal basis of {sum = 0}: (1,-1,0)/sqrt2 and (1,1,-2)/sqrt6
        let e1 = x / SQRT_2;
        let e2 = y / 6f64.sqrt();
        [c + e1 + e2, c - e1 + e2, c - 2.0 * e2]
    }

    /// Area shared by every triangle on the circle.
    pub fn area(&self) -> f64 {
        0.25 * ((self.sigma - SQRT_2) * (self.sigma + SQRT_2)).max(0.0).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircleReport {
    pub sigma: f64,
    pub closed_form_area: f64,
    pub min_area: f64,
    pub max_area: f64,
    /// `max_area - min_area` over Heron evaluations on the circle.
    pub spread: f64,
    /// Largest `|A_closed(s) - A_heron(s)|` at a sample point.
    pub max_identity_error: f64,
}

pub fn check_circle(circle: LatitudeCircle, thetas: &[f64]) -> CircleReport {
    let mut min_area = f64::INFINITY;
    let mut max_area = f64::NEG_INFINITY;
    let mut max_identity_error = 0.0f64;
    for &t in thetas {
        let s = circle.point(t);
        let heron = heron_area_from_squared(s);
        let closed = 0.25 * heron_closed_form_sq(s).max(0.0).sqrt();
        min_area = min_area.min(heron);
        max_area = max_area.max(heron);
        max_identity_error = max_identity_error.max((closed - heron).abs());
    }
    CircleReport {
        sigma: circle.sigma,
        closed_form_area: circle.area(),
        min_area,
        max_area,
        spread: max_area - min_area,
        max_identity_error,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatitudeReport {
    pub circles: Vec<CircleReport>,
    pub max_spread: f64,
    pub max_identity_error: f64,
}

impl LatitudeReport {
    /// Index of the first circle whose spread or identity error exceeds `tol`.
    pub fn first_violation(&self, tol: f64) -> Option<usize> {
        self.circles
            .iter()
            .position(|c| !(c.spread <= tol && c.max_identity_error <= tol))
    }
}

/// `circles` random latitudes with `points` random angles each.
pub fn latitude_check<R: Rng + ?Sized>(circles: usize, points: usize, rng: &mut R) -> LatitudeReport {
    let reports: Vec<CircleReport> = (0..circles)
        .map(|_| {
            let sigma = loop {
                let s = rng.random_range(LatitudeCircle::MIN_SIGMA..=LatitudeCircle::MAX_SIGMA);
                if s > LatitudeCircle::MIN_SIGMA {
                    break s;
                }
            };
            let thetas: Vec<f64> = (0..points).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
            check_circle(LatitudeCircle { sigma }, &thetas)
        })
        .collect();
    LatitudeReport {
        max_spread: reports.iter().map(|c| c.spread).fold(0.0, f64::max),
        max_identity_error: reports.iter().map(|c| c.max_identity_error).fold(0.0, f64::max),
        circles: reports,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplex::derived_rng;

    #[test]
    fn equilateral_point() {
        let s = [1.0 / 3f64.sqrt(); 3];
        assert!((heron_closed_form_sq(s) - 1.0).abs() < 1e-15);
        let side = 3f64.powf(-0.25);
        // equilateral oracle: A = sqrt(3)/4 a^2
        let oracle = 3f64.sqrt() / 4.0 * side * side;
        assert!((oracle - 0.25).abs() < 1e-15);
        assert!((heron_area([side; 3]) - 0.25).abs() < 1e-15);
        let top = LatitudeCircle::new(LatitudeCircle::MAX_SIGMA).unwrap();
        assert!(top.radius() < 1e-7);
        assert!((top.area() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn degenerate_boundary() {
        // sides 1, 1, 2 (squared 1, 1, 4), normalised to the unit sphere
        let k = 18f64.sqrt();
        let s = [1.0 / k, 1.0 / k, 4.0 / k];
        assert!(heron_closed_form_sq(s).abs() < 1e-15);
        assert_eq!(heron_area([1.0, 1.0, 2.0]), 0.0);
        assert!(heron_area_from_squared(s) < 1e-8);
        let low = LatitudeCircle::new(LatitudeCircle::MIN_SIGMA).unwrap();
        assert_eq!(low.area(), 0.0);
    }

    #[test]
    fn circle_points_lie_on_sphere_and_plane() {
        let c = LatitudeCircle::new(1.6).unwrap();
        for k in 0..16 {
            let s = c.point(k as f64 * 0.4);
            assert!((s.iter().sum::<f64>() - 1.6).abs() < 1e-15);
            assert!((s.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-15);
            assert!(s.iter().all(|x| *x > 0.0));
        }
    }

    #[test]
    fn right_triangle() {
        assert!((heron_area([3.0, 4.0, 5.0]) - 6.0).abs() < 1e-14);
        assert!((heron_closed_form_sq([9.0, 16.0, 25.0]) - 16.0 * 36.0).abs() < 1e-12);
    }

    #[test]
    fn random_circles_have_constant_area() {
        let report = latitude_check(20, 50, &mut derived_rng(1, 0));
        assert!(report.max_spread <= 1e-12);
        assert!(report.max_identity_error <= 1e-12);
        assert_eq!(report.first_violation(1e-12), None);
    }
}
