//! Membership in the cone of realizable facet-volume vectors and its
//! description as a cone over the polar of `P_{n-1}` inside the zero-sum
//! hyperplane `W_n`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{distance, dot, norm, orthonormal_span, Point, RANK_TOL};
use crate::polytope::{vertex_enumeration, HPolytope, VPolytope};
use crate::simplex::{classify_squared, ShapeClass};

/// Default boundary band, relative to `sum(alpha)`.
pub const CONE_TOL: f64 = 1e-9;

/// Verdict of [`cone_membership`]. Indices are 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ConeVerdict {
    /// Every coordinate is below the sum of the others; `margin` is the
    /// smallest normalised slack `min_i (sum_{j != i} a_j - a_i) / sum a`.
    Inside { margin: f64 },
    Boundary { index: usize },
    Outside { index: usize, violation: f64 },
}

impl ConeVerdict {
    pub fn is_inside(&self) -> bool {
        matches!(self, ConeVerdict::Inside { .. })
    }

    pub fn membership(&self) -> Membership {
        match self {
            ConeVerdict::Inside { .. } => Membership::Inside,
            ConeVerdict::Boundary { .. } => Membership::Boundary,
            ConeVerdict::Outside { .. } => Membership::Outside,
        }
    }
}

impl fmt::Display for ConeVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConeVerdict::Inside { margin } => write!(f, "Inside margin {margin}"),
            ConeVerdict::Boundary { index } => write!(f, "Boundary({})", index + 1),
            ConeVerdict::Outside { index, violation } => {
                write!(f, "Outside({}) violation {violation}", index + 1)
            }
        }
    }
}

/// Three-way membership used for relative interiors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Membership {
    Inside,
    Boundary,
    Outside,
}

/// Tests `sum_{j != i} alpha_j > alpha_i` for every `i`.
pub fn cone_membership(alpha: &[f64], rel_tol: f64) -> Result<ConeVerdict> {
    let n = alpha.len();
    if n < 3 {
        return Err(Error::InvalidInput(format!(
            "cone membership needs at least 3 entries, got {n}"
        )));
    }
    if let Some((index, &a)) = alpha
        .iter()
        .enumerate()
        .filter(|(_, a)| !(**a > 0.0 && a.is_finite()))
        .min_by(|a, b| a.1.total_cmp(b.1))
    {
        let total_abs: f64 = alpha.iter().filter(|a| a.is_finite()).map(|a| a.abs()).sum();
        let violation = if total_abs > 0.0 && a.is_finite() {
            -a / total_abs
        } else {
            f64::INFINITY
        };
        return Ok(ConeVerdict::Outside { index, violation });
    }
    let total: f64 = alpha.iter().sum();
    let (index, slack) = alpha
        .iter()
        .map(|a| total - 2.0 * a)
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty");
    let band = rel_tol * total;
    Ok(if slack > band {
        ConeVerdict::Inside {
            margin: slack / total,
        }
    } else if slack.abs() <= band {
        ConeVerdict::Boundary { index }
    } else {
        ConeVerdict::Outside {
            index,
            violation: -slack / total,
        }
    })
}

/// Projects `alpha` onto the hyperplane `sum x_i = 1` along rays.
pub fn normalize_to_h(alpha: &[f64]) -> Result<Point> {
    let total: f64 = alpha.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::InvalidInput(format!(
            "coordinate sum {total} is not positive"
        )));
    }
    Ok(alpha.iter().map(|a| a / total).collect())
}

/// Orthonormal chart of `W_n = {x in R^n : sum x_i = 0}`.
///
/// The basis is Gram-Schmidt applied to `e_1 - e/n, ..., e_{n-1} - e/n`, so it
/// is the same for every run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WnChart {
    pub n: usize,
    /// `n - 1` orthonormal vectors of `R^n`, each with coordinate sum zero.
    pub basis: Vec<Point>,
}

impl WnChart {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(format!("W_n needs n >= 2, got {n}")));
        }
        let gens: Vec<Point> = (0..n - 1).map(|i| simplex_vertex(n, i)).collect();
        let basis = orthonormal_span(&gens, RANK_TOL);
        debug_assert_eq!(basis.len(), n - 1);
        Ok(Self { n, basis })
    }

    /// Coordinates of a zero-sum vector of `R^n`.
    pub fn to_chart(&self, x: &[f64]) -> Point {
        self.basis.iter().map(|b| dot(b, x)).collect()
    }

    pub fn to_ambient(&self, y: &[f64]) -> Point {
        let mut x = vec![0.0; self.n];
        for (b, &c) in self.basis.iter().zip(y) {
            crate::linalg::axpy(&mut x, c, b);
        }
        x
    }
}

/// `e_i - e/n`, a vertex of the centred standard simplex.
fn simplex_vertex(n: usize, i: usize) -> Point {
    let mut v = vec![-1.0 / n as f64; n];
    v[i] += 1.0;
    v
}

/// `P_{n-1}` in chart coordinates together with its chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartedPolytope {
    pub chart: WnChart,
    pub body: VPolytope,
}

impl ChartedPolytope {
    pub fn ambient_vertices(&self) -> Vec<Point> {
        self.body
            .vertices
            .iter()
            .map(|y| self.chart.to_ambient(y))
            .collect()
    }
}

/// Raw generators of `P_{n-1}`: `(2n/(n-2)) (e_i - e/n)` and `-n (e_i - e/n)`.
pub fn p_generators(n: usize) -> Vec<Point> {
    let big = 2.0 * n as f64 / (n as f64 - 2.0);
    let small = -(n as f64);
    let mut out: Vec<Point> = (0..n)
        .map(|i| crate::linalg::scale(&simplex_vertex(n, i), big))
        .collect();
    out.extend((0..n).map(|i| crate::linalg::scale(&simplex_vertex(n, i), small)));
    out
}

/// `P_{n-1} = conv((2n/(n-2)) Δ_{n-1} ∪ n(-Δ_{n-1}))` in `W_n` chart coordinates,
/// with redundant generators removed.
pub fn build_p(n: usize) -> Result<ChartedPolytope> {
    if n < 3 {
        return Err(Error::InvalidInput(format!("P_(n-1) needs n >= 3, got {n}")));
    }
    let chart = WnChart::new(n)?;
    let points: Vec<Point> = p_generators(n).iter().map(|x| chart.to_chart(x)).collect();
    let body = VPolytope::new(points)?;
    Ok(ChartedPolytope { chart, body })
}

/// `{y : <y, v> <= 1 for every vertex v}`.
pub fn polar(p: &VPolytope) -> Result<HPolytope> {
    let h = HPolytope::new(p.vertices.clone(), vec![1.0; p.vertices.len()])?;
    // the polar is bounded exactly when the origin is interior to p
    match vertex_enumeration(&h) {
        Ok(_) => Ok(h),
        Err(Error::UnboundedPolytope) | Err(Error::EmptyPolytope) => Err(Error::OriginNotInterior),
        Err(e) => Err(e),
    }
}

/// Vertex set of the polar of an H-polytope with unit offsets (its normals are the polar's vertices).
pub fn polar_vertices(h: &HPolytope) -> Result<VPolytope> {
    vertex_enumeration(h)
}

/// Classifies `y` against the halfspaces of `h` by raw slack `offset_i - <y, a_i>`.
pub fn relint_membership(h: &HPolytope, y: &[f64], rel_tol: f64) -> Result<Membership> {
    if y.len() != h.ambient_dim {
        return Err(Error::DimensionMismatch {
            expected: h.ambient_dim,
            found: y.len(),
        });
    }
    let min_slack = h
        .normals
        .iter()
        .zip(&h.offsets)
        .map(|(a, b)| b - dot(a, y))
        .fold(f64::INFINITY, f64::min);
    Ok(if min_slack > rel_tol {
        Membership::Inside
    } else if min_slack >= -rel_tol {
        Membership::Boundary
    } else {
        Membership::Outside
    })
}

/// `P_{n-1}`, its polar and the shared chart, built once and reused for many queries.
#[derive(Debug, Clone)]
pub struct PolarChart {
    pub p: ChartedPolytope,
    pub p_star: HPolytope,
}

/// Outcome of comparing the inequality description with the polar description.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub inequalities: Membership,
    pub polar: Membership,
    pub agree: bool,
}

/// Outcome of comparing the acute test with the polar description.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AcuteReport {
    pub shape: ShapeClass,
    pub polar: Membership,
    pub agree: bool,
}

fn classes_agree(a: Membership, b: Membership) -> bool {
    a == b || a == Membership::Boundary || b == Membership::Boundary
}

impl PolarChart {
    pub fn new(n: usize) -> Result<Self> {
        let p = build_p(n)?;
        let p_star = polar(&p.body)?;
        Ok(Self { p, p_star })
    }

    pub fn n(&self) -> usize {
        self.p.chart.n
    }

    /// `normalize_to_h(x) - e/n` in chart coordinates.
    pub fn recentred(&self, x: &[f64]) -> Result<Point> {
        let n = self.n();
        if x.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: x.len(),
            });
        }
        let mut y = normalize_to_h(x)?;
        y.iter_mut().for_each(|c| *c -= 1.0 / n as f64);
        Ok(self.p.chart.to_chart(&y))
    }

    /// Membership of the recentred, normalised `x` in `relint(P*)`.
    pub fn polar_membership(&self, x: &[f64], rel_tol: f64) -> Result<Membership> {
        relint_membership(&self.p_star, &self.recentred(x)?, rel_tol)
    }

    pub fn corollary_equivalence(&self, alpha: &[f64], rel_tol: f64) -> Result<EquivalenceReport> {
        let inequalities = cone_membership(alpha, rel_tol)?.membership();
        let polar = self.polar_membership(alpha, rel_tol)?;
        Ok(EquivalenceReport {
            inequalities,
            polar,
            agree: classes_agree(inequalities, polar),
        })
    }

    pub fn acute_region_check(&self, squared: &[f64], rel_tol: f64) -> Result<AcuteReport> {
        let shape = classify_squared(squared, rel_tol);
        let by_shape = match shape {
            ShapeClass::Acute => Membership::Inside,
            ShapeClass::Right(_) => Membership::Boundary,
            ShapeClass::Obtuse(_) => Membership::Outside,
        };
        let polar = self.polar_membership(squared, rel_tol)?;
        Ok(AcuteReport {
            shape,
            polar,
            agree: classes_agree(by_shape, polar),
        })
    }
}

pub fn corollary_equivalence(alpha: &[f64]) -> Result<EquivalenceReport> {
    PolarChart::new(alpha.len())?.corollary_equivalence(alpha, CONE_TOL)
}

pub fn acute_region_check(squared: &[f64]) -> Result<AcuteReport> {
    PolarChart::new(squared.len())?.acute_region_check(squared, CONE_TOL)
}

/// Whether 8 points are the vertices of a cube centred at the origin.
pub fn is_centred_cube(vertices: &[Point], tol: f64) -> bool {
    if vertices.len() != 8 || vertices.iter().any(|v| v.len() != 3) {
        return false;
    }
    let radius = norm(&vertices[0]);
    if vertices.iter().any(|v| (norm(v) - radius).abs() > tol * radius) {
        return false;
    }
    let mut dists: Vec<f64> = Vec::new();
    for (i, p) in vertices.iter().enumerate() {
        for q in &vertices[i + 1..] {
            dists.push(distance(p, q));
        }
    }
    let edge = dists.iter().cloned().fold(f64::INFINITY, f64::min);
    let count = |target: f64| {
        dists
            .iter()
            .filter(|&&x| (x - target).abs() <= tol * target)
            .count()
    };
    if count(edge) != 12 || count(edge * 2f64.sqrt()) != 12 || count(edge * 3f64.sqrt()) != 4 {
        return false;
    }
    // three mutually orthogonal edges at every vertex
    vertices.iter().all(|p| {
        let edges: Vec<Point> = vertices
            .iter()
            .filter(|q| (distance(p, q) - edge).abs() <= tol * edge)
            .map(|q| crate::linalg::sub(q, p))
            .collect();
        edges.len() == 3
            && (0..3).all(|a| {
                (a + 1..3).all(|b| dot(&edges[a], &edges[b]).abs() <= tol * edge * edge)
            })
    })
}

/// Whether 6 points are the vertices of a regular octahedron centred at the origin.
pub fn is_centred_regular_octahedron(vertices: &[Point], tol: f64) -> bool {
    if vertices.len() != 6 || vertices.iter().any(|v| v.len() != 3) {
        return false;
    }
    let radius = norm(&vertices[0]);
    if vertices.iter().any(|v| (norm(v) - radius).abs() > tol * radius) {
        return false;
    }
    let r2 = radius * radius;
    // every vertex has exactly one antipode and is orthogonal to the other four
    vertices.iter().all(|p| {
        let mut antipodes = 0;
        for q in vertices {
            let c = dot(p, q);
            if (c + r2).abs() <= tol * r2 {
                antipodes += 1;
            } else if (c - r2).abs() > tol * r2 && c.abs() > tol * r2 {
                return false;
            }
        }
        antipodes == 1
    })
}

/// Whether two point sets agree up to `tol` under a bijection.
pub fn same_point_set(a: &[Point], b: &[Point], tol: f64) -> bool {
    a.len() == b.len()
        && a.iter().all(|p| b.iter().any(|q| distance(p, q) <= tol))
        && b.iter().all(|q| a.iter().any(|p| distance(p, q) <= tol))
}

/// Vertex set of `polar(polar(p))`, obtained by two vertex enumerations.
pub fn bipolar_vertices(p: &VPolytope) -> Result<VPolytope> {
    let p_star = polar(p)?;
    let star_vertices = vertex_enumeration(&p_star)?;
    let p_star_star = polar(&star_vertices)?;
    vertex_enumeration(&p_star_star)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn membership_examples() {
        match cone_membership(&[5.0, 3.0, 4.0], CONE_TOL).unwrap() {
            ConeVerdict::Inside { margin } => assert!((margin - 1.0 / 6.0).abs() < 1e-15),
            v => panic!("{v:?}"),
        }
        assert_eq!(
            cone_membership(&[1.0, 1.0, 2.0], CONE_TOL).unwrap(),
            ConeVerdict::Boundary { index: 2 }
        );
        match cone_membership(&[10.0, 1.0, 1.0, 1.0], CONE_TOL).unwrap() {
            ConeVerdict::Outside { index, violation } => {
                assert_eq!(index, 0);
                assert!((violation - 7.0 / 13.0).abs() < 1e-15);
            }
            v => panic!("{v:?}"),
        }
        assert!(matches!(
            cone_membership(&[1.0, -1.0, 1.0], CONE_TOL).unwrap(),
            ConeVerdict::Outside { index: 1, .. }
        ));
        assert!(matches!(
            cone_membership(&[0.0, 0.0, 0.0], CONE_TOL).unwrap(),
            ConeVerdict::Outside { .. }
        ));
        assert!(cone_membership(&[1.0, 1.0], CONE_TOL).is_err());
    }

    #[test]
    fn normalization() {
        assert_eq!(normalize_to_h(&[1.0; 4]).unwrap(), vec![0.25; 4]);
        let y = normalize_to_h(&[5.0, 3.0, 4.0]).unwrap();
        assert!((y[0] - 5.0 / 12.0).abs() < 1e-16);
        assert!((y.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        assert!(normalize_to_h(&[0.0, 0.0]).is_err());
        let before = cone_membership(&[5.0, 3.0, 4.0], CONE_TOL).unwrap();
        let after = cone_membership(&y, CONE_TOL).unwrap();
        assert_eq!(before.membership(), after.membership());
    }

    #[test]
    fn chart_is_orthonormal_zero_sum() {
        for n in 3..8 {
            let chart = WnChart::new(n).unwrap();
            for (i, b) in chart.basis.iter().enumerate() {
                assert!(b.iter().sum::<f64>().abs() < 1e-14);
                for (j, c) in chart.basis.iter().enumerate() {
                    let t = if i == j { 1.0 } else { 0.0 };
                    assert!((dot(b, c) - t).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn p2_drops_the_small_triangle() {
        let p = build_p(3).unwrap();
        assert_eq!(p.body.len(), 3);
        for v in p.ambient_vertices() {
            assert!(v.iter().sum::<f64>().abs() < 1e-12);
        }
    }

    #[test]
    fn p3_is_a_cube_with_octahedral_polar() {
        let p = build_p(4).unwrap();
        assert_eq!(p.body.len(), 8);
        assert!(is_centred_cube(&p.body.vertices, 1e-10));
        let star = vertex_enumeration(&polar(&p.body).unwrap()).unwrap();
        assert!(is_centred_regular_octahedron(&star.vertices, 1e-10));
    }

    #[test]
    fn polar_of_the_standard_cube() {
        let mut cube = Vec::new();
        for x in [1.0, -1.0] {
            for y in [1.0, -1.0] {
                for z in [1.0, -1.0] {
                    cube.push(vec![x, y, z]);
                }
            }
        }
        let cube = VPolytope::new(cube).unwrap();
        let star = vertex_enumeration(&polar(&cube).unwrap()).unwrap();
        let mut expected = Vec::new();
        for k in 0..3 {
            for s in [1.0, -1.0] {
                let mut e = vec![0.0; 3];
                e[k] = s;
                expected.push(e);
            }
        }
        assert!(same_point_set(&star.vertices, &expected, 1e-10));
    }

    #[test]
    fn polar_requires_interior_origin() {
        let off = VPolytope::new(vec![vec![1.0, 1.0], vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        assert!(matches!(polar(&off), Err(Error::OriginNotInterior)));
    }

    #[test]
    fn relint_examples() {
        let chart = PolarChart::new(4).unwrap();
        let origin = vec![0.0; 3];
        assert_eq!(
            relint_membership(&chart.p_star, &origin, CONE_TOL).unwrap(),
            Membership::Inside
        );
        let star = vertex_enumeration(&chart.p_star).unwrap();
        let v = &star.vertices[0];
        assert_eq!(
            relint_membership(&chart.p_star, v, CONE_TOL).unwrap(),
            Membership::Boundary
        );
        let far = crate::linalg::scale(v, 2.0);
        assert_eq!(
            relint_membership(&chart.p_star, &far, CONE_TOL).unwrap(),
            Membership::Outside
        );
    }

    #[test]
    fn equivalence_examples() {
        let r = corollary_equivalence(&[5.0, 3.0, 4.0]).unwrap();
        assert!(r.agree && r.inequalities == Membership::Inside && r.polar == Membership::Inside);
        let r = corollary_equivalence(&[1.0, 1.0, 2.0]).unwrap();
        assert!(r.agree && r.inequalities == Membership::Boundary && r.polar == Membership::Boundary);
        let r = corollary_equivalence(&[10.0, 1.0, 1.0, 1.0]).unwrap();
        assert!(r.agree && r.inequalities == Membership::Outside && r.polar == Membership::Outside);
    }

    #[test]
    fn acute_examples() {
        let r = acute_region_check(&[1.0, 1.0, 1.0]).unwrap();
        assert!(r.agree && r.shape == ShapeClass::Acute && r.polar == Membership::Inside);
        let r = acute_region_check(&[25.0, 9.0, 16.0]).unwrap();
        assert!(r.agree && r.shape == ShapeClass::Right(0) && r.polar == Membership::Boundary);
    }

    #[test]
    fn bipolar_of_p3() {
        let p = build_p(4).unwrap();
        let back = bipolar_vertices(&p.body).unwrap();
        assert!(same_point_set(&back.vertices, &p.body.vertices, 1e-10));
    }
}
