//! Halfspace and vertex representations and the brute-force geometry kernel:
//! vertex enumeration, facet areas and volumes.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    affine_dimension, centroid, distance, dot, norm, orthonormal_span, scale, solve_square_system,
    sub, DenseMatrix, Point, RANK_TOL,
};

/// Relative feasibility slack for vertex candidates.
pub const FEASIBILITY_TOL: f64 = 1e-9;
/// Relative distance under which two candidate vertices are merged.
pub const DEDUP_TOL: f64 = 1e-8;
/// Relative tolerance for the redundant-vertex test.
pub const HULL_TOL: f64 = 1e-10;
/// Relative threshold for a facet area to count as zero.
pub const TANGENT_AREA_TOL: f64 = 1e-12;

/// `{x : <x, normal_i> <= offset_i}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HPolytope {
    pub ambient_dim: usize,
    pub normals: Vec<Point>,
    pub offsets: Vec<f64>,
}

impl HPolytope {
    pub fn new(normals: Vec<Point>, offsets: Vec<f64>) -> Result<Self> {
        let ambient_dim = normals.first().map_or(0, Vec::len);
        if ambient_dim == 0 {
            return Err(Error::InvalidInput("no halfspaces".into()));
        }
        if normals.len() != offsets.len() {
            return Err(Error::InvalidInput(format!(
                "{} normals but {} offsets",
                normals.len(),
                offsets.len()
            )));
        }
        for (i, a) in normals.iter().enumerate() {
            if a.len() != ambient_dim {
                return Err(Error::DimensionMismatch {
                    expected: ambient_dim,
                    found: a.len(),
                });
            }
            if !(norm(a) > 0.0) || a.iter().any(|x| !x.is_finite()) || !offsets[i].is_finite() {
                return Err(Error::InvalidInput(format!("halfspace {i} is invalid")));
            }
        }
        Ok(Self {
            ambient_dim,
            normals,
            offsets,
        })
    }

    pub fn len(&self) -> usize {
        self.normals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.normals.is_empty()
    }

    /// Same polytope with unit normals.
    pub fn normalized(&self) -> HPolytope {
        let (normals, offsets) = self
            .normals
            .iter()
            .zip(&self.offsets)
            .map(|(a, &b)| {
                let n = norm(a);
                (scale(a, 1.0 / n), b / n)
            })
            .unzip();
        HPolytope {
            ambient_dim: self.ambient_dim,
            normals,
            offsets,
        }
    }

    /// Largest constraint violation `max_i <x, a_i> - b_i`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        self.normals
            .iter()
            .zip(&self.offsets)
            .map(|(a, b)| dot(a, x) - b)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Convex hull of an irredundant vertex list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VPolytope {
    pub ambient_dim: usize,
    pub vertices: Vec<Point>,
}

impl VPolytope {
    /// Builds the hull, dropping every point that is a convex combination of the remaining ones.
    pub fn new(points: Vec<Point>) -> Result<Self> {
        let ambient_dim = points.first().map_or(0, Vec::len);
        if points.iter().any(|p| p.len() != ambient_dim) {
            return Err(Error::InvalidInput("points of mixed dimension".into()));
        }
        let mut vertices = points;
        let mut i = 0;
        while i < vertices.len() {
            let others: Vec<Point> = vertices
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, p)| p.clone())
                .collect();
            if !others.is_empty() && in_convex_hull(&vertices[i], &others, HULL_TOL) {
                vertices.remove(i);
            } else {
                i += 1;
            }
        }
        if vertices.len() < ambient_dim + 1 {
            return Err(Error::DegenerateGeometry(format!(
                "{} vertices cannot span R^{ambient_dim}",
                vertices.len()
            )));
        }
        Ok(Self {
            ambient_dim,
            vertices,
        })
    }

    pub(crate) fn from_vertices_unchecked(ambient_dim: usize, vertices: Vec<Point>) -> Self {
        Self {
            ambient_dim,
            vertices,
        }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn diameter(&self) -> f64 {
        let mut max = 0.0f64;
        for (i, p) in self.vertices.iter().enumerate() {
            for q in &self.vertices[i + 1..] {
                max = max.max(distance(p, q));
            }
        }
        max
    }
}

/// Minimum-norm point of `conv(points)` (Wolfe's algorithm) with its convex weights.
pub fn min_norm_point(points: &[Point]) -> (Point, Vec<f64>) {
    let m = points.len();
    assert!(m > 0, "min_norm_point of an empty set");
    let scale2 = points.iter().map(|p| dot(p, p)).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let eps = 1e-14;

    let start = (0..m)
        .min_by(|&a, &b| dot(&points[a], &points[a]).total_cmp(&dot(&points[b], &points[b])))
        .unwrap();
    let mut active = vec![start];
    let mut weights = vec![1.0];
    let mut x = points[start].clone();

    let combine = |active: &[usize], w: &[f64]| -> Point {
        let mut y = vec![0.0; x_len(points)];
        for (&k, &wk) in active.iter().zip(w) {
            for (yi, pi) in y.iter_mut().zip(&points[k]) {
                *yi += wk * pi;
            }
        }
        y
    };

    for _ in 0..(50 * m + 100) {
        let xx = dot(&x, &x);
        let (j, xj) = (0..m)
            .map(|j| (j, dot(&x, &points[j])))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if xx - xj <= eps * scale2 || active.contains(&j) {
            break;
        }
        active.push(j);
        weights.push(0.0);
        loop {
            let mu = affine_minimizer(points, &active);
            if mu.iter().all(|&v| v > eps) {
                weights = mu;
                x = combine(&active, &weights);
                break;
            }
            let mut theta = 1.0f64;
            for (&l, &u) in weights.iter().zip(&mu) {
                if u <= eps && l - u > 0.0 {
                    theta = theta.min(l / (l - u));
                }
            }
            for (l, u) in weights.iter_mut().zip(&mu) {
                *l = theta * u + (1.0 - theta) * *l;
            }
            let keep: Vec<bool> = weights.iter().map(|&l| l > eps).collect();
            if keep.iter().all(|&k| k) {
                // numerical stall; drop the smallest weight
                let (k, _) = weights
                    .iter()
                    .enumerate()
                    .min_by(|a, b| a.1.total_cmp(b.1))
                    .unwrap();
                weights.remove(k);
                active.remove(k);
            } else {
                let mut idx = 0;
                active.retain(|_| {
                    idx += 1;
                    keep[idx - 1]
                });
                weights.retain(|&l| l > eps);
            }
            let total: f64 = weights.iter().sum();
            weights.iter_mut().for_each(|l| *l /= total);
            x = combine(&active, &weights);
            if active.len() == 1 {
                break;
            }
        }
    }
    let mut full = vec![0.0; m];
    for (&k, &w) in active.iter().zip(&weights) {
        full[k] = w;
    }
    (x, full)
}

fn x_len(points: &[Point]) -> usize {
    points[0].len()
}

/// Weights summing to one that minimise `|sum mu_k p_k|` over the affine hull of the active points.
fn affine_minimizer(points: &[Point], active: &[usize]) -> Vec<f64> {
    let k = active.len();
    let mut sys = DenseMatrix::zeros(k + 1, k + 1);
    for a in 0..k {
        for b in 0..k {
            sys[(a, b)] = dot(&points[active[a]], &points[active[b]]);
        }
        sys[(a, k)] = 1.0;
        sys[(k, a)] = 1.0;
    }
    let mut rhs = nalgebra::DVector::zeros(k + 1);
    rhs[k] = 1.0;
    let svd = sys.svd(true, true);
    let max = svd.singular_values.max();
    match svd.solve(&rhs, 1e-13 * max) {
        Ok(sol) => sol.iter().take(k).cloned().collect(),
        Err(_) => vec![1.0 / k as f64; k],
    }
}

/// Whether `p` lies in `conv(others)` up to `rel_tol` times the point-set scale.
pub fn in_convex_hull(p: &[f64], others: &[Point], rel_tol: f64) -> bool {
    let shifted: Vec<Point> = others.iter().map(|q| sub(q, p)).collect();
    let scale = shifted.iter().map(|q| norm(q)).fold(0.0, f64::max);
    if scale == 0.0 {
        return true;
    }
    let (x, _) = min_norm_point(&shifted);
    norm(&x) <= rel_tol * scale
}

/// All k-subsets of `0..n` in lexicographic order.
pub(crate) fn subsets(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut current: Option<Vec<usize>> = (k <= n).then(|| (0..k).collect());
    std::iter::from_fn(move || {
        let out = current.clone()?;
        let next = {
            let mut c = out.clone();
            let mut i = k;
            loop {
                if i == 0 {
                    break None;
                }
                i -= 1;
                if c[i] < n - k + i {
                    c[i] += 1;
                    for j in i + 1..k {
                        c[j] = c[j - 1] + 1;
                    }
                    break Some(c);
                }
            }
        };
        current = next;
        Some(out)
    })
}

fn support_scale(h: &HPolytope) -> f64 {
    h.offsets.iter().map(|b| b.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE)
}

/// Checks for a recession ray: every extreme ray of `{x : <x, u_i> <= 0}` is cut
/// out by `d - 1` independent constraints.
fn has_recession_ray(unit: &HPolytope) -> bool {
    let d = unit.ambient_dim;
    if crate::linalg::numeric_rank(&crate::linalg::columns(&unit.normals), RANK_TOL) < d {
        return true;
    }
    if d == 1 {
        let pos = unit.normals.iter().any(|a| a[0] > 0.0);
        let neg = unit.normals.iter().any(|a| a[0] < 0.0);
        return !(pos && neg);
    }
    for subset in subsets(unit.len(), d - 1) {
        let rows: Vec<Point> = subset.iter().map(|&i| unit.normals[i].clone()).collect();
        let basis = orthonormal_span(&rows, RANK_TOL);
        if basis.len() < d - 1 {
            continue;
        }
        let Some(r) = null_direction(&basis, d) else {
            continue;
        };
        for sign in [1.0, -1.0] {
            if unit.normals.iter().all(|a| sign * dot(a, &r) <= 1e-10) {
                return true;
            }
        }
    }
    false
}

/// Unit vector orthogonal to a `(d-1)`-dimensional orthonormal basis.
fn null_direction(basis: &[Point], d: usize) -> Option<Point> {
    (0..d)
        .map(|e| {
            let mut cand = vec![0.0; d];
            cand[e] = 1.0;
            for _ in 0..2 {
                for b in basis {
                    let c = dot(&cand, b);
                    crate::linalg::axpy(&mut cand, -c, b);
                }
            }
            cand
        })
        .max_by(|a, b| norm(a).total_cmp(&norm(b)))
        .and_then(|c| crate::linalg::normalized(&c))
}

/// Vertices of a bounded H-polytope by brute force over all d-subsets of constraints.
pub fn vertex_enumeration(h: &HPolytope) -> Result<VPolytope> {
    let d = h.ambient_dim;
    if h.len() < d + 1 {
        return Err(Error::UnboundedPolytope);
    }
    let unit = h.normalized();
    if has_recession_ray(&unit) {
        return Err(Error::UnboundedPolytope);
    }
    let scale = support_scale(&unit);
    let mut vertices: Vec<Point> = Vec::new();
    for subset in subsets(unit.len(), d) {
        let a = DenseMatrix::from_fn(d, d, |r, c| unit.normals[subset[r]][c]);
        let b: Point = subset.iter().map(|&i| unit.offsets[i]).collect();
        let x = match solve_square_system(&a, &b) {
            Ok(x) => x,
            Err(Error::Singular) => continue,
            Err(e) => return Err(e),
        };
        if unit.max_violation(&x) > FEASIBILITY_TOL * scale {
            continue;
        }
        if vertices.iter().all(|v| distance(v, &x) > DEDUP_TOL * scale) {
            vertices.push(x);
        }
    }
    if vertices.is_empty() {
        return Err(Error::EmptyPolytope);
    }
    Ok(VPolytope::from_vertices_unchecked(d, vertices))
}

/// Facets, areas and volume of a bounded polytope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolytopeGeometry {
    /// Unit outer normals, one per halfspace.
    pub normals: Vec<Point>,
    /// Support numbers for the unit normals.
    pub h: Vec<f64>,
    pub vertices: VPolytope,
    /// Indices into `vertices` lying on each supporting hyperplane.
    pub facet_vertex_sets: Vec<Vec<usize>>,
    pub facet_areas: Vec<f64>,
    /// d-volume from `(1/d) sum h_i area_i` about the vertex centroid.
    pub volume: f64,
    /// d-volume from the pyramid recursion about the vertex centroid.
    pub recursive_volume: f64,
    /// `(i, j, vol_{d-2}(F_i ∩ F_j))` for every pair of facets meeting in a ridge.
    #[serde(skip)]
    pub ridges: Vec<(usize, usize, f64)>,
}

impl PolytopeGeometry {
    pub fn dim(&self) -> usize {
        self.vertices.ambient_dim
    }

    /// `|sum area_i u_i| / sum area_i`; zero for closed polytopes.
    pub fn balance_residual(&self) -> f64 {
        let d = self.dim();
        let mut s = vec![0.0; d];
        for (u, a) in self.normals.iter().zip(&self.facet_areas) {
            crate::linalg::axpy(&mut s, *a, u);
        }
        norm(&s) / self.facet_areas.iter().sum::<f64>()
    }

    /// Scale used for relative tolerances: the vertex diameter.
    pub fn scale(&self) -> f64 {
        self.vertices.diameter()
    }

    pub fn vertex_centroid(&self) -> Point {
        centroid(&self.vertices.vertices)
    }

    /// Largest distance from a facet vertex to its hyperplane.
    pub fn max_facet_offset(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, set) in self.facet_vertex_sets.iter().enumerate() {
            for &k in set {
                let off = dot(&self.vertices.vertices[k], &self.normals[i]) - self.h[i];
                worst = worst.max(off.abs());
            }
        }
        worst
    }
}

/// Volumes of faces given by vertex index sets, memoised.
struct FaceVolumes<'a> {
    vertices: &'a [Point],
    facets: &'a [Vec<usize>],
    cache: HashMap<Vec<usize>, f64>,
}

impl<'a> FaceVolumes<'a> {
    fn new(vertices: &'a [Point], facets: &'a [Vec<usize>]) -> Self {
        Self {
            vertices,
            facets,
            cache: HashMap::new(),
        }
    }

    fn points(&self, ids: &[usize]) -> Vec<Point> {
        ids.iter().map(|&i| self.vertices[i].clone()).collect()
    }

    fn dimension(&self, ids: &[usize]) -> usize {
        affine_dimension(&self.points(ids), RANK_TOL)
    }

    /// k-volume of the face with vertex set `ids` (which must have affine dimension k).
    fn volume(&mut self, ids: &[usize], k: usize) -> Result<f64> {
        if let Some(&v) = self.cache.get(ids) {
            return Ok(v);
        }
        let v = match k {
            0 => 1.0,
            1 => {
                let pts = self.points(ids);
                let mut max = 0.0f64;
                for (i, p) in pts.iter().enumerate() {
                    for q in &pts[i + 1..] {
                        max = max.max(distance(p, q));
                    }
                }
                max
            }
            _ => {
                let pts = self.points(ids);
                let apex = centroid(&pts);
                let mut seen: Vec<Vec<usize>> = Vec::new();
                let mut total = 0.0;
                for facet in self.facets {
                    let sub_ids: Vec<usize> =
                        ids.iter().copied().filter(|i| facet.binary_search(i).is_ok()).collect();
                    if sub_ids.len() < k || sub_ids.len() == ids.len() || seen.contains(&sub_ids) {
                        continue;
                    }
                    if self.dimension(&sub_ids) != k - 1 {
                        continue;
                    }
                    let sub_pts = self.points(&sub_ids);
                    let height = distance_to_affine_hull(&apex, &sub_pts);
                    let sub_vol = self.volume(&sub_ids, k - 1)?;
                    total += height * sub_vol;
                    seen.push(sub_ids);
                }
                if seen.len() < k + 1 {
                    return Err(Error::DegenerateGeometry(format!(
                        "{k}-face with {} vertices has only {} sub-faces",
                        ids.len(),
                        seen.len()
                    )));
                }
                total / k as f64
            }
        };
        self.cache.insert(ids.to_vec(), v);
        Ok(v)
    }
}

fn distance_to_affine_hull(p: &[f64], points: &[Point]) -> f64 {
    let base = &points[0];
    let dirs: Vec<Point> = points[1..].iter().map(|q| sub(q, base)).collect();
    let basis = orthonormal_span(&dirs, RANK_TOL);
    let mut r = sub(p, base);
    for _ in 0..2 {
        for b in &basis {
            let c = dot(&r, b);
            crate::linalg::axpy(&mut r, -c, b);
        }
    }
    norm(&r)
}

/// Facet vertex sets, facet areas and volume of `h`, whose vertices are `v`.
pub fn facet_geometry(h: &HPolytope, v: &VPolytope) -> Result<PolytopeGeometry> {
    let d = h.ambient_dim;
    let unit = h.normalized();
    let verts = &v.vertices;
    let scale = v
        .diameter()
        .max(verts.iter().map(|p| norm(p)).fold(0.0, f64::max))
        .max(f64::MIN_POSITIVE);
    let tol = FEASIBILITY_TOL * scale;
    let facet_vertex_sets: Vec<Vec<usize>> = unit
        .normals
        .iter()
        .zip(&unit.offsets)
        .map(|(u, &b)| {
            (0..verts.len())
                .filter(|&k| (dot(&verts[k], u) - b).abs() <= tol)
                .collect()
        })
        .collect();

    let mut faces = FaceVolumes::new(verts, &facet_vertex_sets);
    let mut facet_areas = Vec::with_capacity(unit.len());
    for set in &facet_vertex_sets {
        let area = if set.len() >= d && faces.dimension(set) == d - 1 {
            faces.volume(set, d - 1)?
        } else {
            0.0
        };
        facet_areas.push(area);
    }

    let mut ridges = Vec::new();
    if d >= 2 {
        for i in 0..unit.len() {
            if facet_areas[i] == 0.0 {
                continue;
            }
            for j in i + 1..unit.len() {
                if facet_areas[j] == 0.0 {
                    continue;
                }
                let common: Vec<usize> = facet_vertex_sets[i]
                    .iter()
                    .copied()
                    .filter(|k| facet_vertex_sets[j].binary_search(k).is_ok())
                    .collect();
                if common.len() >= d - 1 && faces.dimension(&common) == d - 2 {
                    let vol = faces.volume(&common, d - 2)?;
                    ridges.push((i, j, vol));
                }
            }
        }
    }

    let all: Vec<usize> = (0..verts.len()).collect();
    let recursive_volume = if faces.dimension(&all) == d {
        faces.volume(&all, d)?
    } else {
        0.0
    };
    let c = centroid(verts);
    let volume = unit
        .normals
        .iter()
        .zip(&unit.offsets)
        .zip(&facet_areas)
        .map(|((u, b), a)| (b - dot(&c, u)) * a)
        .sum::<f64>()
        / d as f64;

    Ok(PolytopeGeometry {
        normals: unit.normals,
        h: unit.offsets,
        vertices: v.clone(),
        facet_vertex_sets,
        facet_areas,
        volume,
        recursive_volume,
        ridges,
    })
}

/// Vertex enumeration followed by [`facet_geometry`].
pub fn polytope_geometry(h: &HPolytope) -> Result<PolytopeGeometry> {
    let v = vertex_enumeration(h)?;
    facet_geometry(h, &v)
}

/// Facet areas ordered by halfspace; every halfspace must support a facet.
pub fn facet_volume_vector_of_polytope(h: &HPolytope) -> Result<crate::simplex::FacetVolumeVector> {
    let g = polytope_geometry(h)?;
    let d = h.ambient_dim;
    let threshold = TANGENT_AREA_TOL * g.scale().powi(d as i32 - 1);
    let redundant: Vec<usize> = g
        .facet_areas
        .iter()
        .enumerate()
        .filter(|(_, &a)| a <= threshold)
        .map(|(i, _)| i)
        .collect();
    if !redundant.is_empty() {
        return Err(Error::RedundantHalfspace(redundant));
    }
    if g.recursive_volume <= 0.0 {
        return Err(Error::DegenerateGeometry("polytope is not full-dimensional".into()));
    }
    crate::simplex::FacetVolumeVector::new(d, g.facet_areas)
}
