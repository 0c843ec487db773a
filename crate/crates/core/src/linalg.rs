//! Small dense linear algebra and simplex volumes.
//!
//! Everything here targets desk-scale problems (ambient dimension up to 8,
//! a few dozen vectors), so matrices are plain `nalgebra::DMatrix` values and
//! points are `Vec<f64>`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// A point or vector in `R^d`.
pub type Point = Vec<f64>;

/// Row-major dense matrix used throughout the crate.
pub type DenseMatrix = DMatrix<f64>;

/// Default relative tolerance for [`numeric_rank`].
pub const RANK_TOL: f64 = 1e-9;

/// Negative Gram determinants down to `-GRAM_CLAMP * scale` are treated as zero.
pub const GRAM_CLAMP: f64 = 1e-12;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Point {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Point {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Point {
    a.iter().map(|x| x * s).collect()
}

/// `y += s * x`
pub fn axpy(y: &mut [f64], s: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += s * xi;
    }
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Unit vector in the direction of `a`, or `None` for the zero vector.
pub fn normalized(a: &[f64]) -> Option<Point> {
    let n = norm(a);
    (n > 0.0 && n.is_finite()).then(|| scale(a, 1.0 / n))
}

pub fn centroid(points: &[Point]) -> Point {
    let d = points.first().map_or(0, Vec::len);
    let mut c = vec![0.0; d];
    for p in points {
        axpy(&mut c, 1.0, p);
    }
    let k = points.len().max(1) as f64;
    c.iter_mut().for_each(|x| *x /= k);
    c
}

/// Matrix whose columns are the given vectors.
pub fn columns(vectors: &[Point]) -> DenseMatrix {
    let rows = vectors.first().map_or(0, Vec::len);
    DenseMatrix::from_fn(rows, vectors.len(), |r, c| vectors[c][r])
}

fn common_dim(points: &[Point]) -> Result<usize> {
    let d = points
        .first()
        .ok_or_else(|| Error::InvalidInput("empty point list".into()))?
        .len();
    for p in points {
        if p.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: p.len(),
            });
        }
        if p.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite coordinate".into()));
        }
    }
    Ok(d)
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// k-dimensional volume of the simplex spanned by `k + 1` points in `R^d`,
/// `sqrt(det(A^T A)) / k!` with `A = [x_2 - x_1, ..., x_{k+1} - x_1]`.
pub fn gram_volume(vertices: &[Point]) -> Result<f64> {
    let d = common_dim(vertices)?;
    let k = vertices.len() - 1;
    if k > d {
        return Err(Error::InvalidInput(format!(
            "{} points cannot span a simplex in R^{d}",
            k + 1
        )));
    }
    if k == 0 {
        return Ok(1.0);
    }
    let edges: Vec<Point> = vertices[1..]
        .iter()
        .map(|x| sub(x, &vertices[0]))
        .collect();
    let a = columns(&edges);
    let gram = a.transpose() * &a;
    let det = gram.determinant();
    let scale: f64 = edges.iter().map(|e| dot(e, e)).product();
    let det = if det < 0.0 {
        let bound = GRAM_CLAMP * scale;
        if det < -bound {
            return Err(Error::InconsistentGram { det, bound });
        }
        0.0
    } else if det <= 4.0 * f64::EPSILON * k as f64 * scale {
        0.0
    } else {
        det
    };
    Ok(det.sqrt() / factorial(k))
}

/// Number of singular values above `rel_tol * sigma_max`.
pub fn numeric_rank(m: &DenseMatrix, rel_tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * max).count()
}

/// Solves `a x = b` for square `a`; `Err(Singular)` when `a` is numerically rank deficient.
pub fn solve_square_system(a: &DenseMatrix, b: &[f64]) -> Result<Point> {
    let d = a.nrows();
    if a.ncols() != d {
        return Err(Error::InvalidInput(format!(
            "matrix is {}x{}, not square",
            d,
            a.ncols()
        )));
    }
    if b.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: b.len(),
        });
    }
    let svd = a.clone().svd(true, true);
    let max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 || svd.singular_values.iter().any(|&s| s <= RANK_TOL * max) {
        return Err(Error::Singular);
    }
    let rhs = nalgebra::DVector::from_column_slice(b);
    let x = svd.solve(&rhs, 0.0).map_err(|_| Error::Singular)?;
    Ok(x.iter().cloned().collect())
}

/// `d - 1` orthonormal vectors completing the unit vector `u` to an orthonormal basis.
pub fn orthonormal_complement_basis(u: &[f64]) -> Result<Vec<Point>> {
    let d = u.len();
    let n = norm(u);
    if (n - 1.0).abs() > 1e-6 {
        return Err(Error::NotUnit(n));
    }
    let u = scale(u, 1.0 / n);
    // seed with the standard basis vectors least aligned with u
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| u[a].abs().total_cmp(&u[b].abs()));
    let mut basis: Vec<Point> = Vec::with_capacity(d - 1);
    for &k in order.iter().take(d - 1) {
        let mut v = vec![0.0; d];
        v[k] = 1.0;
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            let c = dot(&v, &u);
            axpy(&mut v, -c, &u);
            for b in &basis {
                let c = dot(&v, b);
                axpy(&mut v, -c, b);
            }
        }
        let v = normalized(&v).ok_or(Error::Singular)?;
        basis.push(v);
    }
    Ok(basis)
}

/// Orthonormal basis of the span of `vectors` (modified Gram-Schmidt, rank-revealing).
pub fn orthonormal_span(vectors: &[Point], rel_tol: f64) -> Vec<Point> {
    let max = vectors.iter().map(|v| norm(v)).fold(0.0, f64::max);
    let mut basis: Vec<Point> = Vec::new();
    if max == 0.0 {
        return basis;
    }
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&w, b);
                axpy(&mut w, -c, b);
            }
        }
        let n = norm(&w);
        if n > rel_tol * max {
            basis.push(scale(&w, 1.0 / n));
        }
    }
    basis
}

/// Affine dimension of a point set.
pub fn affine_dimension(points: &[Point], rel_tol: f64) -> usize {
    if points.len() < 2 {
        return 0;
    }
    let diffs: Vec<Point> = points[1..].iter().map(|p| sub(p, &points[0])).collect();
    numeric_rank(&columns(&diffs), rel_tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn gram_volume_examples() {
        let tri = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        assert!(close(gram_volume(&tri).unwrap(), 0.5, 1e-15));
        let seg = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        assert!(close(gram_volume(&seg).unwrap(), 2f64.sqrt(), 1e-15));

        // regular tetrahedron with unit edges; every facet is an equilateral triangle
        let k = 1.0 / (2.0 * 2f64.sqrt());
        let tet: Vec<Point> = [
            [1.0, 1.0, 1.0],
            [1.0, -1.0, -1.0],
            [-1.0, 1.0, -1.0],
            [-1.0, -1.0, 1.0],
        ]
        .iter()
        .map(|p| scale(p, k))
        .collect();
        assert!(close(distance(&tet[0], &tet[1]), 1.0, 1e-15));
        for skip in 0..4 {
            let facet: Vec<Point> = (0..4).filter(|&i| i != skip).map(|i| tet[i].clone()).collect();
            assert!(close(gram_volume(&facet).unwrap(), 3f64.sqrt() / 4.0, 1e-14));
        }
    }

    #[test]
    fn gram_volume_errors_and_degeneracy() {
        let bad = vec![vec![0.0, 0.0], vec![1.0, 0.0, 0.0]];
        assert!(matches!(
            gram_volume(&bad),
            Err(Error::DimensionMismatch { .. })
        ));
        let too_many = vec![vec![0.0], vec![1.0], vec![2.0]];
        assert!(matches!(gram_volume(&too_many), Err(Error::InvalidInput(_))));
        let collinear = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]];
        assert_eq!(gram_volume(&collinear).unwrap(), 0.0);
    }

    #[test]
    fn rank_examples() {
        assert_eq!(numeric_rank(&DenseMatrix::identity(3, 3), 1e-10), 3);
        assert_eq!(numeric_rank(&DenseMatrix::zeros(2, 5), RANK_TOL), 0);
        let m = columns(&[vec![1.0, 0.0], vec![2.0, 0.0], vec![0.0, 0.0]]);
        assert_eq!(numeric_rank(&m, RANK_TOL), 1);
    }

    #[test]
    fn solve_examples() {
        let x = solve_square_system(&DenseMatrix::identity(2, 2), &[3.0, 4.0]).unwrap();
        assert!(close(x[0], 3.0, 1e-15) && close(x[1], 4.0, 1e-15));
        let ones = DenseMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert!(matches!(
            solve_square_system(&ones, &[1.0, 2.0]),
            Err(Error::Singular)
        ));
        let diag = DenseMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 4.0]);
        let x = solve_square_system(&diag, &[2.0, 4.0]).unwrap();
        assert!(close(x[0], 1.0, 1e-15) && close(x[1], 1.0, 1e-15));
    }

    #[test]
    fn complement_basis() {
        let b = orthonormal_complement_basis(&[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(b.len(), 2);
        for v in &b {
            assert!(v[2].abs() < 1e-15);
        }
        let b = orthonormal_complement_basis(&[1.0, 0.0]).unwrap();
        assert_eq!(b.len(), 1);
        assert!(close(b[0][1].abs(), 1.0, 1e-15));

        let u = scale(&[1.0, 1.0, 1.0], 1.0 / 3f64.sqrt());
        let b = orthonormal_complement_basis(&u).unwrap();
        for (i, v) in b.iter().enumerate() {
            assert!(dot(v, &u).abs() <= 1e-12);
            for (j, w) in b.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((dot(v, w) - target).abs() <= 1e-12);
            }
        }
        assert!(matches!(
            orthonormal_complement_basis(&[2.0, 0.0]),
            Err(Error::NotUnit(_))
        ));
    }
}
