//! The facet-volume map on simplices, squared-volume coordinates, the
//! acute/obtuse classification and Gaussian simplex sampling.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{distance, gram_volume, Point};

/// Default relative band for the [`ShapeClass::Right`] boundary class.
pub const SHAPE_TOL: f64 = 1e-9;

/// Relative threshold (against `diameter^d`) below which a simplex is degenerate.
pub const DEGENERACY_TOL: f64 = 1e-12;

const MAX_SAMPLE_ATTEMPTS: usize = 100;

/// `d + 1` affinely independent points in `R^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexRealization {
    dim: usize,
    vertices: Vec<Point>,
}

impl SimplexRealization {
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        let dim = vertices.first().map_or(0, Vec::len);
        if dim < 2 {
            return Err(Error::InvalidInput(format!(
                "simplex dimension must be at least 2, got {dim}"
            )));
        }
        if vertices.len() != dim + 1 {
            return Err(Error::InvalidInput(format!(
                "a simplex in R^{dim} needs {} vertices, got {}",
                dim + 1,
                vertices.len()
            )));
        }
        let volume = gram_volume(&vertices)?;
        let threshold = DEGENERACY_TOL * diameter(&vertices).powi(dim as i32);
        if volume <= threshold {
            return Err(Error::DegenerateSimplex { volume, threshold });
        }
        Ok(Self { dim, vertices })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn volume(&self) -> f64 {
        gram_volume(&self.vertices).expect("validated at construction")
    }
}

fn diameter(points: &[Point]) -> f64 {
    let mut max = 0.0f64;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            max = max.max(distance(p, q));
        }
    }
    max
}

/// Positive facet volumes of a `d`-polytope with `n >= d + 1` facets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FacetVolumeVector {
    dim: usize,
    values: Vec<f64>,
}

impl FacetVolumeVector {
    pub fn new(dim: usize, values: Vec<f64>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidInput(format!(
                "dimension must be at least 2, got {dim}"
            )));
        }
        if values.len() < dim + 1 {
            return Err(Error::InvalidInput(format!(
                "a {dim}-polytope has at least {} facets, got {}",
                dim + 1,
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidInput(format!(
                "facet volume {} at index {i} is not positive",
                values[i]
            )));
        }
        Ok(Self { dim, values })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// Acute/obtuse type of a simplex read off its squared facet volumes.
///
/// Indices are 0-based; `Display` prints them 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShapeClass {
    Acute,
    Obtuse(usize),
    Right(usize),
}

impl ShapeClass {
    /// The two-way split used for figure tallies, where `Right` counts as obtuse.
    pub fn is_acute(self) -> bool {
        matches!(self, ShapeClass::Acute)
    }
}

impl fmt::Display for ShapeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShapeClass::Acute => write!(f, "Acute"),
            ShapeClass::Obtuse(i) => write!(f, "Obtuse({})", i + 1),
            ShapeClass::Right(i) => write!(f, "Right({})", i + 1),
        }
    }
}

/// Facet `i` is the facet opposite vertex `i`.
pub fn facet_volume_vector(s: &SimplexRealization) -> Result<FacetVolumeVector> {
    let n = s.vertices.len();
    let mut values = Vec::with_capacity(n);
    for skip in 0..n {
        let facet: Vec<Point> = s
            .vertices
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != skip)
            .map(|(_, p)| p.clone())
            .collect();
        values.push(gram_volume(&facet)?);
    }
    FacetVolumeVector::new(s.dim, values).map_err(|_| Error::DegenerateSimplex {
        volume: s.volume(),
        threshold: 0.0,
    })
}

pub fn squared_volume_vector(f: &FacetVolumeVector) -> Vec<f64> {
    f.values.iter().map(|v| v * v).collect()
}

pub fn classify(f: &FacetVolumeVector, rel_tol: f64) -> ShapeClass {
    classify_squared(&squared_volume_vector(f), rel_tol)
}

/// Classification on squared volumes `s_i`: compares `s_i` with the sum of the others.
pub fn classify_squared(squared: &[f64], rel_tol: f64) -> ShapeClass {
    let total: f64 = squared.iter().sum();
    // only the largest entry can reach the sum of the others
    let (i, &largest) = squared
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty volume vector");
    let excess = largest - (total - largest);
    let band = rel_tol * total;
    if excess > band {
        ShapeClass::Obtuse(i)
    } else if excess.abs() <= band {
        ShapeClass::Right(i)
    } else {
        ShapeClass::Acute
    }
}

/// Generator for sample `index` of a run seeded with `seed`.
///
/// Seeds are `seed ^ index`, so every sample is reproducible on its own and
/// parallel runs match serial ones.
pub fn derived_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ index)
}

/// `d + 1` points with independent standard normal coordinates.
pub fn sample_gaussian_simplex<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<SimplexRealization> {
    if d < 2 {
        return Err(Error::InvalidInput(format!(
            "simplex dimension must be at least 2, got {d}"
        )));
    }
    for _ in 0..MAX_SAMPLE_ATTEMPTS {
        let vertices: Vec<Point> = (0..=d)
            .map(|_| (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect())
            .collect();
        match SimplexRealization::new(vertices) {
            Ok(s) => return Ok(s),
            Err(Error::DegenerateSimplex { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::SamplingFailure(MAX_SAMPLE_ATTEMPTS))
}
