//! Facet-volume vectors of convex polytopes.
//!
//! For `d >= 2` and `n >= d + 1`, a vector of positive reals is the list of
//! facet volumes of some `d`-polytope with `n` facets exactly when every entry
//! is smaller than the sum of the others. This crate computes facet volumes,
//! decides membership in that cone, describes the normalised cone through the
//! polar of an explicit polytope, and inverts the map constructively: it finds
//! unit normals balancing the weights and then reconstructs a polytope with
//! those normals and facet volumes.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cone;
pub mod error;
pub mod latitude;
pub mod linalg;
pub mod minkowski;
pub mod normals;
pub mod polytope;
pub mod simplex;

pub use cone::{cone_membership, normalize_to_h, ConeVerdict, Membership, PolarChart};
pub use error::{Error, Result};
pub use minkowski::{reconstruct, ReconstructOptions, Reconstruction, SupportVector};
pub use normals::{solve_normals, SolveOptions, UnitNormalSystem};
pub use polytope::{HPolytope, PolytopeGeometry, VPolytope};
pub use simplex::{FacetVolumeVector, ShapeClass, SimplexRealization};
