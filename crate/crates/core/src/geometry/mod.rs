//! Zonotopes and exact geometric primitives.

mod delta;
mod enumerate;
mod hpoly;
mod normalize;
mod zonotope;

pub use delta::{delta_of, facet_profile, DeltaModularityReport, FacetProfile, DELTA_MODULAR_TOL};
pub use enumerate::{
    convex_hull_2d, enumerate_facet_normals, enumerate_vertices, polygon_area, volume, VertexSet, DEFAULT_SUBSET_LIMIT,
    DEFAULT_VERTEX_LIMIT,
};
pub use hpoly::{exact_opt_containment, ExactContainment, HPolytope};
pub use normalize::{column_norm_bound, identity_defect, normalize, NormalizationResult};
pub use zonotope::{Zonotope, TIE_TOL};

pub mod normalization {
    pub use super::normalize::{DEFAULT_MAX_ITER, IDENTITY_TOL};
}
