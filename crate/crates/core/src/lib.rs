//! Approximate convex-body containment `max{α > 0 : α·K ⊆ Q}` in the
//! membership-oracle model, with zonotope inner bodies.
//!
//! The crate is organized bottom-up:
//!
//! - [`geometry`]: zonotopes, support functions, gauges, exhaustive vertex and
//!   facet enumeration, exact volume, Δ-modularity scans and normalization.
//! - [`oracles`]: outer bodies behind a counting membership oracle.
//! - [`sparsify`]: ℓ1 Lewis-weight sampling and the deterministic barrier
//!   (BSS) spectral sparsifier, plus the Δ-modular pipeline built on it.
//! - [`sampler`]: hit-and-run uniform sampling from oracle bodies.
//! - [`containment`]: hypercube-sampling gap containment, sampling-based
//!   containment for general bodies, the binary-search optimizer and
//!   diagnostics.
//! - [`instances`] and [`experiment`]: seeded instance generators and the
//!   sweep runner behind the `zono` CLI.
//!
//! Data-parallel loops go through [`par`], which uses rayon when the
//! `parallel` feature is on (the default) and plain iterators otherwise.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod containment;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod hull;
pub mod instances;
pub mod io;
pub mod linalg;
pub mod lp;
pub mod oracles;
pub mod par;
pub mod rng;
pub mod sampler;
pub mod sparsify;

pub use error::{Error, Result};
pub use geometry::{HPolytope, Zonotope};
pub use linalg::{Matrix, Vector};
pub use oracles::{Body, BodySpec, MembershipOracle};
