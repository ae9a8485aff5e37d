//! specstab: a numerical laboratory for the Dirichlet spectrum of nested
//! grid-rasterized domains.
//!
//! The crate rasterizes parametric shapes onto uniform grids, computes the
//! lowest Dirichlet eigenpairs with deterministic sparse eigensolvers, and
//! verifies explicit spectral-stability bounds (global cutoff estimates,
//! convex local estimates, Hardy/threshold constants, eigenspace proximity)
//! against the measured spectra, with two-grid Richardson slack standing in
//! for the discretization error.

pub mod bessel;
pub mod error;
pub mod grid;
pub mod lattice;
pub mod op;
pub mod constants;
pub mod shapes;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
pub use grid::{DistanceField, DistanceMode, GridDomain, MorphDir};
pub use shapes::{rasterize, Box2, ShapeSpec};
pub use spectral::{
    assemble_laplacian, fundamental_tone, lowest_eigenpairs, reference_spectrum, RefShape,
    SpectralResult,
};
