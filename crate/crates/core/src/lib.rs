//! Hyperbolic-harmonic extensions of circle homeomorphisms.
//!
//! The pipeline extends boundary data harmonically in the Euclidean sense,
//! checks the pointwise algebra relating energy density, Jacobian, tension
//! and distortion, solves the hyperbolic-harmonic Dirichlet problem on an
//! increasing family of hyperbolic balls, and compares the solutions with
//! the extension.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boundary;
pub mod cli;
pub mod config;
pub mod error;
pub mod exhaustion;
pub mod extension;
pub mod geometry;
pub mod grid;
pub mod jet;
pub mod laws;
pub mod solver;
pub mod variation;

pub use boundary::{BoundaryMap, Family};
pub use error::{Error, Result};
pub use exhaustion::{run_exhaustion, Certificate, ExhaustionConfig, ExhaustionReport};
pub use extension::{estimate_k, poisson_kernel, ExtensionParams, FourierExtension, KEstimate};
pub use grid::{ball_radius, FieldGrid, PolarGrid, SpectralOps};
pub use jet::Jet;
pub use solver::{distance_field, residual_sup, solve_dirichlet, SolverConfig, SolverResult};
