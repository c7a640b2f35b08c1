//! Semilinear reaction-diffusion on core-shell domains with a piecewise-constant
//! (diffraction) diffusion coefficient.
//!
//! The crate discretizes `du/dt + Au = f(u)` with `A = −∇·(b∇·)` on an
//! interval or a radially symmetric ball, builds the eigenbasis of `A`, solves
//! the truncated spectral Galerkin system alongside an independent nodal
//! method-of-lines reference, and audits the a priori energy estimates along
//! the computed trajectories.

// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod app;
pub mod config;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod operators;
pub mod reactions;
pub mod solvers;

pub use error::{Error, Result};
pub use geometry::{CoreShellGeometry, GeometryKind, Mesh};
pub use operators::{DiffractionOperator, DiffusionField, EigenBasis, NormKind};
pub use reactions::{Consumption, ReactionTerm};
pub use solvers::{fem_solve, galerkin_solve, stationary_solve, InitialCondition, Scheme, SolveConfig, Trajectory};
