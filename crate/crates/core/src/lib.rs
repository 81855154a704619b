//! Exact and numeric engine for genus-zero wall-crossing comparisons of toric
//! GIT quotients.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! function of its inputs; file formats, configuration and the command line
//! live in the `wallcross` companion crate.
//!
//! Layout:
//! - [`rational`], [`linalg`], [`lp`], [`cone`]: exact arithmetic over ℚ, dense
//!   linear algebra, exact LP feasibility and polyhedral cone duality.
//! - [`git`]: anticones, chambers, the wall, box elements and the
//!   wall-crossing constants.
//! - [`cohomology`]: per-sector cohomology rings and Chen–Ruan classes.
//! - [`series`]: truncated series in `y` with log-monomials and
//!   `H*_CR ⊗ ℚ[z, z⁻¹]` coefficients.
//! - [`ifunction`]: I-functions, twisted I-functions and G-blocks.
//! - [`gkz`]: GKZ operators, regularized operators and fractional derivatives.
//! - [`resummation`]: regularization, termwise Laplace transform, change of
//!   variables and the asymptotic identity; convergence data; Watson models.
//! - [`numerics`]: complex Gamma/polygamma, ray quadrature, least squares.
//! - [`eval`]: floating-point evaluation of I-functions and asymptotic targets.
//! - [`transform`]: the fitted connection matrix and complete-intersection checks.
#![no_std]

extern crate alloc;

pub mod cohomology;
pub mod cone;
pub mod error;
pub mod eval;
pub mod git;
pub mod gkz;
pub mod ifunction;
pub mod linalg;
pub mod lp;
pub mod numerics;
pub mod rational;
pub mod resummation;
pub mod series;
pub mod transform;

pub use error::{Error, Result};
pub use rational::Q;
