//! One-dimensional finite volume solvers for hyperbolic balance laws with
//! stiff relaxation in the diffusive scaling
//!
//! ```text
//! ε ∂t U + ∂x F(U) = −R(U) / ε^m
//! ```
//!
//! The crate provides an asymptotic-preserving HLL-type scheme, four
//! concrete models (isentropic Euler with friction, the M1 radiative
//! transfer model, their coupling, and shallow water with strong friction),
//! explicit solvers for the limiting diffusion equations and the diagnostics
//! needed to compare the two.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod diagnostics;
pub mod error;
pub mod grid;
pub mod limits;
pub mod models;
pub mod presets;
pub mod scheme;
pub mod series;
pub mod smallmat;
pub mod system;

pub use error::{Error, Result};
pub use grid::{Boundary, Grid1D};
pub use smallmat::{Matrix, Vector};
pub use system::RelaxationSystem;
