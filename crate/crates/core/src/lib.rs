//! Numerical laboratory for the Camassa-Holm equation and its generalization
//! with a spatially varying coefficient.
//!
//! - [`spectral`]: periodic grids, Fourier derivatives, the Helmholtz operator.
//! - [`dynamics`]: method-of-lines solver in momentum form with diagnostics.
//! - [`peakon`]: finite-dimensional peakon dynamics used as a reference.
//! - [`scaling`]: shallow-water nondimensionalization and linear background flows.
//! - [`variational`]: discrete diffeomorphism paths, right-invariant actions and
//!   the first-variation identity.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod initial;
pub mod peakon;
pub mod quadrature;
pub mod scaling;
pub mod spectral;
pub mod variational;

pub use error::{Error, Result};
pub use spectral::{FieldState, Grid1D};
