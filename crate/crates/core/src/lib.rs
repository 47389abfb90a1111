//! Numerical laboratory for endpoint orders of operator norms.
//!
//! Functions are sampled on graded 1-D (or tensor 2-D) grids with optional
//! power-log tail models; operators act on these samples, and [`normlab`]
//! turns norm ratios into fitted endpoint exponents and lower bounds for
//! weighted exponents.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dyadic;
pub mod error;
pub mod experiments;
pub mod function;
pub mod grid;
pub mod normlab;
pub mod operators;
pub mod orlicz;
pub mod par;
pub mod quadrature;
pub mod rdf;
pub mod weights;

pub use error::{LabError, Result};
pub use function::{SampledFunction, SampledFunction2D, TailModel};
pub use grid::{Grid, GridKind, GridSpec};
pub use orlicz::{luxemburg_norm, OrliczGauge};
pub use quadrature::{lp_norm, lp_norm_2d};
