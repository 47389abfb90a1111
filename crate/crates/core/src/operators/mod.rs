//! Operators acting on sampled functions.

pub mod basis;
pub mod bessel;
pub mod bochner_riesz;
pub mod fractional;
pub mod hilbert;
pub mod maximal;
pub mod orlicz_maximal;
pub mod square;
pub mod strong;
pub mod vector;

pub use basis::{basis_maximal, Basis};
pub use bessel::{bessel_j, bessel_j_asymptotic, bessel_j_half, bessel_j_series, bessel_phase};
pub use bochner_riesz::{br_endpoint_integral, br_kernel};
pub use fractional::{frac_integral, frac_integral_at, frac_maximal};
pub use hilbert::{commutator_k, commutator_recursive, hilbert, hilbert_midpoint};
pub use maximal::{hl_maximal, iterated_maximal, maximal_brute_force, maximal_values};
pub use orlicz_maximal::orlicz_maximal;
pub use square::dyadic_square;
pub use strong::{iterated_strong, strong_maximal_2d, tensor_indicator, StrongMaximal};
pub use vector::{vv_maximal, VectorSampledFunction};
