//! Near-field Fresnel-diffraction atom traps and a neutral-atom quantum
//! computer built on them.
//!
//! Units: wavelength `λ = 1`, so `k = 2π`, and `ħ = 1`.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod fields;
pub mod gates;
pub mod machine;
pub mod oracles;
pub mod quadrature;
pub mod statedep;

pub use num_complex::Complex64;
