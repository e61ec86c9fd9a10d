//! Beurling approximations of `-1` on `[0, 1]`: evaluation, Mellin
//! transforms, Fourier sine coefficients by three routes, Parseval norms,
//! reconstruction of the Mellin transform from even integers and
//! norm-minimising coefficients.

// `!(x > 0.0)` is used deliberately so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod beurling;
pub mod error;
pub mod fourier;
pub mod mellin;
pub mod numerics;
pub mod optimizer;
mod par;
pub mod parseval;
pub mod reconstruct;

pub use beurling::BeurlingSpec;
pub use error::{Error, Result};
