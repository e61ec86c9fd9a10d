//! Beurling functions `f_N(x) = sum_k a_k rho(theta_k / x)` on `(0, 1]`:
//! specs, pointwise evaluation, breakpoints and quadrature.

mod eval;
mod integrate;
mod json;
pub mod quad;
mod spec;

pub use eval::{breakpoints, eval_F, eval_f, frac, Breakpoints};
pub(crate) use integrate::constant_sine;
pub use integrate::{
    integrate_piecewise, mellin_numeric, norm_numeric, rho_product, term_mellin, term_sine, NormEstimate,
    PERIODIC_PIECE_LIMIT,
};
pub use quad::Integral;
pub use spec::{parse_rational, BeurlingSpec, Term, Theta};
