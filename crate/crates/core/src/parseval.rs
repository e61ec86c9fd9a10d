//! `||F_N||^2` on `[0, 1]` from Fourier sine coefficients.
//!
//! With `c(n)` taken over `[-1, 1]` against unit-norm sines, Parseval for
//! the odd extension reads `||F||^2 = (1/2) sum_{n>=1} |c(n)|^2`; the square
//! wave (`F = 1`) pins the factor. Jumps force `c(n) = Theta(1/n)`, so the
//! tail is modelled as `A^2 / n_max` with
//! `A = max_{n_max/2 <= n <= n_max} n |c(n)|`. That is an estimate, not a
//! bound: only the partial sum is one-sided certain (Bessel).

use serde_json::{json, Value};

use crate::beurling::{norm_numeric, BeurlingSpec};
use crate::error::{Error, Result};
use crate::fourier::{coefficients, Method};
use crate::numerics::NeumaierSum;

pub const MIN_N_MAX: u64 = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct ParsevalNorm {
    pub n_max: u64,
    /// `(1/2) sum_{n <= n_max} |c(n)|^2`.
    pub partial_norm_sq: f64,
    /// Heuristic `A^2 / n_max`.
    pub tail_estimate: f64,
    /// Propagated coefficient error of the partial sum.
    pub coefficient_error: f64,
    /// `sqrt(partial)`, a lower bound up to `coefficient_error`.
    pub norm_lo: f64,
    /// `sqrt(partial + tail)`.
    pub norm_hi: f64,
    /// `sqrt(partial + tail / 2)`, the centre of the squared bracket.
    pub norm: f64,
}

impl ParsevalNorm {
    pub fn to_json(&self) -> Value {
        json!({
            "n_max": self.n_max,
            "partial": self.partial_norm_sq,
            "tail_estimate": self.tail_estimate,
            "coefficient_error": self.coefficient_error,
            "norm_lo": self.norm_lo,
            "norm_hi": self.norm_hi,
            "norm": self.norm,
        })
    }
}

/// Parseval norm from cosine-series coefficients `n = 1..=n_max`.
pub fn norm_via_parseval(spec: &BeurlingSpec, n_max: u64, coeff_tol: f64) -> Result<ParsevalNorm> {
    if n_max < MIN_N_MAX {
        return Err(Error::domain(format!(
            "n_max must be at least {MIN_N_MAX}, got {n_max}"
        )));
    }
    spec.require_admissible("the Parseval norm")?;
    let coeffs = coefficients(spec, n_max, Method::CosineSeries, coeff_tol, None)?;
    let mut partial = NeumaierSum::new();
    let mut err = 0.0;
    let mut a: f64 = 0.0;
    for c in &coeffs {
        let m = c.value.norm();
        partial.add(0.5 * m * m);
        err += m * c.error_certificate + 0.5 * c.error_certificate * c.error_certificate;
        if 2 * c.n >= n_max {
            a = a.max(c.n as f64 * m);
        }
    }
    let partial = partial.sum();
    let tail = a * a / n_max as f64;
    Ok(ParsevalNorm {
        n_max,
        partial_norm_sq: partial,
        tail_estimate: tail,
        coefficient_error: err,
        norm_lo: partial.sqrt(),
        norm_hi: (partial + tail).sqrt(),
        norm: (partial + 0.5 * tail).sqrt(),
    })
}

/// Parseval against quadrature.
#[derive(Clone, Debug, PartialEq)]
pub struct NormCrosscheck {
    pub parseval: ParsevalNorm,
    /// `norm_numeric(spec)`.
    pub oracle: f64,
    pub oracle_error: f64,
    /// `|partial + tail - oracle^2|`.
    pub gap: f64,
    pub relative_gap: f64,
    /// `gap <= tail_estimate + coefficient_error + oracle_error`.
    pub consistent: bool,
}

impl NormCrosscheck {
    pub fn to_json(&self) -> Value {
        let p = &self.parseval;
        json!({
            "n_max": p.n_max,
            "partial": p.partial_norm_sq,
            "tail_estimate": p.tail_estimate,
            "norm_lo": p.norm_lo,
            "norm_hi": p.norm_hi,
            "norm": p.norm,
            "oracle": self.oracle,
            "gap": self.gap,
            "relative_gap": self.relative_gap,
            "consistent": self.consistent,
        })
    }
}

pub fn norm_crosscheck(spec: &BeurlingSpec, n_max: u64, tol: f64) -> Result<NormCrosscheck> {
    let parseval = norm_via_parseval(spec, n_max, tol)?;
    let oracle = norm_numeric(spec, tol)?;
    let gap = (parseval.partial_norm_sq + parseval.tail_estimate - oracle.norm_sq).abs();
    let consistent = gap <= parseval.tail_estimate + parseval.coefficient_error + oracle.error;
    Ok(NormCrosscheck {
        relative_gap: gap / oracle.norm_sq,
        oracle: oracle.norm,
        oracle_error: oracle.error,
        gap,
        consistent,
        parseval,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_wave_pins_the_half() {
        let p = norm_via_parseval(&BeurlingSpec::empty(), 2000, 1e-12).unwrap();
        // (8/pi^2) sum_{odd n <= N} 1/n^2 = 1 - 4/(pi^2 N) + ...
        let want = 1.0 - 4.0 / (std::f64::consts::PI.powi(2) * 2000.0);
        assert!((p.partial_norm_sq - want).abs() < 1e-6, "{}", p.partial_norm_sq);
        assert!(p.norm_lo <= 1.0 && 1.0 <= p.norm_hi);
    }

    #[test]
    fn partial_is_monotone_and_bessel() {
        let s = BeurlingSpec::from_unit_rationals(&[((1, 1), 2), ((-1, 2), 1)]).unwrap();
        let a = norm_via_parseval(&s, 50, 1e-12).unwrap();
        let b = norm_via_parseval(&s, 100, 1e-12).unwrap();
        assert!(a.partial_norm_sq <= b.partial_norm_sq);
        let oracle = norm_numeric(&s, 1e-10).unwrap();
        assert!(b.partial_norm_sq <= oracle.norm_sq + 1e-9);
    }

    #[test]
    fn zero_coefficients_and_domain() {
        let z = BeurlingSpec::from_unit_rationals(&[((0, 1), 2), ((0, 1), 3)]).unwrap();
        let c = norm_crosscheck(&z, 400, 1e-10).unwrap();
        assert_eq!(c.oracle, 1.0);
        assert!(c.consistent);
        assert!(norm_via_parseval(&z, 7, 1e-10).is_err());
        let bad = BeurlingSpec::from_unit_rationals(&[((1, 1), 2)]).unwrap();
        assert!(matches!(norm_via_parseval(&bad, 10, 1e-10), Err(Error::Constraint(_))));
    }

    #[test]
    fn crosscheck_two_term() {
        let s = BeurlingSpec::from_real_pairs(&[(1.0, 1.0), (-2.0, 0.5)]).unwrap();
        let c = norm_crosscheck(&s, 1000, 1e-10).unwrap();
        assert!(c.consistent, "{c:?}");
        assert!(c.to_json().get("gap").is_some());
    }
}
