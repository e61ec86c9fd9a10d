//! Pointwise evaluation and the breakpoint set of `f_N`.

use num_complex::Complex64;

use super::spec::BeurlingSpec;
use crate::error::{Error, Result};

/// Fractional part `rho(x) = x - floor(x)` on `x >= 0`; integers map to 0.
pub fn frac(x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("frac needs a finite x >= 0, got {x}")));
    }
    Ok(x - x.floor())
}

fn check_unit_interval(x: f64) -> Result<()> {
    if x > 0.0 && x <= 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("x must lie in (0, 1], got {x}")))
    }
}

/// `f_N(x) = sum_k a_k rho(theta_k / x)`.
pub fn eval_f(spec: &BeurlingSpec, x: f64) -> Result<Complex64> {
    check_unit_interval(x)?;
    Ok(eval_f_unchecked(spec, x))
}

/// `F_N(x) = f_N(x) + 1`.
#[allow(non_snake_case)]
pub fn eval_F(spec: &BeurlingSpec, x: f64) -> Result<Complex64> {
    Ok(eval_f(spec, x)? + 1.0)
}

pub(crate) fn eval_f_unchecked(spec: &BeurlingSpec, x: f64) -> Complex64 {
    spec.terms()
        .iter()
        .map(|t| {
            let y = t.theta().value() / x;
            t.a() * (y - y.floor())
        })
        .sum()
}

/// Jump locations of `f_N` above a cutoff.
#[derive(Clone, Debug, PartialEq)]
pub struct Breakpoints {
    cutoff_eps: f64,
    points: Vec<f64>,
}

impl Breakpoints {
    pub fn cutoff_eps(&self) -> f64 {
        self.cutoff_eps
    }

    /// Sorted ascending, deduplicated, always ending in 1.
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Consecutive smooth pieces `[eps, p_0], [p_0, p_1], ...` up to 1.
    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        std::iter::once(self.cutoff_eps)
            .chain(self.points.iter().copied())
            .zip(self.points.iter().copied())
            .filter(|(a, b)| b > a)
    }
}

/// Every `theta_k / j >= cutoff_eps` (`j = 1, 2, ...`) together with 1.
pub fn breakpoints(spec: &BeurlingSpec, cutoff_eps: f64) -> Result<Breakpoints> {
    if !(cutoff_eps > 0.0 && cutoff_eps < 1.0) {
        return Err(Error::domain(format!(
            "cutoff_eps must lie in (0, 1), got {cutoff_eps}"
        )));
    }
    if let Some(m) = spec.min_theta() {
        if cutoff_eps >= m {
            return Err(Error::domain(format!(
                "cutoff_eps = {cutoff_eps} must be below the smallest theta = {m}"
            )));
        }
    }
    let mut points = vec![1.0];
    for t in spec.terms() {
        let th = t.theta().value();
        // theta/j >= eps  <=>  j <= theta/eps; guard the rounding at the edge
        let jmax = (th / cutoff_eps).floor() as u64 + 1;
        for j in 1..=jmax {
            let p = th / j as f64;
            if p >= cutoff_eps {
                points.push(p);
            }
        }
    }
    points.sort_by(|a, b| a.total_cmp(b));
    points.dedup_by(|a, b| (*a - *b).abs() <= 4.0 * f64::EPSILON * b.abs());
    Ok(Breakpoints { cutoff_eps, points })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_term() -> BeurlingSpec {
        BeurlingSpec::from_real_pairs(&[(1.0, 1.0), (-2.0, 0.5)]).unwrap()
    }

    #[test]
    fn frac_examples() {
        assert_eq!(frac(3.0).unwrap(), 0.0);
        assert_eq!(frac(2.75).unwrap(), 0.75);
        assert_eq!(frac(1.0 / 3.0).unwrap(), 1.0 / 3.0);
        assert!(frac(-0.5).is_err());
        assert!(frac(f64::INFINITY).is_err());
        assert!(frac(f64::NAN).is_err());
    }

    #[test]
    fn eval_examples() {
        let one = BeurlingSpec::from_real_pairs(&[(1.0, 1.0)]).unwrap();
        assert_eq!(eval_f(&one, 1.0).unwrap(), Complex64::new(0.0, 0.0));
        assert!((eval_f(&one, 2.0 / 3.0).unwrap().re - 0.5).abs() < 1e-15);
        let s = two_term();
        // rho(2.5) - 2 rho(1.25)
        assert!(eval_f(&s, 0.4).unwrap().norm() < 1e-15);
        assert!((eval_F(&s, 0.4).unwrap() - 1.0).norm() < 1e-15);
        assert_eq!(eval_F(&BeurlingSpec::empty(), 0.123).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(eval_F(&one, 1.0).unwrap(), Complex64::new(1.0, 0.0));
        assert!(eval_f(&s, 0.0).is_err());
        assert!(eval_f(&s, 1.5).is_err());
    }

    #[test]
    fn jumps_at_breakpoints_equal_coefficients() {
        let s = BeurlingSpec::from_real_pairs(&[(0.75, 1.0), (-1.5, 0.35)]).unwrap();
        for (a, th) in [(0.75, 1.0), (-1.5, 0.35)] {
            for j in 2..6 {
                let p = th / j as f64;
                let left = eval_f(&s, p - 1e-12).unwrap().re;
                let right = eval_f(&s, p + 1e-12).unwrap().re;
                // rho(theta/x) climbs from 0 to 1 as x increases through theta/j
                assert!((right - left - a).abs() < 1e-9, "a={a} j={j}");
            }
        }
    }

    #[test]
    fn breakpoint_examples() {
        let one = BeurlingSpec::from_real_pairs(&[(1.0, 1.0)]).unwrap();
        let b = breakpoints(&one, 0.3).unwrap();
        assert_eq!(b.points(), &[1.0 / 3.0, 0.5, 1.0]);
        let b = breakpoints(&two_term(), 0.2).unwrap();
        assert_eq!(b.points(), &[0.2, 0.25, 1.0 / 3.0, 0.5, 1.0]);
        let b = breakpoints(&two_term(), 0.5 - 1e-9).unwrap();
        assert!(b.points().contains(&0.5) && b.points().contains(&1.0));
        assert!(breakpoints(&two_term(), 0.5).is_err());
        assert_eq!(b.pieces().next(), Some((0.5 - 1e-9, 0.5)));
    }
}
