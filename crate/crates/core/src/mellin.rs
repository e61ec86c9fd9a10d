//! Mellin transform of `F_N = f_N + 1`:
//!
//! ```text
//! M(s) = int_0^1 F_N(x) x^{s-1} dx
//!      = (sum a_k theta_k)/(s-1) + (1/s)(1 - zeta(s) P(s)),   P(s) = sum a_k theta_k^s,
//! ```
//!
//! its values at even integers `M(2l) = (1 - zeta(2l) P(2l)) / (2l)` and
//! the bound `|M(2l)| <= (1 + zeta(2l)^2) / (2l)` for unit-fraction specs with
//! `|a_k| <= 1` and distinct denominators.

use num_complex::Complex64;
use num_traits::{Pow, Zero};
use serde_json::{json, Value};

use crate::beurling::BeurlingSpec;
use crate::error::{Error, Result};
use crate::numerics::{
    bits_for_tol, zeta_complex, zeta_even, PrecisionComplex, PrecisionReal, Rational, POLE_EXCLUSION,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    ClosedForm,
    Quadrature,
    Reconstructed,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::ClosedForm => "closed_form",
            Provenance::Quadrature => "quadrature",
            Provenance::Reconstructed => "reconstructed",
        }
    }
}

/// A value of `M(s)` and where it came from.
#[derive(Clone, Debug)]
pub struct MellinValue {
    pub s: Complex64,
    pub value: Complex64,
    pub provenance: Provenance,
    pub error_bound: f64,
    /// Full working-precision value when one was computed.
    pub hi: Option<PrecisionComplex>,
}

impl MellinValue {
    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "s": [self.s.re, self.s.im],
            "value": [self.value.re, self.value.im],
            "provenance": self.provenance.as_str(),
            "error_bound": self.error_bound,
        });
        if let Some(hi) = &self.hi {
            v["hi"] = json!([hi.re().to_decimal(), hi.im().to_decimal()]);
        }
        v
    }
}

/// `P(s) = sum_k a_k theta_k^s` with `theta^s = exp(s log theta)`.
pub fn power_sum(spec: &BeurlingSpec, s: Complex64) -> Complex64 {
    spec.terms()
        .iter()
        .map(|t| t.a() * (s * t.theta().value().ln()).exp())
        .sum()
}

/// Exact `P(m) = sum_k a_k theta_k^m` at a non-negative integer `m`, as
/// `(re, im)` rationals.
pub fn power_sum_exact(spec: &BeurlingSpec, m: u32) -> (Rational, Rational) {
    let mut re = Rational::zero();
    let mut im = Rational::zero();
    for t in spec.terms() {
        let p: Rational = Pow::pow(t.theta().exact(), m);
        let (a_re, a_im) = t.a_exact();
        re += a_re * &p;
        im += a_im * &p;
    }
    (re, im)
}

fn check_half_plane(s: Complex64) -> Result<()> {
    if s.re > 0.0 && s.re.is_finite() && s.im.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("Mellin transform needs Re(s) > 0, got {s}")))
    }
}

fn is_trivial(spec: &BeurlingSpec) -> bool {
    spec.terms().iter().all(|t| {
        let (re, im) = t.a_exact();
        re.is_zero() && im.is_zero()
    })
}

/// Closed-form `M(s)`.
///
/// For admissible specs the `1/(s-1)` term is dropped exactly; the product
/// `zeta(s) P(s)` is still only evaluated outside `|s - 1| <= 1e-6`.
pub fn mellin_closed(spec: &BeurlingSpec, s: Complex64, tol: f64) -> Result<MellinValue> {
    check_half_plane(s)?;
    if !(tol > 0.0) {
        return Err(Error::domain(format!("tolerance must be positive, got {tol}")));
    }
    if is_trivial(spec) {
        return Ok(MellinValue {
            s,
            value: 1.0 / s,
            provenance: Provenance::ClosedForm,
            error_bound: f64::EPSILON / s.norm(),
            hi: None,
        });
    }
    if (s - 1.0).norm() <= POLE_EXCLUSION {
        return Err(Error::domain(format!(
            "s = {s} lies in the excluded disk |s - 1| <= {POLE_EXCLUSION:e}"
        )));
    }
    let p = power_sum(spec, s);
    let pole_term = if spec.is_admissible() {
        Complex64::zero()
    } else {
        let (re, im) = spec.constraint_residual_exact();
        let r = Complex64::new(
            PrecisionReal::from_rational(re, 64).to_f64(),
            PrecisionReal::from_rational(im, 64).to_f64(),
        );
        r / (s - 1.0)
    };
    let zeta_tol = 0.25 * tol * s.norm() / p.norm().max(1e-300);
    let zeta_tol = zeta_tol.min(1e-3);
    let z = zeta_complex(&PrecisionComplex::from_c64(s, bits_for_tol(zeta_tol) + 8), zeta_tol)?.to_c64();
    let zp = z * p;
    let value = pole_term + (1.0 - zp) / s;
    let rounding = 16.0 * f64::EPSILON * (pole_term.norm() + (1.0 + zp.norm()) / s.norm());
    let error_bound = zeta_tol * p.norm() / s.norm() + rounding;
    Ok(MellinValue {
        s,
        value,
        provenance: Provenance::ClosedForm,
        error_bound,
        hi: None,
    })
}

/// `M(2l) = (1 - zeta(2l) P(2l)) / (2l)` at `bits` of precision from an exact
/// power sum.
fn even_value(spec: &BeurlingSpec, l: usize, bits: usize) -> PrecisionComplex {
    let (p_re, p_im) = power_sum_exact(spec, (2 * l) as u32);
    let z = zeta_even(l, bits);
    let two_l = (2 * l) as u64;
    let re = (&PrecisionReal::one(bits) - &(&z * &PrecisionReal::from_rational(&p_re, bits))).div_u64(two_l);
    let im = if p_im.is_zero() {
        PrecisionReal::zero(bits)
    } else {
        (-(&z * &PrecisionReal::from_rational(&p_im, bits))).div_u64(two_l)
    };
    PrecisionComplex::new(re, im)
}

/// `M(2l)` from `zeta(2l)` and the exact power sum. Requires an admissible
/// spec.
pub fn mellin_even(spec: &BeurlingSpec, l: usize, tol: f64) -> Result<MellinValue> {
    spec.require_admissible("mellin_even")?;
    if l == 0 {
        return Err(Error::domain("mellin_even needs l >= 1"));
    }
    let bits = bits_for_tol(tol) + 32 + (spec.coefficient_l1().max(1.0).log2().ceil() as usize);
    let hi = even_value(spec, l, bits);
    let s = Complex64::new((2 * l) as f64, 0.0);
    Ok(MellinValue {
        s,
        value: hi.to_c64(),
        provenance: Provenance::ClosedForm,
        error_bound: (-(bits as f64) + 4.0).exp2() * (1.0 + spec.coefficient_l1()),
        hi: Some(hi),
    })
}

/// `(1 + zeta(2l)^2) / (2l)`.
pub fn mellin_even_bound(l: usize) -> PrecisionReal {
    assert!(l >= 1, "mellin_even_bound needs l >= 1");
    let z = zeta_even(l, 128);
    (&PrecisionReal::one(128) + &(&z * &z)).div_u64((2 * l) as u64)
}

/// `M(2l)` for `l = 1..=l_max`, each at its own precision.
///
/// Series in `l` weighted by `(n pi)^{2l-1}/(2l-1)!` only need `M(2l)` to the
/// precision matching that weight, which keeps the `zeta(2l)` evaluations
/// cheap. Power sums use floating arithmetic here (they are not subject to
/// cancellation); [`mellin_even`] uses exact rationals.
#[derive(Clone, Debug)]
pub struct EvenMellinTable {
    re: Vec<PrecisionReal>,
    im: Option<Vec<PrecisionReal>>,
}

impl EvenMellinTable {
    pub fn build(spec: &BeurlingSpec, l_max: usize, bits_for_l: impl Fn(usize) -> usize + Sync + Send) -> Result<Self> {
        spec.require_admissible("the even-Mellin table")?;
        let max_bits = (1..=l_max).map(&bits_for_l).max().unwrap_or(64);
        let coeffs: Vec<(PrecisionReal, PrecisionReal, &Rational, Option<u64>)> = spec
            .terms()
            .iter()
            .map(|t| {
                let (re, im) = t.a_exact();
                (
                    PrecisionReal::from_rational(re, max_bits),
                    PrecisionReal::from_rational(im, max_bits),
                    t.theta().exact(),
                    t.theta().denom(),
                )
            })
            .collect();
        let complex = spec.terms().iter().any(|t| !t.a_exact().1.is_zero());
        let ls: Vec<usize> = (1..=l_max).collect();
        let rows = crate::par::map(&ls, |&l| {
            let bits = bits_for_l(l).max(64);
            let two_l = (2 * l) as u64;
            let mut p_re = PrecisionReal::zero(bits);
            let mut p_im = PrecisionReal::zero(bits);
            for (a_re, a_im, theta, denom) in &coeffs {
                let pow = match denom {
                    Some(b) => PrecisionReal::from_u64(*b, bits).powi(2 * l).recip(),
                    None => PrecisionReal::from_rational(theta, bits).powi(2 * l),
                };
                p_re = &p_re + &(&a_re.with_bits(bits) * &pow);
                if complex {
                    p_im = &p_im + &(&a_im.with_bits(bits) * &pow);
                }
            }
            let z = zeta_even(l, bits);
            let re = (&PrecisionReal::one(bits) - &(&z * &p_re)).div_u64(two_l);
            let im = (-(&z * &p_im)).div_u64(two_l);
            (re, im)
        });
        let (re, im): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
        Ok(Self {
            re,
            im: complex.then_some(im),
        })
    }

    pub fn len(&self) -> usize {
        self.re.len()
    }

    pub fn is_empty(&self) -> bool {
        self.re.is_empty()
    }

    /// `(Re M(2l), Im M(2l))`; the imaginary part is `None` for real specs.
    pub fn get(&self, l: usize) -> (&PrecisionReal, Option<&PrecisionReal>) {
        (&self.re[l - 1], self.im.as_ref().map(|v| &v[l - 1]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::zeta_real;

    fn two_term() -> BeurlingSpec {
        BeurlingSpec::from_real_pairs(&[(1.0, 1.0), (-2.0, 0.5)]).unwrap()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn power_sum_examples() {
        let s = two_term();
        assert!(power_sum(&s, c(1.0)).norm() < 1e-15);
        assert!((power_sum(&s, c(2.0)) - 0.5).norm() < 1e-15);
        assert!((power_sum(&s, c(3.0)) - 0.75).norm() < 1e-15);
        let (re, im) = power_sum_exact(&s, 3);
        assert_eq!(re, Rational::new(3.into(), 4.into()));
        assert!(im.is_zero());
    }

    #[test]
    fn closed_form_examples() {
        let e = BeurlingSpec::empty();
        for l in 1..5 {
            let m = mellin_closed(&e, c(2.0 * l as f64), 1e-14).unwrap();
            assert!((m.value - 1.0 / (2.0 * l as f64)).norm() < 1e-15);
        }
        let s = two_term();
        let m2 = mellin_closed(&s, c(2.0), 1e-14).unwrap();
        assert!((m2.value.re - 0.088_766_483_287_943_39).abs() < 1e-14, "{m2:?}");
        let m4 = mellin_closed(&s, c(4.0), 1e-14).unwrap();
        assert!((m4.value.re - 0.013_241_792_625_688_52).abs() < 1e-14);
    }

    #[test]
    fn closed_form_domain() {
        let s = two_term();
        assert!(matches!(mellin_closed(&s, c(1.0), 1e-10), Err(Error::Domain(_))));
        assert!(matches!(mellin_closed(&s, c(-0.5), 1e-10), Err(Error::Domain(_))));
        let na = BeurlingSpec::from_real_pairs(&[(1.0, 1.0)]).unwrap();
        assert!(mellin_closed(&na, c(1.0 + 1e-7), 1e-10).is_err());
        // non-admissible spec keeps the pole term: M(2) of F = 1 + rho(1/x)
        let m = mellin_closed(&na, c(2.0), 1e-13).unwrap();
        let oracle = 1.0 + 0.5 * (1.0 - zeta_real(2.0));
        assert!((m.value.re - oracle).abs() < 1e-13, "{m:?}");
    }

    #[test]
    fn conjugate_symmetry() {
        let s = two_term();
        let z = Complex64::new(0.7, 3.0);
        let a = mellin_closed(&s, z, 1e-12).unwrap().value;
        let b = mellin_closed(&s, z.conj(), 1e-12).unwrap().value;
        assert!((a - b.conj()).norm() < 1e-12);
    }

    #[test]
    fn even_values_and_identity() {
        let s = two_term();
        let m = mellin_even(&s, 1, 1e-20).unwrap();
        assert!((m.value.re - 0.088_766_483_287_943_39).abs() < 1e-16);
        for l in 1..=10 {
            let m = mellin_even(&s, l, 1e-20).unwrap();
            let z = zeta_even(l, 128).to_f64();
            let lhs = (1.0 - 2.0 * l as f64 * m.value.re) / z;
            let p = power_sum_exact(&s, 2 * l as u32).0;
            let p = PrecisionReal::from_rational(&p, 64).to_f64();
            assert!((lhs - p).abs() <= 1e-12, "l={l}");
        }
        let e = BeurlingSpec::empty();
        for l in 1..=10 {
            let m = mellin_even(&e, l, 1e-20).unwrap();
            assert_eq!(m.value.re, 1.0 / (2.0 * l as f64));
        }
        let na = BeurlingSpec::from_real_pairs(&[(1.0, 1.0)]).unwrap();
        assert!(matches!(mellin_even(&na, 1, 1e-10), Err(Error::Constraint(_))));
    }

    #[test]
    fn bound_examples() {
        assert!((mellin_even_bound(1).to_f64() - 1.852_904_042_138_922_7).abs() < 1e-15);
        let mut prev = f64::INFINITY;
        for l in 1..40 {
            let b = mellin_even_bound(l).to_f64();
            assert!(b < prev);
            prev = b;
        }
    }

    #[test]
    fn table_matches_direct_values() {
        let s = BeurlingSpec::from_unit_rationals(&[((3, 5), 2), ((-3, 5), 3), ((-1, 2), 5)]).unwrap();
        let t = EvenMellinTable::build(&s, 12, |_| 200).unwrap();
        for l in 1..=12 {
            let direct = mellin_even(&s, l, 1e-50).unwrap().value.re;
            assert!((t.get(l).0.to_f64() - direct).abs() < 1e-16, "l={l}");
            assert!(t.get(l).1.is_none());
        }
    }
}
