//! Beurling specs: the data `(a_k, theta_k)` defining
//! `f_N(x) = sum_k a_k rho(theta_k / x)` together with exact constraint
//! bookkeeping.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::numerics::{PrecisionReal, Rational};

/// A scale `theta in (0, 1]`, optionally known to be the unit fraction `1/b`.
#[derive(Clone, Debug, PartialEq)]
pub struct Theta {
    value: f64,
    exact: Rational,
    denom: Option<u64>,
}

impl Theta {
    /// `theta = 1/b`.
    pub fn unit(b: u64) -> Result<Self> {
        if b == 0 {
            return Err(Error::domain("unit fraction denominator must be positive"));
        }
        Ok(Self {
            value: 1.0 / b as f64,
            exact: Rational::new(BigInt::one(), BigInt::from(b)),
            denom: Some(b),
        })
    }

    /// Arbitrary real scale; exact value is the binary rational of `x`.
    ///
    /// Values that are exactly `1/b` as rationals (only powers of two) are
    /// recognised as unit fractions.
    pub fn real(x: f64) -> Result<Self> {
        if !(x > 0.0 && x <= 1.0) {
            return Err(Error::domain(format!("theta must lie in (0, 1], got {x}")));
        }
        let exact = Rational::from_float(x).expect("finite");
        let denom = if exact.numer().is_one() {
            exact.denom().to_u64()
        } else {
            None
        };
        Ok(Self { value: x, exact, denom })
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn exact(&self) -> &Rational {
        &self.exact
    }

    /// `b` when `theta = 1/b`.
    pub fn denom(&self) -> Option<u64> {
        self.denom
    }
}

/// One term `a rho(theta / x)`; `a` is stored as an exact complex rational.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    a_re: Rational,
    a_im: Rational,
    a: Complex64,
    theta: Theta,
}

fn rat_to_f64(r: &Rational) -> f64 {
    r.to_f64()
        .unwrap_or_else(|| PrecisionReal::from_rational(r, 64).to_f64())
}

impl Term {
    pub fn new(a_re: Rational, a_im: Rational, theta: Theta) -> Self {
        let a = Complex64::new(rat_to_f64(&a_re), rat_to_f64(&a_im));
        Self { a_re, a_im, a, theta }
    }

    /// Real coefficient from a float; `a` is taken as the exact binary value.
    pub fn real(a: f64, theta: Theta) -> Result<Self> {
        let a_re =
            Rational::from_float(a).ok_or_else(|| Error::domain(format!("coefficient must be finite, got {a}")))?;
        Ok(Self::new(a_re, Rational::zero(), theta))
    }

    pub fn complex(a: Complex64, theta: Theta) -> Result<Self> {
        let re = Rational::from_float(a.re);
        let im = Rational::from_float(a.im);
        match (re, im) {
            (Some(re), Some(im)) => Ok(Self::new(re, im, theta)),
            _ => Err(Error::domain(format!("coefficient must be finite, got {a}"))),
        }
    }

    /// Exact rational coefficient `a = p/q` on the unit fraction `1/b`.
    pub fn unit_rational(p: i64, q: i64, b: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::domain("zero denominator in coefficient"));
        }
        Ok(Self::new(
            Rational::new(BigInt::from(p), BigInt::from(q)),
            Rational::zero(),
            Theta::unit(b)?,
        ))
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn a_exact(&self) -> (&Rational, &Rational) {
        (&self.a_re, &self.a_im)
    }

    pub fn theta(&self) -> &Theta {
        &self.theta
    }
}

/// The data of a Beurling function. Immutable after construction.
#[derive(Clone, Debug, PartialEq)]
pub struct BeurlingSpec {
    terms: Vec<Term>,
    residual: (Rational, Rational),
}

impl Default for BeurlingSpec {
    fn default() -> Self {
        Self::empty()
    }
}

impl BeurlingSpec {
    /// `f = 0`, i.e. `F = 1`.
    pub fn empty() -> Self {
        Self {
            terms: Vec::new(),
            residual: (Rational::zero(), Rational::zero()),
        }
    }

    pub fn new(terms: Vec<Term>) -> Self {
        let mut re = Rational::zero();
        let mut im = Rational::zero();
        for t in &terms {
            re += &t.a_re * t.theta.exact();
            im += &t.a_im * t.theta.exact();
        }
        Self {
            terms,
            residual: (re, im),
        }
    }

    /// Convenience constructor from `(a, b)` pairs with rational `a = p/q`.
    pub fn from_unit_rationals(terms: &[((i64, i64), u64)]) -> Result<Self> {
        let terms = terms
            .iter()
            .map(|&((p, q), b)| Term::unit_rational(p, q, b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(terms))
    }

    /// Convenience constructor from real `(a, theta)` pairs.
    pub fn from_real_pairs(terms: &[(f64, f64)]) -> Result<Self> {
        let terms = terms
            .iter()
            .map(|&(a, th)| Term::real(a, Theta::real(th)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(terms))
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Exact `sum a_k theta_k` (real and imaginary parts).
    pub fn constraint_residual_exact(&self) -> (&Rational, &Rational) {
        (&self.residual.0, &self.residual.1)
    }

    /// `|sum a_k theta_k|`.
    pub fn constraint_residual(&self) -> f64 {
        Complex64::new(rat_to_f64(&self.residual.0), rat_to_f64(&self.residual.1)).norm()
    }

    /// `sum a_k theta_k = 0` exactly.
    pub fn is_admissible(&self) -> bool {
        self.residual.0.is_zero() && self.residual.1.is_zero()
    }

    pub fn is_unit_fraction(&self) -> bool {
        self.terms.iter().all(|t| t.theta.denom.is_some())
    }

    /// `|a_k| <= 1` for every term, decided exactly.
    pub fn coefficients_bounded(&self) -> bool {
        self.terms
            .iter()
            .all(|t| &t.a_re * &t.a_re + &t.a_im * &t.a_im <= Rational::one())
    }

    pub fn distinct_denominators(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.terms.iter().all(|t| t.theta.denom.is_some_and(|b| seen.insert(b)))
    }

    /// Unit fractions with `|a_k| <= 1`: the hypotheses of the remainder bound.
    pub fn lemma_hypotheses(&self) -> bool {
        self.is_unit_fraction() && self.coefficients_bounded()
    }

    /// Hypotheses of the even-integer Mellin bound: additionally distinct `b_k`.
    pub fn mellin_bound_hypotheses(&self) -> bool {
        self.lemma_hypotheses() && self.distinct_denominators()
    }

    pub(crate) fn require_admissible(&self, what: &str) -> Result<()> {
        if self.is_admissible() {
            Ok(())
        } else {
            Err(Error::Constraint(format!(
                "{what} needs sum a_k theta_k = 0; residual is {:e}",
                self.constraint_residual()
            )))
        }
    }

    pub(crate) fn require_lemma_hypotheses(&self, what: &str) -> Result<()> {
        self.require_admissible(what)?;
        if !self.is_unit_fraction() {
            return Err(Error::Hypothesis(format!(
                "{what} needs theta_k = 1/b_k for every term"
            )));
        }
        if !self.coefficients_bounded() {
            return Err(Error::Hypothesis(format!("{what} needs |a_k| <= 1 for every term")));
        }
        Ok(())
    }

    /// `sum |a_k|`.
    pub fn coefficient_l1(&self) -> f64 {
        self.terms.iter().map(|t| t.a.norm()).sum()
    }

    /// Bound on `|F_N|`: `1 + sum |a_k|`.
    pub fn f_bound(&self) -> f64 {
        1.0 + self.coefficient_l1()
    }

    pub fn min_theta(&self) -> Option<f64> {
        self.terms.iter().map(|t| t.theta.value).reduce(f64::min)
    }

    /// `lcm(b_k)` for unit-fraction specs (1 for the empty spec); `None` on
    /// overflow or when some theta is not a unit fraction.
    pub fn period(&self) -> Option<u64> {
        self.terms.iter().try_fold(1u64, |acc, t| {
            let b = t.theta.denom?;
            let g = acc.gcd(&b);
            (acc / g).checked_mul(b)
        })
    }

    /// Same thetas with every coefficient scaled by `k`.
    pub fn scaled(&self, k: &Rational) -> Self {
        Self::new(
            self.terms
                .iter()
                .map(|t| Term::new(&t.a_re * k, &t.a_im * k, t.theta.clone()))
                .collect(),
        )
    }
}

/// Exact rational `p/q` from the decimal-free string forms `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n
        .parse()
        .map_err(|_| Error::Parse(format!("invalid rational numerator in {s:?}")))?;
    let d: BigInt = d
        .parse()
        .map_err(|_| Error::Parse(format!("invalid rational denominator in {s:?}")))?;
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(n, d))
}

/// Whether `r` is exactly the binary value of an `f64`.
pub(crate) fn exactly_f64(r: &Rational) -> Option<f64> {
    let f = r.to_f64()?;
    (Rational::from_float(f).as_ref() == Some(r)).then_some(f)
}
