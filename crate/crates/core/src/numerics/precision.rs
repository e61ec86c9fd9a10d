//! Arbitrary-precision real and complex scalars.
//!
//! Thin wrappers over [`astro_float::BigFloat`] that remember the working
//! precision they were produced at. Binary operations run at the larger of
//! the two operand precisions, rounding to nearest-even.

use std::cell::RefCell;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign, Word, WORD_BIT_SIZE};
use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Signed;

/// Smallest precision a [`PrecisionReal`] is ever carried at.
pub const MIN_BITS: usize = 64;

pub(crate) const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constant cache"));
}

pub(crate) fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|cc| f(&mut cc.borrow_mut()))
}

/// Bits needed to resolve an absolute tolerance `tol` on values of order one.
pub fn bits_for_tol(tol: f64) -> usize {
    let tol = if tol > 0.0 && tol.is_finite() {
        tol
    } else {
        f64::EPSILON
    };
    ((-tol.log2()).ceil().max(0.0) as usize).max(MIN_BITS)
}

#[derive(Clone, Debug)]
pub struct PrecisionReal {
    value: BigFloat,
    bits: usize,
}

impl PrecisionReal {
    fn wrap(value: BigFloat, bits: usize) -> Self {
        Self { value, bits }
    }

    fn clamp_bits(bits: usize) -> usize {
        bits.max(MIN_BITS)
    }

    pub fn zero(bits: usize) -> Self {
        let bits = Self::clamp_bits(bits);
        Self::wrap(BigFloat::from_word(0, bits), bits)
    }

    pub fn one(bits: usize) -> Self {
        Self::from_u64(1, bits)
    }

    pub fn from_u64(x: u64, bits: usize) -> Self {
        let bits = Self::clamp_bits(bits);
        Self::wrap(BigFloat::from_u64(x, bits), bits)
    }

    pub fn from_i64(x: i64, bits: usize) -> Self {
        let bits = Self::clamp_bits(bits);
        Self::wrap(BigFloat::from_i64(x, bits), bits)
    }

    /// Exact conversion (every finite `f64` is representable at >= 64 bits).
    pub fn from_f64(x: f64, bits: usize) -> Self {
        let bits = Self::clamp_bits(bits);
        Self::wrap(BigFloat::from_f64(x, bits), bits)
    }

    pub fn from_bigint(x: &BigInt, bits: usize) -> Self {
        let bits = Self::clamp_bits(bits);
        let words = biguint_words(x.magnitude());
        if words.is_empty() {
            return Self::zero(bits);
        }
        let sign = if x.is_negative() { Sign::Neg } else { Sign::Pos };
        let e = (words.len() * WORD_BIT_SIZE) as astro_float::Exponent;
        let mut v = BigFloat::from_words(&words, sign, e);
        v.set_precision(bits, RM).expect("precision within limits");
        Self::wrap(v, bits)
    }

    /// Nearest representable value to `p/q` at `bits` of precision.
    pub fn from_rational(r: &BigRational, bits: usize) -> Self {
        let bits = Self::clamp_bits(bits);
        let n = Self::from_bigint(r.numer(), bits + 8);
        let d = Self::from_bigint(r.denom(), bits + 8);
        Self::wrap(n.value.div(&d.value, bits, RM), bits)
    }

    pub fn pi(bits: usize) -> Self {
        let bits = Self::clamp_bits(bits);
        Self::wrap(with_consts(|cc| cc.pi(bits, RM)), bits)
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn as_bigfloat(&self) -> &BigFloat {
        &self.value
    }

    /// Same value re-rounded to a different precision.
    pub fn with_bits(&self, bits: usize) -> Self {
        let bits = Self::clamp_bits(bits);
        let mut v = self.value.clone();
        v.set_precision(bits, RM).expect("precision within limits");
        Self::wrap(v, bits)
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.value.is_negative()
    }

    pub fn abs(&self) -> Self {
        Self::wrap(self.value.abs(), self.bits)
    }

    pub fn div(&self, rhs: &Self) -> Self {
        let p = self.bits.max(rhs.bits);
        Self::wrap(self.value.div(&rhs.value, p, RM), p)
    }

    pub fn div_u64(&self, d: u64) -> Self {
        let dv = BigFloat::from_u64(d, MIN_BITS);
        Self::wrap(self.value.div(&dv, self.bits, RM), self.bits)
    }

    pub fn mul_u64(&self, m: u64) -> Self {
        let mv = BigFloat::from_u64(m, MIN_BITS);
        Self::wrap(self.value.mul(&mv, self.bits, RM), self.bits)
    }

    pub fn recip(&self) -> Self {
        Self::wrap(self.value.reciprocal(self.bits, RM), self.bits)
    }

    pub fn powi(&self, n: usize) -> Self {
        Self::wrap(self.value.powi(n, self.bits, RM), self.bits)
    }

    pub fn sqrt(&self) -> Self {
        Self::wrap(self.value.sqrt(self.bits, RM), self.bits)
    }

    pub fn exp(&self) -> Self {
        let v = with_consts(|cc| self.value.exp(self.bits, RM, cc));
        Self::wrap(v, self.bits)
    }

    /// Natural logarithm; the caller guarantees a positive argument.
    pub fn ln(&self) -> Self {
        let v = with_consts(|cc| self.value.ln(self.bits, RM, cc));
        Self::wrap(v, self.bits)
    }

    pub fn sin(&self) -> Self {
        let v = with_consts(|cc| self.value.sin(self.bits, RM, cc));
        Self::wrap(v, self.bits)
    }

    pub fn cos(&self) -> Self {
        let v = with_consts(|cc| self.value.cos(self.bits, RM, cc));
        Self::wrap(v, self.bits)
    }

    /// Base-2 exponent `e` with `2^(e-1) <= |x| < 2^e`; `None` for zero.
    pub fn exponent(&self) -> Option<i64> {
        if self.value.is_zero() {
            None
        } else {
            self.value.exponent().map(i64::from)
        }
    }

    /// Nearest-ish `f64` (truncated mantissa, error below one ulp).
    pub fn to_f64(&self) -> f64 {
        let Some((words, _, sign, e, _)) = self.value.as_raw_parts() else {
            return f64::NAN;
        };
        if words.iter().all(|&w| w == 0) {
            return 0.0;
        }
        // mantissa is 0.1xxx in binary, most significant word last
        let mut m = 0.0f64;
        let mut scale = 1.0f64;
        for &w in words.iter().rev().take(128 / WORD_BIT_SIZE + 1) {
            scale *= (WORD_BIT_SIZE as f64).exp2().recip();
            m += w as f64 * scale;
        }
        let v = ldexp(m, e as i64);
        if sign == Sign::Neg {
            -v
        } else {
            v
        }
    }

    /// Decimal string carrying all digits the precision supports.
    pub fn to_decimal(&self) -> String {
        if self.value.is_zero() {
            return "0".to_string();
        }
        with_consts(|cc| self.value.format(Radix::Dec, RM, cc)).unwrap_or_else(|_| "NaN".into())
    }
}

fn ldexp(mut m: f64, mut e: i64) -> f64 {
    while e > 1000 {
        m *= 2f64.powi(1000);
        e -= 1000;
        if m.is_infinite() {
            return m;
        }
    }
    while e < -1000 {
        m *= 2f64.powi(-1000);
        e += 1000;
        if m == 0.0 {
            return m;
        }
    }
    m * 2f64.powi(e as i32)
}

#[cfg(target_pointer_width = "64")]
fn biguint_words(x: &BigUint) -> Vec<Word> {
    x.to_u64_digits()
}

#[cfg(not(target_pointer_width = "64"))]
fn biguint_words(x: &BigUint) -> Vec<Word> {
    x.to_u32_digits()
}

impl fmt::Display for PrecisionReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal())
    }
}

macro_rules! real_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&PrecisionReal> for &PrecisionReal {
            type Output = PrecisionReal;
            fn $method(self, rhs: &PrecisionReal) -> PrecisionReal {
                let p = self.bits.max(rhs.bits);
                PrecisionReal::wrap(self.value.$method(&rhs.value, p, RM), p)
            }
        }
        impl $trait<PrecisionReal> for PrecisionReal {
            type Output = PrecisionReal;
            fn $method(self, rhs: PrecisionReal) -> PrecisionReal {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&PrecisionReal> for PrecisionReal {
            type Output = PrecisionReal;
            fn $method(self, rhs: &PrecisionReal) -> PrecisionReal {
                (&self).$method(rhs)
            }
        }
    };
}

real_binop!(Add, add);
real_binop!(Sub, sub);
real_binop!(Mul, mul);

impl Neg for PrecisionReal {
    type Output = PrecisionReal;
    fn neg(self) -> PrecisionReal {
        PrecisionReal::wrap(self.value.neg(), self.bits)
    }
}

impl Neg for &PrecisionReal {
    type Output = PrecisionReal;
    fn neg(self) -> PrecisionReal {
        PrecisionReal::wrap(self.value.clone().neg(), self.bits)
    }
}

/// Complex number with equal-precision real and imaginary parts.
#[derive(Clone, Debug)]
pub struct PrecisionComplex {
    re: PrecisionReal,
    im: PrecisionReal,
}

impl PrecisionComplex {
    pub fn new(re: PrecisionReal, im: PrecisionReal) -> Self {
        let p = re.bits.max(im.bits);
        Self {
            re: if re.bits == p { re } else { re.with_bits(p) },
            im: if im.bits == p { im } else { im.with_bits(p) },
        }
    }

    pub fn from_real(re: PrecisionReal) -> Self {
        let im = PrecisionReal::zero(re.bits);
        Self { re, im }
    }

    pub fn from_c64(z: Complex64, bits: usize) -> Self {
        Self::new(PrecisionReal::from_f64(z.re, bits), PrecisionReal::from_f64(z.im, bits))
    }

    pub fn zero(bits: usize) -> Self {
        Self::from_real(PrecisionReal::zero(bits))
    }

    pub fn re(&self) -> &PrecisionReal {
        &self.re
    }

    pub fn im(&self) -> &PrecisionReal {
        &self.im
    }

    pub fn bits(&self) -> usize {
        self.re.bits
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    pub fn scale(&self, k: &PrecisionReal) -> Self {
        Self::new(&self.re * k, &self.im * k)
    }

    pub fn norm_sqr(&self) -> PrecisionReal {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }

    pub fn abs(&self) -> PrecisionReal {
        self.norm_sqr().sqrt()
    }

    pub fn div(&self, rhs: &Self) -> Self {
        let d = rhs.norm_sqr();
        let re = &(&self.re * &rhs.re) + &(&self.im * &rhs.im);
        let im = &(&self.im * &rhs.re) - &(&self.re * &rhs.im);
        Self::new(re.div(&d), im.div(&d))
    }

    /// `exp(self)` via `e^re (cos im + i sin im)`.
    pub fn exp(&self) -> Self {
        let r = self.re.exp();
        Self::new(&r * &self.im.cos(), &r * &self.im.sin())
    }
}

impl Add<&PrecisionComplex> for &PrecisionComplex {
    type Output = PrecisionComplex;
    fn add(self, rhs: &PrecisionComplex) -> PrecisionComplex {
        PrecisionComplex::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub<&PrecisionComplex> for &PrecisionComplex {
    type Output = PrecisionComplex;
    fn sub(self, rhs: &PrecisionComplex) -> PrecisionComplex {
        PrecisionComplex::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul<&PrecisionComplex> for &PrecisionComplex {
    type Output = PrecisionComplex;
    fn mul(self, rhs: &PrecisionComplex) -> PrecisionComplex {
        let re = &(&self.re * &rhs.re) - &(&self.im * &rhs.im);
        let im = &(&self.re * &rhs.im) + &(&self.im * &rhs.re);
        PrecisionComplex::new(re, im)
    }
}

impl Neg for &PrecisionComplex {
    type Output = PrecisionComplex;
    fn neg(self) -> PrecisionComplex {
        PrecisionComplex::new(-&self.re, -&self.im)
    }
}
