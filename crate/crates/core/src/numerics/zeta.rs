//! Riemann and Hurwitz zeta functions.
//!
//! * [`zeta_even`]: `zeta(2l)` to a requested number of bits, exact Bernoulli
//!   formula or a direct power sum, whichever is cheaper.
//! * [`zeta_complex`]: `zeta(s)` on `Re s > 0` through the alternating eta
//!   series accelerated with Borwein's Chebyshev-type weights
//!   (error `<= 3 (1+2|t|) e^{pi|t|/2} / ((3+sqrt 8)^n |1 - 2^{1-s}|)` for
//!   `sigma >= 1/2`; an extra `1 + 1/sigma` margin is applied below 1/2).
//! * [`hurwitz_zeta`] / [`hurwitz_zeta_real`]: double precision
//!   Euler-Maclaurin evaluation used by quadrature tails and certificates.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed};

use super::bernoulli::bernoulli;
use super::precision::{bits_for_tol, PrecisionComplex, PrecisionReal, MIN_BITS};
use crate::error::{Error, Result};

/// Radius of the excluded disk around the pole at `s = 1`.
pub const POLE_EXCLUSION: f64 = 1e-6;

/// Largest direct-sum length `zeta_even` accepts before switching to the
/// Bernoulli formula.
const DIRECT_SUM_MAX_TERMS: f64 = 4096.0;

/// `zeta(2l)` rounded to `out_bits` (at least 64) bits.
pub fn zeta_even(l: usize, out_bits: usize) -> PrecisionReal {
    assert!(l >= 1, "zeta_even needs l >= 1");
    let bits = out_bits.max(MIN_BITS);
    let wp = bits + 32;
    let p = 2 * l;
    let log2_terms = (wp as f64 + 8.0) / (p as f64 - 1.0);
    let value = if log2_terms <= DIRECT_SUM_MAX_TERMS.log2() {
        zeta_even_direct(p, wp)
    } else {
        zeta_even_bernoulli(l, wp)
    };
    value.with_bits(bits)
}

/// `sum_{j<=J} j^{-p}` with `J^{1-p}/(p-1) < 2^{-wp}`.
fn zeta_even_direct(p: usize, wp: usize) -> PrecisionReal {
    let terms = ((wp as f64 + 8.0) / (p as f64 - 1.0)).exp2().ceil() as u64;
    let mut acc = PrecisionReal::zero(wp);
    for j in (2..=terms.max(2)).rev() {
        let jp = PrecisionReal::from_u64(j, wp).powi(p);
        acc = &acc + &jp.recip();
    }
    &acc + &PrecisionReal::one(wp)
}

/// `|B_{2l}| (2 pi)^{2l} / (2 (2l)!)`.
fn zeta_even_bernoulli(l: usize, wp: usize) -> PrecisionReal {
    let p = 2 * l;
    let b = bernoulli(p).abs();
    let mut fact = BigInt::one();
    for k in 2..=p {
        fact *= BigInt::from(k);
    }
    let two_pi = PrecisionReal::pi(wp).mul_u64(2);
    let num = &PrecisionReal::from_rational(&b, wp) * &two_pi.powi(p);
    let den = PrecisionReal::from_bigint(&(fact * BigInt::from(2)), wp);
    num.div(&den)
}

/// Riemann zeta at complex `s` with `Re s > 0`, absolute error at most `tol`.
pub fn zeta_complex(s: &PrecisionComplex, tol: f64) -> Result<PrecisionComplex> {
    let sc = s.to_c64();
    let (sigma, t) = (sc.re, sc.im);
    if !(sigma > 0.0) || !sc.is_finite() {
        return Err(Error::domain(format!("zeta_complex needs Re(s) > 0, got {sc}")));
    }
    if (sc - 1.0).norm() <= POLE_EXCLUSION {
        return Err(Error::domain(format!(
            "s = {sc} lies inside the pole exclusion disk |s-1| <= {POLE_EXCLUSION:e}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::domain("tolerance must be positive"));
    }
    let eta_factor = Complex64::new(1.0, 0.0) - (Complex64::new(1.0, 0.0) - sc).exp2();
    if eta_factor.norm() < 1e-9 {
        return Err(Error::domain(format!(
            "1 - 2^(1-s) vanishes at s = {sc}; the eta quotient is indeterminate there"
        )));
    }

    let margin = if sigma < 0.5 { 1.0 + 1.0 / sigma } else { 1.0 };
    let log_err_scale =
        (3.0 * (1.0 + 2.0 * t.abs()) * margin / eta_factor.norm()).ln() + std::f64::consts::FRAC_PI_2 * t.abs();
    let rate = (3.0 + 8f64.sqrt()).ln();
    let n = (((log_err_scale - (tol / 2.0).ln()) / rate).ceil().max(1.0)) as usize + 1;

    let guard = 64 + (1.0 / eta_factor.norm()).log2().max(0.0).ceil() as usize;
    let wp = bits_for_tol(tol) + guard + (n as f64).log2().ceil() as usize;

    // Borwein weights d_k = n sum_{i<=k} (n+i-1)! 4^i / ((n-i)! (2i)!)
    let mut d = Vec::with_capacity(n + 1);
    let mut term = PrecisionReal::one(wp);
    let mut acc = PrecisionReal::zero(wp);
    for i in 0..=n {
        acc = &acc + &term;
        d.push(acc.clone());
        if i < n {
            let num = 4 * ((n + i) as u64) * ((n - i) as u64);
            let den = ((2 * i + 1) * (2 * i + 2)) as u64;
            term = term.mul_u64(num).div_u64(den);
        }
    }
    let dn = d[n].clone();

    let sp = PrecisionComplex::new(s.re().with_bits(wp), s.im().with_bits(wp));
    let mut sum = PrecisionComplex::zero(wp);
    for (k, dk) in d.iter().enumerate().take(n) {
        let lnk = PrecisionReal::from_u64(k as u64 + 1, wp).ln();
        let power = PrecisionComplex::new(-&(sp.re() * &lnk), -&(sp.im() * &lnk)).exp();
        let w = &dn - dk;
        let contrib = power.scale(&w);
        sum = if k % 2 == 0 { &sum + &contrib } else { &sum - &contrib };
    }
    let ln2 = PrecisionReal::from_u64(2, wp).ln();
    let one = PrecisionReal::one(wp);
    let one_minus_s = PrecisionComplex::new(&one - sp.re(), -sp.im());
    let two_pow = PrecisionComplex::new(one_minus_s.re() * &ln2, one_minus_s.im() * &ln2).exp();
    let denom = PrecisionComplex::new(&one - two_pow.re(), -two_pow.im()).scale(&dn);
    let out = sum.div(&denom);
    let out_bits = bits_for_tol(tol) + 8;
    Ok(PrecisionComplex::new(
        out.re().with_bits(out_bits),
        out.im().with_bits(out_bits),
    ))
}

/// Number of Euler-Maclaurin correction terms in the Hurwitz evaluations.
const EM_TERMS: usize = 10;

fn em_coefficients() -> &'static [f64; EM_TERMS] {
    static COEFFS: OnceLock<[f64; EM_TERMS]> = OnceLock::new();
    COEFFS.get_or_init(|| {
        let mut c = [0.0; EM_TERMS];
        let mut fact = BigInt::one();
        let mut k = 1usize;
        for (j, slot) in c.iter_mut().enumerate() {
            let m = 2 * (j + 1);
            while k < m {
                k += 1;
                fact *= BigInt::from(k);
            }
            let b = bernoulli(m);
            let r = b / num_rational::BigRational::from_integer(fact.clone());
            *slot = PrecisionReal::from_rational(&r, 128).to_f64();
        }
        c
    })
}

/// Hurwitz zeta `sum_{k>=0} (k+a)^{-s}` for `Re s > 1`, `a > 0`, in double precision.
pub fn hurwitz_zeta(s: Complex64, a: f64) -> Complex64 {
    debug_assert!(s.re > 1.0 && a > 0.0);
    let shift = (s.norm() + 2.0 * EM_TERMS as f64 + 6.0 - a).ceil().max(0.0) as usize;
    let mut head = Complex64::new(0.0, 0.0);
    for k in (0..shift).rev() {
        head += (-s * (a + k as f64).ln()).exp();
    }
    let w = a + shift as f64;
    let lnw = w.ln();
    let w_pow = (-s * lnw).exp();
    let mut tail = w_pow * w / (s - 1.0) + w_pow * 0.5;
    // rising factorial s (s+1) ... (s+2j-2) times w^{-s-2j+1}
    let mut rising = s;
    let mut wp = w_pow / w;
    let w2 = w * w;
    for (j, c) in em_coefficients().iter().enumerate() {
        tail += rising * wp * *c;
        let m = 2.0 * j as f64;
        rising = rising * (s + m + 1.0) * (s + m + 2.0);
        wp /= w2;
    }
    head + tail
}

/// Real-argument version of [`hurwitz_zeta`].
pub fn hurwitz_zeta_real(s: f64, a: f64) -> f64 {
    debug_assert!(s > 1.0 && a > 0.0);
    let shift = (s + 2.0 * EM_TERMS as f64 + 6.0 - a).ceil().max(0.0) as usize;
    let mut head = 0.0;
    for k in (0..shift).rev() {
        head += (a + k as f64).powf(-s);
    }
    let w = a + shift as f64;
    let w_pow = w.powf(-s);
    let mut tail = w_pow * w / (s - 1.0) + 0.5 * w_pow;
    let mut rising = s;
    let mut wp = w_pow / w;
    let w2 = w * w;
    for (j, c) in em_coefficients().iter().enumerate() {
        tail += rising * wp * c;
        let m = 2.0 * j as f64;
        rising *= (s + m + 1.0) * (s + m + 2.0);
        wp /= w2;
    }
    head + tail
}

/// Riemann zeta at a real argument `s > 1`, double precision.
pub fn zeta_real(s: f64) -> f64 {
    hurwitz_zeta_real(s, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    // Independent oracle: partial sums plus an Euler-Maclaurin tail
    // (integral + half term + first derivative correction).
    fn zeta_oracle(s: f64) -> f64 {
        let n = 100_000u64;
        let mut acc = 0.0;
        for j in (1..n).rev() {
            acc += (j as f64).powf(-s);
        }
        let nf = n as f64;
        acc + nf.powf(1.0 - s) / (s - 1.0) + 0.5 * nf.powf(-s) + s / 12.0 * nf.powf(-s - 1.0)
    }

    #[test]
    fn zeta_even_known_values() {
        let z2 = zeta_even(1, 200).to_f64();
        assert!((z2 - PI * PI / 6.0).abs() < 1e-15);
        assert!((z2 - zeta_oracle(2.0)).abs() < 1e-12);
        let z4 = zeta_even(2, 200).to_f64();
        assert!((z4 - PI.powi(4) / 90.0).abs() < 1e-15);
        assert!((z4 - zeta_oracle(4.0)).abs() < 1e-13);
    }

    #[test]
    fn zeta_even_large_l_is_just_above_one() {
        let z = zeta_even(30, 256);
        let excess = &z - &PrecisionReal::one(256);
        assert!(!excess.is_negative() && !excess.is_zero());
        assert!(excess.to_f64() < 2f64.powi(-59));
    }

    #[test]
    fn direct_and_bernoulli_paths_agree() {
        for l in [15usize, 20, 45] {
            let wp = 300;
            let a = zeta_even_direct(2 * l, wp + 40);
            let b = zeta_even_bernoulli(l, wp + 40);
            let diff = (&a - &b).abs();
            assert!(diff.is_zero() || diff.exponent().unwrap() < -(wp as i64), "l={l}");
        }
    }

    #[test]
    fn zeta_even_decreasing_and_bounded() {
        let mut prev = f64::INFINITY;
        for l in 1..=20 {
            let z = zeta_even(l, 128).to_f64();
            assert!(z > 1.0 && z < prev);
            assert!(z - 1.0 < 2f64.powi(1 - 2 * l as i32) * 2.0);
            prev = z;
        }
    }

    #[test]
    fn zeta_complex_agrees_with_even_values() {
        for l in 1..=10usize {
            let s = PrecisionComplex::from_c64(Complex64::new(2.0 * l as f64, 0.0), 128);
            let z = zeta_complex(&s, 1e-25).unwrap();
            let e = zeta_even(l, 128);
            let d = (z.re() - &e).abs();
            assert!(d.to_f64() < 2e-25, "l={l}: {}", d.to_f64());
            assert!(z.im().abs().to_f64() < 1e-25);
        }
    }

    #[test]
    fn zeta_complex_conjugate_symmetry() {
        let s = Complex64::new(0.7, 3.3);
        let a = zeta_complex(&PrecisionComplex::from_c64(s, 128), 1e-20)
            .unwrap()
            .to_c64();
        let b = zeta_complex(&PrecisionComplex::from_c64(s.conj(), 128), 1e-20)
            .unwrap()
            .to_c64();
        assert!((a - b.conj()).norm() < 1e-18);
    }

    #[test]
    fn zeta_complex_near_first_zero() {
        let s = PrecisionComplex::from_c64(Complex64::new(0.5, 14.134725141734693), 128);
        let z = zeta_complex(&s, 1e-15).unwrap();
        assert!(z.to_c64().norm() < 1e-12);
    }

    #[test]
    fn zeta_complex_domain_errors() {
        let bad = [
            Complex64::new(0.0, 1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(1.0 + 1e-7, 0.0),
            Complex64::new(1.0, 2.0 * PI / 2f64.ln()),
        ];
        for s in bad {
            let r = zeta_complex(&PrecisionComplex::from_c64(s, 64), 1e-10);
            assert!(matches!(r, Err(Error::Domain(_))), "{s}");
        }
    }

    #[test]
    fn hurwitz_matches_direct_sums() {
        let direct = |s: f64, a: f64| {
            let mut acc = 0.0;
            for k in (0..200_000).rev() {
                acc += (a + k as f64).powf(-s);
            }
            acc
        };
        for (s, a) in [(3.0, 1.0), (5.5, 2.25), (2.0, 7.0), (13.0, 1.5)] {
            let want = direct(s, a);
            let tail_scale = (200_000.0f64 + a).powf(1.0 - s) / (s - 1.0);
            assert!((hurwitz_zeta_real(s, a) - want).abs() <= 1e-14 + 1.1 * tail_scale);
        }
        assert!((zeta_real(2.0) - PI * PI / 6.0).abs() < 1e-15);
    }

    #[test]
    fn hurwitz_complex_consistent_with_real() {
        for (s, a) in [(2.5, 1.0), (4.0, 3.7)] {
            let c = hurwitz_zeta(Complex64::new(s, 0.0), a);
            assert!((c.re - hurwitz_zeta_real(s, a)).abs() < 1e-15 * c.re.abs().max(1.0));
        }
        // zeta(s, 1) + zeta(s, 2) relation: zeta(s,1) = 1 + zeta(s,2)
        let s = Complex64::new(1.5, 4.0);
        let d = hurwitz_zeta(s, 1.0) - hurwitz_zeta(s, 2.0) - 1.0;
        assert!(d.norm() < 1e-14);
    }
}
