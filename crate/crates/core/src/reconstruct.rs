//! The Mellin transform rebuilt from its values at even integers:
//!
//! ```text
//! M(s) = sum_n S(n, s) c(n),   S(n, s) = int_0^1 sin(n pi x) x^{s-1} dx,
//! ```
//!
//! with `c(n)` from the even-Mellin limit series. The interchange behind this
//! is formal, so the result comes with convergence diagnostics, not a bound:
//! terms decay like `1/n^2` and the tail is modelled as `C / n_max` with
//! `C = max_{n >= n_max/2} n^2 |term_n|`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::beurling::BeurlingSpec;
use crate::error::{Error, Result};
use crate::fourier::{coefficients, fmt17, Method, MAX_ORDER};
use crate::mellin::{MellinValue, Provenance};
use crate::numerics::{bits_for_tol, ComplexSum, PrecisionComplex, PrecisionReal};

/// Default tolerance below which the last-tenth spread counts as settled.
pub const DEFAULT_REPORT_TOL: f64 = 1e-3;

fn check_s(s: Complex64) -> Result<()> {
    if s.re > 0.0 && s.re.is_finite() && s.im.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("sine moments need Re(s) > 0, got {s}")))
    }
}

/// `S(n, s)` for several `s` at once (they share the power series in
/// `n pi`): `sum_m (-1)^m (n pi)^{2m+1} / ((2m+1)! (s + 2m + 1))`.
///
/// The sum runs at `out + ceil(1.443 n pi) + 64` bits; each term is divided
/// at the precision its size demands. Truncation happens past the peak once
/// the next factorial term over `min Re(s)` is below `tol / 4`; the series
/// alternates with decreasing terms from there on.
pub fn sine_moments(n: u64, s: &[Complex64], tol: f64) -> Result<Vec<PrecisionComplex>> {
    if n == 0 {
        return Err(Error::domain("sine moments need n >= 1"));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::domain(format!(
            "tolerance must be positive and finite, got {tol}"
        )));
    }
    for &z in s {
        check_s(z)?;
    }
    if s.is_empty() {
        return Ok(Vec::new());
    }
    let x = n as f64 * PI;
    let out = bits_for_tol(tol);
    let wp = out + (1.443 * x).ceil() as usize + 64;
    let sigma_min = s.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
    let log2_terms = ((std::f64::consts::E * x + 16.0).log2()).ceil() as i64;
    let stop = (0.25 * tol * sigma_min).log2();

    let xp = PrecisionReal::pi(wp).mul_u64(n);
    let x2 = &xp * &xp;
    let mut t = xp.clone(); // x^{2m+1}/(2m+1)!
    let mut re: Vec<PrecisionReal> = vec![PrecisionReal::zero(wp); s.len()];
    let mut im: Vec<PrecisionReal> = vec![PrecisionReal::zero(wp); s.len()];
    let mut m: u64 = 0;
    loop {
        let e = t.exponent().unwrap_or(i64::MIN / 2);
        let bits = (e + out as i64 + log2_terms + 8).max(64) as usize;
        let tb = t.with_bits(bits);
        let k = (2 * m + 1) as f64;
        for (j, z) in s.iter().enumerate() {
            let d_re = PrecisionReal::from_f64(z.re, bits) + PrecisionReal::from_f64(k, bits);
            let (tr, ti) = if z.im == 0.0 {
                (tb.div(&d_re), None)
            } else {
                let d_im = PrecisionReal::from_f64(z.im, bits);
                let den = &(&d_re * &d_re) + &(&d_im * &d_im);
                let q = tb.div(&den);
                (&q * &d_re, Some(-(&q * &d_im)))
            };
            let even = m.is_multiple_of(2);
            re[j] = if even { &re[j] + &tr } else { &re[j] - &tr };
            if let Some(ti) = ti {
                im[j] = if even { &im[j] + &ti } else { &im[j] - &ti };
            }
        }
        t = (&t * &x2).div_u64((2 * m + 2) * (2 * m + 3));
        m += 1;
        let past_peak = (2 * m + 1) as f64 > x;
        if past_peak && t.exponent().is_none_or(|e| (e as f64) < stop) {
            break;
        }
        if m > MAX_ORDER {
            return Err(Error::tolerance(tol, f64::INFINITY, format!("sine moment n = {n}")));
        }
    }
    Ok(re
        .into_iter()
        .zip(im)
        .map(|(r, i)| PrecisionComplex::new(r, i))
        .collect())
}

pub fn sine_moment(n: u64, s: Complex64, tol: f64) -> Result<PrecisionComplex> {
    Ok(sine_moments(n, &[s], tol)?.remove(0))
}

/// One row of the convergence report.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReconstructTerm {
    pub n: u64,
    pub term: Complex64,
    pub partial: Complex64,
}

#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub value: MellinValue,
    pub terms: Vec<ReconstructTerm>,
    /// Largest distance between partial sums over the last tenth of `n`.
    pub spread: f64,
    /// `C / n_max` with `C = max_{n >= n_max/2} n^2 |term_n|`.
    pub tail_model: f64,
    pub warning: Option<String>,
}

impl Reconstruction {
    /// CSV `n,term_re,term_im,partial_re,partial_im`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,term_re,term_im,partial_re,partial_im\n");
        for t in &self.terms {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                t.n,
                fmt17(t.term.re),
                fmt17(t.term.im),
                fmt17(t.partial.re),
                fmt17(t.partial.im)
            ));
        }
        out
    }
}

/// `sum_{n <= n_max} S(n, s) c(n)` for each `s`; coefficients and moments
/// are shared across the `s` values. The spec must be admissible with unit
/// fractions and `|a_k| <= 1`.
pub fn mellin_reconstruct_many(
    spec: &BeurlingSpec,
    s: &[Complex64],
    n_max: u64,
    tol_per_coeff: f64,
    report_tol: f64,
) -> Result<Vec<Reconstruction>> {
    if n_max == 0 {
        return Err(Error::domain("n_max must be at least 1"));
    }
    for &z in s {
        check_s(z)?;
    }
    let coeffs = coefficients(spec, n_max, Method::EvenMellinLimit, tol_per_coeff, None)?;
    let ns: Vec<u64> = (1..=n_max).collect();
    let moments = crate::par::map(&ns, |&n| sine_moments(n, s, tol_per_coeff))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let mut out = Vec::with_capacity(s.len());
    for (j, &z) in s.iter().enumerate() {
        let mut acc = ComplexSum::new();
        let mut terms = Vec::with_capacity(ns.len());
        let mut err = 0.0;
        for (c, mom) in coeffs.iter().zip(&moments) {
            let m = mom[j].to_c64();
            let term = m * c.value;
            acc.add(term);
            err += m.norm() * c.error_certificate;
            terms.push(ReconstructTerm {
                n: c.n,
                term,
                partial: acc.sum(),
            });
        }
        let value = acc.sum();
        let last = (n_max - n_max / 10).max(1);
        let spread = terms
            .iter()
            .filter(|t| t.n >= last)
            .map(|t| (t.partial - value).norm())
            .fold(0.0, f64::max);
        let c = terms
            .iter()
            .filter(|t| 2 * t.n >= n_max)
            .map(|t| (t.n as f64).powi(2) * t.term.norm())
            .fold(0.0, f64::max);
        let tail_model = c / n_max as f64;
        let warning = (spread > report_tol).then(|| {
            format!(
                "partial sums still move by {spread:.3e} over the last tenth of n (report tolerance {report_tol:.1e})"
            )
        });
        out.push(Reconstruction {
            value: MellinValue {
                s: z,
                value,
                provenance: Provenance::Reconstructed,
                // empirical: no certified tail exists
                error_bound: spread.max(tail_model) + err,
                hi: None,
            },
            terms,
            spread,
            tail_model,
            warning,
        });
    }
    Ok(out)
}

pub fn mellin_reconstruct(spec: &BeurlingSpec, s: Complex64, n_max: u64, tol_per_coeff: f64) -> Result<Reconstruction> {
    Ok(mellin_reconstruct_many(spec, &[s], n_max, tol_per_coeff, DEFAULT_REPORT_TOL)?.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beurling::quad::adaptive;
    use crate::mellin::mellin_closed;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn elementary_moments() {
        let v = sine_moment(1, c(1.0, 0.0), 1e-14).unwrap().to_c64();
        assert!((v.re - 2.0 / PI).abs() < 1e-15);
        let v = sine_moment(2, c(1.0, 0.0), 1e-14).unwrap().to_c64();
        assert!(v.norm() < 1e-15);
        let v = sine_moment(1, c(2.0, 0.0), 1e-14).unwrap().to_c64();
        assert!((v.re - 1.0 / PI).abs() < 1e-15);
        assert!(sine_moment(1, c(0.0, 1.0), 1e-10).is_err());
        assert!(sine_moment(0, c(1.0, 0.0), 1e-10).is_err());
    }

    #[test]
    fn moments_match_quadrature() {
        let ss = [c(1.0, 0.0), c(2.0, 0.0), c(2.5, 0.0), c(3.0, 2.0)];
        for n in [1u64, 4, 10] {
            let series = sine_moments(n, &ss, 1e-14).unwrap();
            for (z, v) in ss.iter().zip(series) {
                let f = |x: f64| (n as f64 * PI * x).sin() * Complex64::new(x, 0.0).powc(z - 1.0);
                let q = adaptive(&f, 0.0, 1.0, 1e-14, 1_000_000);
                assert!((q.value - v.to_c64()).norm() < 1e-12, "n={n} s={z}");
            }
        }
    }

    #[test]
    fn square_wave_reconstruction() {
        let e = BeurlingSpec::empty();
        let r = mellin_reconstruct(&e, c(2.0, 0.0), 200, 1e-12).unwrap();
        assert!((r.value.value.re - 0.5).abs() < 1e-2);
        assert!(r.spread < 1e-3);
        assert_eq!(r.terms.len(), 200);
        assert!(r.to_csv().lines().count() == 201);
    }

    #[test]
    fn zero_coefficients_reconstruct_like_one() {
        let z = BeurlingSpec::from_unit_rationals(&[((0, 1), 2), ((0, 1), 3)]).unwrap();
        let a = mellin_reconstruct(&z, c(2.5, 0.0), 40, 1e-12).unwrap();
        let b = mellin_reconstruct(&BeurlingSpec::empty(), c(2.5, 0.0), 40, 1e-12).unwrap();
        assert!((a.value.value - b.value.value).norm() < 1e-14);
    }

    #[test]
    fn doubling_stays_within_tail_model() {
        let s = BeurlingSpec::from_unit_rationals(&[((1, 1), 2), ((-1, 2), 1)]).unwrap();
        let z = c(2.5, 0.0);
        let r = mellin_reconstruct_many(&s, &[z], 120, 1e-12, 1e-3).unwrap();
        let r2 = mellin_reconstruct_many(&s, &[z], 60, 1e-12, 1e-3).unwrap();
        let gap = (r[0].value.value - r2[0].value.value).norm();
        assert!(gap < 4.0 * r2[0].tail_model, "{gap} vs {}", r2[0].tail_model);
        let closed = mellin_closed(&s, z, 1e-12).unwrap();
        assert!((r[0].value.value - closed.value).norm() < 1e-2);
    }

    #[test]
    fn needs_hypotheses() {
        let s = BeurlingSpec::from_real_pairs(&[(1.0, 1.0), (-2.0, 0.5)]).unwrap();
        assert!(matches!(
            mellin_reconstruct(&s, c(2.0, 0.0), 10, 1e-10),
            Err(Error::Hypothesis(_))
        ));
    }
}
