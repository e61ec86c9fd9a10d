//! Fourier sine coefficients of the odd extension of `F_N` to `[-1, 1]`,
//!
//! ```text
//! c(n) = int_{-1}^{1} F_N(x) sin(n pi x) dx = 2 int_0^1 F_N(x) sin(n pi x) dx,
//! ```
//!
//! by three independent routes.
//!
//! * **Direct**: quadrature (see [`crate::beurling::term_sine`]).
//! * **Cosine series**: with `x = n pi`, `alpha_k = x theta_k` and
//!   `A_1 = (2/x)(1 - cos x)`,
//!   `c = A_1 + (2/x) sum_k a_k sum_j j [cos(alpha_k/j) - cos(alpha_k/(j+1))]`.
//!   Summation by parts turns the inner series into
//!   `sum_j (cos(alpha/j) - 1)`, summed directly up to `j ~ alpha` and beyond
//!   that through `cos y - 1 = sum_l (-1)^l y^{2l}/(2l)!`, which leaves Hurwitz
//!   zeta values `zeta(2l, J+1)`; the Taylor series alternates with decreasing
//!   terms, so the first omitted term bounds the truncation.
//!
//!   The raw partial sum to `J` is also available ([`cosine_partial`]) with
//!   the tail bound `alpha^2 / J`. Proof: by the mean value theorem
//!   `|cos(alpha/j) - cos(alpha/(j+1))| <= |sin xi| (alpha/j - alpha/(j+1))
//!   <= (alpha/j) alpha/(j(j+1))`, hence `j |...| <= alpha^2/(j(j+1))`, whose
//!   sum over `j > J` is `alpha^2/(J+1)`.
//! * **Even-Mellin series**: expanding the cosines in Taylor series and
//!   telescoping the `j`-sums into `zeta(2l)` gives, for every `L`,
//!   `c = A_1 + (2/x) sum_{l<=L} (-1)^l x^{2l}/(2l)!
//!        + 2 sum_{l<=L} (-1)^{l-1} x^{2l-1}/(2l-1)! M(2l) + R_L`,
//!   and letting `L -> infinity`, `c = 2 sum_l (-1)^{l-1} x^{2l-1}/(2l-1)! M(2l)`.
//!   Terms grow to about `e^x` before cancelling, so these sums run at
//!   `out + ceil(1.443 x) + 64` bits, with each `M(2l)` computed only to the
//!   precision its weight demands.
//!
//! Remainder bounds: [`remainder_bound`] is the classical estimate
//! `(x^{L+1}/(L+1)!) zeta(L+1) sum theta_k^{L+1}`.
//! [`corrected_remainder_bound`] is
//! `(2/x) sum |a_k| (x theta_k)^{2L+2}/(2L+2)! zeta(2L+2)`, which follows from
//! `|cos y - T_{2L}(y)| <= y^{2L+2}/(2L+2)!` and summation by parts. The
//! classical estimate is smaller than the true remainder for some small `L`
//! when a `theta_k = 1` term is present; for `L + 2 > x` it dominates the
//! corrected one. The limit route only truncates in that regime.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::beurling::{term_sine, BeurlingSpec, Integral};
use crate::error::{Error, Result};
use crate::mellin::EvenMellinTable;
use crate::numerics::{
    bits_for_tol, hurwitz_zeta_real, ln_factorial, zeta_real, NeumaierSum, PrecisionComplex, PrecisionReal,
};

/// Largest truncation order the even-Mellin routes accept.
pub const MAX_ORDER: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Direct,
    CosineSeries,
    EvenMellinExactL,
    EvenMellinLimit,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Direct => "direct",
            Method::CosineSeries => "cosine_series",
            Method::EvenMellinExactL => "even_mellin_exact_L",
            Method::EvenMellinLimit => "even_mellin_limit",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One coefficient with its route, truncation order (`L` or `J`) and error
/// certificate.
#[derive(Clone, Debug)]
pub struct FourierCoefficient {
    pub n: u64,
    pub value: Complex64,
    pub method: Method,
    pub truncation_order: Option<u64>,
    pub error_certificate: f64,
    /// Working-precision value for the even-Mellin routes.
    pub hi: Option<PrecisionComplex>,
}

/// 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

pub const CSV_HEADER: &str = "n,re,im,method,L_or_J,certificate";

impl FourierCoefficient {
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::json!({
            "n": self.n,
            "re": self.value.re,
            "im": self.value.im,
            "method": self.method.as_str(),
            "L_or_J": self.truncation_order,
            "certificate": self.error_certificate,
        });
        if let Some(hi) = &self.hi {
            v["hi"] = serde_json::json!([hi.re().to_decimal(), hi.im().to_decimal()]);
        }
        v
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.n,
            fmt17(self.value.re),
            fmt17(self.value.im),
            self.method,
            self.truncation_order.map_or(String::new(), |o| o.to_string()),
            fmt17(self.error_certificate)
        )
    }
}

/// CSV with header `n,re,im,method,L_or_J,certificate`.
pub fn to_csv(coeffs: &[FourierCoefficient]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for c in coeffs {
        out.push_str(&c.csv_row());
        out.push('\n');
    }
    out
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        Err(Error::domain("Fourier index n must be at least 1"))
    } else {
        Ok(())
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "tolerance must be positive and finite, got {tol}"
        )))
    }
}

/// `A_1 = (2/(n pi))(1 - cos(n pi))`.
pub fn a1(n: u64) -> f64 {
    if n % 2 == 1 {
        4.0 / (n as f64 * PI)
    } else {
        0.0
    }
}

/// Route A: `2 int_0^1 F_N(x) sin(n pi x) dx` by quadrature. No constraint
/// needed.
pub fn c_direct(spec: &BeurlingSpec, n: u64, tol: f64) -> Result<FourierCoefficient> {
    check_n(n)?;
    check_tol(tol)?;
    let l1 = spec.coefficient_l1().max(1.0);
    let half = 0.5 * tol;
    let mut total = crate::beurling::constant_sine(n, 0.25 * half)?;
    for t in spec.terms() {
        let term: Integral = term_sine(t.theta().value(), n, 0.5 * half / l1)?;
        total = total + term.scaled(t.a());
    }
    let value = total.value * 2.0;
    let cert = 2.0 * total.error + 4.0 * f64::EPSILON * value.norm();
    if cert > tol {
        return Err(Error::tolerance(tol, cert, format!("direct coefficient n = {n}")));
    }
    Ok(FourierCoefficient {
        n,
        value,
        method: Method::Direct,
        truncation_order: None,
        error_certificate: cert,
        hi: None,
    })
}

/// `sum_{j>=1} (cos(alpha/j) - 1)` with an error bound; returns the number of
/// directly summed terms as well.
fn cosine_sum(alpha: f64) -> (f64, f64, u64) {
    let j0 = alpha.ceil() as u64 + 1;
    let mut head = NeumaierSum::new();
    let mut abs = 0.0;
    for j in 1..=j0 {
        let h = (0.5 * alpha / j as f64).sin();
        let t = -2.0 * h * h;
        head.add(t);
        abs += -t;
    }
    let a = (j0 + 1) as f64;
    let a2 = alpha * alpha;
    let mut coef = -0.5 * a2;
    let mut tail = 0.0;
    let mut tail_abs = 0.0;
    let mut next = 0.0;
    for l in 1..400u32 {
        let term = coef * hurwitz_zeta_real(2.0 * l as f64, a);
        tail += term;
        tail_abs += term.abs();
        let w = 2.0 * l as f64;
        coef *= -a2 / ((w + 1.0) * (w + 2.0));
        next = coef.abs() * hurwitz_zeta_real(w + 2.0, a);
        if next <= 1e-18 * (head.sum().abs() + tail.abs()) || next < 1e-300 {
            break;
        }
    }
    let value = head.sum() + tail;
    let err = next + 4.0 * f64::EPSILON * abs + 1e-15 * tail_abs;
    (value, err, j0)
}

/// Route B: the cosine series, resummed by parts. Requires an admissible
/// spec. `truncation_order` is the largest number of directly summed terms.
pub fn c_cosine_series(spec: &BeurlingSpec, n: u64, tol: f64) -> Result<FourierCoefficient> {
    check_n(n)?;
    check_tol(tol)?;
    spec.require_admissible("the cosine series")?;
    let x = n as f64 * PI;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut order = 0;
    for t in spec.terms() {
        let (s, e, j0) = cosine_sum(x * t.theta().value());
        acc += t.a() * s;
        err += t.a().norm() * e;
        order = order.max(j0);
    }
    let value = acc * (2.0 / x) + a1(n);
    let cert = 2.0 / x * err + 4.0 * f64::EPSILON * value.norm();
    if cert > tol {
        return Err(Error::tolerance(tol, cert, format!("cosine series n = {n}")));
    }
    Ok(FourierCoefficient {
        n,
        value,
        method: Method::CosineSeries,
        truncation_order: Some(order),
        error_certificate: cert,
        hi: None,
    })
}

/// Raw partial sum of the cosine series to `J` with certificate
/// `(2/(n pi)) sum |a_k| alpha_k^2 / J`.
pub fn cosine_partial(spec: &BeurlingSpec, n: u64, j_max: u64) -> Result<FourierCoefficient> {
    check_n(n)?;
    spec.require_admissible("the cosine series")?;
    if j_max == 0 {
        return Err(Error::domain("truncation J must be at least 1"));
    }
    let x = n as f64 * PI;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut cert = 0.0;
    for t in spec.terms() {
        let alpha = x * t.theta().value();
        let mut s = NeumaierSum::new();
        let mut prev = alpha.cos();
        for j in 1..=j_max {
            let next = (alpha / (j + 1) as f64).cos();
            s.add(j as f64 * (prev - next));
            prev = next;
        }
        acc += t.a() * s.sum();
        cert += t.a().norm() * alpha * alpha / j_max as f64;
    }
    Ok(FourierCoefficient {
        n,
        value: acc * (2.0 / x) + a1(n),
        method: Method::CosineSeries,
        truncation_order: Some(j_max),
        error_certificate: 2.0 / x * cert,
        hi: None,
    })
}

fn require_bound_hypotheses(spec: &BeurlingSpec, what: &str) -> Result<()> {
    if !spec.is_unit_fraction() {
        return Err(Error::Hypothesis(format!(
            "{what} needs theta_k = 1/b_k for every term"
        )));
    }
    if !spec.coefficients_bounded() {
        return Err(Error::Hypothesis(format!("{what} needs |a_k| <= 1 for every term")));
    }
    Ok(())
}

fn theta_powers(spec: &BeurlingSpec, e: usize, bits: usize) -> Vec<PrecisionReal> {
    spec.terms()
        .iter()
        .map(|t| match t.theta().denom() {
            Some(b) => PrecisionReal::from_u64(b, bits).powi(e).recip(),
            None => PrecisionReal::from_rational(t.theta().exact(), bits).powi(e),
        })
        .collect()
}

fn factorial(k: u64, bits: usize) -> PrecisionReal {
    let mut f = PrecisionReal::one(bits);
    for j in 2..=k {
        f = f.mul_u64(j);
    }
    f
}

const BOUND_BITS: usize = 64;

/// `(x^{L+1}/(L+1)!) zeta(L+1) sum_k theta_k^{L+1}` with `x = n pi`.
/// Requires unit fractions and `|a_k| <= 1`.
pub fn remainder_bound(spec: &BeurlingSpec, n: u64, order: u64) -> Result<PrecisionReal> {
    check_n(n)?;
    if order == 0 {
        return Err(Error::domain("remainder_bound needs L >= 1"));
    }
    require_bound_hypotheses(spec, "remainder_bound")?;
    let bits = BOUND_BITS;
    let e = (order + 1) as usize;
    let x = PrecisionReal::pi(bits).mul_u64(n);
    let z = PrecisionReal::from_f64(zeta_real(e as f64), bits);
    let mut th = PrecisionReal::zero(bits);
    for p in theta_powers(spec, e, bits) {
        th = &th + &p;
    }
    Ok(&(&x.powi(e).div(&factorial(e as u64, bits)) * &z) * &th)
}

/// `(2/x) sum_k |a_k| (x theta_k)^{2L+2}/(2L+2)! zeta(2L+2)`.
pub fn corrected_remainder_bound(spec: &BeurlingSpec, n: u64, order: u64) -> Result<PrecisionReal> {
    check_n(n)?;
    if order == 0 {
        return Err(Error::domain("the remainder bound needs L >= 1"));
    }
    let bits = BOUND_BITS;
    let e = (2 * order + 2) as usize;
    let x = PrecisionReal::pi(bits).mul_u64(n);
    let z = PrecisionReal::from_f64(zeta_real(e as f64), bits);
    let mut s = PrecisionReal::zero(bits);
    for (t, p) in spec.terms().iter().zip(theta_powers(spec, e, bits)) {
        s = &s + &(&PrecisionReal::from_f64(t.a().norm(), bits) * &p);
    }
    let core = &x.powi(e).div(&factorial(e as u64, bits)) * &(&s * &z);
    Ok(core.mul_u64(2).div(&x))
}

/// `sum_{j=1}^{J} j [j^{-2l} - (j+1)^{-2l}] = 1 - (J+1)^{1-2l} + sum_{j=2}^{J+1} j^{-2l}`.
pub fn telescope_partial(l: usize, j_max: u64) -> PrecisionReal {
    assert!(l >= 1 && j_max >= 1, "telescope_partial needs l, J >= 1");
    let bits = 128;
    let p = 2 * l;
    let mut acc = PrecisionReal::zero(bits);
    for j in (2..=j_max + 1).rev() {
        acc = &acc + &PrecisionReal::from_u64(j, bits).powi(p).recip();
    }
    let last = PrecisionReal::from_u64(j_max + 1, bits).powi(p - 1).recip();
    &(&PrecisionReal::one(bits) - &last) + &acc
}

/// Output and working precision of the even-Mellin sums at `x = n pi`.
fn working_bits(n: u64, tol: f64) -> (usize, usize) {
    let out = bits_for_tol(tol);
    let x = n as f64 * PI;
    (out, out + (1.443 * x).ceil() as usize + 64)
}

/// `log2( 2 x^{2l-1} / (2l-1)! )`.
fn log2_weight(x: f64, l: usize) -> f64 {
    1.0 + ((2 * l - 1) as f64 * x.ln() - ln_factorial((2 * l - 1) as u64)) / std::f64::consts::LN_2
}

/// Precision needed for `M(2l)` so that every weighted term of an
/// even-Mellin sum up to `x_max` and order `l_max` is good to `2^-out / l_max`.
pub(crate) fn table_bits(x_max: f64, l: usize, l_max: usize, out: usize, l1: f64) -> usize {
    let w = log2_weight(x_max, l).max(0.0);
    let extra = (l_max.max(2) as f64).log2() + (1.0 + l1).log2() + 8.0;
    ((w + extra).ceil() as usize + out).max(64)
}

/// `zeta(s)` for real `s > 1`; beyond `s = 40` the upper bound
/// `1 + 2^-s + 2^{1-s}/(s-1)` (tight to ~1e-12 relative) replaces the series.
fn zeta_upper(s: f64) -> f64 {
    if s < 40.0 {
        zeta_real(s)
    } else {
        1.0 + (-s).exp2() + (1.0 - s).exp2() / (s - 1.0)
    }
}

/// Natural logs of the classical bound at order `L` and of the next term of
/// the limit series, for the truncation search.
fn limit_logs(spec: &BeurlingSpec, x: f64, order: u64) -> (f64, f64) {
    let e = (order + 1) as f64;
    let th: f64 = spec.terms().iter().map(|t| (e * t.theta().value().ln()).exp()).sum();
    let bound = e * x.ln() - ln_factorial(order + 1) + zeta_upper(e).ln() + th.ln();
    let l = order + 1;
    let z2 = zeta_upper(2.0 * l as f64);
    let m_next: f64 = 1.0
        + z2 * spec
            .terms()
            .iter()
            .map(|t| t.a().norm() * (2.0 * l as f64 * t.theta().value().ln()).exp())
            .sum::<f64>();
    let next = 2f64.ln() + (2 * l - 1) as f64 * x.ln() - ln_factorial(2 * l - 1) + (m_next / (2 * l) as f64).ln();
    (bound, next)
}

/// Smallest `L >= ceil(n pi) - 1` with classical bound `<= tol/2` and next
/// term `<= tol/10`. Both quantities decrease in `L` from that start on, so
/// the search doubles and then bisects.
pub fn limit_order(spec: &BeurlingSpec, n: u64, tol: f64) -> Result<u64> {
    check_n(n)?;
    check_tol(tol)?;
    let x = n as f64 * PI;
    let (lb, lt) = ((0.5 * tol).ln(), (0.1 * tol).ln());
    let ok = |order: u64| {
        let (bound, next) = limit_logs(spec, x, order);
        bound <= lb && next <= lt
    };
    let start = ((x.ceil() as u64).saturating_sub(1)).max(1);
    if ok(start) {
        return Ok(start);
    }
    let (mut lo, mut hi) = (start, start.max(8));
    while !ok(hi) {
        lo = hi;
        hi *= 2;
        if hi > MAX_ORDER {
            return Err(Error::tolerance(
                tol,
                f64::INFINITY,
                format!("even-Mellin order beyond {MAX_ORDER}"),
            ));
        }
    }
    // ok(hi), !ok(lo)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `A_1 + (2/x) sum_{l<=L} (-1)^l x^{2l}/(2l)!` at `x = n pi`, which tends to
/// zero as `L` grows (it is `(2/x)(cos x - T_{2L}(x))` up to sign).
pub fn cosine_bracket(n: u64, order: u64, bits: usize) -> PrecisionReal {
    let x = PrecisionReal::pi(bits).mul_u64(n);
    let mut u = PrecisionReal::one(bits);
    let mut acc = PrecisionReal::from_u64(if n % 2 == 1 { 2 } else { 0 }, bits);
    for l in 1..=order {
        u = (&(&u * &x) * &x).div_u64((2 * l - 1) * (2 * l));
        acc = if l % 2 == 1 { &acc - &u } else { &acc + &u };
    }
    acc.mul_u64(2).div(&x)
}

/// Sums of the even-Mellin representation at `x = n pi`, up to order `L`:
/// the cosine bracket `A_1 + (2/x) sum (-1)^l x^{2l}/(2l)!` and the Mellin
/// part `2 sum (-1)^{l-1} x^{2l-1}/(2l-1)! M(2l)` (real and imaginary).
struct EvenSums {
    bracket: PrecisionReal,
    mellin_re: PrecisionReal,
    mellin_im: Option<PrecisionReal>,
}

fn even_sums(table: &EvenMellinTable, n: u64, order: u64, wp: usize, with_bracket: bool) -> EvenSums {
    let x = PrecisionReal::pi(wp).mul_u64(n);
    let x2 = &x * &x;
    let mut t = x.clone(); // x^{2l-1}/(2l-1)!
    let mut cos_sum = PrecisionReal::zero(wp);
    let mut re = PrecisionReal::zero(wp);
    let mut im = table.get(1).1.map(|_| PrecisionReal::zero(wp));
    for l in 1..=order as usize {
        let (m_re, m_im) = table.get(l);
        let odd = l % 2 == 1;
        // M(2l) only carries the bits its weight needs
        let tr = &t.with_bits(m_re.bits()) * m_re;
        re = if odd { &re + &tr } else { &re - &tr };
        if let (Some(acc), Some(m_im)) = (im.as_mut(), m_im) {
            let ti = &t.with_bits(m_im.bits()) * m_im;
            *acc = if odd { &*acc + &ti } else { &*acc - &ti };
        }
        let two_l = 2 * l as u64;
        if with_bracket {
            let u = (&t * &x).div_u64(two_l); // x^{2l}/(2l)!
            cos_sum = if odd { &cos_sum - &u } else { &cos_sum + &u };
        }
        t = (&t * &x2).div_u64(two_l * (two_l + 1));
    }
    let bracket = if with_bracket {
        let one_minus_cos = PrecisionReal::from_u64(if n % 2 == 1 { 2 } else { 0 }, wp);
        (&one_minus_cos + &cos_sum).mul_u64(2).div(&x)
    } else {
        PrecisionReal::zero(wp)
    };
    EvenSums {
        bracket,
        mellin_re: re.mul_u64(2),
        mellin_im: im.map(|v| v.mul_u64(2)),
    }
}

/// Shared table-building plan for a batch of even-Mellin coefficients.
fn build_table(spec: &BeurlingSpec, n_max: u64, order_max: u64, tol: f64) -> Result<EvenMellinTable> {
    let (out, _) = working_bits(n_max, tol);
    let x_max = n_max as f64 * PI;
    let l1 = spec.coefficient_l1();
    let l_max = order_max as usize;
    EvenMellinTable::build(spec, l_max, |l| table_bits(x_max, l, l_max, out, l1))
}

fn finish(
    n: u64,
    method: Method,
    order: u64,
    value_re: PrecisionReal,
    value_im: Option<PrecisionReal>,
    cert: f64,
) -> FourierCoefficient {
    let bits = value_re.bits();
    let hi = PrecisionComplex::new(value_re, value_im.unwrap_or_else(|| PrecisionReal::zero(bits)));
    FourierCoefficient {
        n,
        value: hi.to_c64(),
        method,
        truncation_order: Some(order),
        error_certificate: cert,
        hi: Some(hi),
    }
}

fn exact_l_with_table(
    table: &EvenMellinTable,
    spec: &BeurlingSpec,
    n: u64,
    order: u64,
    tol: f64,
) -> Result<FourierCoefficient> {
    let (out, wp) = working_bits(n, tol);
    let sums = even_sums(table, n, order, wp, true);
    let value = &sums.bracket + &sums.mellin_re;
    let cert = remainder_bound(spec, n, order)?.to_f64() + (-(out as f64) + 2.0).exp2();
    Ok(finish(n, Method::EvenMellinExactL, order, value, sums.mellin_im, cert))
}

fn limit_with_table(
    table: &EvenMellinTable,
    spec: &BeurlingSpec,
    n: u64,
    order: u64,
    tol: f64,
) -> Result<FourierCoefficient> {
    let (out, wp) = working_bits(n, tol);
    let sums = even_sums(table, n, order, wp, false);
    let x = n as f64 * PI;
    let e = 2 * order + 2;
    let bracket_bound = (2f64.ln() - x.ln() + e as f64 * x.ln() - ln_factorial(e)).exp();
    let cert = remainder_bound(spec, n, order)?.to_f64() + bracket_bound + (-(out as f64) + 2.0).exp2();
    Ok(finish(
        n,
        Method::EvenMellinLimit,
        order,
        sums.mellin_re,
        sums.mellin_im,
        cert,
    ))
}

/// Route C at a fixed order `L`: the exact finite-`L` form without its
/// unknown remainder. The certificate is [`remainder_bound`] plus rounding.
#[allow(non_snake_case)]
pub fn c_even_mellin_exact_L(spec: &BeurlingSpec, n: u64, order: u64, tol: f64) -> Result<FourierCoefficient> {
    check_n(n)?;
    check_tol(tol)?;
    spec.require_lemma_hypotheses("the even-Mellin series")?;
    if order == 0 || order > MAX_ORDER {
        return Err(Error::domain(format!("order L must lie in 1..={MAX_ORDER}")));
    }
    let table = build_table(spec, n, order, tol)?;
    exact_l_with_table(&table, spec, n, order, tol)
}

/// Route C in the limit form, truncated by [`limit_order`].
pub fn c_even_mellin_limit(spec: &BeurlingSpec, n: u64, tol: f64) -> Result<FourierCoefficient> {
    check_n(n)?;
    check_tol(tol)?;
    spec.require_lemma_hypotheses("the even-Mellin series")?;
    let order = limit_order(spec, n, tol)?;
    let table = build_table(spec, n, order, tol)?;
    limit_with_table(&table, spec, n, order, tol)
}

/// Coefficients `n = 1..=n_max` by one route, ordered by `n`. `order` is the
/// fixed `L` for [`Method::EvenMellinExactL`] and ignored otherwise.
pub fn coefficients(
    spec: &BeurlingSpec,
    n_max: u64,
    method: Method,
    tol: f64,
    order: Option<u64>,
) -> Result<Vec<FourierCoefficient>> {
    check_tol(tol)?;
    let ns: Vec<u64> = (1..=n_max).collect();
    match method {
        Method::Direct => crate::par::map(&ns, |&n| c_direct(spec, n, tol)).into_iter().collect(),
        Method::CosineSeries => crate::par::map(&ns, |&n| c_cosine_series(spec, n, tol))
            .into_iter()
            .collect(),
        Method::EvenMellinExactL | Method::EvenMellinLimit => {
            if n_max == 0 {
                return Ok(Vec::new());
            }
            spec.require_lemma_hypotheses("the even-Mellin series")?;
            let orders: Vec<u64> = match method {
                Method::EvenMellinExactL => {
                    let l = order.ok_or_else(|| Error::domain("the exact-L route needs an order L"))?;
                    if l == 0 || l > MAX_ORDER {
                        return Err(Error::domain(format!("order L must lie in 1..={MAX_ORDER}")));
                    }
                    vec![l; ns.len()]
                }
                _ => ns.iter().map(|&n| limit_order(spec, n, tol)).collect::<Result<_>>()?,
            };
            let order_max = *orders.iter().max().unwrap();
            let table = build_table(spec, n_max, order_max, tol)?;
            let jobs: Vec<(u64, u64)> = ns.iter().copied().zip(orders).collect();
            crate::par::map(&jobs, |&(n, l)| match method {
                Method::EvenMellinExactL => exact_l_with_table(&table, spec, n, l, tol),
                _ => limit_with_table(&table, spec, n, l, tol),
            })
            .into_iter()
            .collect()
        }
    }
}

/// One row of a three-route comparison.
#[derive(Clone, Debug)]
pub struct RouteRow {
    pub n: u64,
    pub direct: FourierCoefficient,
    pub cosine: FourierCoefficient,
    /// `None` when the spec misses the even-Mellin hypotheses.
    pub even_mellin: Option<FourierCoefficient>,
}

impl RouteRow {
    fn all(&self) -> Vec<&FourierCoefficient> {
        let mut v = vec![&self.direct, &self.cosine];
        v.extend(self.even_mellin.as_ref());
        v
    }

    /// Largest pairwise gap `|c_i - c_j|`.
    pub fn max_gap(&self) -> f64 {
        let all = self.all();
        let mut g: f64 = 0.0;
        for (i, a) in all.iter().enumerate() {
            for b in &all[i + 1..] {
                g = g.max((a.value - b.value).norm());
            }
        }
        g
    }

    /// Every pairwise gap is within the sum of the two certificates.
    pub fn agree(&self) -> bool {
        let all = self.all();
        all.iter().enumerate().all(|(i, a)| {
            all[i + 1..]
                .iter()
                .all(|b| (a.value - b.value).norm() <= a.error_certificate + b.error_certificate)
        })
    }
}

/// Direct, cosine-series and (when applicable) even-Mellin limit
/// coefficients for `n = 1..=n_max`.
pub fn routes_check(spec: &BeurlingSpec, n_max: u64, tol: f64) -> Result<Vec<RouteRow>> {
    let direct = coefficients(spec, n_max, Method::Direct, tol, None)?;
    let cosine = coefficients(spec, n_max, Method::CosineSeries, tol, None)?;
    let even: Vec<Option<FourierCoefficient>> = if spec.lemma_hypotheses() {
        coefficients(spec, n_max, Method::EvenMellinLimit, tol, None)?
            .into_iter()
            .map(Some)
            .collect()
    } else {
        vec![None; direct.len()]
    };
    Ok(direct
        .into_iter()
        .zip(cosine)
        .zip(even)
        .map(|((d, c), e)| RouteRow {
            n: d.n,
            direct: d,
            cosine: c,
            even_mellin: e,
        })
        .collect())
}

pub const ROUTES_CSV_HEADER: &str = "n,direct,cosine_series,even_mellin,max_gap,certificate_sum,agree";

/// CSV of a routes check (real parts; imaginary parts enter the gaps).
pub fn routes_csv(rows: &[RouteRow]) -> String {
    let mut out = String::from(ROUTES_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let cert: f64 = r.all().iter().map(|c| c.error_certificate).sum();
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.n,
            fmt17(r.direct.value.re),
            fmt17(r.cosine.value.re),
            r.even_mellin.as_ref().map_or(String::new(), |c| fmt17(c.value.re)),
            fmt17(r.max_gap()),
            fmt17(cert),
            r.agree()
        ));
    }
    out
}
