//! Breakpoint-aware integrals of Beurling functions.
//!
//! Two strategies are used.
//!
//! * The generic path ([`integrate_piecewise`]) cuts `(0, eps)` off with the
//!   bound `|int_0^eps g x^{s-1}| <= C eps^sigma / sigma` and integrates every
//!   smooth piece of `[eps, 1]` adaptively. It is fully general but the number
//!   of pieces grows like `1/eps`, so small tolerances at small `sigma` are
//!   out of reach.
//! * The structured path works in `u = theta/x` (or `u = 1/x` for unit
//!   fractions), where `rho` becomes periodic. Everything beyond a few
//!   periods is summed exactly as one period against Hurwitz zeta weights:
//!   `sum_{m>=M} (mP + v)^{-w} = P^{-w} zeta(w, M + v/P)`. Linear functionals
//!   (Mellin transforms, sine coefficients, Gram vectors) split term by term
//!   and work for every theta; quadratic ones (norms, Gram matrices) need a
//!   common integer period.

use num_complex::Complex64;
use num_integer::Integer;

use super::eval::{breakpoints, eval_f_unchecked};
use super::quad::{integrate_knots, max_evals, Integral, EVALS_PER_RULE};
use super::spec::BeurlingSpec;
use crate::error::{Error, Result};
use crate::mellin::{MellinValue, Provenance};
use crate::numerics::{hurwitz_zeta, hurwitz_zeta_real};

/// Largest number of pieces per period the structured quadratic path accepts
/// before falling back to a pairwise expansion.
pub const PERIODIC_PIECE_LIMIT: u64 = 200_000;

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "tolerance must be positive and finite, got {tol}"
        )))
    }
}

fn check_s(s: Complex64) -> Result<()> {
    if s.re > 0.0 && s.im.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("Mellin weight needs Re(s) > 0, got {s}")))
    }
}

fn frac(x: f64) -> f64 {
    x - x.floor()
}

/// `int_0^1 g(x) x^{s-1} dx` (or `int_0^1 g(x) dx` without weight) for an
/// integrand bounded by `1 + sum |a_k|` and smooth between the breakpoints
/// of `spec`.
pub fn integrate_piecewise<G>(
    integrand: G,
    spec: &BeurlingSpec,
    s_weight: Option<Complex64>,
    tol: f64,
) -> Result<Integral>
where
    G: Fn(f64) -> Complex64 + Sync,
{
    integrate_with_bound(&integrand, spec, s_weight, tol, spec.f_bound())
}

pub(crate) fn integrate_with_bound<G>(
    integrand: &G,
    spec: &BeurlingSpec,
    s_weight: Option<Complex64>,
    tol: f64,
    bound: f64,
) -> Result<Integral>
where
    G: Fn(f64) -> Complex64 + Sync + ?Sized,
{
    check_tol(tol)?;
    if let Some(s) = s_weight {
        check_s(s)?;
    }
    let sigma = s_weight.map_or(1.0, |s| s.re);
    let budget = max_evals();
    // tail bound C eps^sigma / sigma <= tol/4
    let mut eps = (0.25 * tol * sigma / bound).powf(1.0 / sigma).min(0.5);
    if let Some(m) = spec.min_theta() {
        eps = eps.min(0.5 * m);
    }
    let tail = bound * eps.powf(sigma) / sigma;
    let theta_sum: f64 = spec.terms().iter().map(|t| t.theta().value()).sum();
    let pieces = theta_sum / eps + 2.0;
    if pieces * EVALS_PER_RULE as f64 > budget as f64 {
        let eps_reachable = theta_sum * EVALS_PER_RULE as f64 / budget as f64;
        return Err(Error::tolerance(
            tol,
            bound * eps_reachable.powf(sigma) / sigma,
            format!("cut-off near 0 would need ~{pieces:.3e} pieces"),
        ));
    }
    let bp = breakpoints(spec, eps)?;
    let mut knots = Vec::with_capacity(bp.len() + 1);
    knots.push(eps);
    knots.extend(bp.points().iter().copied().filter(|&p| p > eps));
    let weighted = |x: f64| match s_weight {
        Some(s) => integrand(x) * ((s - 1.0) * x.ln()).exp(),
        None => integrand(x),
    };
    let body = integrate_knots(&weighted, &knots, 0.5 * tol, budget)?;
    let total = Integral {
        value: body.value,
        error: body.error + tail,
        evals: body.evals,
    };
    if total.error > tol {
        return Err(Error::tolerance(tol, total.error, "piecewise quadrature"));
    }
    Ok(total)
}

/// Integer knots `lo, ceil(lo), ..., hi` (with `lo` itself first).
fn unit_knots(lo: f64, hi: u64) -> Vec<f64> {
    let mut k = vec![lo];
    let first = lo.floor() as u64 + 1;
    k.extend((first..=hi).map(|j| j as f64));
    k
}

/// `int_0^1 rho(theta/x) x^{s-1} dx
///  = theta^s [ int_theta^1 u^{-s} du + int_0^1 v zeta(s+1, 1+v) dv ]`.
pub fn term_mellin(theta: f64, s: Complex64, tol: f64) -> Result<Integral> {
    check_s(s)?;
    let budget = max_evals();
    let head = if theta < 1.0 {
        integrate_knots(&|u: f64| (-s * u.ln()).exp(), &[theta, 1.0], 0.5 * tol, budget)?
    } else {
        Integral::zero()
    };
    let sp1 = s + 1.0;
    let tail = integrate_knots(&|v: f64| hurwitz_zeta(sp1, 1.0 + v) * v, &[0.0, 1.0], 0.5 * tol, budget)?;
    let scale = (s * theta.ln()).exp();
    Ok((head + tail).scaled(scale))
}

/// `sum_{l>=0} (-1)^l alpha^{2l+1}/(2l+1)! zeta(2l+3, a)`, i.e.
/// `sum_{m>=0} sin(alpha/(m+a)) (m+a)^{-2}`, valid for `a >= 2 alpha`.
fn sine_tail_kernel(alpha: f64, a: f64) -> f64 {
    let mut coef = alpha;
    let mut acc = 0.0;
    for l in 0..60 {
        let w = 2.0 * l as f64 + 3.0;
        let term = coef * hurwitz_zeta_real(w, a);
        acc += term;
        if term.abs() <= 1e-18 * acc.abs().max(1e-300) {
            break;
        }
        coef *= -alpha * alpha / ((w - 1.0) * w);
    }
    acc
}

/// `int_0^1 rho(theta/x) sin(n pi x) dx
///  = theta int_theta^inf rho(u) sin(alpha/u) u^{-2} du`, `alpha = n pi theta`.
pub fn term_sine(theta: f64, n: u64, tol: f64) -> Result<Integral> {
    let budget = max_evals();
    let alpha = n as f64 * std::f64::consts::PI * theta;
    let m = (2.0 * alpha).ceil().max(1.0) as u64;
    let inner_tol = 0.5 * tol / theta;
    let head = integrate_knots(
        &|u: f64| Complex64::new(frac(u) * (alpha / u).sin() / (u * u), 0.0),
        &unit_knots(theta, m),
        inner_tol,
        budget,
    )?;
    let tail = integrate_knots(
        &|v: f64| Complex64::new(v * sine_tail_kernel(alpha, m as f64 + v), 0.0),
        &[0.0, 1.0],
        inner_tol,
        budget,
    )?;
    Ok((head + tail).scaled(Complex64::new(theta, 0.0)))
}

/// `int_0^1 sin(n pi x) dx` by quadrature (smooth).
pub(crate) fn constant_sine(n: u64, tol: f64) -> Result<Integral> {
    let w = n as f64 * std::f64::consts::PI;
    let knots: Vec<f64> = (0..=n).map(|k| k as f64 / n as f64).collect();
    integrate_knots(&|x: f64| Complex64::new((w * x).sin(), 0.0), &knots, tol, max_evals())
}

/// Sorted multiples of every `b` in `[0, period]`.
fn period_knots(denoms: &[u64], period: u64) -> Vec<f64> {
    let mut k: Vec<u64> = denoms
        .iter()
        .flat_map(|&b| (0..=period / b).map(move |j| j * b))
        .collect();
    k.sort_unstable();
    k.dedup();
    k.into_iter().map(|x| x as f64).collect()
}

/// `int_1^inf h(u) u^{-2} du` (that is, `int_0^1 h(1/x) dx`) for `h` with
/// integer period `period` that is smooth between `knots` (which lie in
/// `[0, period]` and include both ends).
fn periodic_inverse_square<H>(h: &H, knots: &[f64], period: u64, tol: f64) -> Result<Integral>
where
    H: Fn(f64) -> f64 + Sync,
{
    let budget = max_evals();
    let p = period as f64;
    let mut head_knots = vec![1.0];
    head_knots.extend(knots.iter().copied().filter(|&k| k > 1.0));
    let head = if period > 1 {
        integrate_knots(
            &|u: f64| Complex64::new(h(u) / (u * u), 0.0),
            &head_knots,
            0.5 * tol,
            budget,
        )?
    } else {
        Integral::zero()
    };
    let tail = integrate_knots(
        &|v: f64| Complex64::new(h(v) * hurwitz_zeta_real(2.0, 1.0 + v / p), 0.0),
        knots,
        0.5 * tol * p * p,
        budget,
    )?;
    Ok(head + tail.scaled(Complex64::new(1.0 / (p * p), 0.0)))
}

/// `int_0^1 rho(theta_j/x) rho(theta_k/x) dx`.
///
/// Unit fractions use the common period `lcm(b_j, b_k)`; equal thetas use
/// `theta [ (1 - theta) + int_0^1 v^2 zeta(2, 1+v) dv ]`; anything else goes
/// through the generic cut-off path.
pub fn rho_product(theta_j: (f64, Option<u64>), theta_k: (f64, Option<u64>), tol: f64) -> Result<f64> {
    check_tol(tol)?;
    if let (Some(bj), Some(bk)) = (theta_j.1, theta_k.1) {
        let period = bj.lcm(&bk);
        let knots = period_knots(&[bj, bk], period);
        if knots.len() as u64 <= PERIODIC_PIECE_LIMIT {
            let (fj, fk) = (bj as f64, bk as f64);
            let h = |u: f64| frac(u / fj) * frac(u / fk);
            return Ok(periodic_inverse_square(&h, &knots, period, tol)?.value.re);
        }
    }
    if theta_j.0 == theta_k.0 {
        let th = theta_j.0;
        let tail = integrate_knots(
            &|v: f64| Complex64::new(v * v * hurwitz_zeta_real(2.0, 1.0 + v), 0.0),
            &[0.0, 1.0],
            tol / th,
            max_evals(),
        )?;
        return Ok(th * ((1.0 - th) + tail.value.re));
    }
    let pair = BeurlingSpec::from_real_pairs(&[(1.0, theta_j.0), (1.0, theta_k.0)])?;
    let (tj, tk) = (theta_j.0, theta_k.0);
    let g = |x: f64| Complex64::new(frac(tj / x) * frac(tk / x), 0.0);
    Ok(integrate_with_bound(&g, &pair, None, tol, 1.0)?.value.re)
}

/// `M(s) = int_0^1 F_N(x) x^{s-1} dx` by quadrature.
///
/// The constant contributes `1/s`; every term is a scaled copy of the
/// `theta = 1` integral (see [`term_mellin`]), so this works for every spec
/// and every `sigma > 0`.
pub fn mellin_numeric(spec: &BeurlingSpec, s: Complex64, tol: f64) -> Result<MellinValue> {
    check_tol(tol)?;
    check_s(s)?;
    let l1 = spec.coefficient_l1().max(1.0);
    let mut total = Integral {
        value: 1.0 / s,
        error: 0.0,
        evals: 0,
    };
    for t in spec.terms() {
        total = total + term_mellin(t.theta().value(), s, 0.5 * tol / l1)?.scaled(t.a());
    }
    let error = total.error + 4.0 * f64::EPSILON * total.value.norm();
    if error > tol {
        return Err(Error::tolerance(tol, error, "Mellin quadrature"));
    }
    Ok(MellinValue {
        s,
        value: total.value,
        provenance: Provenance::Quadrature,
        error_bound: error,
        hi: None,
    })
}

/// `||F_N||^2` and `||F_N||` with the error bound on the square.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormEstimate {
    pub norm_sq: f64,
    pub norm: f64,
    pub error: f64,
}

impl NormEstimate {
    fn from_sq(norm_sq: f64, error: f64) -> Self {
        Self {
            norm_sq,
            norm: norm_sq.max(0.0).sqrt(),
            error,
        }
    }
}

/// `||F_N||_{L^2(0,1)}` by quadrature of `|F_N|^2`.
///
/// Unit-fraction specs integrate over one common period (or, for large
/// periods, expand into pairwise products with small periods); other specs
/// use the generic cut-off path with the bound `(1 + sum |a_k|)^2`.
pub fn norm_numeric(spec: &BeurlingSpec, tol: f64) -> Result<NormEstimate> {
    check_tol(tol)?;
    if spec.terms().iter().all(|t| t.a() == Complex64::new(0.0, 0.0)) {
        return Ok(NormEstimate::from_sq(1.0, 0.0));
    }
    if spec.is_unit_fraction() {
        let denoms: Vec<u64> = spec.terms().iter().filter_map(|t| t.theta().denom()).collect();
        let period = spec.period();
        let pieces = period.map(|p| denoms.iter().map(|b| p / b).sum::<u64>());
        if let (Some(p), Some(pieces)) = (period, pieces) {
            if pieces <= PERIODIC_PIECE_LIMIT {
                let knots = period_knots(&denoms, p);
                let terms: Vec<(Complex64, f64)> = spec
                    .terms()
                    .iter()
                    .map(|t| (t.a(), t.theta().denom().unwrap() as f64))
                    .collect();
                let h = |u: f64| {
                    let f: Complex64 = terms.iter().map(|&(a, b)| a * frac(u / b)).sum();
                    (f + 1.0).norm_sqr()
                };
                let r = periodic_inverse_square(&h, &knots, p, tol)?;
                return Ok(NormEstimate::from_sq(r.value.re, r.error));
            }
        }
        return norm_by_expansion(spec, tol);
    }
    let bound = spec.f_bound();
    let g = |x: f64| Complex64::new((eval_f_unchecked(spec, x) + 1.0).norm_sqr(), 0.0);
    let r = integrate_with_bound(&g, spec, None, tol, bound * bound)?;
    Ok(NormEstimate::from_sq(r.value.re, r.error))
}

/// `1 + 2 sum Re(a_k) v_k + sum_{j,k} Re(a_j conj(a_k)) G_jk`.
fn norm_by_expansion(spec: &BeurlingSpec, tol: f64) -> Result<NormEstimate> {
    let terms = spec.terms();
    let n = terms.len();
    let l1 = spec.coefficient_l1().max(1.0);
    let entry_tol = 0.5 * tol / (l1 * l1 + 2.0 * l1);
    let mut acc = 1.0;
    for t in terms {
        let v = term_mellin(t.theta().value(), Complex64::new(1.0, 0.0), entry_tol)?;
        acc += 2.0 * t.a().re * v.value.re;
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|j| (j..n).map(move |k| (j, k))).collect();
    let key = |i: usize| (terms[i].theta().value(), terms[i].theta().denom());
    let vals = crate::par::map(&pairs, |&(j, k)| rho_product(key(j), key(k), entry_tol));
    for (&(j, k), g) in pairs.iter().zip(vals) {
        let w = (terms[j].a() * terms[k].a().conj()).re;
        acc += if j == k { w * g? } else { 2.0 * w * g? };
    }
    Ok(NormEstimate::from_sq(acc, tol))
}
