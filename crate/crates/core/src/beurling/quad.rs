//! Adaptive Gauss-Kronrod (7/15) quadrature for complex-valued integrands on
//! smooth intervals, plus a piecewise driver over a sorted knot list.
//!
//! Error estimates follow QUADPACK's `qk15` heuristic. Pieces may be
//! evaluated concurrently but are always summed in ascending order, so
//! results do not depend on the thread count.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::par;

/// Default evaluation budget of a single integration request.
pub const DEFAULT_MAX_EVALS: u64 = 10_000_000;

/// Environment variable overriding [`DEFAULT_MAX_EVALS`].
pub const MAX_EVALS_ENV: &str = "BEURLING_MAX_EVALS";

/// The evaluation budget currently in force.
pub fn max_evals() -> u64 {
    std::env::var(MAX_EVALS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<u64>().ok())
        .filter(|&v| v > 0)
        .unwrap_or(DEFAULT_MAX_EVALS)
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for XGK[1], XGK[3], XGK[5] and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Evaluations per Kronrod rule.
pub const EVALS_PER_RULE: u64 = 15;

/// Outcome of an integration: value, error estimate and evaluations spent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integral {
    pub value: Complex64,
    pub error: f64,
    pub evals: u64,
}

impl Integral {
    pub fn zero() -> Self {
        Self {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            evals: 0,
        }
    }

    pub fn scaled(self, k: Complex64) -> Self {
        Self {
            value: self.value * k,
            error: self.error * k.norm(),
            evals: self.evals,
        }
    }
}

impl std::ops::Add for Integral {
    type Output = Integral;
    fn add(self, rhs: Integral) -> Integral {
        Integral {
            value: self.value + rhs.value,
            error: self.error + rhs.error,
            evals: self.evals + rhs.evals,
        }
    }
}

/// Kronrod value, error estimate and the rounding floor of that estimate.
fn gk15<F: Fn(f64) -> Complex64 + ?Sized>(f: &F, a: f64, b: f64) -> (Complex64, f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    let mut fv = [(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); 7];
    for (j, slot) in fv.iter_mut().enumerate() {
        let dx = h * XGK[j];
        let (f1, f2) = (f(c - dx), f(c + dx));
        resk += (f1 + f2) * WGK[j];
        if j % 2 == 1 {
            resg += (f1 + f2) * WG[j / 2];
        }
        *slot = (f1, f2);
    }
    let mean = resk * 0.5;
    let mut resasc = WGK[7] * (fc - mean).norm();
    let mut resabs = WGK[7] * fc.norm();
    for (j, (f1, f2)) in fv.iter().enumerate() {
        resasc += WGK[j] * ((f1 - mean).norm() + (f2 - mean).norm());
        resabs += WGK[j] * (f1.norm() + f2.norm());
    }
    let h = h.abs();
    let (resasc, resabs) = (resasc * h, resabs * h);
    let mut err = ((resk - resg) * h).norm();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    let floor = 8.0 * f64::EPSILON * resabs;
    err = err.max(floor);
    (resk * h, err, floor)
}

struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    floor: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// Globally adaptive bisection on `[a, b]` until the summed error estimate
/// is at most `tol` or `max_evals` is spent. Never fails; callers decide what
/// to do with an unmet tolerance.
pub fn adaptive<F: Fn(f64) -> Complex64 + ?Sized>(f: &F, a: f64, b: f64, tol: f64, max_evals: u64) -> Integral {
    if a == b {
        return Integral::zero();
    }
    let (value, error, floor) = gk15(f, a, b);
    let mut evals = EVALS_PER_RULE;
    let mut heap = BinaryHeap::new();
    heap.push(Segment {
        a,
        b,
        value,
        error,
        floor,
    });
    let mut total_err = error;
    let mut done = Vec::new();
    while total_err > tol && evals + 2 * EVALS_PER_RULE <= max_evals {
        let Some(seg) = heap.pop() else { break };
        let m = 0.5 * (seg.a + seg.b);
        let at_floor = seg.error <= seg.floor;
        if at_floor || !(m > seg.a && m < seg.b) || (seg.b - seg.a).abs() <= 8.0 * f64::EPSILON * m.abs() {
            // rounding-limited or too narrow: subdividing cannot help
            done.push(seg);
            if heap.is_empty() {
                break;
            }
            continue;
        }
        let (v1, e1, f1) = gk15(f, seg.a, m);
        let (v2, e2, f2) = gk15(f, m, seg.b);
        evals += 2 * EVALS_PER_RULE;
        total_err += e1 + e2 - seg.error;
        heap.push(Segment {
            a: seg.a,
            b: m,
            value: v1,
            error: e1,
            floor: f1,
        });
        heap.push(Segment {
            a: m,
            b: seg.b,
            value: v2,
            error: e2,
            floor: f2,
        });
    }
    done.extend(heap.into_vec());
    done.sort_by(|x, y| x.a.total_cmp(&y.a));
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    for s in &done {
        value += s.value;
        error += s.error;
    }
    Integral { value, error, evals }
}

/// Integrates `f` over consecutive knots `k_0 < k_1 < ... < k_m`, assuming
/// `f` is smooth inside each `[k_i, k_{i+1}]`. The tolerance is shared out in
/// proportion to piece length. Fails with `ToleranceNotMet` when the error
/// estimate stays above `tol` or the budget is exhausted.
pub fn integrate_knots<F>(f: &F, knots: &[f64], tol: f64, max_evals: u64) -> Result<Integral>
where
    F: Fn(f64) -> Complex64 + Sync + ?Sized,
{
    if knots.len() < 2 {
        return Ok(Integral::zero());
    }
    let pieces = (knots.len() - 1) as u64;
    if pieces.saturating_mul(EVALS_PER_RULE) > max_evals {
        return Err(Error::ToleranceNotMet {
            requested: tol,
            achieved: f64::INFINITY,
            context: format!("{pieces} quadrature pieces exceed the evaluation budget of {max_evals}"),
        });
    }
    let span = knots[knots.len() - 1] - knots[0];
    let idx: Vec<usize> = (0..knots.len() - 1).collect();
    let parts = par::map(&idx, |&i| {
        let (a, b) = (knots[i], knots[i + 1]);
        adaptive(f, a, b, tol * (b - a) / span, max_evals)
    });
    let total = parts.into_iter().fold(Integral::zero(), |acc, p| acc + p);
    if total.evals > max_evals || !(total.error <= tol) {
        return Err(Error::ToleranceNotMet {
            requested: tol,
            achieved: total.error,
            context: format!("piecewise quadrature over [{}, {}]", knots[0], knots[knots.len() - 1]),
        });
    }
    Ok(total)
}
