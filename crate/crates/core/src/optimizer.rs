//! Norm-minimising real coefficients for fixed thetas.
//!
//! `||f + 1||^2 = a^T G a + 2 a^T v + 1` with
//! `G[j][k] = int_0^1 rho(theta_j/x) rho(theta_k/x) dx` and
//! `v[k] = int_0^1 rho(theta_k/x) dx`. Minimising under `theta^T a = 0` is
//! the KKT system `[[G, theta], [theta^T, 0]] [a; lambda] = [-v; 0]`.
//! Complex coefficients split into two independent real problems, so only
//! real ones are handled.

use nalgebra::{DMatrix, DVector};
use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use crate::beurling::{norm_numeric, rho_product, term_mellin, BeurlingSpec, Term, Theta};
use crate::error::{Error, Result};
use crate::fourier::fmt17;
use crate::numerics::Rational;
use crate::parseval::norm_via_parseval;

/// Relative pivot size below which the KKT matrix counts as singular.
pub const SINGULAR_PIVOT: f64 = 1e-13;

/// `theta_k = 1/k`, `k = 1..=n`.
pub fn unit_family(n: usize) -> Vec<Theta> {
    (1..=n as u64).map(|b| Theta::unit(b).expect("b >= 1")).collect()
}

fn parse_theta_value(v: &Value, idx: usize) -> Result<Theta> {
    let bad = |msg: String| Error::Parse(format!("thetas[{idx}]: {msg}"));
    match v {
        Value::Number(n) => {
            let x = n.as_f64().ok_or_else(|| bad("not a float".into()))?;
            Theta::real(x).map_err(|e| bad(e.to_string()))
        }
        Value::String(s) => {
            let r = crate::beurling::parse_rational(s).map_err(|e| bad(e.to_string()))?;
            if r.numer() == &1.into() && r.denom().is_positive() {
                let b = r.denom().to_string().parse::<u64>().map_err(|e| bad(e.to_string()))?;
                Theta::unit(b).map_err(|e| bad(e.to_string()))
            } else {
                let x = r.numer().to_string().parse::<f64>().unwrap_or(f64::NAN)
                    / r.denom().to_string().parse::<f64>().unwrap_or(f64::NAN);
                Theta::real(x).map_err(|e| bad(e.to_string()))
            }
        }
        other => Err(bad(format!("expected number or \"1/b\", got {other}"))),
    }
}

/// `"unit:N"` or a JSON array of numbers / `"p/q"` strings.
pub fn parse_thetas(text: &str) -> Result<Vec<Theta>> {
    let text = text.trim();
    if let Some(n) = text.strip_prefix("unit:") {
        let n: usize = n
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("unit:N needs a positive integer: {e}")))?;
        if n == 0 {
            return Err(Error::Parse("unit:N needs N >= 1".into()));
        }
        return Ok(unit_family(n));
    }
    let v: Value = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column())))?;
    let arr = v
        .as_array()
        .or_else(|| v.get("thetas").and_then(Value::as_array))
        .ok_or_else(|| Error::Parse("expected an array of thetas".into()))?;
    arr.iter().enumerate().map(|(i, t)| parse_theta_value(t, i)).collect()
}

fn theta_json(t: &Theta) -> Value {
    match t.denom() {
        Some(b) => json!(format!("1/{b}")),
        None => json!(t.value()),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GramSystem {
    pub thetas: Vec<Theta>,
    pub g: DMatrix<f64>,
    pub v: DVector<f64>,
    pub build_tol: f64,
}

fn reject_duplicates(thetas: &[Theta]) -> Result<()> {
    for (i, a) in thetas.iter().enumerate() {
        if let Some(j) = thetas[..i].iter().position(|b| b.exact() == a.exact()) {
            return Err(Error::SingularSystem(format!(
                "thetas[{j}] and thetas[{i}] are both {}; remove the duplicate",
                a.value()
            )));
        }
    }
    Ok(())
}

/// Gram entries by breakpoint-aware quadrature; the upper triangle is
/// computed and mirrored.
pub fn build_gram(thetas: &[Theta], tol: f64) -> Result<GramSystem> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::domain(format!(
            "tolerance must be positive and finite, got {tol}"
        )));
    }
    let n = thetas.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|j| (j..n).map(move |k| (j, k))).collect();
    let key = |t: &Theta| (t.value(), t.denom());
    let entries = crate::par::map(&pairs, |&(j, k)| rho_product(key(&thetas[j]), key(&thetas[k]), tol))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let mut g = DMatrix::zeros(n, n);
    for (&(j, k), e) in pairs.iter().zip(entries) {
        g[(j, k)] = e;
        g[(k, j)] = e;
    }
    let one = num_complex::Complex64::new(1.0, 0.0);
    let v = crate::par::map(thetas, |t| term_mellin(t.value(), one, tol).map(|i| i.value.re))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(GramSystem {
        thetas: thetas.to_vec(),
        g,
        v: DVector::from_vec(v),
        build_tol: tol,
    })
}

impl GramSystem {
    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }

    /// Leading `n x n` block, i.e. the system of the first `n` thetas.
    pub fn leading(&self, n: usize) -> GramSystem {
        GramSystem {
            thetas: self.thetas[..n].to_vec(),
            g: self.g.view((0, 0), (n, n)).into_owned(),
            v: self.v.rows(0, n).into_owned(),
            build_tol: self.build_tol,
        }
    }

    pub fn min_eigenvalue(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        self.g.clone().symmetric_eigen().eigenvalues.min()
    }

    /// Symmetry, `lambda_min >= -10 build_tol`, `0 <= v <= 1`.
    pub fn check_invariants(&self) -> Result<()> {
        if self.g != self.g.transpose() {
            return Err(Error::domain("Gram matrix is not symmetric"));
        }
        let lmin = self.min_eigenvalue();
        if lmin < -10.0 * self.build_tol {
            return Err(Error::domain(format!("Gram matrix has eigenvalue {lmin:e}")));
        }
        if self
            .v
            .iter()
            .any(|&x| !(-self.build_tol..=1.0 + self.build_tol).contains(&x))
        {
            return Err(Error::domain("v has an entry outside [0, 1]"));
        }
        Ok(())
    }

    /// `{thetas, G (row-major), v, build_tol}`.
    pub fn to_json(&self) -> Value {
        let n = self.len();
        let g: Vec<f64> = (0..n)
            .flat_map(|j| (0..n).map(move |k| (j, k)))
            .map(|p| self.g[p])
            .collect();
        json!({
            "thetas": self.thetas.iter().map(theta_json).collect::<Vec<_>>(),
            "G": g,
            "v": self.v.as_slice(),
            "build_tol": self.build_tol,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let field = |name: &str| {
            v.get(name)
                .ok_or_else(|| Error::Parse(format!("Gram cache: missing \"{name}\"")))
        };
        let nums = |name: &str| -> Result<Vec<f64>> {
            field(name)?
                .as_array()
                .ok_or_else(|| Error::Parse(format!("Gram cache: \"{name}\" must be an array")))?
                .iter()
                .map(|x| {
                    x.as_f64()
                        .ok_or_else(|| Error::Parse(format!("Gram cache: non-number in \"{name}\"")))
                })
                .collect()
        };
        let thetas = field("thetas")?
            .as_array()
            .ok_or_else(|| Error::Parse("Gram cache: \"thetas\" must be an array".into()))?
            .iter()
            .enumerate()
            .map(|(i, t)| parse_theta_value(t, i))
            .collect::<Result<Vec<_>>>()?;
        let n = thetas.len();
        let g = nums("G")?;
        let vv = nums("v")?;
        if g.len() != n * n || vv.len() != n {
            return Err(Error::Parse(format!("Gram cache: sizes do not match {n} thetas")));
        }
        let build_tol = field("build_tol")?
            .as_f64()
            .ok_or_else(|| Error::Parse("Gram cache: \"build_tol\" must be a number".into()))?;
        Ok(GramSystem {
            thetas,
            g: DMatrix::from_row_slice(n, n, &g),
            v: DVector::from_vec(vv),
            build_tol,
        })
    }
}

/// Solution of the KKT system.
#[derive(Clone, Debug)]
pub struct KktSolution {
    pub a: DVector<f64>,
    pub lambda: f64,
}

/// Solves `[[G, theta], [theta^T, 0]] [a; lambda] = [-v; 0]` with a fully
/// pivoted LU.
pub fn solve_kkt(g: &DMatrix<f64>, v: &DVector<f64>, theta: &DVector<f64>) -> Result<KktSolution> {
    let n = g.nrows();
    let mut k = DMatrix::zeros(n + 1, n + 1);
    k.view_mut((0, 0), (n, n)).copy_from(g);
    for i in 0..n {
        k[(i, n)] = theta[i];
        k[(n, i)] = theta[i];
    }
    let mut rhs = DVector::zeros(n + 1);
    for i in 0..n {
        rhs[i] = -v[i];
    }
    let lu = k.full_piv_lu();
    let diag = lu.u().diagonal();
    let max = diag.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let min = diag.iter().fold(f64::INFINITY, |m, d| m.min(d.abs()));
    if !(max > 0.0) || min <= SINGULAR_PIVOT * max {
        return Err(Error::SingularSystem(format!(
            "KKT matrix is numerically singular (pivot ratio {:e})",
            if max > 0.0 { min / max } else { 0.0 }
        )));
    }
    let sol = lu
        .solve(&rhs)
        .ok_or_else(|| Error::SingularSystem("KKT solve failed".into()))?;
    Ok(KktSolution {
        a: sol.rows(0, n).into_owned(),
        lambda: sol[n],
    })
}

#[derive(Clone, Debug)]
pub struct Optimum {
    pub gram: GramSystem,
    /// Solver coefficients.
    pub a: Vec<f64>,
    pub lambda: f64,
    /// `a^T G a + 2 a^T v + 1`.
    pub norm_sq: f64,
    /// `||G a + lambda theta + v||_inf`.
    pub kkt_residual: f64,
    /// `|theta^T a|`.
    pub constraint_residual: f64,
}

fn quadratic_form(gram: &GramSystem, a: &DVector<f64>) -> f64 {
    (a.dot(&(&gram.g * a)) + 2.0 * a.dot(&gram.v) + 1.0).max(0.0)
}

/// Minimiser on a prebuilt Gram system.
pub fn optimize_gram(gram: &GramSystem) -> Result<Optimum> {
    reject_duplicates(&gram.thetas)?;
    let n = gram.len();
    if n <= 1 {
        // theta^T a = 0 forces a = 0
        return Ok(Optimum {
            gram: gram.clone(),
            a: vec![0.0; n],
            lambda: 0.0,
            norm_sq: 1.0,
            kkt_residual: 0.0,
            constraint_residual: 0.0,
        });
    }
    let theta = DVector::from_iterator(n, gram.thetas.iter().map(Theta::value));
    let sol = solve_kkt(&gram.g, &gram.v, &theta)?;
    let r = &gram.g * &sol.a + &theta * sol.lambda + &gram.v;
    Ok(Optimum {
        norm_sq: quadratic_form(gram, &sol.a),
        kkt_residual: r.amax(),
        constraint_residual: theta.dot(&sol.a).abs(),
        a: sol.a.iter().copied().collect(),
        lambda: sol.lambda,
        gram: gram.clone(),
    })
}

pub fn optimize_coeffs(thetas: &[Theta], tol: f64) -> Result<Optimum> {
    reject_duplicates(thetas)?;
    optimize_gram(&build_gram(thetas, tol)?)
}

impl Optimum {
    /// The optimal spec. All but the last coefficient are the solver's
    /// floats; the last one is solved in exact rationals so that
    /// `sum a_k theta_k = 0` holds exactly.
    pub fn spec(&self) -> Result<BeurlingSpec> {
        let n = self.a.len();
        if n == 0 {
            return Ok(BeurlingSpec::empty());
        }
        let mut terms = Vec::with_capacity(n);
        let mut acc = Rational::zero();
        for (a, t) in self.a.iter().zip(&self.gram.thetas).take(n - 1) {
            let r = Rational::from_float(*a).ok_or_else(|| Error::domain("non-finite coefficient"))?;
            acc += &r * t.exact();
            terms.push(Term::new(r, Rational::zero(), t.clone()));
        }
        let last = self.gram.thetas[n - 1].clone();
        let closing = -acc / last.exact();
        terms.push(Term::new(closing, Rational::zero(), last));
        Ok(BeurlingSpec::new(terms))
    }

    pub fn to_json(&self) -> Result<Value> {
        let spec = self.spec()?;
        Ok(json!({
            "spec": spec.to_json_value(),
            "a": self.a,
            "lambda": self.lambda,
            "norm_sq": self.norm_sq,
            "norm": self.norm_sq.sqrt(),
            "kkt_residual": self.kkt_residual,
            "constraint_residual": self.constraint_residual,
            "route_c_eligible": spec.lemma_hypotheses(),
            "build_tol": self.gram.build_tol,
        }))
    }
}

/// Three norms of the optimal spec: quadratic form, quadrature and Parseval.
#[derive(Clone, Debug)]
pub struct ResidualReport {
    pub optimum: Optimum,
    pub quadratic_norm_sq: f64,
    pub numeric_norm_sq: f64,
    pub numeric_error: f64,
    pub parseval_norm_sq: f64,
    pub parseval_tail: f64,
    pub gap_quadratic_numeric: f64,
    pub gap_quadratic_parseval: f64,
    pub gap_numeric_parseval: f64,
}

/// Parseval side uses `partial + tail/2` (see
/// [`crate::parseval::ParsevalNorm::norm`]).
pub fn residual_report(thetas: &[Theta], tol: f64, n_max: u64) -> Result<ResidualReport> {
    let optimum = optimize_coeffs(thetas, tol)?;
    let spec = optimum.spec()?;
    let numeric = norm_numeric(&spec, tol)?;
    let parseval = norm_via_parseval(&spec, n_max, tol)?;
    let q = optimum.norm_sq;
    let p = parseval.norm * parseval.norm;
    Ok(ResidualReport {
        quadratic_norm_sq: q,
        numeric_norm_sq: numeric.norm_sq,
        numeric_error: numeric.error,
        parseval_norm_sq: p,
        parseval_tail: parseval.tail_estimate,
        gap_quadratic_numeric: (q - numeric.norm_sq).abs(),
        gap_quadratic_parseval: (q - p).abs(),
        gap_numeric_parseval: (numeric.norm_sq - p).abs(),
        optimum,
    })
}

impl ResidualReport {
    pub fn to_json(&self) -> Result<Value> {
        Ok(json!({
            "optimum": self.optimum.to_json()?,
            "norm_sq": {
                "quadratic": self.quadratic_norm_sq,
                "numeric": self.numeric_norm_sq,
                "parseval": self.parseval_norm_sq,
            },
            "numeric_error": self.numeric_error,
            "parseval_tail": self.parseval_tail,
            "gaps": {
                "quadratic_numeric": self.gap_quadratic_numeric,
                "quadratic_parseval": self.gap_quadratic_parseval,
                "numeric_parseval": self.gap_numeric_parseval,
            },
        }))
    }
}

/// Minimal `norm_sq` for the unit families `N = from..=to`, from one Gram
/// system of size `to`.
pub fn sweep(from: usize, to: usize, tol: f64) -> Result<Vec<(usize, f64)>> {
    if from == 0 || from > to {
        return Err(Error::domain(format!("sweep needs 1 <= from <= to, got {from}..{to}")));
    }
    let gram = build_gram(&unit_family(to), tol)?;
    (from..=to)
        .map(|n| optimize_gram(&gram.leading(n)).map(|o| (n, o.norm_sq)))
        .collect()
}

/// CSV `N,norm_sq,norm`.
pub fn sweep_csv(rows: &[(usize, f64)]) -> String {
    let mut out = String::from("N,norm_sq,norm\n");
    for (n, q) in rows {
        out.push_str(&format!("{n},{},{}\n", fmt17(*q), fmt17(q.sqrt())));
    }
    out
}
