use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use beurling::beurling::{eval_F, eval_f, mellin_numeric};
use beurling::fourier::{self, fmt17, Method};
use beurling::mellin::{mellin_closed, mellin_even, mellin_even_bound};
use beurling::optimizer::{self, build_gram, optimize_gram, GramSystem};
use beurling::parseval::norm_crosscheck;
use beurling::reconstruct::{mellin_reconstruct_many, DEFAULT_REPORT_TOL};
use beurling::{BeurlingSpec, Error};
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

const ABOUT: &str = "Beurling approximations F_N(x) = 1 + sum_k a_k rho(theta_k/x) on [0, 1]

Exit codes: 0 success, 1 I/O failure, 2 invalid input (domain, constraint,
hypothesis, singular system, malformed spec), 3 tolerance not met.
BEURLING_MAX_EVALS overrides the quadrature evaluation budget.";

#[derive(Parser, Debug)]
#[command(name = "beurling", version, about = ABOUT)]
struct Cli {
    /// Spec JSON {"terms":[{"a_re":..,"a_im":..,"b":..,"theta":..}]}; F = 1 when omitted
    #[arg(long, global = true)]
    spec: Option<PathBuf>,
    /// Absolute tolerance
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
    /// Output file (stdout when omitted)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format; each subcommand has its own default
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads; results do not depend on it
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MellinMethod {
    Closed,
    Quadrature,
    Reconstruct,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FourierMethod {
    Direct,
    Cosine,
    EvenMellin,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// f(x) and F(x). CSV: x,f_re,f_im,F_re,F_im
    Eval {
        #[arg(long)]
        x: f64,
    },
    /// M(s) as JSON {s, value, provenance, error_bound, hi}
    Mellin {
        /// s as "re" or "re,im"
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        #[arg(long, value_enum, default_value = "closed")]
        method: MellinMethod,
        /// Terms of the reconstruction series
        #[arg(long, default_value_t = 1000)]
        n_max: u64,
    },
    /// M(2l) against (1 + zeta(2l)^2)/(2l). CSV: l,M_re,M_im,bound,satisfied
    MellinEven {
        #[arg(long)]
        l_max: usize,
    },
    /// Fourier sine coefficients. CSV: n,re,im,method,L_or_J,certificate
    Fourier {
        #[arg(long)]
        n_max: u64,
        #[arg(long, value_enum, default_value = "direct")]
        method: FourierMethod,
        /// Fixed order for the even-Mellin route (limit form when omitted)
        #[arg(long = "L")]
        order: Option<u64>,
    },
    /// All routes side by side. CSV: n,direct,cosine_series,even_mellin,max_gap,certificate_sum,agree
    RoutesCheck {
        #[arg(long)]
        n_max: u64,
    },
    /// Parseval norm against quadrature, JSON {n_max, partial, tail_estimate, norm_lo, norm_hi, oracle, gap}
    Norm {
        #[arg(long)]
        n_max: u64,
    },
    /// M(s) from even values. CSV: n,term_re,term_im,partial_re,partial_im
    Reconstruct {
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        #[arg(long)]
        n_max: u64,
    },
    /// Norm-minimising coefficients for fixed thetas, JSON
    Optimize {
        /// JSON file with an array of thetas (numbers or "1/b"), or "unit:N" for theta_k = 1/k
        #[arg(long)]
        thetas: String,
        /// Coefficients for the Parseval cross-check
        #[arg(long, default_value_t = 1000)]
        n_max: u64,
        /// Gram system cache: read when present, written otherwise
        #[arg(long)]
        gram_cache: Option<PathBuf>,
    },
    /// Minimal norms of the unit families. CSV: N,norm_sq,norm
    Sweep {
        #[arg(long)]
        unit_n_from: usize,
        #[arg(long)]
        unit_n_to: usize,
    },
}

#[derive(Debug)]
enum Failure {
    Lib(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type Result<T> = std::result::Result<T, Failure>;

fn parse_s(s: &str) -> Result<Complex64> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| {
        p.parse::<f64>()
            .map_err(|e| Failure::Lib(Error::Parse(format!("--s: cannot read {p:?}: {e}"))))
    };
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(Failure::Lib(Error::Parse(format!(
            "--s expects \"re\" or \"re,im\", got {s:?}"
        )))),
    }
}

fn load_spec(path: Option<&Path>) -> Result<BeurlingSpec> {
    match path {
        None => Ok(BeurlingSpec::empty()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?;
            BeurlingSpec::from_json_str(&text)
                .map_err(|e| Failure::Lib(Error::Parse(format!("{}: {}", p.display(), strip_kind(&e)))))
        }
    }
}

fn strip_kind(e: &Error) -> String {
    match e {
        Error::Parse(m) => m.clone(),
        other => other.to_string(),
    }
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn run(cli: &Cli) -> Result<String> {
    let spec = load_spec(cli.spec.as_deref())?;
    let tol = cli.tol;
    let fmt = |default: Format| cli.format.unwrap_or(default);
    let out = match &cli.command {
        Command::Eval { x } => {
            let f = eval_f(&spec, *x)?;
            let big = eval_F(&spec, *x)?;
            match fmt(Format::Csv) {
                Format::Csv => format!(
                    "x,f_re,f_im,F_re,F_im\n{},{},{},{},{}\n",
                    fmt17(*x),
                    fmt17(f.re),
                    fmt17(f.im),
                    fmt17(big.re),
                    fmt17(big.im)
                ),
                Format::Json => json_text(&json!({"x": x, "f": [f.re, f.im], "F": [big.re, big.im]})),
            }
        }
        Command::Mellin { s, method, n_max } => {
            let s = parse_s(s)?;
            let (v, extra) = match method {
                MellinMethod::Closed => (mellin_closed(&spec, s, tol)?, None),
                MellinMethod::Quadrature => (mellin_numeric(&spec, s, tol)?, None),
                MellinMethod::Reconstruct => {
                    let r = mellin_reconstruct_many(&spec, &[s], *n_max, tol, DEFAULT_REPORT_TOL)?.remove(0);
                    if let Some(w) = &r.warning {
                        eprintln!("warning: {w}");
                    }
                    let extra = json!({"spread": r.spread, "tail_model": r.tail_model, "n_max": n_max});
                    (r.value, Some(extra))
                }
            };
            match fmt(Format::Json) {
                Format::Json => {
                    let mut j = v.to_json();
                    if let Some(e) = extra {
                        j["convergence"] = e;
                    }
                    json_text(&j)
                }
                Format::Csv => format!(
                    "s_re,s_im,re,im,provenance,error_bound\n{},{},{},{},{},{}\n",
                    fmt17(v.s.re),
                    fmt17(v.s.im),
                    fmt17(v.value.re),
                    fmt17(v.value.im),
                    v.provenance.as_str(),
                    fmt17(v.error_bound)
                ),
            }
        }
        Command::MellinEven { l_max } => {
            let mut rows = Vec::new();
            for l in 1..=*l_max {
                let m = mellin_even(&spec, l, tol)?;
                let bound = mellin_even_bound(l).to_f64();
                rows.push((l, m, bound));
            }
            match fmt(Format::Csv) {
                Format::Csv => {
                    let mut s = String::from("l,M_re,M_im,bound,satisfied\n");
                    for (l, m, b) in &rows {
                        let ok = m.value.norm() <= *b;
                        s.push_str(&format!("{l},{},{},{},{ok}\n", fmt17(m.value.re), fmt17(m.value.im), fmt17(*b)));
                    }
                    s
                }
                Format::Json => json_text(&Value::Array(
                    rows.iter()
                        .map(|(l, m, b)| {
                            json!({"l": l, "M": m.to_json(), "bound": b, "satisfied": m.value.norm() <= *b})
                        })
                        .collect(),
                )),
            }
        }
        Command::Fourier { n_max, method, order } => {
            let method = match (method, order) {
                (FourierMethod::Direct, _) => Method::Direct,
                (FourierMethod::Cosine, _) => Method::CosineSeries,
                (FourierMethod::EvenMellin, Some(_)) => Method::EvenMellinExactL,
                (FourierMethod::EvenMellin, None) => Method::EvenMellinLimit,
            };
            let coeffs = fourier::coefficients(&spec, *n_max, method, tol, *order)?;
            match fmt(Format::Csv) {
                Format::Csv => fourier::to_csv(&coeffs),
                Format::Json => json_text(&Value::Array(coeffs.iter().map(|c| c.to_json()).collect())),
            }
        }
        Command::RoutesCheck { n_max } => {
            let rows = fourier::routes_check(&spec, *n_max, tol)?;
            let max_gap = rows.iter().map(|r| r.max_gap()).fold(0.0, f64::max);
            match fmt(Format::Csv) {
                Format::Csv => fourier::routes_csv(&rows),
                Format::Json => json_text(&json!({
                    "max_gap": max_gap,
                    "all_agree": rows.iter().all(|r| r.agree()),
                    "rows": rows.iter().map(|r| json!({
                        "n": r.n,
                        "direct": r.direct.to_json(),
                        "cosine_series": r.cosine.to_json(),
                        "even_mellin": r.even_mellin.as_ref().map(|c| c.to_json()),
                        "max_gap": r.max_gap(),
                        "agree": r.agree(),
                    })).collect::<Vec<_>>(),
                })),
            }
        }
        Command::Norm { n_max } => {
            let c = norm_crosscheck(&spec, *n_max, tol)?;
            match fmt(Format::Json) {
                Format::Json => json_text(&c.to_json()),
                Format::Csv => {
                    let p = &c.parseval;
                    format!(
                        "n_max,partial,tail_estimate,norm_lo,norm_hi,oracle,gap\n{},{},{},{},{},{},{}\n",
                        p.n_max,
                        fmt17(p.partial_norm_sq),
                        fmt17(p.tail_estimate),
                        fmt17(p.norm_lo),
                        fmt17(p.norm_hi),
                        fmt17(c.oracle),
                        fmt17(c.gap)
                    )
                }
            }
        }
        Command::Reconstruct { s, n_max } => {
            let s = parse_s(s)?;
            let r = mellin_reconstruct_many(&spec, &[s], *n_max, tol, DEFAULT_REPORT_TOL)?.remove(0);
            if let Some(w) = &r.warning {
                eprintln!("warning: {w}");
            }
            match fmt(Format::Csv) {
                Format::Csv => {
                    eprintln!(
                        "M({}) ~ {} + {}i (spread {:.3e}, tail model {:.3e})",
                        s,
                        fmt17(r.value.value.re),
                        fmt17(r.value.value.im),
                        r.spread,
                        r.tail_model
                    );
                    r.to_csv()
                }
                Format::Json => json_text(&json!({
                    "value": r.value.to_json(),
                    "spread": r.spread,
                    "tail_model": r.tail_model,
                    "warning": r.warning,
                    "terms": r.terms.iter().map(|t| json!({
                        "n": t.n,
                        "term": [t.term.re, t.term.im],
                        "partial": [t.partial.re, t.partial.im],
                    })).collect::<Vec<_>>(),
                })),
            }
        }
        Command::Optimize {
            thetas,
            n_max,
            gram_cache,
        } => {
            let text = if thetas.trim_start().starts_with("unit:") {
                thetas.clone()
            } else {
                fs::read_to_string(thetas).map_err(|e| Failure::Io(format!("{thetas}: {e}")))?
            };
            let thetas = optimizer::parse_thetas(&text)?;
            let gram = cached_gram(&thetas, tol, gram_cache.as_deref())?;
            let optimum = optimize_gram(&gram)?;
            let spec = optimum.spec()?;
            let numeric = beurling::beurling::norm_numeric(&spec, tol)?;
            let parseval = beurling::parseval::norm_via_parseval(&spec, *n_max, tol)?;
            let q = optimum.norm_sq;
            let p = parseval.norm * parseval.norm;
            if !spec.lemma_hypotheses() {
                eprintln!("note: optimal spec has |a_k| > 1; the even-Mellin route does not apply to it");
            }
            match fmt(Format::Json) {
                Format::Json => json_text(&json!({
                    "optimum": optimum.to_json()?,
                    "norm_sq": {"quadratic": q, "numeric": numeric.norm_sq, "parseval": p},
                    "gaps": {
                        "quadratic_numeric": (q - numeric.norm_sq).abs(),
                        "quadratic_parseval": (q - p).abs(),
                        "numeric_parseval": (numeric.norm_sq - p).abs(),
                    },
                    "parseval_tail": parseval.tail_estimate,
                })),
                Format::Csv => {
                    let mut s = String::from("theta,a\n");
                    for (t, a) in gram.thetas.iter().zip(&optimum.a) {
                        s.push_str(&format!("{},{}\n", fmt17(t.value()), fmt17(*a)));
                    }
                    s
                }
            }
        }
        Command::Sweep { unit_n_from, unit_n_to } => {
            let rows = optimizer::sweep(*unit_n_from, *unit_n_to, tol)?;
            match fmt(Format::Csv) {
                Format::Csv => optimizer::sweep_csv(&rows),
                Format::Json => json_text(&Value::Array(
                    rows.iter()
                        .map(|(n, q)| json!({"N": n, "norm_sq": q, "norm": q.sqrt()}))
                        .collect(),
                )),
            }
        }
    };
    Ok(out)
}

fn cached_gram(thetas: &[beurling::beurling::Theta], tol: f64, cache: Option<&Path>) -> Result<GramSystem> {
    if let Some(path) = cache {
        if path.exists() {
            let text = fs::read_to_string(path)?;
            let v: Value = serde_json::from_str(&text)
                .map_err(|e| Failure::Lib(Error::Parse(format!("{}: {e}", path.display()))))?;
            let g = GramSystem::from_json(&v)?;
            let same =
                g.thetas.len() == thetas.len() && g.thetas.iter().zip(thetas).all(|(a, b)| a.exact() == b.exact());
            if same && g.build_tol <= tol {
                return Ok(g);
            }
            eprintln!(
                "note: {} does not match these thetas/tolerance; rebuilding",
                path.display()
            );
        }
    }
    let g = build_gram(thetas, tol)?;
    if let Some(path) = cache {
        fs::write(path, json_text(&g.to_json()))?;
    }
    Ok(g)
}

fn exit_code(e: &Failure) -> u8 {
    match e {
        Failure::Io(_) => 1,
        Failure::Lib(Error::ToleranceNotMet { .. }) => 3,
        Failure::Lib(_) => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(k) = cli.threads {
        if k == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let result = run(&cli).and_then(|text| {
        match &cli.out {
            Some(p) => fs::write(p, text)?,
            None => std::io::stdout().lock().write_all(text.as_bytes())?,
        }
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                Failure::Io(m) => eprintln!("error: {m}"),
                Failure::Lib(err) => eprintln!("error: {err}"),
            }
            ExitCode::from(exit_code(&e))
        }
    }
}
