//! wasm-bindgen wrappers for the demo page in `www/`. Every export takes and
//! returns JSON strings; errors come back as `{"error": "..."}`.

use beurling::beurling::{eval_F, norm_numeric};
use beurling::fourier::{coefficients, Method};
use beurling::optimizer::{optimize_coeffs, unit_family};
use beurling::BeurlingSpec;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

const MAX_SAMPLES: usize = 20_000;
const MAX_COEFFS: u64 = 2_000;
const MAX_UNIT_N: usize = 40;

fn wrap(r: Result<Value, String>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

fn parse_spec(spec_json: &str) -> Result<BeurlingSpec, String> {
    if spec_json.trim().is_empty() {
        return Ok(BeurlingSpec::empty());
    }
    BeurlingSpec::from_json_str(spec_json).map_err(|e| e.to_string())
}

/// `samples` equally spaced points of Re F on (0, 1], plus the quadrature norm.
pub fn sample_curve(spec_json: &str, samples: usize) -> Result<Value, String> {
    let spec = parse_spec(spec_json)?;
    let samples = samples.clamp(2, MAX_SAMPLES);
    let mut xs = Vec::with_capacity(samples);
    let mut ys = Vec::with_capacity(samples);
    for i in 1..=samples {
        let x = i as f64 / samples as f64;
        let v = eval_F(&spec, x).map_err(|e| e.to_string())?;
        xs.push(x);
        ys.push(v.re);
    }
    let norm = norm_numeric(&spec, 1e-8).map_err(|e| e.to_string())?;
    Ok(json!({
        "x": xs,
        "F": ys,
        "norm": norm.norm_sq.sqrt(),
        "admissible": spec.is_admissible(),
    }))
}

/// `|c(n)|` for `n <= n_max`: the cosine series when the spec is admissible,
/// direct quadrature otherwise.
pub fn spectrum(spec_json: &str, n_max: u64) -> Result<Value, String> {
    let spec = parse_spec(spec_json)?;
    let n_max = n_max.clamp(1, MAX_COEFFS);
    let method = if spec.is_admissible() {
        Method::CosineSeries
    } else {
        Method::Direct
    };
    let cs = coefficients(&spec, n_max, method, 1e-10, None).map_err(|e| e.to_string())?;
    Ok(json!({
        "method": method.as_str(),
        "n": cs.iter().map(|c| c.n).collect::<Vec<_>>(),
        "abs": cs.iter().map(|c| c.value.norm()).collect::<Vec<_>>(),
        "re": cs.iter().map(|c| c.value.re).collect::<Vec<_>>(),
    }))
}

/// Norm-minimising coefficients for `theta_k = 1/k`, `k <= n`, with the
/// resulting spec so the page can feed it back into the other two views.
pub fn optimize_unit(n: usize) -> Result<Value, String> {
    if n == 0 || n > MAX_UNIT_N {
        return Err(format!("N must be between 1 and {MAX_UNIT_N}"));
    }
    let opt = optimize_coeffs(&unit_family(n), 1e-9).map_err(|e| e.to_string())?;
    let spec = opt.spec().map_err(|e| e.to_string())?;
    Ok(json!({
        "a": opt.a,
        "norm_sq": opt.norm_sq,
        "norm": opt.norm_sq.sqrt(),
        "spec": spec.to_json_value(),
    }))
}

#[wasm_bindgen(js_name = sampleCurve)]
pub fn sample_curve_js(spec_json: &str, samples: usize) -> String {
    wrap(sample_curve(spec_json, samples))
}

#[wasm_bindgen(js_name = spectrum)]
pub fn spectrum_js(spec_json: &str, n_max: u32) -> String {
    wrap(spectrum(spec_json, n_max as u64))
}

#[wasm_bindgen(js_name = optimizeUnit)]
pub fn optimize_unit_js(n: usize) -> String {
    wrap(optimize_unit(n))
}
