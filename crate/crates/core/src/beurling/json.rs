//! Spec JSON documents:
//!
//! ```json
//! {"terms": [{"a_re": 1, "a_im": 0, "b": 2, "theta": 0.5}, ...]}
//! ```
//!
//! `a_re`/`a_im` are numbers or exact rational strings such as `"-3/5"`.
//! When `b` is present `theta` is optional and, if given, must equal `1/b`.

use serde_json::{json, Map, Value};

use super::spec::{exactly_f64, parse_rational, BeurlingSpec, Term, Theta};
use crate::error::{Error, Result};
use crate::numerics::Rational;
use num_traits::Zero;

fn field_err(idx: usize, field: &str, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("terms[{idx}].{field}: {msg}"))
}

fn coefficient(obj: &Map<String, Value>, idx: usize, field: &str) -> Result<Rational> {
    match obj.get(field) {
        None | Some(Value::Null) => Ok(Rational::zero()),
        Some(Value::Number(n)) => {
            let f = n
                .as_f64()
                .ok_or_else(|| field_err(idx, field, "not representable as a float"))?;
            Rational::from_float(f).ok_or_else(|| field_err(idx, field, "must be finite"))
        }
        Some(Value::String(s)) => parse_rational(s).map_err(|e| field_err(idx, field, e)),
        Some(other) => Err(field_err(
            idx,
            field,
            format!("expected number or \"p/q\", got {other}"),
        )),
    }
}

fn parse_term(idx: usize, v: &Value) -> Result<Term> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Parse(format!("terms[{idx}]: expected an object")))?;
    let a_re = coefficient(obj, idx, "a_re")?;
    let a_im = coefficient(obj, idx, "a_im")?;
    let theta_field = match obj.get("theta") {
        None | Some(Value::Null) => None,
        Some(Value::Number(n)) => Some(n.as_f64().ok_or_else(|| field_err(idx, "theta", "bad number"))?),
        Some(other) => return Err(field_err(idx, "theta", format!("expected number, got {other}"))),
    };
    let theta = match obj.get("b") {
        None | Some(Value::Null) => {
            let th = theta_field.ok_or_else(|| field_err(idx, "theta", "missing (and no b given)"))?;
            Theta::real(th).map_err(|e| field_err(idx, "theta", e))?
        }
        Some(Value::Number(n)) => {
            let b = n
                .as_u64()
                .filter(|&b| b > 0)
                .ok_or_else(|| field_err(idx, "b", "expected a positive integer"))?;
            let th = Theta::unit(b).map_err(|e| field_err(idx, "b", e))?;
            if let Some(given) = theta_field {
                if given != th.value() {
                    return Err(field_err(idx, "theta", format!("{given} does not equal 1/{b}")));
                }
            }
            th
        }
        Some(other) => return Err(field_err(idx, "b", format!("expected integer or null, got {other}"))),
    };
    Ok(Term::new(a_re, a_im, theta))
}

impl BeurlingSpec {
    pub fn from_json_value(v: &Value) -> Result<Self> {
        let terms = v
            .get("terms")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("missing \"terms\" array".into()))?;
        let terms = terms
            .iter()
            .enumerate()
            .map(|(i, t)| parse_term(i, t))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(terms))
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(s)
            .map_err(|e| Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column())))?;
        Self::from_json_value(&v)
    }

    pub fn to_json_value(&self) -> Value {
        let rat = |r: &Rational| match exactly_f64(r) {
            Some(f) => json!(f),
            None => json!(r.to_string()),
        };
        let terms: Vec<Value> = self
            .terms()
            .iter()
            .map(|t| {
                let (re, im) = t.a_exact();
                json!({
                    "a_re": rat(re),
                    "a_im": rat(im),
                    "b": t.theta().denom(),
                    "theta": t.theta().value(),
                })
            })
            .collect();
        json!({ "terms": terms })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("serializable")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_numbers_and_rationals() {
        let s = BeurlingSpec::from_json_str(
            r#"{"terms":[{"a_re":"3/5","b":2},{"a_re":-0.6,"a_im":0,"b":3,"theta":null},
                {"a_re":"-1/2","b":5,"theta":0.2}]}"#,
        )
        .unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.period(), Some(30));
        // -0.6 is not -3/5 exactly
        assert!(!s.is_admissible());
    }

    #[test]
    fn theta_must_match_b() {
        let e = BeurlingSpec::from_json_str(r#"{"terms":[{"a_re":1,"b":2,"theta":0.3}]}"#).unwrap_err();
        assert!(e.to_string().contains("terms[0].theta"), "{e}");
    }

    #[test]
    fn diagnostics_name_the_field() {
        let cases = [
            (r#"{"terms":[{"a_re":1}]}"#, "terms[0].theta"),
            (
                r#"{"terms":[{"a_re":1,"theta":1},{"a_re":"x","theta":1}]}"#,
                "terms[1].a_re",
            ),
            (r#"{"terms":[{"a_re":1,"b":-2}]}"#, "terms[0].b"),
            (r#"{"terms":[{"a_re":1,"theta":2}]}"#, "terms[0].theta"),
            (r#"{"nope":[]}"#, "terms"),
        ];
        for (doc, needle) in cases {
            let e = BeurlingSpec::from_json_str(doc).unwrap_err();
            assert!(matches!(e, Error::Parse(_)));
            assert!(e.to_string().contains(needle), "{doc}: {e}");
        }
        let e = BeurlingSpec::from_json_str("{\n  \"terms\": [\n   oops").unwrap_err();
        assert!(e.to_string().contains("line 3"), "{e}");
    }

    #[test]
    fn exact_coefficients_survive_roundtrip() {
        let s = BeurlingSpec::from_unit_rationals(&[((3, 5), 2), ((-3, 5), 3), ((-1, 2), 5)]).unwrap();
        assert!(s.is_admissible());
        let back = BeurlingSpec::from_json_str(&s.to_json_string()).unwrap();
        assert_eq!(back, s);
        assert!(back.is_admissible());
    }
}
