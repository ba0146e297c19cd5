//! Shared JSON formats.
//!
//! Matrices: `{"rows":R,"cols":C,"entries":["p/q",...]}` row-major.
//! Tensors: `{"dims":[...],"entries":[...]}`. Entries are exact rationals
//! written as strings; integers omit the `/q`. The writer emits the compact
//! canonical form with a trailing newline, so canonical files round-trip
//! byte for byte.
//!
//! The reader also accepts JSON numbers, decimal strings and unreduced
//! fractions. Each such entry is normalized and reported as a warning.

use log::warn;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::numkit::NonnegFactorization;
use crate::ratlinalg::{RatMatrix, Rational};
use crate::tensor::DenseTensor;

/// A parsed value plus the non-canonical-entry warnings raised on the way.
#[derive(Clone, Debug, PartialEq)]
pub struct Parsed<T> {
    pub value: T,
    pub warnings: Vec<String>,
}

/// Either shared object, as detected from the keys present.
#[derive(Clone, Debug, PartialEq)]
pub enum ExactObject {
    Matrix(RatMatrix),
    Tensor(DenseTensor<Rational>),
}

/// `p` or `p/q` with `q > 0` and `gcd(p, q) = 1`.
pub fn format_rational(v: &Rational) -> String {
    if v.denom().is_one() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

/// Parses `p`, `p/q` or a decimal like `-0.25`. Returns `None` on bad syntax
/// or a zero denominator.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(Rational::new(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let negative = whole.starts_with('-');
        let digits = whole.trim_start_matches(['-', '+']);
        if frac.is_empty() && digits.is_empty()
            || !frac.chars().all(|c| c.is_ascii_digit())
            || !digits.chars().all(|c| c.is_ascii_digit())
        {
            return None;
        }
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let int_part: BigInt = if digits.is_empty() {
            BigInt::zero()
        } else {
            digits.parse().ok()?
        };
        let frac_part: BigInt = if frac.is_empty() {
            BigInt::zero()
        } else {
            frac.parse().ok()?
        };
        let v = Rational::new(int_part * &scale + frac_part, scale);
        return Some(if negative { -v } else { v });
    }
    s.parse::<BigInt>().ok().map(Rational::from_integer)
}

#[derive(Serialize)]
struct MatrixOut {
    rows: usize,
    cols: usize,
    entries: Vec<String>,
}

#[derive(Serialize)]
struct TensorOut<'a> {
    dims: &'a [usize],
    entries: Vec<String>,
}

#[derive(Serialize)]
struct FactorizationOut<'a> {
    order: usize,
    dims: &'a [usize],
    terms: Vec<Vec<Vec<String>>>,
}

fn finish(v: &impl Serialize) -> String {
    let mut out = serde_json::to_string(v).expect("plain data serializes");
    out.push('\n');
    out
}

pub fn matrix_to_json(m: &RatMatrix) -> String {
    finish(&MatrixOut {
        rows: m.rows(),
        cols: m.cols(),
        entries: m.entries().iter().map(format_rational).collect(),
    })
}

pub fn tensor_to_json(t: &DenseTensor<Rational>) -> String {
    finish(&TensorOut {
        dims: t.dims(),
        entries: t.data().iter().map(format_rational).collect(),
    })
}

/// Factorization with exact `"p/q"` entries.
pub fn rational_factorization_to_json(f: &NonnegFactorization<Rational>) -> String {
    let terms: Vec<Vec<Vec<String>>> = f
        .terms
        .iter()
        .map(|t| {
            t.iter()
                .map(|v| v.iter().map(format_rational).collect())
                .collect()
        })
        .collect();
    finish(&FactorizationOut {
        order: f.order(),
        dims: &f.dims,
        terms,
    })
}

pub fn parse_matrix_json(text: &str) -> Result<Parsed<RatMatrix>> {
    let obj = parse_object(text)?;
    parse_matrix_value(text, &obj)
}

pub fn parse_tensor_json(text: &str) -> Result<Parsed<DenseTensor<Rational>>> {
    let obj = parse_object(text)?;
    parse_tensor_value(text, &obj)
}

/// Matrix if `rows` is present, tensor if `dims` is.
pub fn parse_exact_json(text: &str) -> Result<Parsed<ExactObject>> {
    let obj = parse_object(text)?;
    if obj.contains_key("rows") {
        let p = parse_matrix_value(text, &obj)?;
        Ok(Parsed {
            value: ExactObject::Matrix(p.value),
            warnings: p.warnings,
        })
    } else if obj.contains_key("dims") {
        let p = parse_tensor_value(text, &obj)?;
        Ok(Parsed {
            value: ExactObject::Tensor(p.value),
            warnings: p.warnings,
        })
    } else {
        Err(semantic(
            text,
            "{",
            "expected a matrix (\"rows\") or tensor (\"dims\") object",
        ))
    }
}

/// Reads `{"order","dims","terms"}` with exact or decimal entries.
pub fn parse_factorization_json(text: &str) -> Result<Parsed<NonnegFactorization<Rational>>> {
    let obj = parse_object(text)?;
    let dims = usize_list(text, &obj, "dims")?;
    let mut warnings = Vec::new();
    let terms_val = obj
        .get("terms")
        .and_then(Value::as_array)
        .ok_or_else(|| semantic(text, "{", "missing array \"terms\""))?;
    let mut terms = Vec::with_capacity(terms_val.len());
    for term in terms_val {
        let vectors = term
            .as_array()
            .ok_or_else(|| semantic(text, "\"terms\"", "each term must be an array of vectors"))?;
        let mut parsed = Vec::with_capacity(vectors.len());
        for vec in vectors {
            let items = vec
                .as_array()
                .ok_or_else(|| semantic(text, "\"terms\"", "factor vectors must be arrays"))?;
            parsed.push(entries(text, "\"terms\"", items, &mut warnings)?);
        }
        terms.push(parsed);
    }
    if let Some(order) = obj.get("order").and_then(Value::as_u64) {
        if order as usize != dims.len() {
            return Err(semantic(
                text,
                "\"order\"",
                "order does not match dims length",
            ));
        }
    }
    let f = NonnegFactorization::new(dims, terms)
        .map_err(|e| semantic(text, "\"terms\"", &e.to_string()))?;
    Ok(Parsed { value: f, warnings })
}

fn parse_object(text: &str) -> Result<Map<String, Value>> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    match v {
        Value::Object(m) => Ok(m),
        _ => Err(semantic(text, "", "top-level value must be an object")),
    }
}

fn parse_matrix_value(text: &str, obj: &Map<String, Value>) -> Result<Parsed<RatMatrix>> {
    let rows = usize_field(text, obj, "rows")?;
    let cols = usize_field(text, obj, "cols")?;
    let items = obj
        .get("entries")
        .and_then(Value::as_array)
        .ok_or_else(|| semantic(text, "{", "missing array \"entries\""))?;
    if rows.checked_mul(cols) != Some(items.len()) {
        return Err(semantic(
            text,
            "\"entries\"",
            &format!(
                "{rows}×{cols} matrix needs {} entries, found {}",
                rows * cols,
                items.len()
            ),
        ));
    }
    let mut warnings = Vec::new();
    let data = entries(text, "\"entries\"", items, &mut warnings)?;
    let m = RatMatrix::new(rows, cols, data)
        .map_err(|e| semantic(text, "\"entries\"", &e.to_string()))?;
    Ok(Parsed { value: m, warnings })
}

fn parse_tensor_value(
    text: &str,
    obj: &Map<String, Value>,
) -> Result<Parsed<DenseTensor<Rational>>> {
    let dims = usize_list(text, obj, "dims")?;
    let items = obj
        .get("entries")
        .and_then(Value::as_array)
        .ok_or_else(|| semantic(text, "{", "missing array \"entries\""))?;
    let volume = dims.iter().try_fold(1usize, |a, &d| a.checked_mul(d));
    if volume != Some(items.len()) {
        return Err(semantic(
            text,
            "\"entries\"",
            &format!("dims {dims:?} do not match {} entries", items.len()),
        ));
    }
    let mut warnings = Vec::new();
    let data = entries(text, "\"entries\"", items, &mut warnings)?;
    let t =
        DenseTensor::new(dims, data).map_err(|e| semantic(text, "\"entries\"", &e.to_string()))?;
    Ok(Parsed { value: t, warnings })
}

fn entries(
    text: &str,
    anchor: &str,
    items: &[Value],
    warnings: &mut Vec<String>,
) -> Result<Vec<Rational>> {
    items
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let raw = match v {
                Value::String(s) => s.clone(),
                Value::Number(n) => n.to_string(),
                other => {
                    return Err(semantic(
                        text,
                        anchor,
                        &format!("entry {i}: expected a rational, got {other}"),
                    ))
                }
            };
            let q = parse_rational(&raw).ok_or_else(|| {
                semantic(text, anchor, &format!("entry {i}: bad rational {raw:?}"))
            })?;
            let canonical = format_rational(&q);
            if !matches!(v, Value::String(s) if *s == canonical) {
                let msg = format!("non-canonical entry {i}: {v} normalized to \"{canonical}\"");
                warn!("{msg}");
                warnings.push(msg);
            }
            Ok(q)
        })
        .collect()
}

fn usize_field(text: &str, obj: &Map<String, Value>, key: &str) -> Result<usize> {
    obj.get(key)
        .and_then(Value::as_u64)
        .map(|v| v as usize)
        .ok_or_else(|| {
            semantic(
                text,
                "{",
                &format!("\"{key}\" must be a nonnegative integer"),
            )
        })
}

fn usize_list(text: &str, obj: &Map<String, Value>, key: &str) -> Result<Vec<usize>> {
    let anchor = format!("\"{key}\"");
    obj.get(key)
        .and_then(Value::as_array)
        .and_then(|a| {
            a.iter()
                .map(|v| v.as_u64().map(|x| x as usize))
                .collect::<Option<Vec<_>>>()
        })
        .ok_or_else(|| {
            semantic(
                text,
                &anchor,
                &format!("\"{key}\" must be a list of nonnegative integers"),
            )
        })
}

/// Parse error positioned at the first occurrence of `anchor`.
fn semantic(text: &str, anchor: &str, message: &str) -> Error {
    let at = text.find(anchor).unwrap_or(0);
    let before = &text[..at];
    let line = before.matches('\n').count() + 1;
    let column = at - before.rfind('\n').map_or(0, |p| p + 1) + 1;
    Error::Parse {
        line,
        column,
        message: message.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratlinalg::{frac, int};

    #[test]
    fn canonical_matrix_round_trips() {
        let m = RatMatrix::new(2, 2, vec![int(0), frac(1, 2), frac(-3, 4), int(7)]).unwrap();
        let s = matrix_to_json(&m);
        assert_eq!(
            s,
            "{\"rows\":2,\"cols\":2,\"entries\":[\"0\",\"1/2\",\"-3/4\",\"7\"]}\n"
        );
        let back = parse_matrix_json(&s).unwrap();
        assert!(back.warnings.is_empty());
        assert_eq!(matrix_to_json(&back.value), s);
    }

    #[test]
    fn unreduced_entry_is_normalized_with_warning() {
        let p = parse_matrix_json(r#"{"rows":1,"cols":2,"entries":["2/4", 3]}"#).unwrap();
        assert_eq!(p.value.entries(), &[frac(1, 2), int(3)]);
        assert_eq!(p.warnings.len(), 2);
        assert!(p.warnings[0].contains("\"1/2\""));
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("-0.25"), Some(frac(-1, 4)));
        assert_eq!(parse_rational("6/-4"), Some(frac(-3, 2)));
        assert_eq!(parse_rational("12"), Some(int(12)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(parse_rational("."), None);
    }

    #[test]
    fn errors_carry_positions() {
        match parse_matrix_json("{\"rows\": 1,\n \"cols\": }") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        match parse_tensor_json("{\"dims\":[2,2],\n\"entries\":[\"1\",\"2\",\"3\"]}") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 1)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_matrix_json(r#"{"rows":1,"cols":1,"entries":[true]}"#),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn detects_object_kind() {
        let t = DenseTensor::new(vec![2, 1, 2], vec![int(1), int(0), int(0), int(1)]).unwrap();
        let s = tensor_to_json(&t);
        match parse_exact_json(&s).unwrap().value {
            ExactObject::Tensor(back) => assert_eq!(back, t),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn factorization_round_trip() {
        let f = NonnegFactorization::new(
            vec![2, 2],
            vec![vec![vec![int(1), int(0)], vec![int(0), frac(1, 2)]]],
        )
        .unwrap();
        let s = rational_factorization_to_json(&f);
        assert_eq!(
            s,
            "{\"order\":2,\"dims\":[2,2],\"terms\":[[[\"1\",\"0\"],[\"0\",\"1/2\"]]]}\n"
        );
        assert_eq!(parse_factorization_json(&s).unwrap().value, f);
    }
}
