//! Text, decimal and JSON forms of field elements, points and matrices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use qcf_core::exactfield::{parse_elem, FieldElem, FieldId};
use qcf_core::{ProjPoint, UniMat};
use serde_json::{json, Value};

use crate::CliError;

/// Default number of decimal places.
pub const PLACES: u32 = 6;

/// `x` in the identity embedding, correctly rounded to `places` decimals
/// (ties away from zero).
pub fn decimal(x: &FieldElem, places: u32) -> String {
    let scale = BigRational::from_integer(BigInt::from(10).pow(places));
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let round = |q: &BigRational| -> BigInt {
        let s = q * &scale;
        let r = (s.abs() + &half).floor().to_integer();
        if s.is_negative() {
            -r
        } else {
            r
        }
    };
    let n = match x.as_rational() {
        Some(q) => round(&q),
        None => {
            // an irrational value is never a tie, so the bracket settles
            let mut eps = BigRational::new(BigInt::one(), BigInt::from(10).pow(places + 4));
            loop {
                let (lo, hi) = x.approx(0, &eps);
                let (a, b) = (round(&lo), round(&hi));
                if a == b {
                    break a;
                }
                eps /= BigInt::from(1u64 << 20);
            }
        }
    };
    fixed_point(&n, places)
}

fn fixed_point(n: &BigInt, places: u32) -> String {
    let sign = if n.is_negative() { "-" } else { "" };
    let (q, r) = n.abs().div_rem(&BigInt::from(10).pow(places));
    if places == 0 {
        format!("{sign}{q}")
    } else {
        format!("{sign}{q}.{:0>width$}", r.to_string(), width = places as usize)
    }
}

/// `inf` or the decimal value of a point.
pub fn point_decimal(p: &ProjPoint, places: u32) -> String {
    match p.value() {
        None => "inf".to_string(),
        Some(v) => decimal(&v, places),
    }
}

fn rational_json(q: &BigRational) -> Value {
    json!([q.numer().to_string(), q.denom().to_string()])
}

pub fn elem_json(x: &FieldElem) -> Value {
    json!({ "coords": x.coords().iter().map(rational_json).collect::<Vec<_>>() })
}

fn bad(what: &str) -> CliError {
    CliError::Usage(format!("malformed JSON {what}"))
}

pub fn elem_from_json(v: &Value, field: FieldId) -> Result<FieldElem, CliError> {
    let coords = v.get("coords").and_then(Value::as_array).ok_or_else(|| bad("element"))?;
    if coords.len() != field.degree() {
        return Err(bad("element: wrong number of coordinates"));
    }
    let mut qs = Vec::new();
    for c in coords {
        let pair = c.as_array().filter(|p| p.len() == 2).ok_or_else(|| bad("coordinate"))?;
        let int = |v: &Value| v.as_str().and_then(|s| s.parse::<BigInt>().ok()).ok_or_else(|| bad("integer"));
        let (n, d) = (int(&pair[0])?, int(&pair[1])?);
        if d.is_zero() {
            return Err(bad("coordinate: zero denominator"));
        }
        qs.push(BigRational::new(n, d));
    }
    Ok(FieldElem::from_rationals(field, &qs))
}

/// `"inf"` or the coprime coordinate pair in the element grammar.
pub fn point_json(p: &ProjPoint) -> Value {
    if p.is_infinity() {
        return json!("inf");
    }
    let (a1, a2) = p.coords();
    json!([a1.to_string(), a2.to_string()])
}

pub fn point_from_json(v: &Value, field: FieldId) -> Result<ProjPoint, CliError> {
    if v.as_str() == Some("inf") {
        return Ok(ProjPoint::infinity(field));
    }
    let pair = v.as_array().filter(|p| p.len() == 2).ok_or_else(|| bad("point"))?;
    let elem = |v: &Value| -> Result<FieldElem, CliError> {
        let s = v.as_str().ok_or_else(|| bad("point coordinate"))?;
        Ok(parse_elem(s, field)?)
    };
    Ok(ProjPoint::from_pair(elem(&pair[0])?, elem(&pair[1])?)?)
}

pub fn matrix_json(m: &UniMat) -> Value {
    let [a, b, c, d] = m.entries().map(|e| e.to_string());
    json!({ "a": a, "b": b, "c": c, "d": d })
}

pub fn matrix_from_json(v: &Value, field: FieldId) -> Result<UniMat, CliError> {
    let get = |k: &str| v.get(k).and_then(Value::as_str).ok_or_else(|| bad("matrix"));
    Ok(UniMat::parse(field, [get("a")?, get("b")?, get("c")?, get("d")?])?)
}

/// A finite decimal of an `f64` at the default precision.
pub fn float(x: f64) -> String {
    format!("{x:.prec$}", prec = PLACES as usize)
}
