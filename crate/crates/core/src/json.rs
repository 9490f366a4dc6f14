//! Small helpers shared by the JSON readers and writers.

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::linalg::{format_rational, parse_rational, QMatrix, Rational};

pub fn rat_to_json(r: &Rational) -> Value {
    Value::String(format_rational(r))
}

pub fn rat_from_json(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s).ok_or_else(|| Error::Schema(format!("bad rational {s:?}"))),
        Value::Number(n) => n
            .as_i64()
            .map(crate::linalg::q)
            .ok_or_else(|| Error::Schema(format!("non-integer number {n} (write rationals as \"p/q\")"))),
        other => Err(Error::Schema(format!("expected rational, got {other}"))),
    }
}

pub fn matrix_to_json(m: &QMatrix) -> Value {
    Value::Array((0..m.rows()).map(|r| Value::Array(m.row(r).iter().map(rat_to_json).collect())).collect())
}

/// Reads a list of rows; `rows`/`cols` give the expected shape (needed for empty matrices).
pub fn matrix_from_json(v: &Value, rows: usize, cols: usize) -> Result<QMatrix> {
    let arr = v.as_array().ok_or_else(|| Error::Schema("matrix must be a list of rows".into()))?;
    if arr.len() != rows {
        return Err(Error::Schema(format!("matrix has {} rows, expected {rows}", arr.len())));
    }
    let mut m = QMatrix::zeros(rows, cols);
    for (i, row) in arr.iter().enumerate() {
        let row = row.as_array().ok_or_else(|| Error::Schema("matrix row must be a list".into()))?;
        if row.len() != cols {
            return Err(Error::Schema(format!("matrix row has {} entries, expected {cols}", row.len())));
        }
        for (j, x) in row.iter().enumerate() {
            m.set(i, j, rat_from_json(x)?);
        }
    }
    Ok(m)
}

pub fn get<'a>(obj: &'a Value, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| Error::Schema(format!("missing field {key:?}")))
}

pub fn as_object(v: &Value) -> Result<&Map<String, Value>> {
    v.as_object().ok_or_else(|| Error::Schema(format!("expected object, got {v}")))
}

pub fn as_i64(v: &Value) -> Result<i64> {
    v.as_i64().ok_or_else(|| Error::Schema(format!("expected integer, got {v}")))
}

pub fn as_str(v: &Value) -> Result<&str> {
    v.as_str().ok_or_else(|| Error::Schema(format!("expected string, got {v}")))
}

pub fn parse_key_i64(k: &str) -> Result<i64> {
    k.parse().map_err(|_| Error::Schema(format!("expected integer key, got {k:?}")))
}
