#![allow(dead_code)]

use std::path::PathBuf;

use nalgebra::{DMatrix, DVector};
use plslasso::data::{self, SynthInstance};
use plslasso::numerics::{self, Matrix};
use serde_json::Value;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

/// Centred Gaussian instance with a sparse generating model.
pub fn instance(seed: u64, n: usize, d: usize) -> SynthInstance {
    data::synth_instance(seed, n, d, d.min(5), 0.1).unwrap()
}

pub fn lambda_max(x: &Matrix, y: &[f64]) -> f64 {
    numerics::norm_inf(&x.tr_matvec(y))
}

pub fn to_na(x: &Matrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(x.rows(), x.cols(), x.as_slice())
}

/// Smallest eigenvalue of `Xᵀ(I − μyyᵀ)X`, computed from scratch.
pub fn min_eig_v1(x: &Matrix, y: &[f64], mu: f64) -> f64 {
    let xn = to_na(x);
    let yn = DVector::from_column_slice(y);
    let n = y.len();
    let p = DMatrix::<f64>::identity(n, n) - (&yn * yn.transpose()) * mu;
    let q = xn.transpose() * p * &xn;
    let q = (&q + q.transpose()) * 0.5;
    q.symmetric_eigen().eigenvalues.min()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(p, q)| (p - q).abs())
        .fold(0.0, f64::max)
}

/// Every K-subset `S` with `min_{S}|z| ≥ max_{not S}|z|` is a valid top-K
/// set; ties resolve to the lexicographically smallest such set.
pub fn brute_force_top_k(z: &[f64], k: usize) -> Vec<usize> {
    let d = z.len();
    let mut best: Option<Vec<usize>> = None;
    for mask in 0u32..(1 << d) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let inside: Vec<usize> = (0..d).filter(|j| mask & (1 << j) != 0).collect();
        let lo = inside
            .iter()
            .map(|&j| z[j].abs())
            .fold(f64::INFINITY, f64::min);
        let hi = (0..d)
            .filter(|j| mask & (1 << j) == 0)
            .map(|j| z[j].abs())
            .fold(f64::NEG_INFINITY, f64::max);
        if lo >= hi && best.as_ref().is_none_or(|b| inside < *b) {
            best = Some(inside);
        }
    }
    best.expect("some subset is always valid")
}

/// Checks `value` against the subset of JSON Schema used by the fixtures:
/// `type`, `required`, `properties`, `items` and `enum`.
pub fn validate(value: &Value, schema: &Value, path: &str) -> Result<(), String> {
    if let Some(ty) = schema.get("type") {
        let allowed: Vec<&str> = match ty {
            Value::String(s) => vec![s.as_str()],
            Value::Array(a) => a.iter().filter_map(Value::as_str).collect(),
            _ => return Err(format!("{path}: bad schema type")),
        };
        let ok = allowed.iter().any(|t| match *t {
            "object" => value.is_object(),
            "array" => value.is_array(),
            "string" => value.is_string(),
            "number" => value.is_number(),
            "integer" => value.is_u64() || value.is_i64(),
            "boolean" => value.is_boolean(),
            "null" => value.is_null(),
            _ => false,
        });
        if !ok {
            return Err(format!("{path}: expected {allowed:?}, got {value}"));
        }
    }
    if let Some(Value::Array(options)) = schema.get("enum") {
        if !options.contains(value) {
            return Err(format!("{path}: {value} not in {options:?}"));
        }
    }
    if let (Some(Value::Array(req)), Some(obj)) = (schema.get("required"), value.as_object()) {
        for key in req.iter().filter_map(Value::as_str) {
            if !obj.contains_key(key) {
                return Err(format!("{path}: missing {key}"));
            }
        }
    }
    if let (Some(Value::Object(props)), Some(obj)) = (schema.get("properties"), value.as_object()) {
        for (key, sub) in props {
            if let Some(v) = obj.get(key) {
                validate(v, sub, &format!("{path}.{key}"))?;
            }
        }
    }
    if let (Some(items), Some(arr)) = (schema.get("items"), value.as_array()) {
        for (i, v) in arr.iter().enumerate() {
            validate(v, items, &format!("{path}[{i}]"))?;
        }
    }
    Ok(())
}
