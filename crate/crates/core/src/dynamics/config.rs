//! Flat `key = value` initial-condition files.
//!
//! ```text
//! # two bodies on a circular orbit
//! masses = 1, 1
//! d = 2
//! positions = -0.5 0, 0.5 0
//! velocities = 0 -0.7071067811865476, 0 0.7071067811865476
//! tol = 1e-10
//! t_end = 4.44
//! ```
//!
//! Position and velocity lists are body by body (all coordinates of body 1,
//! then body 2, ...). Commas and whitespace both separate numbers.

use nalgebra::DMatrix;

use super::{BodyState, DynamicsError};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub state: BodyState,
    pub tol: f64,
    pub t_end: f64,
}

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_T_END: f64 = 10.0;

fn field_err(field: &str, msg: impl Into<String>) -> DynamicsError {
    DynamicsError::Config {
        field: field.to_string(),
        msg: msg.into(),
    }
}

fn numbers(field: &str, value: &str) -> Result<Vec<f64>, DynamicsError> {
    value
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| field_err(field, format!("`{t}` is not a finite number")))
        })
        .collect()
}

fn scalar(field: &str, value: &str) -> Result<f64, DynamicsError> {
    match numbers(field, value)?.as_slice() {
        [v] => Ok(*v),
        _ => Err(field_err(field, "expected a single number")),
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig, DynamicsError> {
    let mut masses = None;
    let mut d = None;
    let mut positions = None;
    let mut velocities = None;
    let mut tol = DEFAULT_TOL;
    let mut t_end = DEFAULT_T_END;

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            field_err(&format!("line {}", lineno + 1), "expected `key = value`")
        })?;
        let key = key.trim();
        let value = value.trim();
        match key {
            "masses" => masses = Some(numbers(key, value)?),
            "d" => {
                let v = value
                    .parse::<usize>()
                    .map_err(|_| field_err(key, format!("`{value}` is not a dimension")))?;
                if !(2..=4).contains(&v) {
                    return Err(field_err(key, "dimension must be 2, 3 or 4"));
                }
                d = Some(v);
            }
            "positions" => positions = Some(numbers(key, value)?),
            "velocities" => velocities = Some(numbers(key, value)?),
            "tol" => {
                tol = scalar(key, value)?;
                if tol <= 0.0 {
                    return Err(field_err(key, "must be positive"));
                }
            }
            "t_end" => {
                t_end = scalar(key, value)?;
                if t_end < 0.0 {
                    return Err(field_err(key, "must be nonnegative"));
                }
            }
            other => return Err(field_err(other, "unknown key")),
        }
    }

    let masses = masses.ok_or_else(|| field_err("masses", "missing"))?;
    if masses.len() < 2 {
        return Err(field_err("masses", "need at least two bodies"));
    }
    if let Some((i, m)) = masses.iter().enumerate().find(|(_, &m)| m <= 0.0) {
        return Err(field_err("masses", format!("mass {} is {m}; masses must be positive", i + 1)));
    }
    let d = d.ok_or_else(|| field_err("d", "missing"))?;
    let n = masses.len();
    let positions = positions.ok_or_else(|| field_err("positions", "missing"))?;
    if positions.len() != d * n {
        return Err(field_err(
            "positions",
            format!("expected {} numbers (d * n), got {}", d * n, positions.len()),
        ));
    }
    let velocities = velocities.unwrap_or_else(|| vec![0.0; d * n]);
    if velocities.len() != d * n {
        return Err(field_err(
            "velocities",
            format!("expected {} numbers (d * n), got {}", d * n, velocities.len()),
        ));
    }
    let state = BodyState::new(
        masses,
        DMatrix::from_column_slice(d, n, &positions),
        DMatrix::from_column_slice(d, n, &velocities),
    )
    .map_err(|e| match e {
        DynamicsError::NonPositiveDistance { i, j } => {
            field_err("positions", format!("bodies {i} and {j} coincide"))
        }
        other => other,
    })?;
    Ok(RunConfig { state, tol, t_end })
}
