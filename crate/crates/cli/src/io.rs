//! JSON conventions, input parsing and the CLI error type.
//!
//! Complex numbers travel as `[re, im]`, a plain number is read as a real
//! complex number, and the point at infinity of the sphere is `"inf"`.

use std::fmt;
use std::path::Path;

use ellipton_core::{c64, Complex64, Error, MajoranaQuartic, SpherePoint};
use serde::Deserialize;
use serde_json::{json, Value};

pub const SCHEMA: u32 = 1;

/// A failure with its exit code and machine-readable tag.
#[derive(Debug)]
pub struct CliError {
    pub kind: &'static str,
    pub message: String,
    pub code: i32,
    pub detail: Option<Value>,
}

impl CliError {
    pub fn parse(message: impl Into<String>) -> Self {
        Self::user("parse", message)
    }

    pub fn user(kind: &'static str, message: impl Into<String>) -> Self {
        Self {
            kind,
            message: message.into(),
            code: 2,
            detail: None,
        }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self {
            kind: "internal",
            message: message.into(),
            code: 1,
            detail: None,
        }
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({ "schema": SCHEMA, "error": self.kind, "message": self.message });
        if let Some(d) = &self.detail {
            v["detail"] = d.clone();
        }
        v
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let detail = match &e {
            Error::NonConvergence {
                iterations,
                residual,
                trace,
            } => Some(json!({
                "iterations": iterations,
                "residual": num(*residual),
                "trace": trace.iter().map(|&r| num(r)).collect::<Vec<_>>(),
            })),
            Error::Pole { re, im } => Some(json!({ "at": [num(*re), num(*im)] })),
            _ => None,
        };
        Self {
            kind: e.kind(),
            message: e.to_string(),
            code: 2,
            detail,
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::parse(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Finite numbers as themselves (−0 as 0), ±∞ as `"inf"`/`"-inf"`, NaN as `null`.
pub fn num(x: f64) -> Value {
    if x == 0.0 {
        json!(0.0)
    } else if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        Value::Null
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

pub fn cx(z: Complex64) -> Value {
    if z.re.is_infinite() || z.im.is_infinite() {
        json!("inf")
    } else {
        json!([num(z.re), num(z.im)])
    }
}

pub fn cxs(zs: &[Complex64]) -> Value {
    Value::Array(zs.iter().map(|&z| cx(z)).collect())
}

pub fn sphere(p: &SpherePoint) -> Value {
    match p.finite() {
        Some(z) => cx(z),
        None => json!("inf"),
    }
}

/// A complex number as read from JSON: `1.5`, `[1.5, -2]` or `"inf"`.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum Cx {
    Real(f64),
    Pair([f64; 2]),
    Tag(InfTag),
}

#[derive(Debug, Clone, Copy, Deserialize)]
pub enum InfTag {
    #[serde(rename = "inf")]
    Inf,
}

impl Cx {
    pub fn finite(self) -> CliResult<Complex64> {
        match self {
            Cx::Real(x) => Ok(c64(x, 0.0)),
            Cx::Pair([re, im]) => Ok(c64(re, im)),
            Cx::Tag(_) => Err(CliError::parse("expected a finite complex number, got \"inf\"")),
        }
    }

    pub fn sphere(self) -> SpherePoint {
        match self {
            Cx::Real(x) => SpherePoint::new(c64(x, 0.0)),
            Cx::Pair([re, im]) => SpherePoint::new(c64(re, im)),
            Cx::Tag(_) => SpherePoint::Infinity,
        }
    }
}

/// `"re,im"`, `"re"` or `"inf"` from the command line.
pub fn parse_cx_arg(s: &str) -> std::result::Result<Cx, String> {
    let s = s.trim();
    if s == "inf" {
        return Ok(Cx::Tag(InfTag::Inf));
    }
    let parts: Vec<&str> = s.split(',').collect();
    let f = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    match parts.as_slice() {
        [re] => Ok(Cx::Real(f(re)?)),
        [re, im] => Ok(Cx::Pair([f(re)?, f(im)?])),
        _ => Err(format!("expected re,im but got {s:?}")),
    }
}

/// A multiplet given by its roots or by its coefficients.
///
/// Coefficients win when both are present, so a `curve report` fed back in
/// reproduces itself exactly.
#[derive(Debug, Clone, Deserialize)]
pub struct MultipletSpec {
    pub rho: Option<f64>,
    pub alpha: Option<Cx>,
    pub beta: Option<Cx>,
    pub z: Option<Cx>,
    pub v: Option<Cx>,
    pub x: Option<f64>,
}

impl MultipletSpec {
    pub fn build(&self) -> CliResult<MajoranaQuartic> {
        if let (Some(z), Some(v), Some(x)) = (self.z, self.v, self.x) {
            return Ok(MajoranaQuartic::from_coefficients(z.finite()?, v.finite()?, x)?);
        }
        match (self.rho, self.alpha, self.beta) {
            (Some(rho), Some(a), Some(b)) => Ok(MajoranaQuartic::from_roots(rho, a.finite()?, b.finite()?)?),
            _ => Err(CliError::parse("a multiplet needs {z, v, x} or {rho, alpha, beta}")),
        }
    }
}

pub fn multiplet_json(m: &MajoranaQuartic) -> Value {
    json!({
        "z": cx(m.z),
        "v": cx(m.v),
        "x": num(m.x),
    })
}

pub fn read_input(path: &Path) -> CliResult<(Vec<u8>, Value)> {
    let bytes = std::fs::read(path).map_err(|e| CliError::user("io", format!("{}: {e}", path.display())))?;
    let value = serde_json::from_slice(&bytes)?;
    Ok((bytes, value))
}

pub fn from_value<T: serde::de::DeserializeOwned>(v: Value) -> CliResult<T> {
    Ok(serde_json::from_value(v)?)
}

pub fn pretty(v: &Value) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(v).expect("JSON values serialise");
    out.push(b'\n');
    out
}
