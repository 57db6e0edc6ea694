//! Tolerance profiles and run manifests.

use ellipton_core::tolerances::{CLOSURE, INCIDENCE};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::io::{CliError, CliResult, SCHEMA};

pub const PROFILE_VAR: &str = "ELLIPTON_TOL_PROFILE";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub profile: &'static str,
    pub closure: f64,
    pub incidence: f64,
}

impl Tolerances {
    /// `default` (1e-8 closure, 1e-10 incidence), `strict` or `loose`.
    pub fn profile(name: &str) -> CliResult<Self> {
        let (profile, closure, incidence) = match name {
            "" | "default" => ("default", CLOSURE, INCIDENCE),
            "strict" => ("strict", 1e-10, 1e-12),
            "loose" => ("loose", 1e-6, 1e-8),
            other => {
                return Err(CliError::user(
                    "contract",
                    format!("unknown tolerance profile {other:?} (default, strict, loose)"),
                ))
            }
        };
        Ok(Self {
            profile,
            closure,
            incidence,
        })
    }

    /// The profile from the environment, then explicit overrides.
    pub fn resolve(closure: Option<f64>, incidence: Option<f64>) -> CliResult<Self> {
        let name = std::env::var(PROFILE_VAR).unwrap_or_default();
        let mut t = Self::profile(&name)?;
        for (slot, value) in [(&mut t.closure, closure), (&mut t.incidence, incidence)] {
            if let Some(v) = value {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(CliError::user("contract", format!("tolerance {v} must be positive")));
                }
                *slot = v;
            }
        }
        Ok(t)
    }
}

/// Everything that determines a run's output, plus the output digest.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub schema: u32,
    pub subcommand: String,
    pub input_sha256: Option<String>,
    pub output_sha256: String,
    pub tolerances: Tolerances,
    pub seed: u64,
    pub version: &'static str,
}

impl RunManifest {
    pub fn new(subcommand: &str, input: Option<&[u8]>, output: &[u8], tolerances: Tolerances, seed: u64) -> Self {
        Self {
            schema: SCHEMA,
            subcommand: subcommand.to_string(),
            input_sha256: input.map(hex_digest),
            output_sha256: hex_digest(output),
            tolerances,
            seed,
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

pub fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_of_empty_input() {
        assert_eq!(
            hex_digest(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }

    #[test]
    fn profiles() {
        let d = Tolerances::profile("default").unwrap();
        assert_eq!((d.closure, d.incidence), (1e-8, 1e-10));
        assert!(Tolerances::profile("strict").unwrap().closure < d.closure);
        assert!(Tolerances::profile("sloppy").is_err());
    }
}
