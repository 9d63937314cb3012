//! Run-report envelope written by the CLI.
//!
//! The `payload` (and `inputs`) of a report are a pure function of the inputs and
//! the seed; only `wall_time_s` varies between identical runs.

use serde::{Serialize, Serializer};
use sha2::{Digest, Sha256};

pub const TOOL: &str = "blockent";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Serializes non-finite floats as the strings `"inf"`, `"-inf"` and `"nan"`.
pub fn serialize_extended<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else if x.is_nan() {
        s.serialize_str("nan")
    } else if *x > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunInputs {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spec_digest: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(flatten)]
    pub extra: serde_json::Map<String, serde_json::Value>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport<P: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub inputs: RunInputs,
    pub payload: P,
    pub wall_time_s: f64,
}

impl<P: Serialize> RunReport<P> {
    pub fn new(command: &str, inputs: RunInputs, payload: P, wall_time_s: f64) -> Self {
        Self {
            tool: TOOL,
            version: VERSION,
            command: command.to_string(),
            inputs,
            payload,
            wall_time_s,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report types serialize")
    }
}

/// Hex SHA-256 of a byte string.
pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}
