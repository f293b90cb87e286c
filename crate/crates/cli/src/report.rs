use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// JSON record emitted by every command.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    pub tool_version: String,
    /// SHA-256 over every input consumed, in argument order.
    pub inputs_digest: String,
    pub parameters: Value,
    pub results: Value,
    pub seed: Option<u64>,
    /// Seconds since the Unix epoch; the only field allowed to vary between reruns.
    pub timestamp: u64,
}

impl RunReport {
    pub fn new(command: &str, inputs_digest: String, parameters: Value, results: Value, seed: Option<u64>) -> Self {
        let timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Self {
            command: command.to_owned(),
            tool_version: TOOL_VERSION.to_owned(),
            inputs_digest,
            parameters,
            results,
            seed,
            timestamp,
        }
    }

    /// The report without its timestamp, serialized compactly.
    pub fn canonical(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        v.as_object_mut().expect("report is an object").remove("timestamp");
        v.to_string()
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Streaming digest of named inputs. Each entry is length-prefixed so that
/// moving bytes between inputs changes the digest.
#[derive(Default)]
pub struct InputsDigest(Sha256);

impl InputsDigest {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, name: &str, bytes: &[u8]) -> &mut Self {
        for part in [name.as_bytes(), bytes] {
            self.0.update((part.len() as u64).to_le_bytes());
            self.0.update(part);
        }
        self
    }

    pub fn finish(self) -> String {
        hex::encode(self.0.finalize())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}
