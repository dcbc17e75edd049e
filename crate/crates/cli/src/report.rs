//! Machine-readable run reports.

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Serialize, Debug, Clone)]
pub struct RunReport {
    pub command: Vec<String>,
    /// SHA-256 over the input files' bytes, in argument order.
    pub inputs_digest: String,
    pub results: serde_json::Value,
    pub failures: Vec<String>,
    pub exit_status: i32,
}

pub fn digest(inputs: &[Vec<u8>]) -> String {
    let mut h = Sha256::new();
    for bytes in inputs {
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(bytes);
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}
