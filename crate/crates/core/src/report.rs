//! Canonical JSON reports. Maps are sorted (serde_json's default map is a
//! BTreeMap) and struct fields serialize in declaration order, so a rerun
//! with the same inputs produces byte-identical output.

use crate::error::Result;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::io::Write;

pub fn sha256_hex(text: &str) -> String {
    let mut h = Sha256::new();
    h.update(text.as_bytes());
    let out = h.finalize();
    out.iter().map(|b| format!("{:02x}", b)).collect()
}

#[derive(Serialize, Debug, Default)]
pub struct Inputs {
    pub algebra: Option<String>,
    /// Hash of the algebra source text, so reports pin the exact input.
    pub algebra_sha256: Option<String>,
    pub basis: Option<Vec<String>>,
    pub primes: Option<Vec<u64>>,
    pub max_degree: Option<usize>,
    /// Anything command-specific: automorphism name, kind, samples, ...
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, Value>,
}

#[derive(Serialize, Debug)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Default for Provenance {
    fn default() -> Self {
        Provenance {
            tool: "modlie",
            version: env!("CARGO_PKG_VERSION"),
            seed: None,
        }
    }
}

#[derive(Serialize, Debug)]
pub struct Report {
    pub command: String,
    pub inputs: Inputs,
    pub results: Value,
    /// "PASS", "FAIL", or a command-specific verdict string.
    pub verdict: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    pub provenance: Provenance,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.to_string(),
            inputs: Inputs::default(),
            results: Value::Null,
            verdict: String::new(),
            warnings: Vec::new(),
            provenance: Provenance::default(),
        }
    }

    pub fn set_results<T: Serialize>(&mut self, value: &T) -> Result<()> {
        self.results = serde_json::to_value(value)
            .map_err(|e| crate::Error::Validation(e.to_string()))?;
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Writes to the path, or stdout when none is given.
    pub fn emit(&self, out: Option<&str>) -> Result<()> {
        let text = self.to_json();
        match out {
            Some(path) => std::fs::write(path, text)?,
            None => std::io::stdout().write_all(text.as_bytes())?,
        }
        Ok(())
    }
}
