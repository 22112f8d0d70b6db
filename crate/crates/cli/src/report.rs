//! Report documents: a deterministic payload plus run metadata.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use planecount_core::scalar::{format_fixed, format_ratio};
use planecount_core::{FieldDesc, Rational};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::manifest::{Execution, Experiment};
use crate::CliError;

/// Changes whenever the candidate numbering changes.
pub const ENUMERATION_VERSION: &str = "grlex-xyz-base-q-v1";

pub const DECIMALS: u32 = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub payload: Value,
    pub csv: Option<String>,
}

impl Report {
    /// Canonical text of the payload; identical across shard counts and reruns.
    pub fn payload_text(&self) -> String {
        serde_json::to_string_pretty(&self.payload).expect("payloads serialize")
    }

    pub fn payload_digest(&self) -> String {
        hex::encode(Sha256::digest(self.payload_text().as_bytes()))
    }

    /// The full document; only `run` varies between runs.
    pub fn document(&self, execution: &Execution) -> Value {
        let timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        json!({
            "payload": self.payload,
            "run": {
                "timestamp_unix": timestamp,
                "shards": execution.shards,
                "payload_digest": self.payload_digest(),
                "excluded_from_digest": true,
            }
        })
    }

    /// Writes `<out>.json` and, if present, `<out>.csv`; returns the paths.
    pub fn write(&self, out: &Path, execution: &Execution) -> Result<Vec<PathBuf>, CliError> {
        let base = if out.extension().is_some_and(|e| e == "json" || e == "csv") {
            out.with_extension("")
        } else {
            out.to_path_buf()
        };
        if let Some(parent) = base.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
        }
        let mut written = Vec::new();
        let json_path = with_suffix(&base, ".json");
        let text = serde_json::to_string_pretty(&self.document(execution)).expect("documents serialize") + "\n";
        std::fs::write(&json_path, text).map_err(|e| CliError::io(&json_path, e))?;
        written.push(json_path);
        if let Some(csv) = &self.csv {
            let csv_path = with_suffix(&base, ".csv");
            std::fs::write(&csv_path, csv).map_err(|e| CliError::io(&csv_path, e))?;
            written.push(csv_path);
        }
        Ok(written)
    }
}

fn with_suffix(base: &Path, suffix: &str) -> PathBuf {
    let mut s = base.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Fields shared by every payload.
pub fn header(experiment: &Experiment, field: &FieldDesc) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("manifest".into(), serde_json::to_value(experiment).expect("experiments serialize"));
    m.insert("manifest_digest".into(), json!(experiment.digest()));
    m.insert(
        "field".into(),
        json!({
            "spec": field.spec().to_string(),
            "p": field.p(),
            "k": field.k(),
            "q": field.q(),
            "modulus": field.modulus(),
        }),
    );
    m.insert("enumeration_version".into(), json!(ENUMERATION_VERSION));
    m.insert("code_version".into(), json!(env!("CARGO_PKG_VERSION")));
    m
}

/// `{"exact": "num/den", "decimal": "0.123..."}`.
pub fn rational(r: &Rational) -> Value {
    json!({ "exact": format_ratio(r), "decimal": format_fixed(r, DECIMALS) })
}

pub fn fixed(r: &Rational) -> String {
    format_fixed(r, DECIMALS)
}

/// Renders a float with a fixed number of decimals.
pub fn float(x: f64) -> String {
    format!("{x:.prec$}", prec = DECIMALS as usize)
}

pub fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out
}
