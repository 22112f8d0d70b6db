//! Experiment manifests and their digests.

use std::path::{Path, PathBuf};

use planecount_core::sieve::{PointConstraint, ZConfig};
use planecount_core::stats::{Mode, DEFAULT_BUDGET};
use planecount_core::FieldSpec;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

/// Default number of candidates between checkpoint writes.
pub const DEFAULT_CHECKPOINT_EVERY: u64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Distribution,
    Moments,
    SieveVerify,
    SmoothCrosscheck,
    PropositionExact,
    Bounds,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum StrategySpec {
    Exhaustive {
        #[serde(default = "default_budget")]
        budget: u64,
    },
    Sample { n: u64, seed: u64 },
}

fn default_budget() -> u64 {
    DEFAULT_BUDGET
}

impl Default for StrategySpec {
    fn default() -> Self {
        StrategySpec::Exhaustive { budget: DEFAULT_BUDGET }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SieveSpec {
    /// Jet scheme text, see [`ZConfig::parse`].
    pub z: String,
    /// One constraint for every point, or a single one applied to all.
    pub target: Vec<PointConstraint>,
    pub r: u32,
    /// Largest degree searched for the surjectivity threshold.
    pub max_degree: u32,
}

impl Default for SieveSpec {
    fn default() -> Self {
        SieveSpec {
            z: "none".to_string(),
            target: Vec::new(),
            r: 0,
            max_degree: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerance {
    /// Normal quantile for sampled confidence half-widths.
    pub confidence_z: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            confidence_z: planecount_core::stats::Z_99,
        }
    }
}

/// Everything that determines the result. Its digest is embedded in every output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Experiment {
    #[serde(with = "field_text")]
    pub field: FieldSpec,
    pub degree: u32,
    pub kind: Kind,
    #[serde(default = "default_mode")]
    pub mode: Mode,
    #[serde(default)]
    pub strategy: StrategySpec,
    #[serde(default)]
    pub sieve: SieveSpec,
    #[serde(default = "default_moments")]
    pub moments_k: u32,
    /// Extension degree bound for the singular-point scan; `(d-1)^2` when absent.
    #[serde(default)]
    pub oracle_max_e: Option<u32>,
    #[serde(default = "default_r_max")]
    pub r_max: u32,
    #[serde(default)]
    pub tolerance: Tolerance,
}

fn default_mode() -> Mode {
    Mode::Smooth
}

fn default_moments() -> u32 {
    4
}

fn default_r_max() -> u32 {
    4
}

/// How a run is carried out; none of it changes the payload.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Execution {
    pub shards: u32,
    pub out: Option<PathBuf>,
    pub checkpoint_dir: Option<PathBuf>,
    pub checkpoint_every: u64,
    pub resume: bool,
}

impl Default for Execution {
    fn default() -> Self {
        Execution {
            shards: 1,
            out: None,
            checkpoint_dir: None,
            checkpoint_every: DEFAULT_CHECKPOINT_EVERY,
            resume: false,
        }
    }
}

impl Execution {
    /// Explicit checkpoint directory, else `<out>.ckpt` next to the report.
    pub fn checkpoint_path(&self) -> Option<PathBuf> {
        self.checkpoint_dir.clone().or_else(|| {
            self.out.as_ref().map(|o| {
                let mut s = o.as_os_str().to_owned();
                s.push(".ckpt");
                PathBuf::from(s)
            })
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub experiment: Experiment,
    #[serde(default)]
    pub execution: Execution,
}

mod field_text {
    use planecount_core::FieldSpec;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(f: &FieldSpec, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&f.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<FieldSpec, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

impl Experiment {
    pub fn new(field: FieldSpec, degree: u32, kind: Kind) -> Self {
        Experiment {
            field,
            degree,
            kind,
            mode: default_mode(),
            strategy: StrategySpec::default(),
            sieve: SieveSpec::default(),
            moments_k: default_moments(),
            oracle_max_e: None,
            r_max: default_r_max(),
            tolerance: Tolerance::default(),
        }
    }

    /// Canonical JSON text, the input of the digest.
    pub fn canonical(&self) -> String {
        serde_json::to_string(self).expect("experiments serialize")
    }

    /// Hex SHA-256 of the canonical text.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }
}

impl Manifest {
    pub fn new(experiment: Experiment) -> Self {
        Manifest {
            experiment,
            execution: Execution::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let m: Manifest = serde_json::from_str(text).map_err(|e| CliError::InvalidManifest(e.to_string()))?;
        m.validate()?;
        Ok(m)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifests serialize")
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Manifest::from_json(&text)
    }

    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, self.to_json()).map_err(|e| CliError::io(path, e))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::InvalidManifest(msg));
        let e = &self.experiment;
        let field = match e.field.build() {
            Ok(f) => f,
            Err(err) => return bad(err.to_string()),
        };
        if e.degree == 0 {
            return bad("degree must be at least 1".into());
        }
        if self.execution.shards == 0 {
            return bad("shard count must be at least 1".into());
        }
        if self.execution.checkpoint_every == 0 {
            return bad("checkpoint interval must be at least 1".into());
        }
        if let StrategySpec::Sample { n: 0, .. } = e.strategy {
            return bad("sample size must be at least 1".into());
        }
        if e.moments_k == 0 {
            return bad("moment order must be at least 1".into());
        }
        if e.oracle_max_e == Some(0) {
            return bad("oracle extension bound must be at least 1".into());
        }
        if !(e.tolerance.confidence_z.is_finite() && e.tolerance.confidence_z > 0.0) {
            return bad("confidence quantile must be positive".into());
        }
        if e.kind == Kind::SieveVerify {
            let z = ZConfig::parse(&field, &e.sieve.z).map_err(|err| CliError::InvalidManifest(err.to_string()))?;
            let t = e.sieve.target.len();
            if !(t == z.len() || (t <= 1 && !z.is_empty()) || (t == 0 && z.is_empty())) {
                return bad(format!("target lists {t} constraints for {} points", z.len()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Manifest {
        let mut e = Experiment::new(FieldSpec { p: 3, k: 2 }, 4, Kind::Distribution);
        e.strategy = StrategySpec::Sample { n: 1000, seed: 7 };
        e.sieve.z = "[0:0:1]^2".into();
        e.sieve.target = vec![PointConstraint::JetZero];
        let mut m = Manifest::new(e);
        m.execution.shards = 4;
        m.execution.out = Some("out/run".into());
        m
    }

    #[test]
    fn json_round_trip() {
        let m = sample();
        let back = Manifest::from_json(&m.to_json()).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.experiment.digest(), m.experiment.digest());
    }

    #[test]
    fn execution_does_not_change_digest() {
        let a = sample();
        let mut b = sample();
        b.execution.shards = 1;
        b.execution.resume = true;
        assert_eq!(a.experiment.digest(), b.experiment.digest());
        b.experiment.degree = 5;
        assert_ne!(a.experiment.digest(), b.experiment.digest());
    }

    #[test]
    fn defaults_fill_in() {
        let m = Manifest::from_json(r#"{"experiment": {"field": "2^1", "degree": 3, "kind": "distribution"}}"#).unwrap();
        assert_eq!(m.experiment.mode, Mode::Smooth);
        assert_eq!(m.experiment.strategy, StrategySpec::Exhaustive { budget: DEFAULT_BUDGET });
        assert_eq!(m.execution.shards, 1);
        assert_eq!(m.execution.checkpoint_path(), None);
    }

    #[test]
    fn invalid_manifests() {
        for text in [
            r#"{"experiment": {"field": "4^1", "degree": 3, "kind": "distribution"}}"#,
            r#"{"experiment": {"field": "2^1", "degree": 0, "kind": "distribution"}}"#,
            r#"{"experiment": {"field": "2^1", "degree": 3, "kind": "nonsense"}}"#,
            r#"{"experiment": {"field": "2^1", "degree": 3, "kind": "moments", "moments_k": 0}}"#,
            r#"{"experiment": {"field": "2^1", "degree": 3, "kind": "sieve-verify", "sieve": {"z": "[0:0:1]^5"}}}"#,
            r#"{"experiment": {"field": "2^1", "degree": 3, "kind": "distribution"}, "execution": {"shards": 0}}"#,
            "not json",
        ] {
            assert!(matches!(Manifest::from_json(text), Err(CliError::InvalidManifest(_))), "{text}");
        }
    }
}
