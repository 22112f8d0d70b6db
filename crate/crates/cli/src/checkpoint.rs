//! Per-shard progress files.
//!
//! Plain ASCII, one `key value` pair per line, closed by a SHA-256 of the
//! preceding lines:
//!
//! ```text
//! planecount-checkpoint 1
//! manifest <hex digest>
//! shard <index> <of>
//! range <start> <end>
//! next <first unvisited index>
//! counters <c0> <c1> ...
//! checksum <hex>
//! ```

use std::ops::Range;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::CliError;

pub const CHECKPOINT_VERSION: u32 = 1;
const MAGIC: &str = "planecount-checkpoint";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Checkpoint {
    pub manifest_digest: String,
    pub shard: u32,
    pub of: u32,
    pub range: Range<u64>,
    pub next: u64,
    pub counters: Vec<u64>,
}

impl Checkpoint {
    pub fn is_complete(&self) -> bool {
        self.next >= self.range.end
    }

    pub fn to_text(&self) -> String {
        let counters: Vec<String> = self.counters.iter().map(u64::to_string).collect();
        let body = format!(
            "{MAGIC} {CHECKPOINT_VERSION}\nmanifest {}\nshard {} {}\nrange {} {}\nnext {}\ncounters {}\n",
            self.manifest_digest,
            self.shard,
            self.of,
            self.range.start,
            self.range.end,
            self.next,
            counters.join(" ")
        );
        let sum = hex::encode(Sha256::digest(body.as_bytes()));
        format!("{body}checksum {sum}\n")
    }

    pub fn from_text(text: &str) -> Result<Self, CliError> {
        let bad = |why: &str| CliError::Checkpoint(why.to_string());
        let split = text.rfind("checksum ").ok_or_else(|| bad("missing checksum"))?;
        let (body, tail) = text.split_at(split);
        let sum = tail["checksum ".len()..].trim();
        if hex::encode(Sha256::digest(body.as_bytes())) != sum {
            return Err(bad("checksum mismatch"));
        }
        let mut lines = body.lines();
        let mut field = |key: &str| -> Result<Vec<&str>, CliError> {
            let line = lines.next().ok_or_else(|| bad("truncated"))?;
            let mut parts = line.split(' ');
            if parts.next() != Some(key) {
                return Err(bad(&format!("expected {key}")));
            }
            Ok(parts.filter(|s| !s.is_empty()).collect())
        };
        let num = |s: &str| s.parse::<u64>().map_err(|_| bad("bad number"));
        let head = field(MAGIC)?;
        if head != [CHECKPOINT_VERSION.to_string().as_str()] {
            return Err(bad("unsupported version"));
        }
        let manifest = field("manifest")?;
        let shard = field("shard")?;
        let range = field("range")?;
        let next = field("next")?;
        let counters = field("counters")?;
        if manifest.len() != 1 || shard.len() != 2 || range.len() != 2 || next.len() != 1 {
            return Err(bad("malformed line"));
        }
        Ok(Checkpoint {
            manifest_digest: manifest[0].to_string(),
            shard: num(shard[0])? as u32,
            of: num(shard[1])? as u32,
            range: num(range[0])?..num(range[1])?,
            next: num(next[0])?,
            counters: counters.into_iter().map(num).collect::<Result<_, _>>()?,
        })
    }

    pub fn path(dir: &Path, shard: u32, of: u32) -> PathBuf {
        dir.join(format!("shard-{shard}-of-{of}.ckpt"))
    }

    /// Writes through a temporary file and a rename, so a crash never leaves a torn file.
    pub fn save(&self, dir: &Path) -> Result<(), CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let path = Checkpoint::path(dir, self.shard, self.of);
        let tmp = path.with_extension("ckpt.tmp");
        std::fs::write(&tmp, self.to_text()).map_err(|e| CliError::io(&tmp, e))?;
        std::fs::rename(&tmp, &path).map_err(|e| CliError::io(&path, e))
    }

    /// The saved state for this shard if it exists and belongs to the same
    /// experiment and plan.
    pub fn load_matching(
        dir: &Path,
        digest: &str,
        shard: u32,
        of: u32,
        range: &Range<u64>,
        width: usize,
    ) -> Result<Option<Checkpoint>, CliError> {
        let path = Checkpoint::path(dir, shard, of);
        let text = match std::fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(CliError::io(&path, e)),
        };
        let c = Checkpoint::from_text(&text)?;
        if c.manifest_digest != digest || c.shard != shard || c.of != of || &c.range != range {
            return Err(CliError::Checkpoint(format!(
                "{} belongs to a different experiment or shard plan",
                path.display()
            )));
        }
        if c.counters.len() != width || c.next < range.start || c.next > range.end {
            return Err(CliError::Checkpoint(format!("{} is inconsistent", path.display())));
        }
        Ok(Some(c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Checkpoint {
        Checkpoint {
            manifest_digest: "ab12".into(),
            shard: 1,
            of: 4,
            range: 256..512,
            next: 300,
            counters: vec![0, 5, 17, 0],
        }
    }

    #[test]
    fn text_round_trip() {
        let c = sample();
        assert_eq!(Checkpoint::from_text(&c.to_text()).unwrap(), c);
        assert!(!c.is_complete());
    }

    #[test]
    fn corruption_detected() {
        let text = sample().to_text().replace("next 300", "next 301");
        assert!(Checkpoint::from_text(&text).is_err());
        let text = sample().to_text().replace(&format!("{MAGIC} 1"), &format!("{MAGIC} 9"));
        assert!(Checkpoint::from_text(&text).is_err());
    }

    #[test]
    fn save_and_load() {
        let dir = tempfile::tempdir().unwrap();
        let c = sample();
        c.save(dir.path()).unwrap();
        let back = Checkpoint::load_matching(dir.path(), "ab12", 1, 4, &(256..512), 4).unwrap();
        assert_eq!(back, Some(c));
        assert!(Checkpoint::load_matching(dir.path(), "ff", 1, 4, &(256..512), 4).is_err());
        assert_eq!(Checkpoint::load_matching(dir.path(), "ab12", 2, 4, &(512..768), 4).unwrap(), None);
    }
}
