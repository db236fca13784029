//! Report serialization, run configuration, and the content-addressed
//! result cache.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const SCHEMA: &str = "weightred/1";
/// Bumping this invalidates every existing cache entry.
pub const CACHE_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<OutputFormat> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "text" => Ok(OutputFormat::Text),
            other => Err(Error::BadConfig(format!("unknown format {other:?}"))),
        }
    }
}

/// Everything needed to reproduce a run, echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub p: u32,
    pub strict: bool,
    pub discriminant: Option<i64>,
    pub seed: u64,
    pub parallel: u32,
    pub cache_dir: Option<String>,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> RunConfig {
        RunConfig {
            p: 5,
            strict: false,
            discriminant: None,
            seed: 0,
            parallel: 1,
            cache_dir: None,
            format: OutputFormat::Json,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
    Error,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultEntry {
    pub name: String,
    pub status: Status,
    pub detail: serde_json::Value,
}

impl ResultEntry {
    pub fn new(name: impl Into<String>, status: Status, detail: serde_json::Value) -> ResultEntry {
        ResultEntry {
            name: name.into(),
            status,
            detail,
        }
    }

    pub fn check(name: impl Into<String>, ok: bool, detail: serde_json::Value) -> ResultEntry {
        ResultEntry::new(name, if ok { Status::Pass } else { Status::Fail }, detail)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub command: String,
    pub config: RunConfig,
    pub results: Vec<ResultEntry>,
    pub summary: Summary,
    pub cache_hit: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

impl Report {
    pub fn new(command: impl Into<String>, config: RunConfig, results: Vec<ResultEntry>) -> Report {
        let mut summary = Summary::default();
        for r in &results {
            match r.status {
                Status::Pass => summary.passed += 1,
                Status::Fail | Status::Error => summary.failed += 1,
                Status::Skip => summary.skipped += 1,
            }
        }
        Report {
            schema: SCHEMA.to_string(),
            command: command.into(),
            config,
            results,
            summary,
            cache_hit: false,
            timing_ms: None,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Flat projection for spreadsheets: one row per result entry.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("command,name,status,detail\n");
        for r in &self.results {
            let status = match r.status {
                Status::Pass => "pass",
                Status::Fail => "fail",
                Status::Skip => "skip",
                Status::Error => "error",
            };
            let detail = r.detail.to_string().replace('"', "\"\"");
            out.push_str(&format!(
                "{},{},{},\"{}\"\n",
                self.command, r.name, status, detail
            ));
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.command);
        for r in &self.results {
            let status = match r.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skip => "SKIP",
                Status::Error => "ERROR",
            };
            out.push_str(&format!("  [{status}] {}: {}\n", r.name, r.detail));
        }
        out.push_str(&format!(
            "summary: {} passed, {} failed, {} skipped\n",
            self.summary.passed, self.summary.failed, self.summary.skipped
        ));
        out
    }
}

/// Parses a simple key=value configuration file. Lines starting with '#'
/// and blank lines are skipped; later keys override earlier ones.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::BadConfig(format!("line {}: missing '='", lineno + 1)))?;
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() {
            return Err(Error::BadConfig(format!("line {}: empty key", lineno + 1)));
        }
        out.push((key.to_string(), value.to_string()));
    }
    Ok(out)
}

/// Applies config-file keys onto a RunConfig. Unknown keys are rejected
/// so typos fail loudly.
pub fn apply_config(cfg: &mut RunConfig, pairs: &[(String, String)]) -> Result<()> {
    for (k, v) in pairs {
        match k.as_str() {
            "p" => cfg.p = v.parse().map_err(|_| bad(k, v))?,
            "strict" => cfg.strict = parse_bool(v).ok_or_else(|| bad(k, v))?,
            "discriminant" => cfg.discriminant = Some(v.parse().map_err(|_| bad(k, v))?),
            "seed" => cfg.seed = v.parse().map_err(|_| bad(k, v))?,
            "parallel" => cfg.parallel = v.parse().map_err(|_| bad(k, v))?,
            "cache_dir" => cfg.cache_dir = Some(v.to_string()),
            "format" => cfg.format = v.parse()?,
            other => {
                return Err(Error::BadConfig(format!("unknown key {other:?}")));
            }
        }
    }
    Ok(())
}

fn parse_bool(v: &str) -> Option<bool> {
    match v {
        "true" | "1" | "yes" => Some(true),
        "false" | "0" | "no" => Some(false),
        _ => None,
    }
}

fn bad(k: &str, v: &str) -> Error {
    Error::BadConfig(format!("bad value {v:?} for key {k:?}"))
}

/// Identity of a cacheable computation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheKey {
    pub p: u32,
    pub d: u32,
    pub e: u32,
    pub method: String,
    pub seed: u64,
    pub version: u32,
}

impl CacheKey {
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("key serializes");
        hex(&Sha256::digest(&bytes))
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Serialize, Deserialize)]
struct CacheEntry {
    version: u32,
    key: CacheKey,
    payload_hash: String,
    payload: serde_json::Value,
}

/// On-disk content-addressed cache: one JSON file per key hash, written
/// atomically via temp-file rename so concurrent writers of the same key
/// cannot interleave; reads take no lock.
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn open(dir: &Path) -> Result<Cache> {
        std::fs::create_dir_all(dir)?;
        Ok(Cache {
            dir: dir.to_path_buf(),
        })
    }

    /// Resolution order: explicit dir, then WEIGHTRED_CACHE. None means
    /// caching stays disabled for the run.
    pub fn resolve(explicit: Option<&str>) -> Option<PathBuf> {
        if let Some(d) = explicit {
            return Some(PathBuf::from(d));
        }
        std::env::var_os("WEIGHTRED_CACHE").map(PathBuf::from)
    }

    fn path_for(&self, key: &CacheKey) -> PathBuf {
        self.dir.join(format!("{}.json", key.hash()))
    }

    /// Ok(None) on miss or stale version; CacheCorrupt when the stored
    /// payload fails its own hash or does not parse.
    pub fn get(&self, key: &CacheKey) -> Result<Option<serde_json::Value>> {
        let path = self.path_for(key);
        let bytes = match std::fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let entry: CacheEntry = serde_json::from_slice(&bytes)
            .map_err(|e| Error::CacheCorrupt(format!("{}: {e}", path.display())))?;
        if entry.version != CACHE_VERSION {
            return Ok(None);
        }
        if entry.key != *key {
            return Err(Error::CacheCorrupt(format!(
                "{}: key mismatch",
                path.display()
            )));
        }
        let got = hex(&Sha256::digest(entry.payload.to_string().as_bytes()));
        if got != entry.payload_hash {
            return Err(Error::CacheCorrupt(format!(
                "{}: payload hash mismatch",
                path.display()
            )));
        }
        Ok(Some(entry.payload))
    }

    pub fn put(&self, key: &CacheKey, payload: &serde_json::Value) -> Result<()> {
        let entry = CacheEntry {
            version: CACHE_VERSION,
            key: key.clone(),
            payload_hash: hex(&Sha256::digest(payload.to_string().as_bytes())),
            payload: payload.clone(),
        };
        let final_path = self.path_for(key);
        let tmp = self.dir.join(format!(
            ".tmp-{}-{}",
            std::process::id(),
            key.hash()
        ));
        {
            let mut f = std::fs::File::create(&tmp)?;
            f.write_all(&serde_json::to_vec_pretty(&entry)?)?;
            f.sync_all()?;
        }
        std::fs::rename(&tmp, &final_path)?;
        Ok(())
    }

    /// Discards a corrupt entry so the recomputed value can replace it.
    pub fn evict(&self, key: &CacheKey) {
        let _ = std::fs::remove_file(self.path_for(key));
    }
}
