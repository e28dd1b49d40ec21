//! Report assembly, CSV emission, and the report cache.

use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};
use thermoshift_core::BetaNumber;

pub const SCHEMA: &str = "thermoshift-report/1";

pub fn beta_metadata(beta: &BetaNumber) -> Value {
    let (lo, hi) = beta.enclosure();
    json!({
        "spec": beta.spec_string(),
        "enclosure": [lo.to_string(), hi.to_string()],
        "approx": beta.to_f64(),
    })
}

pub fn build(
    command: &str,
    config: &BTreeMap<String, String>,
    beta: Option<&BetaNumber>,
    seed: u64,
    result: Value,
) -> Value {
    let ts = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    json!({
        "schema": SCHEMA,
        "command": command,
        "config": config,
        "beta": beta.map(beta_metadata),
        "seed": seed,
        "timestamp": ts,
        "result": result,
    })
}

/// Stable key over everything that determines the result.
pub fn cache_key(command: &str, config: &BTreeMap<String, String>) -> String {
    let mut hasher = Sha256::new();
    hasher.update(SCHEMA.as_bytes());
    hasher.update(command.as_bytes());
    for (k, v) in config {
        hasher.update(k.as_bytes());
        hasher.update(b"=");
        hasher.update(v.as_bytes());
        hasher.update(b"\n");
    }
    hex::encode(hasher.finalize())
}

pub fn cache_dir(flag: Option<PathBuf>) -> Option<PathBuf> {
    flag.or_else(|| std::env::var_os("THERMOSHIFT_CACHE").map(PathBuf::from))
}

pub fn cache_load(dir: &Path, key: &str) -> Option<Value> {
    let raw = fs::read_to_string(dir.join(format!("{key}.json"))).ok()?;
    serde_json::from_str(&raw).ok()
}

/// Best-effort store: tmp file + atomic rename, guarded by an advisory
/// lock file so concurrent runs never interleave writes.
pub fn cache_store(dir: &Path, key: &str, report: &Value) {
    if fs::create_dir_all(dir).is_err() {
        return;
    }
    let lock = dir.join(format!("{key}.lock"));
    let guard = fs::OpenOptions::new().write(true).create_new(true).open(&lock);
    if guard.is_err() {
        return;
    }
    let tmp = dir.join(format!("{key}.tmp"));
    if fs::write(&tmp, report.to_string()).is_ok() {
        let _ = fs::rename(&tmp, dir.join(format!("{key}.json")));
    }
    let _ = fs::remove_file(&lock);
}

pub fn write_csv(path: &Path, header: &str, rows: &[(String, String)]) -> std::io::Result<()> {
    let mut out = String::from(header);
    out.push('\n');
    for (a, b) in rows {
        out.push_str(a);
        out.push(',');
        out.push_str(b);
        out.push('\n');
    }
    fs::write(path, out)
}
