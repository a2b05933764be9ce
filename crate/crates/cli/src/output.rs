//! Report envelopes, atomic writes and curve CSV.

use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use capbmo_core::verify::CubeCurve;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

/// Wraps a report body with its digest and a timestamp kept out of the hash.
/// SOURCE_DATE_EPOCH pins the stamp for fully reproducible files.
pub fn envelope(body: &Value) -> Value {
    let text = serde_json::to_string(body).expect("JSON values serialize");
    let digest = format!("{:x}", Sha256::digest(text.as_bytes()));
    let stamp = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.parse::<u64>().ok())
        .unwrap_or_else(|| SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0));
    json!({ "body": body, "digest": digest, "stamp": { "unix_seconds": stamp } })
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating a temporary file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn write_report(path: &Path, body: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(&envelope(body))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

/// One row per (cube, t) sample: cube_id, t, survival, normalizer.
pub fn write_curves(path: &Path, curves: &[CubeCurve]) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["cube_id", "t", "survival", "normalizer"])?;
    for cc in curves {
        let id = cc.cube.to_string();
        for (t, s) in cc.curve.t_samples.iter().zip(&cc.curve.survival) {
            w.write_record([id.as_str(), &t.to_string(), &s.to_string(), &cc.curve.normalizer.to_string()])?;
        }
    }
    let bytes = w.into_inner().map_err(|e| anyhow::anyhow!("csv buffer: {e}"))?;
    write_atomic(path, &bytes)
}
