//! Deterministic CSV/JSON artifact formatting shared by the CLI and the
//! regression suite: fixed 12-significant-digit numeric rendering, a
//! versioned JSON envelope carrying the full run configuration, and the
//! workspace layout the `report` subcommand aggregates.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::config::QuadratureSpec;
use crate::error::{Error, Result};

/// Render a float with 12 significant digits, locale-independent and
/// byte-stable across runs.
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x:.11e}")
    }
}

/// CSV document: header line plus rows, comma-separated, one trailing
/// newline. Fields must not contain commas or newlines.
pub fn csv_document(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Pretty JSON plus trailing newline.
pub fn json_document(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

/// Versioned envelope: every artifact records the subcommand that made
/// it, the claim it bears on, and the full quadrature configuration, so
/// the file is self-describing.
pub fn artifact(subcommand: &str, claim: &str, config: &QuadratureSpec, body: Value) -> Value {
    json!({
        "schema": 1,
        "subcommand": subcommand,
        "claim": claim,
        "config": serde_json::to_value(config).expect("config serializes"),
        "body": body,
    })
}

/// Artifact filenames the `report` subcommand looks for; one per
/// subcommand that produces data.
pub const ARTIFACT_NAMES: [&str; 7] = [
    "conv",
    "functional",
    "spectrum",
    "trilinear",
    "bessel",
    "mixednorm",
    "delta",
];

/// Path of the workspace artifact for a subcommand.
pub fn artifact_path(workspace: &Path, subcommand: &str) -> PathBuf {
    workspace.join(format!("{subcommand}.json"))
}

/// Write an artifact into the workspace, creating the directory.
pub fn write_artifact(workspace: &Path, subcommand: &str, value: &Value) -> Result<()> {
    fs::create_dir_all(workspace)?;
    fs::write(artifact_path(workspace, subcommand), json_document(value))?;
    Ok(())
}

/// Load one workspace artifact if present.
pub fn read_artifact(workspace: &Path, subcommand: &str) -> Result<Option<Value>> {
    let path = artifact_path(workspace, subcommand);
    if !path.exists() {
        return Ok(None);
    }
    let text = fs::read_to_string(&path)?;
    let value: Value = serde_json::from_str(&text)?;
    if value.get("schema").and_then(Value::as_i64) != Some(1) {
        return Err(Error::Domain(format!(
            "artifact {} has an unsupported schema version",
            path.display()
        )));
    }
    Ok(Some(value))
}
