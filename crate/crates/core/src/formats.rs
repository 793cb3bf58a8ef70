//! Versioned document schemas and JSON/JSONL plumbing.
//!
//! Every document the engine reads or writes carries a `"schema"` field
//! (`descriptor/1`, `pool/1`, `calrec/1`, `bundle/1`, `truth/1`, `cost/1`,
//! `workload/1`, `exec/1`, `replay/1`, `decision/1`, `manifest/1`). The
//! helpers here inject and verify it around plain serde types.

use std::io::{BufRead, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

pub const DESCRIPTOR_SCHEMA: &str = "descriptor/1";
pub const DECISION_SCHEMA: &str = "decision/1";
pub const MANIFEST_SCHEMA: &str = "manifest/1";

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("schema mismatch: expected '{expected}', found '{found}'")]
    SchemaMismatch { expected: String, found: String },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Serialize a value as a JSON object with the schema field injected.
pub fn to_tagged_value<T: Serialize>(schema: &str, value: &T) -> serde_json::Value {
    let mut v = serde_json::to_value(value).expect("document types serialize");
    if let serde_json::Value::Object(map) = &mut v {
        map.insert("schema".to_string(), serde_json::Value::String(schema.to_string()));
    }
    v
}

/// One-line JSON document with the schema field.
pub fn to_line<T: Serialize>(schema: &str, value: &T) -> String {
    to_tagged_value(schema, value).to_string()
}

/// Pretty JSON document with the schema field.
pub fn to_pretty<T: Serialize>(schema: &str, value: &T) -> String {
    serde_json::to_string_pretty(&to_tagged_value(schema, value)).expect("value serializes")
}

/// Parse one JSON document, verifying its schema tag.
pub fn from_tagged<T: DeserializeOwned>(expected: &str, text: &str) -> Result<T, FormatError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| FormatError::Parse {
        line: e.line(),
        message: e.to_string(),
    })?;
    let found = value
        .get("schema")
        .and_then(|s| s.as_str())
        .unwrap_or("<missing>")
        .to_string();
    if found != expected {
        return Err(FormatError::SchemaMismatch { expected: expected.to_string(), found });
    }
    serde_json::from_value(value).map_err(|e| FormatError::Parse { line: 0, message: e.to_string() })
}

/// Write a JSON Lines file: one tagged document per item.
pub fn write_jsonl<T: Serialize>(
    path: &Path,
    schema: &str,
    items: impl IntoIterator<Item = T>,
) -> Result<(), FormatError> {
    let file = std::fs::File::create(path)?;
    let mut out = std::io::BufWriter::new(file);
    for item in items {
        writeln!(out, "{}", to_line(schema, &item))?;
    }
    out.flush()?;
    Ok(())
}

/// Read a JSON Lines file, verifying every line's schema tag.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path, schema: &str) -> Result<Vec<T>, FormatError> {
    let file = std::fs::File::open(path)?;
    let reader = std::io::BufReader::new(file);
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let item = from_tagged(schema, &line).map_err(|e| match e {
            FormatError::SchemaMismatch { .. } => e,
            FormatError::Parse { message, .. } => FormatError::Parse { line: idx + 1, message },
            other => other,
        })?;
        out.push(item);
    }
    Ok(out)
}

/// Hex SHA-256 of a byte string (config hashing for run manifests).
pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Deserialize;

    #[derive(Debug, PartialEq, Serialize, Deserialize)]
    struct Row {
        id: u64,
        value: f64,
    }

    #[test]
    fn tagged_round_trip() {
        let row = Row { id: 3, value: 0.25 };
        let line = to_line("exec/1", &row);
        assert!(line.contains("\"schema\":\"exec/1\""));
        let back: Row = from_tagged("exec/1", &line).unwrap();
        assert_eq!(back, row);
    }

    #[test]
    fn wrong_schema_is_rejected() {
        let line = to_line("exec/1", &Row { id: 1, value: 0.0 });
        let err = from_tagged::<Row>("replay/1", &line).unwrap_err();
        assert!(matches!(err, FormatError::SchemaMismatch { .. }));
    }

    #[test]
    fn jsonl_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rows.jsonl");
        let rows = vec![Row { id: 1, value: 0.5 }, Row { id: 2, value: 0.75 }];
        write_jsonl(&path, "exec/1", rows.iter()).unwrap();
        let back: Vec<Row> = read_jsonl(&path, "exec/1").unwrap();
        assert_eq!(back, rows);
    }

    #[test]
    fn sha256_is_stable() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
