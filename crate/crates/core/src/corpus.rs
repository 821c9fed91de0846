//! Corpus manifests: one tab-separated record per line,
//! `id  path  kind  expectedStatus`. Blank lines and `#` comments are skipped;
//! paths are relative to the manifest's directory.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub enum EntryKind {
    FullProof,
    StatementOnly,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub enum ExpectedStatus {
    Proved,
    SorryWarned,
}

impl FromStr for EntryKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "FullProof" => Ok(EntryKind::FullProof),
            "StatementOnly" => Ok(EntryKind::StatementOnly),
            _ => Err(format!("unknown kind '{s}' (expected FullProof or StatementOnly)")),
        }
    }
}

impl FromStr for ExpectedStatus {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "Proved" => Ok(ExpectedStatus::Proved),
            "SorryWarned" => Ok(ExpectedStatus::SorryWarned),
            _ => Err(format!("unknown status '{s}' (expected Proved or SorryWarned)")),
        }
    }
}

impl fmt::Display for ExpectedStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CorpusEntry {
    pub id: String,
    pub source_path: PathBuf,
    pub kind: EntryKind,
    pub expected_status: ExpectedStatus,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read manifest {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("manifest line {line}: {message}")]
    ManifestParseError { line: usize, message: String },
    #[error("manifest entry '{id}': source file {path} is missing")]
    MissingSource { id: String, path: PathBuf },
}

/// Parses manifest text; `base` resolves relative paths.
pub fn parse_manifest(text: &str, base: &Path) -> Result<Vec<CorpusEntry>, CorpusError> {
    let mut out: Vec<CorpusEntry> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.trim_end_matches('\r');
        if l.trim().is_empty() || l.trim_start().starts_with('#') {
            continue;
        }
        let err = |message: String| CorpusError::ManifestParseError { line, message };
        let fields: Vec<&str> = l.split('\t').collect();
        if fields.len() != 4 {
            return Err(err(format!("expected 4 tab-separated fields, found {}", fields.len())));
        }
        let id = fields[0].trim();
        if id.is_empty() {
            return Err(err("empty id".into()));
        }
        if out.iter().any(|e| e.id == id) {
            return Err(err(format!("duplicate id '{id}'")));
        }
        let kind: EntryKind = fields[2].trim().parse().map_err(err)?;
        let expected_status: ExpectedStatus = fields[3].trim().parse().map_err(err)?;
        match (kind, expected_status) {
            (EntryKind::FullProof, ExpectedStatus::Proved) | (EntryKind::StatementOnly, ExpectedStatus::SorryWarned) => {}
            _ => {
                return Err(err(format!(
                    "{kind:?} entries must expect {}",
                    if kind == EntryKind::FullProof { "Proved" } else { "SorryWarned" }
                )))
            }
        }
        out.push(CorpusEntry {
            id: id.to_string(),
            source_path: base.join(fields[1].trim()),
            kind,
            expected_status,
        });
    }
    Ok(out)
}

/// Loads a manifest and checks that every source file is readable.
pub fn load_corpus(manifest: &Path) -> Result<Vec<CorpusEntry>, CorpusError> {
    let text = std::fs::read_to_string(manifest).map_err(|source| CorpusError::Io {
        path: manifest.to_path_buf(),
        source,
    })?;
    let base = manifest.parent().unwrap_or(Path::new("."));
    let entries = parse_manifest(&text, base)?;
    for e in &entries {
        if std::fs::File::open(&e.source_path).is_err() {
            return Err(CorpusError::MissingSource {
                id: e.id.clone(),
                path: e.source_path.clone(),
            });
        }
    }
    Ok(entries)
}
