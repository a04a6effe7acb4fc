use std::collections::HashSet;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::Deserialize;

use super::{CorpusError, DocType, DocumentMeta};

/// A manifest row resolved against the corpus directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub meta: DocumentMeta,
    pub file: PathBuf,
}

#[derive(Debug, Deserialize)]
struct Row {
    doc_id: String,
    doc_type: String,
    #[serde(default)]
    meeting_date: String,
    publication_date: String,
    #[serde(default)]
    speaker: String,
    path: String,
}

fn parse_date(field: &str, value: &str) -> Result<NaiveDate, String> {
    NaiveDate::parse_from_str(value.trim(), "%Y-%m-%d")
        .map_err(|e| format!("bad {field} `{value}`: {e}"))
}

fn optional(value: &str) -> Option<&str> {
    let v = value.trim();
    (!v.is_empty() && v != "NA").then_some(v)
}

/// Reads a CSV manifest with columns
/// `doc_id,doc_type,meeting_date,publication_date,speaker,path`.
/// Paths are relative to `corpus_dir`. Rows keep file order.
pub fn read_manifest(manifest: &Path, corpus_dir: &Path) -> Result<Vec<ManifestEntry>, CorpusError> {
    let err = |reason: String| CorpusError::Manifest {
        path: manifest.display().to_string(),
        reason,
    };
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(manifest)
        .map_err(|e| err(e.to_string()))?;

    let mut seen = HashSet::new();
    let mut entries = Vec::new();
    for (line, row) in reader.deserialize::<Row>().enumerate() {
        let row = row.map_err(|e| err(e.to_string()))?;
        let at = |reason: String| err(format!("row {}: {reason}", line + 1));
        let doc_type: DocType = row.doc_type.parse().map_err(at)?;
        let meeting_date = optional(&row.meeting_date)
            .map(|d| parse_date("meeting_date", d))
            .transpose()
            .map_err(at)?;
        let publication_date = parse_date("publication_date", &row.publication_date).map_err(at)?;
        if !seen.insert(row.doc_id.clone()) {
            return Err(at(format!("duplicate doc_id `{}`", row.doc_id)));
        }
        let meta = DocumentMeta {
            doc_id: row.doc_id,
            doc_type,
            meeting_date,
            publication_date,
            speaker: optional(&row.speaker).map(str::to_string),
            source_path: row.path.clone(),
        };
        meta.validate()?;
        entries.push(ManifestEntry {
            file: corpus_dir.join(&row.path),
            meta,
        });
    }
    Ok(entries)
}
