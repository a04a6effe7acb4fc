//! On-disk record formats shared by the pipeline stages. Every file is
//! UTF-8 with LF line endings and a stable column order.

use std::fs;
use std::io::{BufRead, BufReader};
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::analysis::StanceRecord;
use crate::corpus::{DocType, Document, DocumentMeta, Sentence};

pub const CORPUS_FILE: &str = "corpus.jsonl";
pub const DOCUMENTS_FILE: &str = "documents.csv";
pub const TOPICS_FILE: &str = "topics.csv";
pub const STANCE_FILE: &str = "stance.csv";
pub const SERIES_FILE: &str = "series.csv";
pub const PHASE_SUMMARY_FILE: &str = "phase_summary.csv";
pub const TTEST_FILE: &str = "ttest.csv";

pub const NA: &str = "NA";

/// One line of the corpus file: a sentence with its document metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentenceRecord {
    pub doc_id: String,
    pub doc_type: DocType,
    pub meeting_date: Option<NaiveDate>,
    pub publication_date: NaiveDate,
    pub speaker: Option<String>,
    pub source_path: String,
    pub paragraph_index: usize,
    pub sentence_index: usize,
    pub text: String,
}

pub fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

pub fn finish_csv(writer: csv::Writer<Vec<u8>>) -> Vec<u8> {
    writer.into_inner().expect("in-memory writer cannot fail")
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), PipelineError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| PipelineError::io(parent, e))?;
    }
    let tmp = path.with_extension("partial");
    fs::write(&tmp, bytes).map_err(|e| PipelineError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| PipelineError::io(path, e))
}

pub fn fmt_opt_date(d: Option<NaiveDate>) -> String {
    d.map_or_else(|| NA.to_string(), |d| d.to_string())
}

pub fn fmt_opt_f64(x: Option<f64>) -> String {
    x.map_or_else(|| NA.to_string(), |x| x.to_string())
}

fn parse_opt<T: std::str::FromStr>(s: &str) -> Result<Option<T>, String>
where
    T::Err: std::fmt::Display,
{
    let s = s.trim();
    if s.is_empty() || s == NA {
        Ok(None)
    } else {
        s.parse().map(Some).map_err(|e: T::Err| format!("`{s}`: {e}"))
    }
}

pub fn corpus_lines(docs: &[Document]) -> Vec<u8> {
    let mut out = Vec::new();
    for doc in docs {
        for s in &doc.sentences {
            let record = SentenceRecord {
                doc_id: doc.meta.doc_id.clone(),
                doc_type: doc.meta.doc_type,
                meeting_date: doc.meta.meeting_date,
                publication_date: doc.meta.publication_date,
                speaker: doc.meta.speaker.clone(),
                source_path: doc.meta.source_path.clone(),
                paragraph_index: s.paragraph_index,
                sentence_index: s.index,
                text: s.text.clone(),
            };
            out.extend(serde_json::to_vec(&record).expect("records serialize"));
            out.push(b'\n');
        }
    }
    out
}

/// Reads the corpus file back into documents, keeping file order.
/// Paragraph texts are not stored, so `paragraphs` comes back empty.
pub fn read_corpus(path: &Path) -> Result<Vec<Document>, PipelineError> {
    let file = fs::File::open(path).map_err(|e| PipelineError::io(path, e))?;
    let mut docs: Vec<Document> = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| PipelineError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let r: SentenceRecord = serde_json::from_str(&line)
            .map_err(|e| PipelineError::Data(format!("{}:{}: {e}", path.display(), n + 1)))?;
        let sentence = Sentence {
            text: r.text,
            index: r.sentence_index,
            paragraph_index: r.paragraph_index,
        };
        match docs.last_mut() {
            Some(doc) if doc.meta.doc_id == r.doc_id => doc.sentences.push(sentence),
            _ => {
                if docs.iter().any(|d| d.meta.doc_id == r.doc_id) {
                    return Err(PipelineError::Data(format!(
                        "{}:{}: sentences of `{}` are not contiguous",
                        path.display(),
                        n + 1,
                        r.doc_id
                    )));
                }
                docs.push(Document {
                    meta: DocumentMeta {
                        doc_id: r.doc_id,
                        doc_type: r.doc_type,
                        meeting_date: r.meeting_date,
                        publication_date: r.publication_date,
                        speaker: r.speaker,
                        source_path: r.source_path,
                    },
                    paragraphs: Vec::new(),
                    sentences: vec![sentence],
                    warnings: Vec::new(),
                })
            }
        }
    }
    Ok(docs)
}

pub const STANCE_FIXED_COLUMNS: [&str; 8] = [
    "doc_id",
    "meeting_date",
    "publication_date",
    "doc_type",
    "category",
    "up_total",
    "down_total",
    "score",
];

/// Reads the fixed columns of the stance file. The score is recomputed
/// from the totals and checked against the stored value.
pub fn read_stance(path: &Path) -> Result<Vec<StanceRecord>, PipelineError> {
    let data = |m: String| PipelineError::Data(format!("{}: {m}", path.display()));
    let mut reader = csv::ReaderBuilder::new()
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => PipelineError::Data(format!("cannot read {}: {e}", path.display())),
            _ => data(e.to_string()),
        })?;
    let headers = reader.headers().map_err(|e| data(e.to_string()))?.clone();
    if headers.len() < STANCE_FIXED_COLUMNS.len()
        || headers.iter().zip(STANCE_FIXED_COLUMNS).any(|(h, want)| h != want)
    {
        return Err(data("unexpected header".into()));
    }
    let mut records = Vec::new();
    for (n, row) in reader.records().enumerate() {
        let row = row.map_err(|e| data(e.to_string()))?;
        let at = |m: String| data(format!("row {}: {m}", n + 1));
        let field = |i: usize| row.get(i).unwrap_or("");
        let up_total: u32 = field(5).parse().map_err(|e| at(format!("up_total: {e}")))?;
        let down_total: u32 = field(6).parse().map_err(|e| at(format!("down_total: {e}")))?;
        let stored: Option<f64> = parse_opt(field(7)).map_err(at)?;
        let record = StanceRecord {
            doc_id: field(0).to_string(),
            meeting_date: parse_opt(field(1)).map_err(at)?,
            publication_date: field(2).parse().map_err(|e| at(format!("publication_date: {e}")))?,
            doc_type: field(3).parse().map_err(at)?,
            category: field(4).to_string(),
            up_total,
            down_total,
            score: crate::stance::StanceResult::from_totals("", "", up_total, down_total).score,
        };
        if stored != record.score {
            return Err(at(format!("score {stored:?} disagrees with totals {up_total}/{down_total}")));
        }
        records.push(record);
    }
    Ok(records)
}
