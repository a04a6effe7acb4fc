//! Document ingestion: cleaning raw central-bank texts into typed,
//! sentence-segmented [`Document`] values.
//!
//! Every document type goes through the same line-level cleanup (footnotes,
//! URL-only lines, configured footers). After that the type decides what
//! survives: modern minutes lose attendance rosters and vote boilerplate,
//! press-conference transcripts keep only the chair's turns, and everything
//! else is kept as is.

mod clean;
mod manifest;
mod minutes;
mod segment;
mod transcript;

use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use self::clean::strip_annotations;
pub use self::manifest::{read_manifest, ManifestEntry};
pub use self::minutes::filter_minutes_paragraphs;
pub use self::segment::{segment_sentences, SentenceSplitter};
pub use self::transcript::{strip_reporter_questions, SpeakerTurn};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("document {doc_id}: nothing left after cleaning")]
    EmptyAfterCleaning { doc_id: String },
    #[error("document {doc_id}: input is not decodable text ({reason})")]
    MalformedInput { doc_id: String, reason: String },
    #[error("transcript has no recognizable speaker labels")]
    NoSpeakerLabels,
    #[error("invalid document metadata for {doc_id}: {reason}")]
    InvalidMeta { doc_id: String, reason: String },
    #[error("invalid preprocessing rule: {0}")]
    InvalidRule(String),
    #[error("manifest {path}: {reason}")]
    Manifest { path: String, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DocType {
    Statement,
    Minutes,
    MinutesOfAction,
    PressConference,
    Speech,
}

impl DocType {
    pub const ALL: [DocType; 5] = [
        DocType::Statement,
        DocType::Minutes,
        DocType::MinutesOfAction,
        DocType::PressConference,
        DocType::Speech,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DocType::Statement => "statement",
            DocType::Minutes => "minutes",
            DocType::MinutesOfAction => "minutes_of_action",
            DocType::PressConference => "press_conference",
            DocType::Speech => "speech",
        }
    }
}

impl fmt::Display for DocType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DocType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DocType::ALL
            .into_iter()
            .find(|t| t.as_str() == s.trim())
            .ok_or_else(|| format!("unknown document type `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentMeta {
    pub doc_id: String,
    pub doc_type: DocType,
    /// Date of the associated policy meeting; absent for speeches.
    pub meeting_date: Option<NaiveDate>,
    pub publication_date: NaiveDate,
    pub speaker: Option<String>,
    pub source_path: String,
}

impl DocumentMeta {
    pub fn validate(&self) -> Result<(), CorpusError> {
        let invalid = |reason: &str| CorpusError::InvalidMeta {
            doc_id: self.doc_id.clone(),
            reason: reason.to_string(),
        };
        if self.doc_id.trim().is_empty() {
            return Err(invalid("empty doc_id"));
        }
        if let Some(meeting) = self.meeting_date {
            if self.publication_date < meeting {
                return Err(invalid("publication_date precedes meeting_date"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub text: String,
    pub index: usize,
    pub paragraph_index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParseWarning {
    /// A press-conference transcript had no speaker labels, so the whole
    /// text was kept.
    NoSpeakerLabels,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub meta: DocumentMeta,
    pub paragraphs: Vec<String>,
    pub sentences: Vec<Sentence>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<ParseWarning>,
}

/// Knobs for cleaning and segmentation. Everything here is data so that
/// corpora from different eras can use different typography rules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreprocessRules {
    /// Tokens ending in a period that never end a sentence.
    pub abbreviations: Vec<String>,
    /// Paragraph prefixes that introduce a list of names.
    pub roster_markers: Vec<String>,
    /// Minimum number of capitalized comma/semicolon-separated entries for a
    /// roster paragraph to be dropped.
    pub roster_min_names: usize,
    /// Paragraph prefixes of vote and directive boilerplate.
    pub boilerplate_prefixes: Vec<String>,
    /// Regexes; any matching line is removed before paragraph splitting.
    pub footer_patterns: Vec<String>,
    /// Speaker-label prefixes that identify the chair in a transcript.
    pub chair_label_prefixes: Vec<String>,
}

impl Default for PreprocessRules {
    fn default() -> Self {
        crate::config::builtin_parameters().preprocess.clone()
    }
}

/// Compiled form of [`PreprocessRules`].
#[derive(Debug, Clone)]
pub struct Preprocessor {
    rules: PreprocessRules,
    footers: Vec<regex::Regex>,
    splitter: SentenceSplitter,
}

impl Preprocessor {
    pub fn new(rules: PreprocessRules) -> Result<Self, CorpusError> {
        let footers = rules
            .footer_patterns
            .iter()
            .map(|p| regex::Regex::new(p).map_err(|e| CorpusError::InvalidRule(e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        let splitter = SentenceSplitter::new(&rules.abbreviations);
        Ok(Preprocessor {
            rules,
            footers,
            splitter,
        })
    }

    pub fn rules(&self) -> &PreprocessRules {
        &self.rules
    }

    pub fn splitter(&self) -> &SentenceSplitter {
        &self.splitter
    }

    pub fn parse(&self, raw: &[u8], meta: DocumentMeta) -> Result<Document, CorpusError> {
        meta.validate()?;
        let text = decode(raw, &meta.doc_id)?;
        let cleaned = strip_annotations(text, &self.footers);

        let mut warnings = Vec::new();
        let body = if meta.doc_type == DocType::PressConference {
            match strip_reporter_questions(&cleaned, &self.rules.chair_label_prefixes) {
                Ok(chair_only) => chair_only,
                Err(CorpusError::NoSpeakerLabels) => {
                    log::warn!(
                        "{}: no speaker labels found, keeping whole transcript",
                        meta.doc_id
                    );
                    warnings.push(ParseWarning::NoSpeakerLabels);
                    cleaned
                }
                Err(e) => return Err(e),
            }
        } else {
            cleaned
        };

        let raw_paragraphs = split_paragraphs(&body);
        let paragraphs: Vec<String> =
            filter_minutes_paragraphs(&raw_paragraphs, meta.doc_type, &self.rules)
                .into_iter()
                .filter(|p| p.chars().any(char::is_alphabetic))
                .collect();
        if paragraphs.is_empty() {
            return Err(CorpusError::EmptyAfterCleaning {
                doc_id: meta.doc_id,
            });
        }

        let mut sentences = Vec::new();
        for (paragraph_index, paragraph) in paragraphs.iter().enumerate() {
            for text in self.splitter.split(paragraph) {
                let index = sentences.len();
                sentences.push(Sentence {
                    text,
                    index,
                    paragraph_index,
                });
            }
        }

        Ok(Document {
            meta,
            paragraphs,
            sentences,
            warnings,
        })
    }
}

/// One-shot convenience over [`Preprocessor::parse`].
pub fn parse_document(
    raw: &[u8],
    meta: DocumentMeta,
    rules: &PreprocessRules,
) -> Result<Document, CorpusError> {
    Preprocessor::new(rules.clone())?.parse(raw, meta)
}

fn decode<'a>(raw: &'a [u8], doc_id: &str) -> Result<&'a str, CorpusError> {
    let malformed = |reason: String| CorpusError::MalformedInput {
        doc_id: doc_id.to_string(),
        reason,
    };
    let text = std::str::from_utf8(raw).map_err(|e| malformed(e.to_string()))?;
    if text.contains('\0') {
        return Err(malformed("contains NUL bytes".into()));
    }
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    if text.trim().is_empty() {
        return Err(malformed("empty input".into()));
    }
    Ok(text)
}

/// Splits on blank lines and joins the lines of each paragraph with single
/// spaces.
pub(crate) fn split_paragraphs(text: &str) -> Vec<String> {
    let mut paragraphs = Vec::new();
    let mut current: Vec<&str> = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            if !current.is_empty() {
                paragraphs.push(normalize_whitespace(&current.join(" ")));
                current.clear();
            }
        } else {
            current.push(line);
        }
    }
    if !current.is_empty() {
        paragraphs.push(normalize_whitespace(&current.join(" ")));
    }
    paragraphs
}

pub(crate) fn normalize_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}
