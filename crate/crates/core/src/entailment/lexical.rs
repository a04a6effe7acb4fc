//! Keyword-matching stand-in for an NLI model, used offline and in tests.
//!
//! For a hypothesis registered in the lexicon, a premise scores
//! [`SUBJECT_MATCH`] when it contains a subject keyword and an expression
//! keyword, [`SYNONYM_MATCH`] when the expression is present but the subject
//! only appears through a configured synonym, and zero otherwise. An entry
//! with no expression keywords only needs the subject (topic hypotheses).
//! Matching is on case-folded, lightly stemmed token sequences.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{EntailmentBackend, EntailmentError, EntailmentScore, Pair};

pub const SUBJECT_MATCH: f64 = 1.0;
/// Sits just above the usual 0.9 threshold so both sides of it get
/// exercised.
pub const SYNONYM_MATCH: f64 = 0.97;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexiconEntry {
    pub subjects: Vec<String>,
    #[serde(default)]
    pub synonyms: Vec<String>,
    #[serde(default)]
    pub expressions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct StemmedEntry {
    subjects: Vec<Vec<String>>,
    synonyms: Vec<Vec<String>>,
    expressions: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OracleLexicon {
    entries: HashMap<String, StemmedEntry>,
}

fn stem(token: &str) -> String {
    let lower = token.to_lowercase();
    let mut s = lower.as_str();
    for suffix in ["ing", "ed", "es", "s"] {
        if let Some(rest) = s.strip_suffix(suffix) {
            if rest.chars().count() >= 3 {
                s = rest;
                break;
            }
        }
    }
    if let Some(rest) = s.strip_suffix('e') {
        if rest.chars().count() >= 3 {
            s = rest;
        }
    }
    s.to_string()
}

fn stems(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(stem)
        .collect()
}

fn phrases(list: &[String]) -> Vec<Vec<String>> {
    list.iter().map(|p| stems(p)).filter(|p| !p.is_empty()).collect()
}

fn contains_any(tokens: &[String], phrases: &[Vec<String>]) -> bool {
    phrases
        .iter()
        .any(|p| tokens.windows(p.len()).any(|w| w == p.as_slice()))
}

impl OracleLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, hypothesis: &str, entry: &LexiconEntry) {
        self.entries.insert(
            hypothesis.trim().to_string(),
            StemmedEntry {
                subjects: phrases(&entry.subjects),
                synonyms: phrases(&entry.synonyms),
                expressions: phrases(&entry.expressions),
            },
        );
    }

    pub fn contains(&self, hypothesis: &str) -> bool {
        self.entries.contains_key(hypothesis.trim())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn lexical_oracle_score(
    premise: &str,
    hypothesis: &str,
    lexicon: &OracleLexicon,
) -> Result<EntailmentScore, EntailmentError> {
    let entry = lexicon
        .entries
        .get(hypothesis.trim())
        .ok_or_else(|| EntailmentError::UnknownHypothesis(hypothesis.to_string()))?;
    let tokens = stems(premise);
    let expression = entry.expressions.is_empty() || contains_any(&tokens, &entry.expressions);
    let value = if !expression {
        0.0
    } else if contains_any(&tokens, &entry.subjects) {
        SUBJECT_MATCH
    } else if contains_any(&tokens, &entry.synonyms) {
        SYNONYM_MATCH
    } else {
        0.0
    };
    EntailmentScore::new(value)
}

#[derive(Debug, Clone)]
pub struct LexicalOracle {
    lexicon: OracleLexicon,
    batch_size: usize,
}

impl LexicalOracle {
    pub const MODEL_NAME: &'static str = "lexical-oracle";

    pub fn new(lexicon: OracleLexicon, batch_size: usize) -> Self {
        LexicalOracle {
            lexicon,
            batch_size: batch_size.max(1),
        }
    }

    pub fn lexicon(&self) -> &OracleLexicon {
        &self.lexicon
    }
}

impl EntailmentBackend for LexicalOracle {
    fn model_name(&self) -> &str {
        Self::MODEL_NAME
    }

    fn batch_size(&self) -> usize {
        self.batch_size
    }

    fn score_batch(&self, pairs: &[Pair]) -> Result<Vec<EntailmentScore>, EntailmentError> {
        pairs
            .iter()
            .map(|p| lexical_oracle_score(&p.premise, &p.hypothesis, &self.lexicon))
            .collect()
    }
}
