//! Stage one: multi-label topic gating.
//!
//! Each sentence is tested independently against one templated hypothesis
//! per topic; a topic is assigned when its score is at or above the
//! threshold.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Document, Sentence};
use crate::entailment::{Entailer, EntailmentError, EntailmentScore, HypothesisText, Pair};

#[derive(Debug, Error, PartialEq)]
pub enum TopicError {
    #[error("threshold must lie strictly between 0 and 1, got {0}")]
    InvalidThreshold(f64),
    #[error("topic template must contain exactly one `{{}}` placeholder and render a full sentence: `{0}`")]
    InvalidTemplate(String),
    #[error("topic `{0}` has an empty display string")]
    EmptyDisplay(String),
}

/// Decision threshold shared by topic gating and expression counting.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Threshold(f64);

impl Threshold {
    pub fn new(value: f64) -> Result<Self, TopicError> {
        if value > 0.0 && value < 1.0 {
            Ok(Threshold(value))
        } else {
            Err(TopicError::InvalidThreshold(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Inclusive: a score equal to the threshold passes.
    pub fn admits(self, score: EntailmentScore) -> bool {
        score.value() >= self.0
    }
}

impl TryFrom<f64> for Threshold {
    type Error = TopicError;
    fn try_from(v: f64) -> Result<Self, Self::Error> {
        Threshold::new(v)
    }
}

impl From<Threshold> for f64 {
    fn from(t: Threshold) -> f64 {
        t.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Topic {
    /// Stable identifier used in output files, e.g. `inflation`.
    pub name: String,
    /// Text substituted into the hypothesis template, e.g. `Job Gain`.
    pub display: String,
}

impl Topic {
    pub fn new(name: impl Into<String>, display: impl Into<String>) -> Result<Self, TopicError> {
        let name = name.into();
        let display = display.into();
        if display.trim().is_empty() {
            return Err(TopicError::EmptyDisplay(name));
        }
        Ok(Topic { name, display })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopicTemplate(String);

impl TopicTemplate {
    pub fn new(template: impl Into<String>) -> Result<Self, TopicError> {
        let template = template.into();
        let valid = template.matches("{}").count() == 1
            && HypothesisText::new(template.replace("{}", "x")).is_ok();
        if valid {
            Ok(TopicTemplate(template))
        } else {
            Err(TopicError::InvalidTemplate(template))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn render(&self, topic: &Topic) -> HypothesisText {
        HypothesisText::new(self.0.replace("{}", topic.display.trim()))
            .expect("template validated at construction")
    }
}

/// Renders the topic hypothesis, e.g. "This sentence is related to the
/// topic of Inflation."
pub fn topic_hypothesis(topic: &Topic, template: &TopicTemplate) -> HypothesisText {
    template.render(topic)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopicAssignment {
    pub doc_id: String,
    pub sentence_index: usize,
    /// One score per configured topic, in configuration order.
    pub scores: Vec<(String, EntailmentScore)>,
    pub topics: BTreeSet<String>,
}

impl TopicAssignment {
    pub fn has(&self, topic: &str) -> bool {
        self.topics.contains(topic)
    }
}

#[derive(Debug, Clone)]
pub struct TopicClassifier {
    topics: Vec<Topic>,
    hypotheses: Vec<HypothesisText>,
    threshold: Threshold,
}

impl TopicClassifier {
    pub fn new(topics: Vec<Topic>, template: &TopicTemplate, threshold: Threshold) -> Self {
        let hypotheses = topics.iter().map(|t| template.render(t)).collect();
        TopicClassifier {
            topics,
            hypotheses,
            threshold,
        }
    }

    pub fn topics(&self) -> &[Topic] {
        &self.topics
    }

    pub fn hypotheses(&self) -> &[HypothesisText] {
        &self.hypotheses
    }

    pub fn threshold(&self) -> Threshold {
        self.threshold
    }

    fn assemble(&self, doc_id: &str, sentence_index: usize, scores: &[EntailmentScore]) -> TopicAssignment {
        let scores: Vec<(String, EntailmentScore)> = self
            .topics
            .iter()
            .zip(scores)
            .map(|(t, &s)| (t.name.clone(), s))
            .collect();
        let topics = scores
            .iter()
            .filter(|(_, s)| self.threshold.admits(*s))
            .map(|(name, _)| name.clone())
            .collect();
        TopicAssignment {
            doc_id: doc_id.to_string(),
            sentence_index,
            scores,
            topics,
        }
    }

    pub fn classify(
        &self,
        doc_id: &str,
        sentence: &Sentence,
        entailer: &Entailer,
    ) -> Result<TopicAssignment, EntailmentError> {
        if self.topics.is_empty() {
            return Ok(self.assemble(doc_id, sentence.index, &[]));
        }
        let scores = entailer.entail(&sentence.text, &self.hypotheses)?;
        Ok(self.assemble(doc_id, sentence.index, &scores))
    }

    /// Same result as calling [`classify`](Self::classify) per sentence, but
    /// sends the whole document to the entailer as one request.
    pub fn classify_document(
        &self,
        doc: &Document,
        entailer: &Entailer,
    ) -> Result<Vec<TopicAssignment>, EntailmentError> {
        let per_sentence = self.hypotheses.len();
        let pairs: Vec<Pair> = doc
            .sentences
            .iter()
            .flat_map(|s| self.hypotheses.iter().map(|h| Pair::new(s.text.as_str(), h.as_str())))
            .collect();
        let scores = if pairs.is_empty() {
            Vec::new()
        } else {
            entailer.entail_pairs(&pairs)?
        };
        Ok(doc
            .sentences
            .iter()
            .enumerate()
            .map(|(k, s)| {
                let slice = &scores[k * per_sentence..(k + 1) * per_sentence];
                self.assemble(&doc.meta.doc_id, s.index, slice)
            })
            .collect())
    }
}

/// Classifies one sentence against every topic independently.
pub fn classify_topics(
    doc_id: &str,
    sentence: &Sentence,
    topics: &[Topic],
    template: &TopicTemplate,
    threshold: Threshold,
    entailer: &Entailer,
) -> Result<TopicAssignment, EntailmentError> {
    TopicClassifier::new(topics.to_vec(), template, threshold).classify(doc_id, sentence, entailer)
}
