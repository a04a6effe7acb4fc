//! Stage two: directional-expression counting and the per-document stance
//! score.
//!
//! For a category `c` with upward expressions `U` and downward expressions
//! `D`, a document's score is
//!
//! ```text
//! (Σ_{e∈U} count(e) − Σ_{e∈D} count(e)) / Σ_{e∈U∪D} count(e)
//! ```
//!
//! where `count(e)` is the number of topic-gated sentences whose entailment
//! score for the hypothesis of `e` passes the threshold. The score is
//! undefined when nothing fired.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Document;
use crate::entailment::{Entailer, EntailmentError, EntailmentScore, HypothesisText, Pair};
use crate::topics::{Threshold, TopicAssignment};

#[derive(Debug, Error, PartialEq)]
pub enum StanceError {
    #[error("category `{0}` needs at least one upward and one downward expression")]
    EmptyExpressionSet(String),
    #[error("category `{category}`: expression `{expression}` is listed in both directions")]
    ExpressionInBothDirections { category: String, expression: String },
    #[error("category `{category}`: duplicate hypothesis `{hypothesis}`")]
    DuplicateHypothesis { category: String, hypothesis: String },
    #[error("category `{0}` has an empty subject phrase")]
    EmptySubject(String),
    #[error("category `{category}`: invalid hypothesis: {reason}")]
    InvalidHypothesis { category: String, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Up,
    Down,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Up => "up",
            Direction::Down => "down",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct DirectionalExpression {
    pub expression: String,
    pub direction: Direction,
    pub hypothesis: HypothesisText,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountMode {
    /// A sentence adds one to every expression it entails.
    #[default]
    PerExpression,
    /// A sentence adds at most one per direction.
    PerSentenceDirection,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CategoryConfig {
    /// Name of the topic whose sentences feed this category.
    pub category: String,
    /// Grammatical subject of every hypothesis, e.g. "Job gains".
    pub subject_phrase: String,
    pub upward: Vec<String>,
    pub downward: Vec<String>,
}

fn normalize_expression(e: &str) -> String {
    e.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

impl CategoryConfig {
    pub fn validate(&self) -> Result<(), StanceError> {
        if self.subject_phrase.trim().is_empty() {
            return Err(StanceError::EmptySubject(self.category.clone()));
        }
        if self.upward.is_empty() || self.downward.is_empty() {
            return Err(StanceError::EmptyExpressionSet(self.category.clone()));
        }
        let up: HashSet<String> = self.upward.iter().map(|e| normalize_expression(e)).collect();
        if let Some(both) = self.downward.iter().find(|e| up.contains(&normalize_expression(e))) {
            return Err(StanceError::ExpressionInBothDirections {
                category: self.category.clone(),
                expression: both.clone(),
            });
        }
        Ok(())
    }

    /// The same category with the two directions exchanged.
    pub fn swapped(&self) -> CategoryConfig {
        CategoryConfig {
            upward: self.downward.clone(),
            downward: self.upward.clone(),
            ..self.clone()
        }
    }
}

/// Turns each expression into `<Subject phrase> <expression>.`, upward
/// expressions first.
pub fn render_hypotheses(config: &CategoryConfig) -> Result<Vec<DirectionalExpression>, StanceError> {
    config.validate()?;
    let subject = config.subject_phrase.split_whitespace().collect::<Vec<_>>().join(" ");
    let mut chars = subject.chars();
    let subject = match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect::<String>(),
        None => return Err(StanceError::EmptySubject(config.category.clone())),
    };

    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(config.upward.len() + config.downward.len());
    let listed = config
        .upward
        .iter()
        .map(|e| (e, Direction::Up))
        .chain(config.downward.iter().map(|e| (e, Direction::Down)));
    for (expression, direction) in listed {
        let expression = normalize_expression(expression);
        let sentence = format!("{subject} {}.", expression.trim_end_matches(['.', '!', '?']));
        let hypothesis = HypothesisText::new(sentence).map_err(|e| StanceError::InvalidHypothesis {
            category: config.category.clone(),
            reason: e.to_string(),
        })?;
        if !seen.insert(hypothesis.clone()) {
            return Err(StanceError::DuplicateHypothesis {
                category: config.category.clone(),
                hypothesis: hypothesis.to_string(),
            });
        }
        out.push(DirectionalExpression {
            expression,
            direction,
            hypothesis,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExpressionCounts {
    pub doc_id: String,
    pub category: String,
    /// `C_e(d)` per expression, in rendering order.
    pub counts: Vec<(DirectionalExpression, u32)>,
    /// Sentences gated into this category.
    pub topic_sentence_total: u32,
    /// Gated sentences entailing at least one upward expression.
    pub up_sentences: u32,
    /// Gated sentences entailing at least one downward expression.
    pub down_sentences: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StanceResult {
    pub doc_id: String,
    pub category: String,
    /// `None` when no expression fired in either direction.
    pub score: Option<f64>,
    pub up_total: u32,
    pub down_total: u32,
}

impl StanceResult {
    pub fn from_totals(doc_id: impl Into<String>, category: impl Into<String>, up_total: u32, down_total: u32) -> Self {
        let denominator = u64::from(up_total) + u64::from(down_total);
        let score = (denominator > 0)
            .then(|| (i64::from(up_total) - i64::from(down_total)) as f64 / denominator as f64);
        StanceResult {
            doc_id: doc_id.into(),
            category: category.into(),
            score,
            up_total,
            down_total,
        }
    }

    /// The score as an unreduced fraction `(up − down, up + down)`.
    pub fn ratio(&self) -> Option<(i64, u64)> {
        let denominator = u64::from(self.up_total) + u64::from(self.down_total);
        (denominator > 0).then(|| (i64::from(self.up_total) - i64::from(self.down_total), denominator))
    }
}

pub fn stance_score(counts: &ExpressionCounts, mode: CountMode) -> StanceResult {
    let (up, down) = match mode {
        CountMode::PerExpression => counts.counts.iter().fold((0u32, 0u32), |(u, d), (e, c)| match e.direction {
            Direction::Up => (u + c, d),
            Direction::Down => (u, d + c),
        }),
        CountMode::PerSentenceDirection => (counts.up_sentences, counts.down_sentences),
    };
    StanceResult::from_totals(counts.doc_id.clone(), counts.category.clone(), up, down)
}

/// Folds per-sentence expression scores into counts. `sentence_scores[i][k]`
/// is the score of gated sentence `i` against `expressions[k]`.
pub fn tally(
    doc_id: &str,
    category: &str,
    expressions: &[DirectionalExpression],
    sentence_scores: &[Vec<EntailmentScore>],
    threshold: Threshold,
) -> ExpressionCounts {
    let mut counts = vec![0u32; expressions.len()];
    let (mut up_sentences, mut down_sentences) = (0u32, 0u32);
    for scores in sentence_scores {
        let (mut any_up, mut any_down) = (false, false);
        for ((count, expression), &score) in counts.iter_mut().zip(expressions).zip(scores) {
            if threshold.admits(score) {
                *count += 1;
                match expression.direction {
                    Direction::Up => any_up = true,
                    Direction::Down => any_down = true,
                }
            }
        }
        up_sentences += u32::from(any_up);
        down_sentences += u32::from(any_down);
    }
    ExpressionCounts {
        doc_id: doc_id.to_string(),
        category: category.to_string(),
        counts: expressions.iter().cloned().zip(counts).collect(),
        topic_sentence_total: sentence_scores.len() as u32,
        up_sentences,
        down_sentences,
    }
}

/// A validated category with its rendered hypotheses.
#[derive(Debug, Clone)]
pub struct CategoryScorer {
    config: CategoryConfig,
    expressions: Vec<DirectionalExpression>,
    threshold: Threshold,
    mode: CountMode,
}

impl CategoryScorer {
    pub fn new(config: CategoryConfig, threshold: Threshold, mode: CountMode) -> Result<Self, StanceError> {
        let expressions = render_hypotheses(&config)?;
        Ok(CategoryScorer {
            config,
            expressions,
            threshold,
            mode,
        })
    }

    pub fn category(&self) -> &str {
        &self.config.category
    }

    pub fn config(&self) -> &CategoryConfig {
        &self.config
    }

    pub fn expressions(&self) -> &[DirectionalExpression] {
        &self.expressions
    }

    pub fn mode(&self) -> CountMode {
        self.mode
    }

    pub fn count(
        &self,
        doc: &Document,
        assignments: &[TopicAssignment],
        entailer: &Entailer,
    ) -> Result<ExpressionCounts, EntailmentError> {
        count_expressions(doc, assignments, &self.config.category, &self.expressions, self.threshold, entailer)
    }

    pub fn score(&self, counts: &ExpressionCounts) -> StanceResult {
        stance_score(counts, self.mode)
    }
}

/// Counts expression entailments over the sentences of `doc` gated into
/// `category`. Other sentences are never sent to the entailer.
pub fn count_expressions(
    doc: &Document,
    assignments: &[TopicAssignment],
    category: &str,
    expressions: &[DirectionalExpression],
    threshold: Threshold,
    entailer: &Entailer,
) -> Result<ExpressionCounts, EntailmentError> {
    let assigned: HashMap<usize, &TopicAssignment> = assignments.iter().map(|a| (a.sentence_index, a)).collect();
    let gated: Vec<&str> = doc
        .sentences
        .iter()
        .filter(|s| assigned.get(&s.index).is_some_and(|a| a.has(category)))
        .map(|s| s.text.as_str())
        .collect();

    let pairs: Vec<Pair> = gated
        .iter()
        .flat_map(|&s| expressions.iter().map(move |e| Pair::new(s, e.hypothesis.as_str())))
        .collect();
    let flat = if pairs.is_empty() {
        Vec::new()
    } else {
        entailer.entail_pairs(&pairs)?
    };
    let sentence_scores: Vec<Vec<EntailmentScore>> = flat
        .chunks(expressions.len().max(1))
        .map(<[EntailmentScore]>::to_vec)
        .collect();
    Ok(tally(&doc.meta.doc_id, category, expressions, &sentence_scores, threshold))
}
