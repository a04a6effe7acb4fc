//! Entailment scoring: the backend contract, a deterministic lexical oracle,
//! an HTTP client for the inference service, and a persistent score cache.
//!
//! All scoring goes through [`Entailer`], which consults the cache first,
//! deduplicates the misses and sends them to the backend in batches no
//! larger than the backend's batch size.

mod cache;
mod lexical;
mod remote;

use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use self::cache::{cache_key, ScoreCache};
pub use self::lexical::{lexical_oracle_score, LexicalOracle, LexiconEntry, OracleLexicon};
pub use self::remote::{HealthStatus, RemoteBackend, RetryPolicy};

#[derive(Debug, Error)]
pub enum EntailmentError {
    #[error("invalid hypothesis `{0}`: must be non-empty and end with sentence-final punctuation")]
    InvalidHypothesis(String),
    #[error("entailment score {0} is outside [0, 1]")]
    InvalidScore(f64),
    #[error("no hypotheses given")]
    NoHypotheses,
    #[error("hypothesis is not in the oracle lexicon: `{0}`")]
    UnknownHypothesis(String),
    #[error("entailment backend unavailable after {attempts} attempt(s): {reason}")]
    BackendUnavailable {
        attempts: u32,
        reason: String,
        batch: Vec<Pair>,
    },
    #[error("entailment protocol error: {reason}")]
    ProtocolError { reason: String, batch: Vec<Pair> },
    #[error("invalid backend configuration: {0}")]
    InvalidDescriptor(String),
    #[error("score cache: {0}")]
    Cache(#[from] std::io::Error),
}

/// A complete declarative sentence used as the entailment hypothesis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct HypothesisText(String);

impl HypothesisText {
    pub fn new(text: impl Into<String>) -> Result<Self, EntailmentError> {
        let text = text.into();
        let trimmed = text.trim();
        if trimmed.is_empty() || !trimmed.ends_with(['.', '!', '?']) {
            return Err(EntailmentError::InvalidHypothesis(text));
        }
        Ok(HypothesisText(trimmed.to_string()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for HypothesisText {
    type Error = EntailmentError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        HypothesisText::new(s)
    }
}

impl From<HypothesisText> for String {
    fn from(h: HypothesisText) -> String {
        h.0
    }
}

impl std::fmt::Display for HypothesisText {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

/// Probability-like score in `[0, 1]` that the premise entails the
/// hypothesis. NaN is rejected.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct EntailmentScore(f64);

impl EntailmentScore {
    pub const ZERO: EntailmentScore = EntailmentScore(0.0);
    pub const ONE: EntailmentScore = EntailmentScore(1.0);

    pub fn new(value: f64) -> Result<Self, EntailmentError> {
        if (0.0..=1.0).contains(&value) {
            Ok(EntailmentScore(value))
        } else {
            Err(EntailmentError::InvalidScore(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// A premise/hypothesis pair as sent over the wire.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Pair {
    pub premise: String,
    pub hypothesis: String,
}

impl Pair {
    pub fn new(premise: impl Into<String>, hypothesis: impl Into<String>) -> Self {
        Pair {
            premise: premise.into(),
            hypothesis: hypothesis.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    LexicalOracle,
    Remote,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BackendDescriptor {
    pub kind: BackendKind,
    #[serde(default)]
    pub endpoint: Option<String>,
    #[serde(default)]
    pub model_name: Option<String>,
    pub batch_size: usize,
}

impl BackendDescriptor {
    pub fn validate(&self) -> Result<(), EntailmentError> {
        if self.batch_size == 0 {
            return Err(EntailmentError::InvalidDescriptor("batch_size must be positive".into()));
        }
        if self.kind == BackendKind::Remote && self.endpoint.as_deref().is_none_or(|e| e.trim().is_empty()) {
            return Err(EntailmentError::InvalidDescriptor("remote backend requires an endpoint".into()));
        }
        Ok(())
    }
}

/// Maps premise/hypothesis pairs to entailment scores. Implementations must
/// return exactly one score per pair, in order, and be callable from
/// several threads at once.
pub trait EntailmentBackend: Send + Sync {
    /// Identifies the scoring model; part of every cache key.
    fn model_name(&self) -> &str;

    fn batch_size(&self) -> usize;

    fn score_batch(&self, pairs: &[Pair]) -> Result<Vec<EntailmentScore>, EntailmentError>;
}

/// Cache-aware front end over an [`EntailmentBackend`].
pub struct Entailer {
    backend: Box<dyn EntailmentBackend>,
    cache: ScoreCache,
    offline: bool,
    backend_calls: AtomicUsize,
}

impl Entailer {
    pub fn new(backend: Box<dyn EntailmentBackend>) -> Self {
        Entailer {
            backend,
            cache: ScoreCache::in_memory(),
            offline: false,
            backend_calls: AtomicUsize::new(0),
        }
    }

    pub fn with_cache(mut self, cache: ScoreCache) -> Self {
        self.cache = cache;
        self
    }

    /// In offline mode every cache miss fails with `BackendUnavailable`
    /// instead of reaching the backend.
    pub fn offline(mut self, offline: bool) -> Self {
        self.offline = offline;
        self
    }

    pub fn model_name(&self) -> &str {
        self.backend.model_name()
    }

    pub fn cache(&self) -> &ScoreCache {
        &self.cache
    }

    /// Number of batches actually sent to the backend.
    pub fn backend_calls(&self) -> usize {
        self.backend_calls.load(Ordering::Relaxed)
    }

    /// Scores one premise against every hypothesis, order-aligned.
    pub fn entail(
        &self,
        premise: &str,
        hypotheses: &[HypothesisText],
    ) -> Result<Vec<EntailmentScore>, EntailmentError> {
        if hypotheses.is_empty() {
            return Err(EntailmentError::NoHypotheses);
        }
        let pairs: Vec<Pair> = hypotheses
            .iter()
            .map(|h| Pair::new(premise, h.as_str()))
            .collect();
        self.entail_pairs(&pairs)
    }

    /// Scores arbitrary pairs, order-aligned with the input.
    pub fn entail_pairs(&self, pairs: &[Pair]) -> Result<Vec<EntailmentScore>, EntailmentError> {
        let model = self.backend.model_name();
        let keys: Vec<String> = pairs
            .iter()
            .map(|p| cache_key(&p.premise, &p.hypothesis, model))
            .collect();

        let mut scores: Vec<Option<EntailmentScore>> = keys.iter().map(|k| self.cache.get(k)).collect();

        let mut pending: Vec<usize> = Vec::new();
        let mut pending_keys = std::collections::HashSet::new();
        for (i, score) in scores.iter().enumerate() {
            if score.is_none() && pending_keys.insert(keys[i].as_str()) {
                pending.push(i);
            }
        }

        for chunk in pending.chunks(self.backend.batch_size().max(1)) {
            let batch: Vec<Pair> = chunk.iter().map(|&i| pairs[i].clone()).collect();
            if self.offline {
                return Err(EntailmentError::BackendUnavailable {
                    attempts: 0,
                    reason: "offline mode and scores are not cached".into(),
                    batch,
                });
            }
            self.backend_calls.fetch_add(1, Ordering::Relaxed);
            let fresh = self.backend.score_batch(&batch)?;
            if fresh.len() != batch.len() {
                return Err(EntailmentError::ProtocolError {
                    reason: format!("expected {} scores, got {}", batch.len(), fresh.len()),
                    batch,
                });
            }
            let records: Vec<(String, EntailmentScore)> = chunk
                .iter()
                .zip(&fresh)
                .map(|(&i, &s)| (keys[i].clone(), s))
                .collect();
            self.cache.insert_many(&records)?;
        }

        scores
            .iter_mut()
            .zip(&keys)
            .map(|(slot, key)| {
                slot.or_else(|| self.cache.get(key))
                    .ok_or_else(|| EntailmentError::ProtocolError {
                        reason: "score missing after backend call".into(),
                        batch: Vec::new(),
                    })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Mutex;

    struct Recording {
        seen: Mutex<Vec<usize>>,
        batch: usize,
    }

    impl EntailmentBackend for Recording {
        fn model_name(&self) -> &str {
            "recording"
        }
        fn batch_size(&self) -> usize {
            self.batch
        }
        fn score_batch(&self, pairs: &[Pair]) -> Result<Vec<EntailmentScore>, EntailmentError> {
            self.seen.lock().unwrap().push(pairs.len());
            pairs
                .iter()
                .map(|p| EntailmentScore::new((p.premise.len() % 10) as f64 / 10.0))
                .collect()
        }
    }

    fn hyp(s: &str) -> HypothesisText {
        HypothesisText::new(s).unwrap()
    }

    #[test]
    fn hypothesis_validation() {
        assert!(HypothesisText::new("Inflation increased.").is_ok());
        assert!(HypothesisText::new("").is_err());
        assert!(HypothesisText::new("Inflation increased").is_err());
    }

    #[test]
    fn score_range() {
        assert!(EntailmentScore::new(0.0).is_ok());
        assert!(EntailmentScore::new(1.0).is_ok());
        assert!(EntailmentScore::new(1.0001).is_err());
        assert!(EntailmentScore::new(-0.1).is_err());
        assert!(EntailmentScore::new(f64::NAN).is_err());
    }

    #[test]
    fn descriptor_validation() {
        let mut d = BackendDescriptor {
            kind: BackendKind::Remote,
            endpoint: None,
            model_name: None,
            batch_size: 8,
        };
        assert!(d.validate().is_err());
        d.endpoint = Some("http://localhost:8000".into());
        assert!(d.validate().is_ok());
        d.batch_size = 0;
        assert!(d.validate().is_err());
    }

    #[test]
    fn empty_hypotheses_rejected() {
        let e = Entailer::new(Box::new(Recording {
            seen: Mutex::new(vec![]),
            batch: 4,
        }));
        assert!(matches!(e.entail("x.", &[]), Err(EntailmentError::NoHypotheses)));
    }

    #[test]
    fn batches_respect_size_and_dedupe() {
        let backend = Recording {
            seen: Mutex::new(vec![]),
            batch: 2,
        };
        let e = Entailer::new(Box::new(backend));
        let hs = [hyp("A."), hyp("B."), hyp("C."), hyp("A.")];
        let scores = e.entail("premise.", &hs).unwrap();
        assert_eq!(scores.len(), 4);
        assert_eq!(scores[0], scores[3]);
        assert_eq!(e.backend_calls(), 2);
        // Second call is served from the in-memory cache.
        e.entail("premise.", &hs).unwrap();
        assert_eq!(e.backend_calls(), 2);
    }

    #[test]
    fn offline_miss_is_unavailable() {
        let e = Entailer::new(Box::new(Recording {
            seen: Mutex::new(vec![]),
            batch: 2,
        }))
        .offline(true);
        let err = e.entail("p.", &[hyp("A.")]).unwrap_err();
        match err {
            EntailmentError::BackendUnavailable { batch, .. } => assert_eq!(batch, vec![Pair::new("p.", "A.")]),
            other => panic!("unexpected {other:?}"),
        }
    }
}
