//! Blocking HTTP client for the inference service.
//!
//! Wire format:
//!
//! ```text
//! POST /v1/entail  {"model": "...", "pairs": [{"premise": "...", "hypothesis": "..."}]}
//!               -> {"scores": [0.93, ...]}
//! GET  /v1/health  -> {"status": "ok", "model": "..."}
//! ```

use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{BackendDescriptor, EntailmentBackend, EntailmentError, EntailmentScore, Pair};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RetryPolicy {
    pub attempts: u32,
    pub base_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            attempts: 3,
            base_delay: Duration::from_millis(250),
        }
    }
}

#[derive(Serialize)]
struct EntailRequest<'a> {
    model: &'a str,
    pairs: &'a [Pair],
}

#[derive(Deserialize)]
struct EntailResponse {
    scores: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct HealthStatus {
    pub status: String,
    pub model: String,
}

enum Failure {
    Retryable(String),
    Fatal(String),
}

pub struct RemoteBackend {
    agent: ureq::Agent,
    base_url: String,
    model: String,
    batch_size: usize,
    retry: RetryPolicy,
}

impl RemoteBackend {
    pub fn new(descriptor: &BackendDescriptor) -> Result<Self, EntailmentError> {
        descriptor.validate()?;
        let endpoint = descriptor.endpoint.as_deref().unwrap_or_default();
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(120)))
            .http_status_as_error(false)
            .build()
            .into();
        Ok(RemoteBackend {
            agent,
            base_url: endpoint.trim_end_matches('/').to_string(),
            model: descriptor.model_name.clone().unwrap_or_default(),
            batch_size: descriptor.batch_size,
            retry: RetryPolicy::default(),
        })
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    pub fn health(&self) -> Result<HealthStatus, EntailmentError> {
        let url = format!("{}/v1/health", self.base_url);
        let unavailable = |reason: String| EntailmentError::BackendUnavailable {
            attempts: 1,
            reason,
            batch: Vec::new(),
        };
        let mut resp = self.agent.get(&url).call().map_err(|e| unavailable(e.to_string()))?;
        if resp.status() != 200 {
            return Err(unavailable(format!("health check returned HTTP {}", resp.status())));
        }
        resp.body_mut()
            .read_json()
            .map_err(|e| EntailmentError::ProtocolError {
                reason: format!("malformed health response: {e}"),
                batch: Vec::new(),
            })
    }

    fn post_once(&self, pairs: &[Pair]) -> Result<Vec<EntailmentScore>, Failure> {
        let url = format!("{}/v1/entail", self.base_url);
        let request = EntailRequest {
            model: &self.model,
            pairs,
        };
        let mut resp = self
            .agent
            .post(&url)
            .send_json(&request)
            .map_err(|e| Failure::Retryable(e.to_string()))?;
        let status = resp.status().as_u16();
        if status >= 500 || status == 429 {
            return Err(Failure::Retryable(format!("HTTP {status}")));
        }
        if status != 200 {
            return Err(Failure::Fatal(format!("HTTP {status}")));
        }
        let body: EntailResponse = resp
            .body_mut()
            .read_json()
            .map_err(|e| Failure::Fatal(format!("malformed response body: {e}")))?;
        if body.scores.len() != pairs.len() {
            return Err(Failure::Fatal(format!(
                "expected {} scores, got {}",
                pairs.len(),
                body.scores.len()
            )));
        }
        body.scores
            .into_iter()
            .map(|s| EntailmentScore::new(s).map_err(|e| Failure::Fatal(e.to_string())))
            .collect()
    }
}

impl EntailmentBackend for RemoteBackend {
    fn model_name(&self) -> &str {
        &self.model
    }

    fn batch_size(&self) -> usize {
        self.batch_size
    }

    fn score_batch(&self, pairs: &[Pair]) -> Result<Vec<EntailmentScore>, EntailmentError> {
        let mut scores = Vec::with_capacity(pairs.len());
        for chunk in pairs.chunks(self.batch_size) {
            let mut attempt = 0;
            loop {
                attempt += 1;
                match self.post_once(chunk) {
                    Ok(s) => {
                        scores.extend(s);
                        break;
                    }
                    Err(Failure::Fatal(reason)) => {
                        return Err(EntailmentError::ProtocolError {
                            reason,
                            batch: chunk.to_vec(),
                        })
                    }
                    Err(Failure::Retryable(reason)) if attempt >= self.retry.attempts => {
                        return Err(EntailmentError::BackendUnavailable {
                            attempts: attempt,
                            reason,
                            batch: chunk.to_vec(),
                        })
                    }
                    Err(Failure::Retryable(reason)) => {
                        let delay = self.retry.base_delay * 2u32.pow(attempt - 1);
                        log::warn!("entail request failed ({reason}); retrying in {delay:?}");
                        thread::sleep(delay);
                    }
                }
            }
        }
        Ok(scores)
    }
}
