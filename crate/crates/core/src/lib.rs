//! Stance scoring for central-bank communication by two-stage zero-shot
//! textual entailment.
//!
//! Sentences are first gated by topic ("This sentence is related to the
//! topic of Inflation."), then tested against directional hypotheses
//! ("Inflation edged down."). The per-document stance score for a category
//! is `(up − down) / (up + down)` over the expressions that fired. Scores
//! are aggregated into per-meeting series, policy-phase averages and
//! one-sided Welch t-tests.

pub mod analysis;
pub mod config;
pub mod corpus;
pub mod entailment;
pub mod exec;
pub mod pipeline;
pub mod stance;
pub mod topics;

pub use config::{builtin_parameters, Parameters, RunConfig};
pub use pipeline::{PipelineError, RunOptions};
