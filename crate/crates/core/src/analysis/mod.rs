//! Time series, policy phases, periodic averages and Welch tests.

mod phases;
mod series;
pub mod special;
mod welch;

use chrono::NaiveDate;
use thiserror::Error;

pub use self::phases::{
    label_phases, periodic_average, phase_points, read_rate_history, PhaseInterval, PhaseLabel, PhaseSelector,
    PhaseTimeline, RateAction, RateEvent,
};
pub use self::series::{
    build_series, speech_premeeting_average, MeetingSeries, PremeetingAverage, SeriesPoint, StanceRecord,
};
pub use self::welch::{welch_t_test, Alternative, WelchResult};

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error("two {doc_type} documents for the {meeting_date} meeting in category `{category}`: {first} and {second}")]
    DuplicateMeetingDocument {
        meeting_date: NaiveDate,
        doc_type: String,
        category: String,
        first: String,
        second: String,
    },
    #[error("document `{0}` has no meeting date")]
    MissingMeetingDate(String),
    #[error("rate events are not strictly increasing at {0}")]
    UnsortedEvents(NaiveDate),
    #[error("inconsistent phase configuration: {0}")]
    OverlapError(String),
    #[error("no scores fall in phase `{0}`")]
    EmptyPhase(String),
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),
    #[error("rate history {path}: {reason}")]
    RateHistory { path: String, reason: String },
}
