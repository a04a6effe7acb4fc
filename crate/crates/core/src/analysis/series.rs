use std::collections::BTreeMap;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::corpus::DocType;

/// A stance result joined with the metadata of its document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StanceRecord {
    pub doc_id: String,
    pub doc_type: DocType,
    pub meeting_date: Option<NaiveDate>,
    pub publication_date: NaiveDate,
    pub category: String,
    pub up_total: u32,
    pub down_total: u32,
    pub score: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesPoint {
    pub meeting_date: NaiveDate,
    pub doc_type: DocType,
    pub doc_id: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeetingSeries {
    pub category: String,
    pub doc_type: DocType,
    /// Sorted by meeting date, one point per meeting.
    pub points: Vec<SeriesPoint>,
}

impl MeetingSeries {
    pub fn dated_scores(&self) -> Vec<(NaiveDate, f64)> {
        self.points.iter().map(|p| (p.meeting_date, p.score)).collect()
    }
}

/// One point per meeting for documents of `doc_type` in `category`.
/// Undefined scores are dropped, but still count when looking for two
/// documents claiming the same meeting.
pub fn build_series(
    records: &[StanceRecord],
    category: &str,
    doc_type: DocType,
) -> Result<MeetingSeries, AnalysisError> {
    let mut by_meeting: BTreeMap<NaiveDate, &StanceRecord> = BTreeMap::new();
    for record in records.iter().filter(|r| r.category == category && r.doc_type == doc_type) {
        let date = record
            .meeting_date
            .ok_or_else(|| AnalysisError::MissingMeetingDate(record.doc_id.clone()))?;
        if let Some(previous) = by_meeting.insert(date, record) {
            let (first, second) = if previous.doc_id <= record.doc_id {
                (previous.doc_id.clone(), record.doc_id.clone())
            } else {
                (record.doc_id.clone(), previous.doc_id.clone())
            };
            return Err(AnalysisError::DuplicateMeetingDocument {
                meeting_date: date,
                doc_type: doc_type.to_string(),
                category: category.to_string(),
                first,
                second,
            });
        }
    }
    let points = by_meeting
        .into_iter()
        .filter_map(|(meeting_date, r)| {
            r.score.map(|score| SeriesPoint {
                meeting_date,
                doc_type,
                doc_id: r.doc_id.clone(),
                score,
            })
        })
        .collect();
    Ok(MeetingSeries {
        category: category.to_string(),
        doc_type,
        points,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PremeetingAverage {
    pub mean: f64,
    /// Number of speeches averaged.
    pub used: usize,
    /// Fewer than the requested number of speeches were available.
    pub partial: bool,
}

/// Mean score of the `n` most recent speeches published strictly before
/// `meeting_date`. Records that are not speeches, belong to another
/// category, or have no defined score are ignored. Ties on the publication
/// date are broken by doc_id so the choice is deterministic.
pub fn speech_premeeting_average(
    records: &[StanceRecord],
    category: &str,
    meeting_date: NaiveDate,
    n: usize,
) -> Option<PremeetingAverage> {
    if n == 0 {
        return None;
    }
    let mut prior: Vec<(&NaiveDate, &str, f64)> = records
        .iter()
        .filter(|r| r.doc_type == DocType::Speech && r.category == category && r.publication_date < meeting_date)
        .filter_map(|r| r.score.map(|s| (&r.publication_date, r.doc_id.as_str(), s)))
        .collect();
    if prior.is_empty() {
        return None;
    }
    prior.sort_by(|a, b| b.0.cmp(a.0).then_with(|| b.1.cmp(a.1)));
    prior.truncate(n);
    let used = prior.len();
    let mean = prior.iter().map(|p| p.2).sum::<f64>() / used as f64;
    Some(PremeetingAverage {
        mean,
        used,
        partial: used < n,
    })
}
