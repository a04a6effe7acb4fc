//! Monetary-policy phase labeling from a rate-decision history.
//!
//! A hiking phase runs from the first hike of a run to its last hike; holds
//! between two hikes stay inside the phase. Cutting phases are symmetric.
//! Configured zero-rate intervals override whatever they cover, and every
//! remaining day is `other`. Intervals are inclusive calendar-date ranges.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::AnalysisError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateAction {
    Hike,
    Cut,
    Hold,
}

impl FromStr for RateAction {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "hike" => Ok(RateAction::Hike),
            "cut" => Ok(RateAction::Cut),
            "hold" => Ok(RateAction::Hold),
            other => Err(format!("unknown rate action `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RateEvent {
    pub effective_date: NaiveDate,
    pub action: RateAction,
    /// Upper bound of the target range, in basis points.
    pub target_level_bp: i32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseLabel {
    Hike,
    Cut,
    ZeroRate,
    Other,
}

impl PhaseLabel {
    pub const ALL: [PhaseLabel; 4] = [PhaseLabel::Hike, PhaseLabel::Cut, PhaseLabel::ZeroRate, PhaseLabel::Other];

    pub fn as_str(self) -> &'static str {
        match self {
            PhaseLabel::Hike => "hike",
            PhaseLabel::Cut => "cut",
            PhaseLabel::ZeroRate => "zero_rate",
            PhaseLabel::Other => "other",
        }
    }
}

impl fmt::Display for PhaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PhaseInterval {
    pub start: NaiveDate,
    pub end: NaiveDate,
    pub label: PhaseLabel,
}

impl PhaseInterval {
    pub fn contains(&self, date: NaiveDate) -> bool {
        self.start <= date && date <= self.end
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct PhaseTimeline {
    intervals: Vec<PhaseInterval>,
}

impl PhaseTimeline {
    pub fn intervals(&self) -> &[PhaseInterval] {
        &self.intervals
    }

    pub fn span(&self) -> Option<(NaiveDate, NaiveDate)> {
        Some((self.intervals.first()?.start, self.intervals.last()?.end))
    }

    /// Label of the interval containing `date`, or `None` outside the span.
    pub fn label_at(&self, date: NaiveDate) -> Option<PhaseLabel> {
        let idx = self.intervals.partition_point(|iv| iv.end < date);
        self.intervals
            .get(idx)
            .filter(|iv| iv.contains(date))
            .map(|iv| iv.label)
    }
}

/// Reads `date,action,level_bp` rows.
pub fn read_rate_history(path: &Path) -> Result<Vec<RateEvent>, AnalysisError> {
    #[derive(Deserialize)]
    struct Row {
        date: String,
        action: String,
        level_bp: i32,
    }
    let err = |reason: String| AnalysisError::RateHistory {
        path: path.display().to_string(),
        reason,
    };
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| err(e.to_string()))?;
    reader
        .deserialize::<Row>()
        .enumerate()
        .map(|(i, row)| {
            let row = row.map_err(|e| err(e.to_string()))?;
            let effective_date = NaiveDate::parse_from_str(&row.date, "%Y-%m-%d")
                .map_err(|e| err(format!("row {}: bad date `{}`: {e}", i + 1, row.date)))?;
            let action = row.action.parse().map_err(|e| err(format!("row {}: {e}", i + 1)))?;
            Ok(RateEvent {
                effective_date,
                action,
                target_level_bp: row.level_bp,
            })
        })
        .collect()
}

fn next_day(d: NaiveDate) -> NaiveDate {
    d.succ_opt().expect("date in range")
}

fn prev_day(d: NaiveDate) -> NaiveDate {
    d.pred_opt().expect("date in range")
}

/// Maximal same-direction runs of hikes or cuts, ignoring holds.
fn directional_runs(events: &[RateEvent]) -> Vec<PhaseInterval> {
    let mut runs: Vec<PhaseInterval> = Vec::new();
    for event in events {
        let label = match event.action {
            RateAction::Hike => PhaseLabel::Hike,
            RateAction::Cut => PhaseLabel::Cut,
            RateAction::Hold => continue,
        };
        match runs.last_mut() {
            Some(run) if run.label == label => run.end = event.effective_date,
            _ => runs.push(PhaseInterval {
                start: event.effective_date,
                end: event.effective_date,
                label,
            }),
        }
    }
    runs
}

/// Removes `cut` from `iv`, returning the zero, one or two remaining pieces.
fn subtract(iv: PhaseInterval, cut: (NaiveDate, NaiveDate)) -> Vec<PhaseInterval> {
    let (cs, ce) = cut;
    if ce < iv.start || cs > iv.end {
        return vec![iv];
    }
    let mut pieces = Vec::new();
    if cs > iv.start {
        pieces.push(PhaseInterval {
            end: prev_day(cs),
            ..iv
        });
    }
    if ce < iv.end {
        pieces.push(PhaseInterval {
            start: next_day(ce),
            ..iv
        });
    }
    pieces
}

pub fn label_phases(
    events: &[RateEvent],
    zero_rate_intervals: &[(NaiveDate, NaiveDate)],
) -> Result<PhaseTimeline, AnalysisError> {
    if let Some(w) = events.windows(2).find(|w| w[1].effective_date <= w[0].effective_date) {
        return Err(AnalysisError::UnsortedEvents(w[1].effective_date));
    }
    let mut zeros = zero_rate_intervals.to_vec();
    zeros.sort();
    for &(s, e) in &zeros {
        if s > e {
            return Err(AnalysisError::OverlapError(format!("zero-rate interval {s}..{e} ends before it starts")));
        }
    }
    if let Some(w) = zeros.windows(2).find(|w| w[1].0 <= w[0].1) {
        return Err(AnalysisError::OverlapError(format!(
            "zero-rate intervals {}..{} and {}..{} overlap",
            w[0].0, w[0].1, w[1].0, w[1].1
        )));
    }

    let span_start = events
        .first()
        .map(|e| e.effective_date)
        .into_iter()
        .chain(zeros.first().map(|z| z.0))
        .min();
    let span_end = events
        .last()
        .map(|e| e.effective_date)
        .into_iter()
        .chain(zeros.last().map(|z| z.1))
        .max();
    let (Some(span_start), Some(span_end)) = (span_start, span_end) else {
        return Ok(PhaseTimeline::default());
    };

    let mut labeled: Vec<PhaseInterval> = directional_runs(events);
    for &zero in &zeros {
        labeled = labeled.into_iter().flat_map(|iv| subtract(iv, zero)).collect();
    }
    labeled.extend(zeros.iter().map(|&(start, end)| PhaseInterval {
        start,
        end,
        label: PhaseLabel::ZeroRate,
    }));
    labeled.sort_by_key(|iv| iv.start);

    let mut intervals: Vec<PhaseInterval> = Vec::with_capacity(labeled.len() * 2 + 1);
    let mut cursor = span_start;
    for iv in labeled {
        if iv.start > cursor {
            intervals.push(PhaseInterval {
                start: cursor,
                end: prev_day(iv.start),
                label: PhaseLabel::Other,
            });
        }
        cursor = next_day(iv.end);
        match intervals.last_mut() {
            Some(last) if last.label == iv.label && next_day(last.end) == iv.start => last.end = iv.end,
            _ => intervals.push(iv),
        }
    }
    if cursor <= span_end {
        intervals.push(PhaseInterval {
            start: cursor,
            end: span_end,
            label: PhaseLabel::Other,
        });
    }
    Ok(PhaseTimeline { intervals })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseSelector {
    /// Every point, whatever its phase.
    All,
    Label(PhaseLabel),
}

/// Arithmetic mean of the points dated inside the selected phase.
pub fn periodic_average(
    points: &[(NaiveDate, f64)],
    timeline: &PhaseTimeline,
    selector: PhaseSelector,
) -> Result<f64, AnalysisError> {
    let selected: Vec<f64> = phase_points(points, timeline, selector);
    if selected.is_empty() {
        let which = match selector {
            PhaseSelector::All => "entire period".to_string(),
            PhaseSelector::Label(l) => l.to_string(),
        };
        return Err(AnalysisError::EmptyPhase(which));
    }
    Ok(selected.iter().sum::<f64>() / selected.len() as f64)
}

/// The scores of the points dated inside the selected phase, in input order.
pub fn phase_points(points: &[(NaiveDate, f64)], timeline: &PhaseTimeline, selector: PhaseSelector) -> Vec<f64> {
    points
        .iter()
        .filter(|(date, _)| match selector {
            PhaseSelector::All => true,
            PhaseSelector::Label(l) => timeline.label_at(*date) == Some(l),
        })
        .map(|&(_, s)| s)
        .collect()
}
