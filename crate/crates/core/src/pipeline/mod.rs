//! The `ingest`, `score` and `report` stages.
//!
//! Each stage reads the previous stage's files from the output directory,
//! so scoring can be rerun without re-ingesting and reporting without
//! rescoring. Outputs depend only on inputs and configuration: records are
//! written in manifest order and the score cache is compacted at the end of
//! scoring.

pub mod records;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::analysis::{
    build_series, label_phases, phase_points, read_rate_history, speech_premeeting_average, welch_t_test,
    AnalysisError, Alternative, PhaseLabel, PhaseSelector, StanceRecord,
};
use crate::config::{ConfigError, RunConfig};
use crate::corpus::{read_manifest, CorpusError, DocType, Document, Preprocessor};
use crate::entailment::{BackendKind, Entailer, EntailmentBackend, EntailmentError, LexicalOracle, RemoteBackend, ScoreCache};
use crate::exec;
use crate::stance::{CategoryScorer, ExpressionCounts, StanceResult};
use crate::topics::{TopicAssignment, TopicClassifier};

use self::records::*;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Data(String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Backend(#[from] EntailmentError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl PipelineError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        PipelineError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    /// 1 for configuration problems, 2 for bad or missing data, 3 when the
    /// entailment backend fails.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) => 1,
            PipelineError::Data(_) | PipelineError::Corpus(_) | PipelineError::Analysis(_) | PipelineError::Io { .. } => 2,
            PipelineError::Backend(EntailmentError::Cache(_)) => 2,
            PipelineError::Backend(EntailmentError::InvalidDescriptor(_)) => 1,
            PipelineError::Backend(_) => 3,
        }
    }
}

/// Options that do not live in the config file.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Serve every score from the cache and never contact the backend.
    pub offline: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IngestSummary {
    pub documents: usize,
    pub sentences: usize,
    pub by_type: BTreeMap<DocType, (usize, usize)>,
    /// `(doc_id, error)` for every document that could not be parsed.
    pub failures: Vec<(String, String)>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScoreSummary {
    pub documents: usize,
    pub sentences: usize,
    pub topic_sentences: BTreeMap<String, usize>,
    pub defined_scores: usize,
    pub undefined_scores: usize,
    pub backend_calls: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReportSummary {
    pub series_points: usize,
    pub summary_rows: usize,
    pub ttests: usize,
}

fn out(config: &RunConfig, name: &str) -> PathBuf {
    config.output_dir.join(name)
}

pub fn ingest(config: &RunConfig) -> Result<IngestSummary, PipelineError> {
    let entries = read_manifest(&config.manifest, &config.corpus_dir)?;
    if entries.is_empty() {
        return Err(PipelineError::Data(format!(
            "manifest {} lists no documents",
            config.manifest.display()
        )));
    }
    let preprocessor = Preprocessor::new(config.params.preprocess.clone())?;
    let parsed = exec::map(config.params.exec_mode(), &entries, |entry| {
        let raw = fs::read(&entry.file).map_err(|e| format!("cannot read {}: {e}", entry.file.display()))?;
        preprocessor.parse(&raw, entry.meta.clone()).map_err(|e| e.to_string())
    });

    let mut summary = IngestSummary::default();
    let mut docs = Vec::new();
    for (entry, result) in entries.iter().zip(parsed) {
        match result {
            Ok(doc) => {
                let counts = summary.by_type.entry(doc.meta.doc_type).or_default();
                counts.0 += 1;
                counts.1 += doc.sentences.len();
                summary.sentences += doc.sentences.len();
                docs.push(doc);
            }
            Err(e) => {
                log::warn!("skipping {}: {e}", entry.meta.doc_id);
                summary.failures.push((entry.meta.doc_id.clone(), e));
            }
        }
    }
    summary.documents = docs.len();
    if docs.is_empty() {
        return Err(PipelineError::Data(format!(
            "all {} documents failed to parse; first error: {}",
            entries.len(),
            summary.failures[0].1
        )));
    }

    let mut w = csv_writer();
    w.write_record([
        "doc_id",
        "doc_type",
        "meeting_date",
        "publication_date",
        "speaker",
        "source_path",
        "paragraphs",
        "sentences",
        "warnings",
    ])
    .expect("in-memory write");
    for d in &docs {
        let warnings: Vec<String> = d.warnings.iter().map(|w| format!("{w:?}")).collect();
        w.write_record([
            d.meta.doc_id.as_str(),
            d.meta.doc_type.as_str(),
            &fmt_opt_date(d.meta.meeting_date),
            &d.meta.publication_date.to_string(),
            d.meta.speaker.as_deref().unwrap_or(NA),
            &d.meta.source_path,
            &d.paragraphs.len().to_string(),
            &d.sentences.len().to_string(),
            &warnings.join(";"),
        ])
        .expect("in-memory write");
    }
    write_file(&out(config, CORPUS_FILE), &corpus_lines(&docs))?;
    write_file(&out(config, DOCUMENTS_FILE), &finish_csv(w))?;
    Ok(summary)
}

/// Builds the entailer described by the configuration, backed by the
/// persistent score cache.
pub fn build_entailer(config: &RunConfig, options: RunOptions) -> Result<Entailer, PipelineError> {
    let params = &config.params;
    let backend: Box<dyn EntailmentBackend> = match params.backend.kind {
        BackendKind::LexicalOracle => Box::new(LexicalOracle::new(params.oracle_lexicon()?, params.backend.batch_size)),
        BackendKind::Remote => Box::new(RemoteBackend::new(&params.backend)?),
    };
    let cache = ScoreCache::open(&config.cache_path).map_err(|e| PipelineError::io(&config.cache_path, e))?;
    Ok(Entailer::new(backend).with_cache(cache).offline(options.offline))
}

/// Everything scored for one document.
#[derive(Debug, Clone, PartialEq)]
pub struct DocumentScores {
    pub assignments: Vec<TopicAssignment>,
    pub categories: Vec<(ExpressionCounts, StanceResult)>,
}

pub fn score_document(
    doc: &Document,
    classifier: &TopicClassifier,
    scorers: &[CategoryScorer],
    entailer: &Entailer,
) -> Result<DocumentScores, EntailmentError> {
    let assignments = classifier.classify_document(doc, entailer)?;
    let categories = scorers
        .iter()
        .map(|s| {
            let counts = s.count(doc, &assignments, entailer)?;
            let result = s.score(&counts);
            Ok((counts, result))
        })
        .collect::<Result<_, EntailmentError>>()?;
    Ok(DocumentScores { assignments, categories })
}

pub fn score(config: &RunConfig, options: RunOptions) -> Result<ScoreSummary, PipelineError> {
    let docs = read_corpus(&out(config, CORPUS_FILE))?;
    let entailer = build_entailer(config, options)?;
    score_with(config, &docs, &entailer)
}

/// Scores already-loaded documents with a caller-supplied entailer.
pub fn score_with(config: &RunConfig, docs: &[Document], entailer: &Entailer) -> Result<ScoreSummary, PipelineError> {
    let params = &config.params;
    let classifier = TopicClassifier::new(params.topic_list()?, &params.template()?, params.threshold);
    let scorers: Vec<CategoryScorer> = params
        .categories
        .iter()
        .map(|c| CategoryScorer::new(c.clone(), params.threshold, params.count_mode))
        .collect::<Result<_, _>>()
        .map_err(|e| ConfigError::Invalid(e.to_string()))?;

    let scored = exec::try_map(params.exec_mode(), docs, |doc| {
        score_document(doc, &classifier, &scorers, entailer)
    });
    // Whatever was scored before a failure is already in the cache file.
    let scored = scored?;
    entailer
        .cache()
        .compact()
        .map_err(|e| PipelineError::io(&config.cache_path, e))?;

    let mut summary = ScoreSummary {
        documents: docs.len(),
        sentences: docs.iter().map(|d| d.sentences.len()).sum(),
        backend_calls: entailer.backend_calls(),
        ..Default::default()
    };

    let mut topics = csv_writer();
    topics
        .write_record(["doc_id", "sentence_index", "topic", "score", "assigned"])
        .expect("in-memory write");
    for (doc, s) in docs.iter().zip(&scored) {
        for a in &s.assignments {
            for (topic, score) in &a.scores {
                let assigned = a.has(topic);
                if assigned {
                    *summary.topic_sentences.entry(topic.clone()).or_default() += 1;
                }
                topics
                    .write_record([
                        doc.meta.doc_id.as_str(),
                        &a.sentence_index.to_string(),
                        topic,
                        &score.value().to_string(),
                        if assigned { "1" } else { "0" },
                    ])
                    .expect("in-memory write");
            }
        }
    }

    let expression_columns: Vec<(String, String)> = scorers
        .iter()
        .flat_map(|s| {
            s.expressions()
                .iter()
                .map(move |e| (s.category().to_string(), e.expression.clone()))
        })
        .collect();
    let mut stance = csv_writer();
    let mut header: Vec<String> = STANCE_FIXED_COLUMNS.iter().map(|c| c.to_string()).collect();
    header.extend(expression_columns.iter().map(|(c, e)| format!("{c}/{}", e.replace(' ', "_"))));
    stance.write_record(&header).expect("in-memory write");
    for (doc, s) in docs.iter().zip(&scored) {
        for (counts, result) in &s.categories {
            if result.score.is_some() {
                summary.defined_scores += 1;
            } else {
                summary.undefined_scores += 1;
            }
            let mut row = vec![
                doc.meta.doc_id.clone(),
                fmt_opt_date(doc.meta.meeting_date),
                doc.meta.publication_date.to_string(),
                doc.meta.doc_type.to_string(),
                result.category.clone(),
                result.up_total.to_string(),
                result.down_total.to_string(),
                fmt_opt_f64(result.score),
            ];
            row.extend(expression_columns.iter().map(|(category, expression)| {
                if *category != counts.category {
                    return String::new();
                }
                counts
                    .counts
                    .iter()
                    .find(|(e, _)| e.expression == *expression)
                    .map_or_else(String::new, |(_, n)| n.to_string())
            }));
            stance.write_record(&row).expect("in-memory write");
        }
    }

    write_file(&out(config, TOPICS_FILE), &finish_csv(topics))?;
    write_file(&out(config, STANCE_FILE), &finish_csv(stance))?;
    Ok(summary)
}

pub fn report(config: &RunConfig) -> Result<ReportSummary, PipelineError> {
    let records = read_stance(&out(config, STANCE_FILE))?;
    let params = &config.params;
    let events = read_rate_history(&config.rate_history)?;
    let timeline = label_phases(&events, &params.zero_rate_intervals)?;
    let mut summary = ReportSummary::default();

    let categories: Vec<&str> = params.categories.iter().map(|c| c.category.as_str()).collect();
    let meeting_types: Vec<DocType> = DocType::ALL.into_iter().filter(|t| *t != DocType::Speech).collect();

    let mut series = csv_writer();
    series
        .write_record(["category", "source", "meeting_date", "doc_id", "score", "speeches_used"])
        .expect("in-memory write");
    let mut phase_series: BTreeMap<(DocType, &str), Vec<(chrono::NaiveDate, f64)>> = BTreeMap::new();
    for &category in &categories {
        let mut meetings = BTreeSet::new();
        for &doc_type in &meeting_types {
            let s = build_series(&records, category, doc_type)?;
            for p in &s.points {
                series
                    .write_record([
                        category,
                        doc_type.as_str(),
                        &p.meeting_date.to_string(),
                        &p.doc_id,
                        &p.score.to_string(),
                        "",
                    ])
                    .expect("in-memory write");
            }
            summary.series_points += s.points.len();
            phase_series.insert((doc_type, category), s.dated_scores());
            meetings.extend(
                records
                    .iter()
                    .filter(|r| r.category == category && r.doc_type == doc_type)
                    .filter_map(|r| r.meeting_date),
            );
        }
        for meeting in meetings {
            if let Some(avg) = speech_premeeting_average(&records, category, meeting, params.speech_window) {
                series
                    .write_record([
                        category,
                        "speech_premeeting_avg",
                        &meeting.to_string(),
                        "",
                        &avg.mean.to_string(),
                        &avg.used.to_string(),
                    ])
                    .expect("in-memory write");
                summary.series_points += 1;
            }
        }
    }

    let phase_labels = [PhaseLabel::Hike, PhaseLabel::Cut, PhaseLabel::ZeroRate];
    let mut phases = csv_writer();
    phases
        .write_record([
            "doc_type",
            "category",
            "entire_period",
            "hike",
            "cut",
            "zero_rate",
            "n_entire_period",
            "n_hike",
            "n_cut",
            "n_zero_rate",
        ])
        .expect("in-memory write");
    let mut ttest = csv_writer();
    ttest
        .write_record(["doc_type", "category", "t", "df", "p", "alternative", "n_a", "n_b"])
        .expect("in-memory write");

    let present: BTreeSet<DocType> = records.iter().map(|r| r.doc_type).collect();
    for &doc_type in params.phase_doc_types.iter().filter(|t| present.contains(t)) {
        for &category in &categories {
            let points = phase_series.get(&(doc_type, category)).cloned().unwrap_or_default();
            let mut samples = vec![phase_points(&points, &timeline, PhaseSelector::All)];
            samples.extend(
                phase_labels
                    .iter()
                    .map(|&l| phase_points(&points, &timeline, PhaseSelector::Label(l))),
            );
            let means = samples.iter().map(|s| mean(s));
            let mut row = vec![doc_type.to_string(), category.to_string()];
            row.extend(means.map(fmt_opt_f64));
            row.extend(samples.iter().map(|s| s.len().to_string()));
            phases.write_record(&row).expect("in-memory write");
            summary.summary_rows += 1;

            let (hike, cut) = (&samples[1], &samples[2]);
            let (t, df, p) = match welch_t_test(hike, cut, Alternative::Greater) {
                Ok(r) => (Some(r.t_stat), Some(r.df), Some(r.p_value)),
                Err(AnalysisError::DegenerateSample(reason)) => {
                    log::warn!("{doc_type}/{category}: no t-test ({reason})");
                    (None, None, None)
                }
                Err(e) => return Err(e.into()),
            };
            ttest
                .write_record([
                    doc_type.as_str(),
                    category,
                    &fmt_opt_f64(t),
                    &fmt_opt_f64(df),
                    &fmt_opt_f64(p),
                    Alternative::Greater.as_str(),
                    &hike.len().to_string(),
                    &cut.len().to_string(),
                ])
                .expect("in-memory write");
            summary.ttests += usize::from(p.is_some());
        }
    }

    write_file(&out(config, SERIES_FILE), &finish_csv(series))?;
    write_file(&out(config, PHASE_SUMMARY_FILE), &finish_csv(phases))?;
    write_file(&out(config, TTEST_FILE), &finish_csv(ttest))?;
    Ok(summary)
}

fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

/// `ingest`, `score` and `report` in sequence.
pub fn run_all(config: &RunConfig, options: RunOptions) -> Result<(IngestSummary, ScoreSummary, ReportSummary), PipelineError> {
    let i = ingest(config)?;
    let s = score(config, options)?;
    let r = report(config)?;
    Ok((i, s, r))
}

/// Convenience for callers holding only stance records, e.g. tests.
pub fn records_from_results(docs: &[Document], results: &[StanceResult]) -> Vec<StanceRecord> {
    results
        .iter()
        .filter_map(|r| {
            let doc = docs.iter().find(|d| d.meta.doc_id == r.doc_id)?;
            Some(StanceRecord {
                doc_id: r.doc_id.clone(),
                doc_type: doc.meta.doc_type,
                meeting_date: doc.meta.meeting_date,
                publication_date: doc.meta.publication_date,
                category: r.category.clone(),
                up_total: r.up_total,
                down_total: r.down_total,
                score: r.score,
            })
        })
        .collect()
}
