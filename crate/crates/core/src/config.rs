//! Run configuration.
//!
//! A run config is a TOML file naming the input and output paths. Every
//! scoring parameter (threshold, topics, expression sets, preprocessing
//! rules, ...) has a built-in default in `config/default.toml`; a run config
//! overrides whole top-level keys. Relative paths resolve against the
//! directory of the config file.

use std::collections::{BTreeMap, HashSet};
use std::env;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{DocType, PreprocessRules, Preprocessor};
use crate::entailment::{BackendDescriptor, BackendKind, LexiconEntry, OracleLexicon};
use crate::exec::ExecMode;
use crate::stance::{render_hypotheses, CategoryConfig, CountMode};
use crate::topics::{Threshold, Topic, TopicTemplate};

/// Overrides `backend.endpoint` when set.
pub const ENDPOINT_ENV: &str = "STANCE_SCOPE_ENDPOINT";

const BUILTIN: &str = include_str!("../config/default.toml");

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("config syntax: {0}")]
    Syntax(String),
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("{what} does not exist: {path}")]
    MissingPath { what: &'static str, path: String },
}

/// A topic plus the keywords the lexical oracle uses to recognise it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopicConfig {
    pub name: String,
    pub display: String,
    #[serde(default)]
    pub oracle_subjects: Vec<String>,
    #[serde(default)]
    pub oracle_synonyms: Vec<String>,
}

impl TopicConfig {
    pub fn topic(&self) -> Result<Topic, ConfigError> {
        Topic::new(&self.name, &self.display).map_err(|e| ConfigError::Invalid(e.to_string()))
    }
}

/// Every tunable parameter of a run, independent of file locations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Parameters {
    pub threshold: Threshold,
    pub count_mode: CountMode,
    pub parallelism: usize,
    pub topic_template: String,
    /// How many pre-meeting speeches feed the speech average.
    pub speech_window: usize,
    /// Document types that get a phase summary and t-test.
    pub phase_doc_types: Vec<DocType>,
    pub zero_rate_intervals: Vec<(NaiveDate, NaiveDate)>,
    pub backend: BackendDescriptor,
    pub topics: Vec<TopicConfig>,
    pub categories: Vec<CategoryConfig>,
    #[serde(default)]
    pub oracle_keywords: BTreeMap<String, Vec<String>>,
    pub preprocess: PreprocessRules,
}

fn builtin_table() -> toml::Table {
    BUILTIN.parse().expect("built-in parameters are valid TOML")
}

/// The built-in defaults.
pub fn builtin_parameters() -> &'static Parameters {
    static PARAMS: OnceLock<Parameters> = OnceLock::new();
    PARAMS.get_or_init(|| {
        let params: Parameters = builtin_table().try_into().expect("built-in parameters deserialize");
        params.validate().expect("built-in parameters are consistent");
        params
    })
}

impl Parameters {
    pub fn template(&self) -> Result<TopicTemplate, ConfigError> {
        TopicTemplate::new(self.topic_template.clone()).map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn topic_list(&self) -> Result<Vec<Topic>, ConfigError> {
        self.topics.iter().map(TopicConfig::topic).collect()
    }

    pub fn exec_mode(&self) -> ExecMode {
        ExecMode::from_parallelism(self.parallelism)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: String| Err(ConfigError::Invalid(m));
        if self.parallelism == 0 {
            return invalid("parallelism must be a positive integer".into());
        }
        if self.speech_window == 0 {
            return invalid("speech_window must be a positive integer".into());
        }
        self.template()?;
        self.backend
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Preprocessor::new(self.preprocess.clone()).map_err(|e| ConfigError::Invalid(e.to_string()))?;

        let mut names = HashSet::new();
        for t in &self.topics {
            t.topic()?;
            if !names.insert(t.name.as_str()) {
                return invalid(format!("topic `{}` is listed twice", t.name));
            }
        }
        let mut seen = HashSet::new();
        for c in &self.categories {
            if !names.contains(c.category.as_str()) {
                return invalid(format!("category `{}` is not a configured topic", c.category));
            }
            if !seen.insert(c.category.as_str()) {
                return invalid(format!("category `{}` is listed twice", c.category));
            }
            render_hypotheses(c).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        }
        for (start, end) in &self.zero_rate_intervals {
            if start > end {
                return invalid(format!("zero-rate interval {start}..{end} ends before it starts"));
            }
        }
        Ok(())
    }

    /// Lexicon for the lexical oracle covering every topic and expression
    /// hypothesis this configuration renders.
    pub fn oracle_lexicon(&self) -> Result<OracleLexicon, ConfigError> {
        let template = self.template()?;
        let mut lexicon = OracleLexicon::new();
        for t in &self.topics {
            let entry = LexiconEntry {
                subjects: t.oracle_subjects.clone(),
                synonyms: t.oracle_synonyms.clone(),
                expressions: Vec::new(),
            };
            lexicon.insert(template.render(&t.topic()?).as_str(), &entry);
        }
        for c in &self.categories {
            let topic = self
                .topics
                .iter()
                .find(|t| t.name == c.category)
                .ok_or_else(|| ConfigError::Invalid(format!("category `{}` is not a configured topic", c.category)))?;
            for e in render_hypotheses(c).map_err(|e| ConfigError::Invalid(e.to_string()))? {
                let expressions = self
                    .oracle_keywords
                    .get(&e.expression)
                    .cloned()
                    .unwrap_or_else(|| vec![e.expression.clone()]);
                let entry = LexiconEntry {
                    subjects: topic.oracle_subjects.clone(),
                    synonyms: topic.oracle_synonyms.clone(),
                    expressions,
                };
                lexicon.insert(e.hypothesis.as_str(), &entry);
            }
        }
        Ok(lexicon)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPaths {
    corpus_dir: PathBuf,
    manifest: PathBuf,
    rate_history: PathBuf,
    output_dir: PathBuf,
    #[serde(default)]
    cache_path: Option<PathBuf>,
}

const PATH_KEYS: [&str; 5] = ["corpus_dir", "manifest", "rate_history", "output_dir", "cache_path"];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub corpus_dir: PathBuf,
    pub manifest: PathBuf,
    pub rate_history: PathBuf,
    pub output_dir: PathBuf,
    /// Defaults to `<output_dir>/entailment_cache.jsonl`.
    pub cache_path: PathBuf,
    pub params: Parameters,
}

fn resolve(base: &Path, p: PathBuf) -> PathBuf {
    if p.is_absolute() {
        p
    } else {
        base.join(p)
    }
}

impl RunConfig {
    /// Loads a config file, applying the endpoint environment override.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.display().to_string(),
            source,
        })?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        let endpoint = env::var(ENDPOINT_ENV).ok().filter(|v| !v.trim().is_empty());
        Self::from_toml(&text, base, endpoint)
    }

    /// Parses config text. `endpoint_override` replaces the backend
    /// endpoint, as the environment variable does for [`load`](Self::load).
    pub fn from_toml(text: &str, base_dir: &Path, endpoint_override: Option<String>) -> Result<Self, ConfigError> {
        let user: toml::Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Syntax(e.to_string()))?;
        let mut paths = toml::Table::new();
        let mut merged = builtin_table();
        for (key, value) in user {
            if PATH_KEYS.contains(&key.as_str()) {
                paths.insert(key, value);
            } else {
                merged.insert(key, value);
            }
        }
        let syntax = |e: toml::de::Error| ConfigError::Syntax(e.to_string());
        let raw: RawPaths = paths.try_into().map_err(syntax)?;
        let mut params: Parameters = merged.try_into().map_err(syntax)?;
        if let Some(endpoint) = endpoint_override {
            params.backend.endpoint = Some(endpoint);
        }
        params.validate()?;

        let output_dir = resolve(base_dir, raw.output_dir);
        let cache_path = raw
            .cache_path
            .map(|p| resolve(base_dir, p))
            .unwrap_or_else(|| output_dir.join("entailment_cache.jsonl"));
        let config = RunConfig {
            corpus_dir: resolve(base_dir, raw.corpus_dir),
            manifest: resolve(base_dir, raw.manifest),
            rate_history: resolve(base_dir, raw.rate_history),
            output_dir,
            cache_path,
            params,
        };
        config.check_paths()?;
        Ok(config)
    }

    fn check_paths(&self) -> Result<(), ConfigError> {
        let checks: [(&'static str, &Path, bool); 3] = [
            ("corpus_dir", &self.corpus_dir, true),
            ("manifest", &self.manifest, false),
            ("rate_history", &self.rate_history, false),
        ];
        for (what, path, dir) in checks {
            let ok = if dir { path.is_dir() } else { path.is_file() };
            if !ok {
                return Err(ConfigError::MissingPath {
                    what,
                    path: path.display().to_string(),
                });
            }
        }
        Ok(())
    }

    pub fn set_threshold(&mut self, value: f64) -> Result<(), ConfigError> {
        self.params.threshold = Threshold::new(value).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(())
    }

    pub fn set_backend(&mut self, kind: BackendKind) -> Result<(), ConfigError> {
        self.params.backend.kind = kind;
        self.params
            .backend
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    /// Moves the output directory. A cache that lived in the old output
    /// directory moves with it.
    pub fn set_output_dir(&mut self, dir: PathBuf) {
        if self.cache_path.parent() == Some(self.output_dir.as_path()) {
            if let Some(name) = self.cache_path.file_name() {
                self.cache_path = dir.join(name);
            }
        }
        self.output_dir = dir;
    }
}
