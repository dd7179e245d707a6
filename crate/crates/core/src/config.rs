//! Pipeline configuration: a UTF-8 TOML file with `[pipeline]` and
//! `[normalize]` sections, plus command-line overrides.

use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::ingest::Language;
use crate::normalize::{NormalizationConfig, NormalizeError, Normalizer};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Unreadable {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse config file: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("missing required setting: {0}")]
    Missing(&'static str),
    #[error("invalid setting: {0}")]
    Invalid(String),
    #[error(transparent)]
    Normalize(#[from] NormalizeError),
}

/// Fully resolved pipeline configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineConfig {
    pub repo_list: PathBuf,
    pub output_dir: PathBuf,
    /// When set, only repositories of this language are processed.
    pub language: Option<Language>,
    pub seed: u64,
    pub workers: usize,
    pub strict: bool,
    pub dedup: bool,
    pub normalize: NormalizationConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            repo_list: PathBuf::new(),
            output_dir: PathBuf::new(),
            language: None,
            seed: 0,
            workers: 1,
            strict: false,
            dedup: false,
            normalize: NormalizationConfig::default(),
        }
    }
}

/// Command-line overrides; any `Some` value wins over the config file.
#[derive(Debug, Clone, Default)]
pub struct ConfigOverrides {
    pub repo_list: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    pub language: Option<Language>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub strict: bool,
    pub dedup: bool,
}

#[derive(Debug, Default, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct PipelineSection {
    repo_list: Option<PathBuf>,
    output_dir: Option<PathBuf>,
    language: Option<Language>,
    seed: Option<u64>,
    workers: Option<usize>,
    strict: Option<bool>,
    dedup: Option<bool>,
}

#[derive(Debug, Default, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    pipeline: Option<PipelineSection>,
    normalize: Option<NormalizationConfig>,
}

impl PipelineConfig {
    /// Parse a config file body. Missing sections fall back to defaults;
    /// `repo_list` and `output_dir` are validated later, in
    /// [`PipelineConfig::resolve`], so overrides can still supply them.
    pub fn from_toml_str(text: &str) -> Result<PipelineConfig, ConfigError> {
        let file: ConfigFile = toml::from_str(text)?;
        let section = file.pipeline.unwrap_or_default();
        Ok(PipelineConfig {
            repo_list: section.repo_list.unwrap_or_default(),
            output_dir: section.output_dir.unwrap_or_default(),
            language: section.language,
            seed: section.seed.unwrap_or(0),
            workers: section.workers.unwrap_or(1),
            strict: section.strict.unwrap_or(false),
            dedup: section.dedup.unwrap_or(false),
            normalize: file.normalize.unwrap_or_default(),
        })
    }

    /// Load the config file (if any), apply overrides, and validate.
    pub fn resolve(path: Option<&Path>, overrides: &ConfigOverrides) -> Result<PipelineConfig, ConfigError> {
        let mut config = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|source| ConfigError::Unreadable {
                    path: p.to_path_buf(),
                    source,
                })?;
                PipelineConfig::from_toml_str(&text)?
            }
            None => PipelineConfig::default(),
        };
        if let Some(v) = &overrides.repo_list {
            config.repo_list = v.clone();
        }
        if let Some(v) = &overrides.output_dir {
            config.output_dir = v.clone();
        }
        if let Some(v) = overrides.language {
            config.language = Some(v);
        }
        if let Some(v) = overrides.seed {
            config.seed = v;
        }
        if let Some(v) = overrides.workers {
            config.workers = v;
        }
        if overrides.strict {
            config.strict = true;
        }
        if overrides.dedup {
            config.dedup = true;
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.repo_list.as_os_str().is_empty() {
            return Err(ConfigError::Missing("pipeline.repo_list"));
        }
        if self.output_dir.as_os_str().is_empty() {
            return Err(ConfigError::Missing("pipeline.output_dir"));
        }
        if self.workers == 0 {
            return Err(ConfigError::Invalid("workers must be at least 1".into()));
        }
        Normalizer::new(&self.normalize)?;
        Ok(())
    }

    /// Digest over everything that shapes the output: the semantic settings
    /// and the repo list content. The output directory and worker count are
    /// excluded — outputs are independent of both — so a resumed run in the
    /// same directory always matches.
    pub fn digest(&self, repo_list_content: &str) -> String {
        let mut hasher = Sha256::new();
        hasher.update(b"todo-miner-config-v1\n");
        hasher.update(format!("seed={}\n", self.seed));
        hasher.update(format!(
            "language={}\n",
            self.language.map_or_else(|| "all".to_string(), |l| l.to_string())
        ));
        hasher.update(format!("strict={}\n", self.strict));
        hasher.update(format!("dedup={}\n", self.dedup));
        hasher.update(format!(
            "normalize={}|{}|{}|{}|{}\n",
            self.normalize.commit_id_pattern,
            self.normalize.issue_id_pattern,
            self.normalize.commit_placeholder,
            self.normalize.issue_placeholder,
            self.normalize.max_diff_bytes
        ));
        hasher.update(b"repo-list:\n");
        hasher.update(repo_list_content.as_bytes());
        let digest = hasher.finalize();
        digest.iter().fold(String::with_capacity(64), |mut acc, b| {
            use std::fmt::Write;
            let _ = write!(acc, "{b:02x}");
            acc
        })
    }
}
