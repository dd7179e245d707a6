//! End-to-end orchestration: repo-level parallelism, per-repo shard files,
//! a deterministic merge, and a resumable run manifest.
//!
//! Workers process whole repositories; each worker owns its repository
//! handle and writes one shard file per finished repo. The merge sorts all
//! shard records by the stable key before splitting and writing, so dataset,
//! stats and manifest bytes are identical for any worker count and for
//! resumed runs.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;

use thiserror::Error;

use crate::comments::{split_triple, CommentSyntax, SkipReason, SplitOutcome, TripleMeta};
use crate::config::{ConfigError, PipelineConfig};
use crate::dataset::{
    apply_split, dedup_records, read_records, sort_by_stable_key, split, stats, write_records,
    DatasetError, Split, TripleRecord,
};
use crate::diff::{parse_unified_diff, parse_unified_diff_lenient};
use crate::ingest::{
    is_todo_related, list_commits, read_repo_list, IngestError, Language, RepoSource, Strictness,
};
use crate::label::label_triple;
use crate::normalize::{check_size, NormalizeError, Normalizer};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const SHARDS_DIR: &str = "shards";

/// Per-stage commit counters. `todo_commits` counts every commit whose diff
/// contains the token; each such commit lands in exactly one of the other
/// buckets, where emitted means positive or negative.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct StageCounters {
    pub todo_commits: u64,
    pub skipped_multi_todo: u64,
    pub skipped_no_todo: u64,
    pub oversized: u64,
    pub discarded_added: u64,
    pub positive: u64,
    pub negative: u64,
}

impl StageCounters {
    pub fn emitted(&self) -> u64 {
        self.positive + self.negative
    }

    /// The conservation invariant: every TODO commit is accounted for.
    pub fn is_conserved(&self) -> bool {
        self.todo_commits
            == self.emitted()
                + self.skipped_multi_todo
                + self.skipped_no_todo
                + self.oversized
                + self.discarded_added
    }

    pub fn add(&mut self, other: &StageCounters) {
        self.todo_commits += other.todo_commits;
        self.skipped_multi_todo += other.skipped_multi_todo;
        self.skipped_no_todo += other.skipped_no_todo;
        self.oversized += other.oversized;
        self.discarded_added += other.discarded_added;
        self.positive += other.positive;
        self.negative += other.negative;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RepoStatus {
    Pending,
    Done,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct RepoEntry {
    pub status: RepoStatus,
    pub language: Language,
    pub error: Option<String>,
    pub counters: StageCounters,
}

/// Persisted progress and counters of one run. The single source of
/// progress: resuming re-reads this file, and auditing means diffing it.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub config_digest: String,
    pub repos: BTreeMap<String, RepoEntry>,
    pub totals: BTreeMap<Language, StageCounters>,
}

impl RunManifest {
    fn new(config_digest: String) -> Self {
        RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config_digest,
            repos: BTreeMap::new(),
            totals: BTreeMap::new(),
        }
    }

    pub fn load(path: &Path) -> Result<RunManifest, PipelineError> {
        let text = std::fs::read_to_string(path)
            .map_err(|_| PipelineError::ManifestMissing(path.to_path_buf()))?;
        serde_json::from_str(&text).map_err(PipelineError::ManifestCorrupt)
    }

    pub fn save(&self, path: &Path) -> Result<(), PipelineError> {
        let mut text = serde_json::to_string_pretty(self).map_err(PipelineError::ManifestCorrupt)?;
        text.push('\n');
        Ok(std::fs::write(path, text)?)
    }

    pub fn recompute_totals(&mut self) {
        self.totals.clear();
        for entry in self.repos.values() {
            if entry.status == RepoStatus::Done {
                self.totals.entry(entry.language).or_default().add(&entry.counters);
            }
        }
    }

    pub fn failed_repos(&self) -> Vec<&str> {
        self.repos
            .iter()
            .filter(|(_, e)| e.status == RepoStatus::Failed)
            .map(|(name, _)| name.as_str())
            .collect()
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Normalize(#[from] NormalizeError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error("output directory already holds a run ({0}); pass --resume to continue it")]
    OutputDirCollision(PathBuf),
    #[error("no manifest found at {0}; run without --resume first")]
    ManifestMissing(PathBuf),
    #[error("manifest cannot be read: {0}")]
    ManifestCorrupt(#[source] serde_json::Error),
    #[error("manifest config digest {found} does not match current config {expected}")]
    ManifestConfigMismatch { expected: String, found: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Process one repository: enumerate commits, keep TODO-related ones, apply
/// the size cap, parse, extract, label, and collect records plus counters.
pub fn process_repo(
    source: &RepoSource,
    normalizer: &Normalizer,
    strictness: Strictness,
) -> Result<(Vec<TripleRecord>, StageCounters), IngestError> {
    let syntax = CommentSyntax::for_language(source.language);
    let mut counters = StageCounters::default();
    let mut records = Vec::new();

    for commit in list_commits(source, strictness)? {
        if !is_todo_related(&commit.diff_text) {
            continue;
        }
        counters.todo_commits += 1;

        if !check_size(&commit, normalizer.config()).is_pass() {
            counters.oversized += 1;
            continue;
        }

        let diff = match strictness {
            Strictness::Strict => match parse_unified_diff(&commit.diff_text) {
                Ok(d) => d,
                Err(e) => {
                    return Err(IngestError::UnreadableCommit {
                        commit_id: commit.commit_id.clone(),
                        reason: e.to_string(),
                    })
                }
            },
            Strictness::Lenient => {
                let (d, warnings) = parse_unified_diff_lenient(&commit.diff_text);
                for w in warnings {
                    log::debug!("{}@{}: {w}", commit.repo, commit.commit_id);
                }
                d
            }
        };

        // An empty message is not a reason to drop the sample.
        let message = normalizer.normalize_message(&commit.message).unwrap_or_default();
        let meta = TripleMeta {
            repo: commit.repo.clone(),
            commit_id: commit.commit_id.clone(),
            language: source.language,
        };
        match split_triple(&diff, &message, &syntax, &meta, normalizer) {
            SplitOutcome::Skip(SkipReason::MultipleTodos) => counters.skipped_multi_todo += 1,
            SplitOutcome::Skip(SkipReason::NoTodo) => counters.skipped_no_todo += 1,
            SplitOutcome::Triple(triple) => {
                let label = label_triple(triple.scope);
                match TripleRecord::from_triple(&triple, label) {
                    None => counters.discarded_added += 1,
                    Some(record) => {
                        match label {
                            crate::label::Label::Positive => counters.positive += 1,
                            _ => counters.negative += 1,
                        }
                        records.push(record);
                    }
                }
            }
        }
    }
    Ok((records, counters))
}

/// Run the full pipeline into a fresh output directory.
pub fn run_pipeline(config: &PipelineConfig) -> Result<RunManifest, PipelineError> {
    let manifest_path = config.output_dir.join(MANIFEST_FILE);
    if manifest_path.exists() {
        return Err(PipelineError::OutputDirCollision(config.output_dir.clone()));
    }
    let (sources, digest) = load_sources(config)?;
    let mut manifest = RunManifest::new(digest);
    for source in &sources {
        manifest.repos.insert(
            source.path.clone(),
            RepoEntry {
                status: RepoStatus::Pending,
                language: source.language,
                error: None,
                counters: StageCounters::default(),
            },
        );
    }
    execute(config, &sources, manifest)
}

/// Resume a prior run: pending and failed repos are reprocessed, done repos
/// are left untouched, and the final merge is recomputed from all shards.
pub fn resume(config: &PipelineConfig) -> Result<RunManifest, PipelineError> {
    let manifest_path = config.output_dir.join(MANIFEST_FILE);
    let mut manifest = RunManifest::load(&manifest_path)?;
    let (sources, digest) = load_sources(config)?;
    if manifest.config_digest != digest {
        return Err(PipelineError::ManifestConfigMismatch {
            expected: digest,
            found: manifest.config_digest,
        });
    }
    for source in &sources {
        manifest.repos.entry(source.path.clone()).or_insert(RepoEntry {
            status: RepoStatus::Pending,
            language: source.language,
            error: None,
            counters: StageCounters::default(),
        });
    }
    execute(config, &sources, manifest)
}

fn load_sources(config: &PipelineConfig) -> Result<(Vec<RepoSource>, String), PipelineError> {
    let content = std::fs::read_to_string(&config.repo_list)
        .map_err(|_| IngestError::SourceNotFound(config.repo_list.clone()))?;
    let digest = config.digest(&content);
    let mut sources = read_repo_list(&config.repo_list)?;
    if let Some(lang) = config.language {
        sources.retain(|s| s.language == lang);
    }
    Ok((sources, digest))
}

fn sanitize_name(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || matches!(c, '.' | '-' | '_') { c } else { '_' })
        .collect()
}

/// Shard file for the i-th repo of the (digest-pinned) repo list.
fn shard_path(output_dir: &Path, index: usize, source: &RepoSource) -> PathBuf {
    output_dir
        .join(SHARDS_DIR)
        .join(format!("{index:06}_{}.jsonl", sanitize_name(&source.name())))
}

fn execute(
    config: &PipelineConfig,
    sources: &[RepoSource],
    mut manifest: RunManifest,
) -> Result<RunManifest, PipelineError> {
    std::fs::create_dir_all(config.output_dir.join(SHARDS_DIR))?;
    let manifest_path = config.output_dir.join(MANIFEST_FILE);
    let normalizer = Normalizer::new(&config.normalize)?;
    let strictness = if config.strict { Strictness::Strict } else { Strictness::Lenient };

    let jobs: Vec<(usize, &RepoSource)> = sources
        .iter()
        .enumerate()
        .filter(|(i, source)| {
            let done = manifest
                .repos
                .get(&source.path)
                .map_or(false, |e| e.status == RepoStatus::Done);
            !(done && shard_path(&config.output_dir, *i, source).exists())
        })
        .collect();

    // Workers pull jobs from a shared cursor and own their repo handle and
    // shard file; the manifest is only touched here, at completion
    // boundaries.
    let cursor = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel::<(usize, Result<StageCounters, String>)>();
    std::thread::scope(|scope| {
        for _ in 0..config.workers.min(jobs.len().max(1)) {
            let tx = tx.clone();
            let jobs = &jobs;
            let cursor = &cursor;
            let normalizer = &normalizer;
            let output_dir = &config.output_dir;
            scope.spawn(move || loop {
                let slot = cursor.fetch_add(1, Ordering::SeqCst);
                let Some(&(index, source)) = jobs.get(slot) else {
                    break;
                };
                let outcome = process_repo(source, normalizer, strictness).and_then(|(mut records, counters)| {
                    sort_by_stable_key(&mut records);
                    write_records(&records, &shard_path(output_dir, index, source))
                        .map_err(|e| IngestError::Io(std::io::Error::other(e.to_string())))?;
                    Ok(counters)
                });
                let message = (index, outcome.map_err(|e| e.to_string()));
                if tx.send(message).is_err() {
                    break;
                }
            });
        }
        drop(tx);

        for (index, outcome) in rx {
            let source = &sources[index];
            let entry = manifest.repos.get_mut(&source.path).expect("repo entry exists");
            match outcome {
                Ok(counters) => {
                    entry.status = RepoStatus::Done;
                    entry.error = None;
                    entry.counters = counters;
                }
                Err(message) => {
                    log::error!("repo {} failed: {message}", source.path);
                    entry.status = RepoStatus::Failed;
                    entry.error = Some(message);
                    entry.counters = StageCounters::default();
                }
            }
            manifest.recompute_totals();
            if let Err(e) = manifest.save(&manifest_path) {
                log::error!("cannot save manifest: {e}");
            }
        }
    });

    merge_outputs(config, sources, &manifest)?;
    manifest.save(&manifest_path)?;
    Ok(manifest)
}

fn merge_outputs(
    config: &PipelineConfig,
    sources: &[RepoSource],
    manifest: &RunManifest,
) -> Result<(), PipelineError> {
    let mut records: Vec<TripleRecord> = Vec::new();
    for (index, source) in sources.iter().enumerate() {
        let done = manifest
            .repos
            .get(&source.path)
            .map_or(false, |e| e.status == RepoStatus::Done);
        if !done {
            continue;
        }
        records.extend(read_records(&shard_path(&config.output_dir, index, source))?);
    }
    sort_by_stable_key(&mut records);
    if config.dedup {
        records = dedup_records(records);
    }

    if !records.is_empty() {
        let assignment = split(&records, config.seed)?;
        apply_split(&mut records, &assignment);
    }
    for (name, which) in [("train.jsonl", Split::Train), ("val.jsonl", Split::Val), ("test.jsonl", Split::Test)] {
        let part: Vec<TripleRecord> = records.iter().filter(|r| r.split == Some(which)).cloned().collect();
        write_records(&part, &config.output_dir.join(name))?;
    }

    let todo_commits: BTreeMap<Language, u64> =
        manifest.totals.iter().map(|(lang, c)| (*lang, c.todo_commits)).collect();
    let report = stats(&records, &todo_commits);
    std::fs::write(config.output_dir.join("stats.txt"), report.render_table())?;
    let mut stats_json = serde_json::to_string_pretty(&report).map_err(PipelineError::ManifestCorrupt)?;
    stats_json.push('\n');
    std::fs::write(config.output_dir.join("stats.json"), stats_json)?;
    Ok(())
}
