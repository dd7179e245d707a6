//! Command-line front end. Exit codes: 0 success, 1 configuration or usage
//! error, 2 partial failure (some repositories failed; see the manifest).

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use todo_miner::comments::{split_triple, CommentSyntax, SplitOutcome, TripleMeta};
use todo_miner::config::{ConfigError, ConfigOverrides, PipelineConfig};
use todo_miner::dataset::{
    apply_split, dedup_records, read_records, read_triples, sample_for_review, sort_by_stable_key,
    split, stats, write_patch_archive, write_records, write_triples, Split, TripleRecord,
};
use todo_miner::ingest::{is_todo_related, list_commits, Language, RepoSource, Strictness};
use todo_miner::label::{label_triple, Label};
use todo_miner::normalize::{check_size, Normalizer};
use todo_miner::pipeline::{self, resume, run_pipeline, PipelineError, RunManifest};

#[derive(Parser)]
#[command(name = "todo-miner", version, about = "Mine TODO-comment changes from git history into labeled datasets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline over a repository list.
    Harvest {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        repo_list: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        dedup: bool,
        /// Continue a previous run in the same output directory.
        #[arg(long)]
        resume: bool,
        #[arg(long)]
        strict: bool,
        #[arg(long, value_enum)]
        lang: Option<Language>,
    },
    /// Extract unlabeled triples from one repository.
    Extract {
        #[arg(long)]
        repo: PathBuf,
        #[arg(long, value_enum)]
        lang: Language,
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        strict: bool,
    },
    /// Label a triples file, dropping added-scope samples.
    Label {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Split labeled records into train/val/test files.
    Split {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        dedup: bool,
    },
    /// Report dataset statistics for a split output directory.
    Stats {
        /// Directory holding train.jsonl, val.jsonl and test.jsonl.
        #[arg(long)]
        input: PathBuf,
        /// Manifest to take TODO-commit totals from.
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Where to write stats.txt and stats.json (defaults to the input
        /// directory). The table is always printed to stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Draw a seeded review sample into a CSV sheet.
    SampleReview {
        /// Record files to sample from (repeatable).
        #[arg(long, required = true)]
        input: Vec<PathBuf>,
        #[arg(long, default_value_t = 100)]
        pos: usize,
        #[arg(long, default_value_t = 100)]
        neg: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: PathBuf,
    },
    /// Export a repository's commits as a patch archive.
    Archive {
        #[arg(long)]
        repo: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        strict: bool,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &CliError) -> u8 {
    match e {
        CliError::Config(_) | CliError::Pipeline(PipelineError::Config(_)) => 1,
        CliError::Pipeline(PipelineError::ManifestConfigMismatch { .. }) => 1,
        CliError::Pipeline(PipelineError::OutputDirCollision(_)) => 1,
        _ => 1,
    }
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Ingest(#[from] todo_miner::ingest::IngestError),
    #[error(transparent)]
    Archive(#[from] todo_miner::ingest::ArchiveError),
    #[error(transparent)]
    Dataset(#[from] todo_miner::dataset::DatasetError),
    #[error(transparent)]
    Normalize(#[from] todo_miner::normalize::NormalizeError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn run(command: Command) -> Result<ExitCode, CliError> {
    match command {
        Command::Harvest { config, repo_list, output, seed, workers, dedup, resume: do_resume, strict, lang } => {
            let overrides = ConfigOverrides {
                repo_list,
                output_dir: output,
                language: lang,
                seed,
                workers,
                strict,
                dedup,
            };
            let config = PipelineConfig::resolve(config.as_deref(), &overrides)?;
            let manifest = if do_resume { resume(&config)? } else { run_pipeline(&config)? };
            report_manifest(&manifest);
            if manifest.failed_repos().is_empty() {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(2))
            }
        }
        Command::Extract { repo, lang, output, config, strict } => {
            let normalize = match config {
                Some(path) => {
                    let text = std::fs::read_to_string(&path)?;
                    PipelineConfig::from_toml_str(&text)?.normalize
                }
                None => Default::default(),
            };
            let normalizer = Normalizer::new(&normalize)?;
            let source = RepoSource { path: repo.display().to_string(), language: lang, star_rank: 0 };
            let strictness = if strict { Strictness::Strict } else { Strictness::Lenient };
            let syntax = CommentSyntax::for_language(lang);

            let mut triples = Vec::new();
            let mut counters = pipeline::StageCounters::default();
            for commit in list_commits(&source, strictness)? {
                if !is_todo_related(&commit.diff_text) {
                    continue;
                }
                counters.todo_commits += 1;
                if !check_size(&commit, &normalize).is_pass() {
                    counters.oversized += 1;
                    continue;
                }
                let (diff, _) = todo_miner::diff::parse_unified_diff_lenient(&commit.diff_text);
                let message = normalizer.normalize_message(&commit.message).unwrap_or_default();
                let meta = TripleMeta {
                    repo: commit.repo.clone(),
                    commit_id: commit.commit_id.clone(),
                    language: lang,
                };
                match split_triple(&diff, &message, &syntax, &meta, &normalizer) {
                    SplitOutcome::Triple(t) => triples.push(*t),
                    SplitOutcome::Skip(_) => {}
                }
            }
            std::fs::create_dir_all(&output)?;
            write_triples(&triples, &output.join("triples.jsonl"))?;
            println!("extracted {} triples from {} todo commits", triples.len(), counters.todo_commits);
            Ok(ExitCode::SUCCESS)
        }
        Command::Label { input, output } => {
            let triples = read_triples(&input)?;
            let mut records = Vec::new();
            let mut discarded = 0usize;
            for triple in &triples {
                match TripleRecord::from_triple(triple, label_triple(triple.scope)) {
                    Some(record) => records.push(record),
                    None => discarded += 1,
                }
            }
            sort_by_stable_key(&mut records);
            write_records(&records, &output)?;
            let positive = records.iter().filter(|r| r.label == Label::Positive).count();
            println!(
                "labeled {} records ({positive} positive, {} negative), discarded {discarded} added-scope",
                records.len(),
                records.len() - positive,
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Split { input, output, seed, dedup } => {
            let mut records = read_records(&input)?;
            sort_by_stable_key(&mut records);
            if dedup {
                records = dedup_records(records);
            }
            if !records.is_empty() {
                let assignment = split(&records, seed)?;
                apply_split(&mut records, &assignment);
            }
            std::fs::create_dir_all(&output)?;
            for (name, which) in [("train.jsonl", Split::Train), ("val.jsonl", Split::Val), ("test.jsonl", Split::Test)] {
                let part: Vec<TripleRecord> =
                    records.iter().filter(|r| r.split == Some(which)).cloned().collect();
                write_records(&part, &output.join(name))?;
            }
            let (train, val, test) = if records.is_empty() {
                (0, 0, 0)
            } else {
                todo_miner::dataset::split_sizes(records.len())
            };
            println!("split {} records into {train}/{val}/{test}", records.len());
            Ok(ExitCode::SUCCESS)
        }
        Command::Stats { input, manifest, output } => {
            let mut records = Vec::new();
            for name in ["train.jsonl", "val.jsonl", "test.jsonl"] {
                let path = input.join(name);
                if path.exists() {
                    records.extend(read_records(&path)?);
                }
            }
            let todo_commits: BTreeMap<Language, u64> = match manifest {
                Some(path) => RunManifest::load(&path)?
                    .totals
                    .iter()
                    .map(|(l, c)| (*l, c.todo_commits))
                    .collect(),
                None => BTreeMap::new(),
            };
            let report = stats(&records, &todo_commits);
            let table = report.render_table();
            print!("{table}");
            let out_dir = output.unwrap_or(input);
            std::fs::create_dir_all(&out_dir)?;
            std::fs::write(out_dir.join("stats.txt"), &table)?;
            let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
            json.push('\n');
            std::fs::write(out_dir.join("stats.json"), json)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::SampleReview { input, pos, neg, seed, output } => {
            let mut records = Vec::new();
            for path in &input {
                records.extend(read_records(path)?);
            }
            let sheet = sample_for_review(&records, pos, neg, seed)?;
            sheet.write_csv(&output)?;
            println!("wrote {} review rows to {}", sheet.rows.len(), output.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Archive { repo, output, strict } => {
            let source = RepoSource {
                path: repo.display().to_string(),
                language: Language::Python,
                star_rank: 0,
            };
            let strictness = if strict { Strictness::Strict } else { Strictness::Lenient };
            let commits = list_commits(&source, strictness)?;
            write_patch_archive(&commits, &output)?;
            println!("archived {} commits to {}", commits.len(), output.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn report_manifest(manifest: &RunManifest) {
    for (lang, counters) in &manifest.totals {
        println!(
            "{lang}: {} todo commits -> {} positive, {} negative ({} multi-todo, {} no-todo, {} oversized, {} added-scope)",
            counters.todo_commits,
            counters.positive,
            counters.negative,
            counters.skipped_multi_todo,
            counters.skipped_no_todo,
            counters.oversized,
            counters.discarded_added,
        );
    }
    let failed = manifest.failed_repos();
    if !failed.is_empty() {
        eprintln!("{} repositories failed: {}", failed.len(), failed.join(", "));
    }
}
