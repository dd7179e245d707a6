//! Commit enumeration from git repositories and patch archives, plus the
//! TODO-token test that flags a commit as TODO-related.
//!
//! Git access shells out to the `git` binary (plumbing commands only, so
//! user configuration cannot change the output). The patch-archive backend
//! reads the same commits from a plain directory of `.patch` files and needs
//! no git installation at all; see [`read_patch_archive`] for the format.

use std::collections::HashMap;
use std::fmt;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::Command;

use thiserror::Error;

/// Source language of a mined repository. Comment syntax and dataset
/// statistics are keyed by this.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash,
    serde::Serialize, serde::Deserialize, clap::ValueEnum,
)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    Python,
    Java,
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Language::Python => f.write_str("python"),
            Language::Java => f.write_str("java"),
        }
    }
}

impl std::str::FromStr for Language {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "python" => Ok(Language::Python),
            "java" => Ok(Language::Java),
            other => Err(format!("unsupported language: {other}")),
        }
    }
}

/// One repository to mine: a local git checkout or a patch-archive
/// directory. `star_rank` is an ordering key from the input list and must be
/// unique within one list.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct RepoSource {
    pub path: String,
    pub language: Language,
    pub star_rank: u64,
}

impl RepoSource {
    /// Short identifier used in records and the manifest: the last path
    /// component with any `.git` suffix dropped.
    pub fn name(&self) -> String {
        let trimmed = self.path.trim_end_matches('/');
        let base = trimmed.rsplit('/').next().unwrap_or(trimmed);
        base.strip_suffix(".git").unwrap_or(base).to_string()
    }
}

/// One commit: metadata plus the raw first-parent diff.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommitRecord {
    pub repo: String,
    pub commit_id: String,
    pub timestamp: i64,
    pub message: String,
    pub diff_text: String,
    /// Byte length of `diff_text`; kept equal by construction.
    pub diff_bytes: u64,
}

impl CommitRecord {
    /// Canonicalizes the commit id to lowercase and validates it as a hex
    /// string of 7 to 40 characters.
    pub fn new(
        repo: impl Into<String>,
        commit_id: &str,
        timestamp: i64,
        message: impl Into<String>,
        diff_text: impl Into<String>,
    ) -> Result<Self, IngestError> {
        let commit_id = canonical_commit_id(commit_id)?;
        let diff_text = diff_text.into();
        let diff_bytes = diff_text.len() as u64;
        Ok(CommitRecord {
            repo: repo.into(),
            commit_id,
            timestamp,
            message: message.into(),
            diff_text,
            diff_bytes,
        })
    }
}

fn canonical_commit_id(raw: &str) -> Result<String, IngestError> {
    let id = raw.trim().to_ascii_lowercase();
    let valid = (7..=40).contains(&id.len()) && id.bytes().all(|b| b.is_ascii_hexdigit() && !b.is_ascii_uppercase());
    if valid {
        Ok(id)
    } else {
        Err(IngestError::InvalidCommitId(raw.to_string()))
    }
}

/// Whether malformed commits are skipped with a log message or abort the
/// enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strictness {
    #[default]
    Lenient,
    Strict,
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("source not found: {0}")]
    SourceNotFound(PathBuf),
    #[error("not a git repository or patch archive: {0}")]
    NotAGitRepository(PathBuf),
    #[error("unreadable commit {commit_id}: {reason}")]
    UnreadableCommit { commit_id: String, reason: String },
    #[error("invalid commit id: {0:?}")]
    InvalidCommitId(String),
    #[error("git command failed: {0}")]
    GitCommand(String),
    #[error(transparent)]
    Archive(#[from] ArchiveError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum ArchiveError {
    #[error("malformed archive entry {file}: {reason}")]
    MalformedArchiveEntry { file: PathBuf, reason: String },
    #[error("duplicate commit id in archive: {0}")]
    DuplicateCommitId(String),
    #[error("archive message cannot contain a bare `message-end` line (commit {0})")]
    UnrepresentableMessage(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// True when the ASCII token `todo` occurs in `text`, case-insensitively,
/// with a non-alphanumeric character (or the string boundary) on both sides.
/// `mastodon` does not match; `todo:`, `(todo)` and `todo_list` do.
pub fn contains_todo_token(text: &str) -> bool {
    let bytes = text.as_bytes();
    if bytes.len() < 4 {
        return false;
    }
    for i in 0..=bytes.len() - 4 {
        if !bytes[i..i + 4].eq_ignore_ascii_case(b"todo") {
            continue;
        }
        let left_ok = text[..i].chars().next_back().map_or(true, |c| !c.is_alphanumeric());
        let right_ok = text[i + 4..].chars().next().map_or(true, |c| !c.is_alphanumeric());
        if left_ok && right_ok {
            return true;
        }
    }
    false
}

/// A commit is TODO related when the token appears anywhere in its diff.
pub fn is_todo_related(diff_text: &str) -> bool {
    contains_todo_token(diff_text)
}

/// Enumerate every commit of `source` oldest first (ties broken by commit id
/// ascending), each carrying the diff against its first parent; root commits
/// diff against the empty tree. Works on git repositories and on patch
/// archives; under [`Strictness::Lenient`] unreadable commits are skipped
/// with a log message.
pub fn list_commits(source: &RepoSource, strictness: Strictness) -> Result<Vec<CommitRecord>, IngestError> {
    let path = Path::new(&source.path);
    if !path.exists() {
        return Err(IngestError::SourceNotFound(path.to_path_buf()));
    }
    let mut records = if is_git_repository(path) {
        list_git_commits(path, &source.name(), strictness)?
    } else if path.is_dir() {
        read_archive_impl(path, strictness)?
            .into_iter()
            .map(|mut r| {
                r.repo = source.name();
                r
            })
            .collect()
    } else {
        return Err(IngestError::NotAGitRepository(path.to_path_buf()));
    };
    records.sort_by(|a, b| (a.timestamp, &a.commit_id).cmp(&(b.timestamp, &b.commit_id)));
    Ok(records)
}

/// A directory is treated as a git repository when it carries repository
/// markers itself; enclosing repositories are deliberately ignored so that a
/// patch-archive directory checked into some repo is still read as an
/// archive.
fn is_git_repository(path: &Path) -> bool {
    path.join(".git").exists() || (path.join("HEAD").is_file() && path.join("objects").is_dir())
}

fn git(repo: &Path, args: &[&str]) -> Result<Vec<u8>, IngestError> {
    let output = Command::new("git")
        .arg("-C")
        .arg(repo)
        .args(args)
        .output()
        .map_err(|e| IngestError::GitCommand(format!("failed to run git: {e}")))?;
    if !output.status.success() {
        let stderr = String::from_utf8_lossy(&output.stderr);
        return Err(IngestError::GitCommand(format!(
            "git {} exited with {}: {}",
            args.first().unwrap_or(&""),
            output.status,
            stderr.trim()
        )));
    }
    Ok(output.stdout)
}

fn lossy_text(bytes: &[u8], what: &str, commit: &str) -> String {
    match String::from_utf8(bytes.to_vec()) {
        Ok(s) => s,
        Err(e) => {
            log::warn!("invalid UTF-8 in {what} of commit {commit}; decoding lossily");
            String::from_utf8_lossy(e.as_bytes()).into_owned()
        }
    }
}

fn list_git_commits(path: &Path, repo_name: &str, strictness: Strictness) -> Result<Vec<CommitRecord>, IngestError> {
    // An unborn HEAD means an empty history, not an error.
    if git(path, &["rev-parse", "--verify", "HEAD"]).is_err() {
        return Ok(Vec::new());
    }

    let parents_out = git(path, &["rev-list", "--parents", "HEAD"])?;
    let parents_text = String::from_utf8_lossy(&parents_out);
    let mut first_parent: HashMap<String, Option<String>> = HashMap::new();
    for line in parents_text.lines() {
        let mut parts = line.split_whitespace();
        if let Some(id) = parts.next() {
            first_parent.insert(id.to_string(), parts.next().map(str::to_string));
        }
    }

    // NUL-separated records; the message itself can never contain NUL.
    let log_out = git(path, &["log", "-z", "--format=%H%x01%ct%x01%B", "HEAD"])?;
    let mut commits: Vec<(i64, String, String)> = Vec::new();
    for chunk in log_out.split(|&b| b == 0) {
        if chunk.is_empty() {
            continue;
        }
        let mut fields = chunk.splitn(3, |&b| b == 1);
        let (Some(id), Some(ts), Some(msg)) = (fields.next(), fields.next(), fields.next()) else {
            return Err(IngestError::GitCommand("unexpected git log record".into()));
        };
        let id = String::from_utf8_lossy(id).into_owned();
        let timestamp: i64 = String::from_utf8_lossy(ts)
            .trim()
            .parse()
            .map_err(|_| IngestError::GitCommand(format!("bad timestamp for commit {id}")))?;
        let message = lossy_text(msg, "message", &id);
        commits.push((timestamp, id, message));
    }
    commits.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));

    let mut records = Vec::with_capacity(commits.len());
    for (timestamp, id, message) in commits {
        let diff_args: Vec<&str> = match first_parent.get(&id).and_then(|p| p.as_deref()) {
            Some(parent) => vec!["diff-tree", "-p", "--no-commit-id", parent, &id],
            None => vec!["diff-tree", "-p", "--no-commit-id", "--root", &id],
        };
        let diff_bytes = match git(path, &diff_args) {
            Ok(out) => out,
            Err(e) => match strictness {
                Strictness::Strict => {
                    return Err(IngestError::UnreadableCommit { commit_id: id, reason: e.to_string() })
                }
                Strictness::Lenient => {
                    log::warn!("skipping unreadable commit {id} in {repo_name}: {e}");
                    continue;
                }
            },
        };
        let diff_text = lossy_text(&diff_bytes, "diff", &id);
        match CommitRecord::new(repo_name, &id, timestamp, message, diff_text) {
            Ok(record) => records.push(record),
            Err(e) => match strictness {
                Strictness::Strict => {
                    return Err(IngestError::UnreadableCommit { commit_id: id, reason: e.to_string() })
                }
                Strictness::Lenient => log::warn!("skipping commit with invalid id in {repo_name}: {e}"),
            },
        }
    }
    Ok(records)
}

/// Read a patch archive strictly: any malformed entry or duplicate commit id
/// is an error. Entries are returned in index order, which for archives
/// written by this tool is history order.
///
/// Format: a directory of files named `<index>_<commit_id>.patch`. Each file
/// is UTF-8 with the layout
///
/// ```text
/// commit: <hex-id>
/// timestamp: <integer>
/// message-begin
/// <raw message lines>
/// message-end
/// <raw unified diff to end of file>
/// ```
pub fn read_patch_archive(directory: &Path) -> Result<Vec<CommitRecord>, ArchiveError> {
    read_archive_impl(directory, Strictness::Strict)
}

fn read_archive_impl(directory: &Path, strictness: Strictness) -> Result<Vec<CommitRecord>, ArchiveError> {
    let mut entries: Vec<(u64, PathBuf)> = Vec::new();
    for entry in std::fs::read_dir(directory)? {
        let entry = entry?;
        let path = entry.path();
        if path.extension().and_then(|e| e.to_str()) != Some("patch") {
            continue;
        }
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("");
        let Some((index_part, _)) = stem.split_once('_') else {
            if strictness == Strictness::Strict {
                return Err(ArchiveError::MalformedArchiveEntry {
                    file: path,
                    reason: "file name is not <index>_<commit_id>.patch".into(),
                });
            }
            log::warn!("skipping archive file with unrecognized name: {}", path.display());
            continue;
        };
        let Ok(index) = index_part.parse::<u64>() else {
            if strictness == Strictness::Strict {
                return Err(ArchiveError::MalformedArchiveEntry {
                    file: path,
                    reason: "file name index is not an integer".into(),
                });
            }
            log::warn!("skipping archive file with non-numeric index: {}", path.display());
            continue;
        };
        entries.push((index, path));
    }
    entries.sort();

    let mut records = Vec::with_capacity(entries.len());
    let mut seen_ids = std::collections::HashSet::new();
    for (_, path) in entries {
        match read_archive_entry(&path) {
            Ok(record) => {
                if !seen_ids.insert(record.commit_id.clone()) {
                    match strictness {
                        Strictness::Strict => {
                            return Err(ArchiveError::DuplicateCommitId(record.commit_id))
                        }
                        Strictness::Lenient => {
                            log::warn!("skipping duplicate commit id {} in archive", record.commit_id);
                            continue;
                        }
                    }
                }
                records.push(record);
            }
            Err(e) => match strictness {
                Strictness::Strict => return Err(e),
                Strictness::Lenient => log::warn!("skipping malformed archive entry: {e}"),
            },
        }
    }
    Ok(records)
}

fn read_archive_entry(path: &Path) -> Result<CommitRecord, ArchiveError> {
    let malformed = |reason: &str| ArchiveError::MalformedArchiveEntry {
        file: path.to_path_buf(),
        reason: reason.to_string(),
    };
    let mut raw = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut raw)?;
    let text = String::from_utf8(raw).map_err(|_| malformed("entry is not valid UTF-8"))?;

    let rest = text.strip_prefix("commit: ").ok_or_else(|| malformed("missing `commit: ` line"))?;
    let (id_line, rest) = rest.split_once('\n').ok_or_else(|| malformed("truncated after commit line"))?;
    let rest = rest
        .strip_prefix("timestamp: ")
        .ok_or_else(|| malformed("missing `timestamp: ` line"))?;
    let (ts_line, rest) = rest.split_once('\n').ok_or_else(|| malformed("truncated after timestamp line"))?;
    let timestamp: i64 = ts_line.trim().parse().map_err(|_| malformed("timestamp is not an integer"))?;
    let rest = rest
        .strip_prefix("message-begin\n")
        .ok_or_else(|| malformed("missing `message-begin` line"))?;

    // The diff section starts right after the first bare `message-end` line.
    let mut message_lines: Vec<&str> = Vec::new();
    let mut cursor = rest;
    let diff_text = loop {
        match cursor.split_once('\n') {
            Some(("message-end", tail)) => break tail,
            Some((line, tail)) => {
                message_lines.push(line);
                cursor = tail;
            }
            None => return Err(malformed("missing `message-end` line (no diff section)")),
        }
    };
    let message = message_lines.join("\n");

    CommitRecord::new("", id_line.trim(), timestamp, message, diff_text)
        .map_err(|e| malformed(&format!("bad commit id: {e}")))
}

/// Load a repository list from a CSV file with header
/// `star_rank,language,path`. Ranks and paths must be unique.
pub fn read_repo_list(path: &Path) -> Result<Vec<RepoSource>, IngestError> {
    #[derive(serde::Deserialize)]
    struct Row {
        star_rank: u64,
        language: Language,
        path: String,
    }

    let mut reader = csv::Reader::from_path(path).map_err(|e| match e.kind() {
        csv::ErrorKind::Io(_) => IngestError::SourceNotFound(path.to_path_buf()),
        _ => IngestError::GitCommand(format!("cannot read repo list: {e}")),
    })?;
    let mut sources = Vec::new();
    let mut ranks = std::collections::HashSet::new();
    let mut paths = std::collections::HashSet::new();
    for row in reader.deserialize() {
        let row: Row = row.map_err(|e| IngestError::GitCommand(format!("bad repo list row: {e}")))?;
        if !ranks.insert(row.star_rank) {
            return Err(IngestError::GitCommand(format!(
                "duplicate star_rank {} in repo list",
                row.star_rank
            )));
        }
        if !paths.insert(row.path.clone()) {
            return Err(IngestError::GitCommand(format!("duplicate path {} in repo list", row.path)));
        }
        sources.push(RepoSource { path: row.path, language: row.language, star_rank: row.star_rank });
    }
    sources.sort_by_key(|s| s.star_rank);
    Ok(sources)
}
