//! Removal of semantically irrelevant detail from diffs and commit messages:
//! lowercasing, diff-header deletion, commit/issue-ID placeholder
//! substitution, the diff size cap, and first-sentence message truncation.

use std::fmt;

use regex::Regex;
use thiserror::Error;

use crate::diff::UnifiedDiff;
use crate::ingest::CommitRecord;

pub const DEFAULT_COMMIT_ID_PATTERN: &str = r"\b[0-9a-f]{7,40}\b";
pub const DEFAULT_ISSUE_ID_PATTERN: &str = r"#[0-9]+";
pub const DEFAULT_COMMIT_PLACEHOLDER: &str = "<commit_id>";
pub const DEFAULT_ISSUE_PLACEHOLDER: &str = "<issue_id>";
/// 1MB, measured on the raw diff text before any normalization.
pub const DEFAULT_MAX_DIFF_BYTES: u64 = 1_048_576;

/// Configuration for the normalization stage. Loadable from the `[normalize]`
/// section of the pipeline config file; every field has a default.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct NormalizationConfig {
    pub commit_id_pattern: String,
    pub issue_id_pattern: String,
    pub commit_placeholder: String,
    pub issue_placeholder: String,
    pub max_diff_bytes: u64,
}

impl Default for NormalizationConfig {
    fn default() -> Self {
        NormalizationConfig {
            commit_id_pattern: DEFAULT_COMMIT_ID_PATTERN.to_string(),
            issue_id_pattern: DEFAULT_ISSUE_ID_PATTERN.to_string(),
            commit_placeholder: DEFAULT_COMMIT_PLACEHOLDER.to_string(),
            issue_placeholder: DEFAULT_ISSUE_PLACEHOLDER.to_string(),
            max_diff_bytes: DEFAULT_MAX_DIFF_BYTES,
        }
    }
}

#[derive(Debug, Error)]
pub enum NormalizeError {
    #[error("invalid {which} pattern {pattern:?}: {source}")]
    InvalidPattern {
        which: &'static str,
        pattern: String,
        #[source]
        source: Box<regex::Error>,
    },
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("message is empty after normalization")]
    EmptyMessage,
}

/// Outcome of the diff size check. Rejection is a filter decision, not an
/// error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SizeCheck {
    Pass,
    Reject,
}

impl SizeCheck {
    pub fn is_pass(self) -> bool {
        matches!(self, SizeCheck::Pass)
    }
}

impl fmt::Display for SizeCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SizeCheck::Pass => f.write_str("pass"),
            SizeCheck::Reject => f.write_str("reject"),
        }
    }
}

/// Reject commits whose raw diff exceeds the configured cap. The boundary is
/// inclusive: a diff of exactly `max_diff_bytes` passes. Only `diff_bytes` is
/// consulted, never the content.
pub fn check_size(record: &CommitRecord, cfg: &NormalizationConfig) -> SizeCheck {
    if record.diff_bytes > cfg.max_diff_bytes {
        SizeCheck::Reject
    } else {
        SizeCheck::Pass
    }
}

/// Compiled normalizer. Pattern errors surface here, at configuration load
/// time, not per call.
#[derive(Debug, Clone)]
pub struct Normalizer {
    cfg: NormalizationConfig,
    commit_re: Regex,
    issue_re: Regex,
}

impl Normalizer {
    pub fn new(cfg: &NormalizationConfig) -> Result<Self, NormalizeError> {
        for (name, value) in [
            ("commit placeholder", &cfg.commit_placeholder),
            ("issue placeholder", &cfg.issue_placeholder),
        ] {
            if value.is_empty() || value.chars().any(char::is_whitespace) {
                return Err(NormalizeError::InvalidConfig(format!(
                    "{name} must be non-empty and contain no whitespace"
                )));
            }
        }
        if cfg.max_diff_bytes == 0 {
            return Err(NormalizeError::InvalidConfig("max_diff_bytes must be positive".into()));
        }
        let compile = |which: &'static str, pattern: &str| {
            Regex::new(pattern).map_err(|e| NormalizeError::InvalidPattern {
                which,
                pattern: pattern.to_string(),
                source: Box::new(e),
            })
        };
        Ok(Normalizer {
            cfg: cfg.clone(),
            commit_re: compile("commit id", &cfg.commit_id_pattern)?,
            issue_re: compile("issue id", &cfg.issue_id_pattern)?,
        })
    }

    pub fn with_defaults() -> Self {
        Normalizer::new(&NormalizationConfig::default()).expect("default config is valid")
    }

    pub fn config(&self) -> &NormalizationConfig {
        &self.cfg
    }

    /// Normalize a parsed diff: header lines are dropped, each hunk header
    /// collapses to a bare `@@`, body lines keep their marker character and
    /// are lowercased, and commit IDs in body content are replaced by the
    /// placeholder. Lines are joined with `\n` and carry no trailing newline.
    pub fn normalize_diff(&self, diff: &UnifiedDiff) -> String {
        let mut out: Vec<String> = Vec::new();
        for file in &diff.files {
            for hunk in &file.hunks {
                out.push("@@".to_string());
                for line in &hunk.lines {
                    let content = self.substitute(&line.content.to_lowercase(), false);
                    let mut rendered = String::with_capacity(content.len() + 1);
                    rendered.push(line.kind.marker());
                    rendered.push_str(&content);
                    out.push(rendered);
                }
            }
        }
        out.join("\n")
    }

    /// Normalize a raw commit message: lowercase, truncate to the first
    /// sentence (or first line, whichever ends sooner; `.`, `!` and `?`
    /// terminate a sentence and are kept), substitute issue and commit IDs,
    /// and trim surrounding whitespace.
    pub fn normalize_message(&self, message: &str) -> Result<String, NormalizeError> {
        let lowered = message.to_lowercase();
        let truncated = first_sentence(&lowered);
        let substituted = self.substitute(truncated, true);
        let trimmed = substituted.trim();
        if trimmed.is_empty() {
            return Err(NormalizeError::EmptyMessage);
        }
        Ok(trimmed.to_string())
    }

    /// Replace issue IDs and commit IDs with their placeholders in one
    /// left-to-right pass. Matches are non-overlapping, the issue pattern
    /// wins where both match, commit-ID matches must contain at least one
    /// decimal digit (pure-alphabetic hex runs are almost always ordinary
    /// words), and text inside an already-present placeholder is never
    /// re-matched — which makes the operation idempotent.
    pub fn replace_ids(&self, text: &str) -> String {
        self.substitute(text, true)
    }

    fn substitute(&self, text: &str, include_issue: bool) -> String {
        let protected = placeholder_ranges(text, &[&self.cfg.commit_placeholder, &self.cfg.issue_placeholder]);
        let overlaps = |start: usize, end: usize, ranges: &[(usize, usize)]| {
            ranges.iter().any(|&(s, e)| start < e && s < end)
        };

        let mut matches: Vec<(usize, usize, &str)> = Vec::new();
        if include_issue {
            for m in self.issue_re.find_iter(text) {
                if !overlaps(m.start(), m.end(), &protected) {
                    matches.push((m.start(), m.end(), self.cfg.issue_placeholder.as_str()));
                }
            }
        }
        let issue_ranges: Vec<(usize, usize)> = matches.iter().map(|&(s, e, _)| (s, e)).collect();
        for m in self.commit_re.find_iter(text) {
            if !m.as_str().bytes().any(|b| b.is_ascii_digit()) {
                continue;
            }
            if overlaps(m.start(), m.end(), &protected) || overlaps(m.start(), m.end(), &issue_ranges) {
                continue;
            }
            matches.push((m.start(), m.end(), self.cfg.commit_placeholder.as_str()));
        }
        matches.sort_by_key(|&(s, _, _)| s);

        let mut out = String::with_capacity(text.len());
        let mut cursor = 0usize;
        for (start, end, placeholder) in matches {
            if start < cursor {
                continue;
            }
            out.push_str(&text[cursor..start]);
            out.push_str(placeholder);
            cursor = end;
        }
        out.push_str(&text[cursor..]);
        out
    }
}

fn placeholder_ranges(text: &str, placeholders: &[&str]) -> Vec<(usize, usize)> {
    let mut ranges = Vec::new();
    for p in placeholders {
        if p.is_empty() {
            continue;
        }
        let mut from = 0;
        while let Some(pos) = text[from..].find(p) {
            let start = from + pos;
            ranges.push((start, start + p.len()));
            from = start + p.len();
        }
    }
    ranges
}

/// The first sentence of `text`: everything up to and including the first
/// `.`, `!` or `?`, or up to (excluding) the first newline, whichever comes
/// first.
fn first_sentence(text: &str) -> &str {
    for (i, c) in text.char_indices() {
        match c {
            '.' | '!' | '?' => return &text[..i + c.len_utf8()],
            '\n' => return &text[..i],
            _ => {}
        }
    }
    text
}
