//! Locating source-code comments inside a structured diff, flagging TODO
//! comments, enforcing the single-TODO rule, and splitting a diff into
//! `(code_change, todo_comment)`.

use crate::diff::{DiffLine, Hunk, LineKind, UnifiedDiff};
use crate::ingest::{contains_todo_token, Language};
use crate::label::scope_kind;
use crate::normalize::Normalizer;

/// Comment syntax of a supported language. Fixed per language.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CommentSyntax {
    pub language: Language,
    pub line_markers: &'static [&'static str],
    pub block_delimiters: &'static [(&'static str, &'static str)],
}

impl CommentSyntax {
    pub fn for_language(language: Language) -> CommentSyntax {
        match language {
            Language::Python => CommentSyntax {
                language,
                line_markers: &["#"],
                block_delimiters: &[("'''", "'''"), ("\"\"\"", "\"\"\"")],
            },
            Language::Java => CommentSyntax {
                language,
                line_markers: &["//"],
                block_delimiters: &[("/*", "*/")],
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommentKind {
    Line,
    Block,
}

/// A contiguous comment region inside one hunk. `line_indices` index into the
/// hunk's lines; `text` is the comment content with markers stripped and each
/// line trimmed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommentSpan {
    pub file_index: usize,
    pub hunk_index: usize,
    pub line_indices: Vec<usize>,
    pub text: String,
    pub kind: CommentKind,
    pub is_todo: bool,
    /// Hunk-line index of the line whose comment text contains the `todo`
    /// token; always a member of `line_indices` when set.
    pub token_line_index: Option<usize>,
}

/// Scan every hunk for maximal comment regions. Consecutive whole-line
/// comments with identical change kinds merge into one span; block comments
/// extend across lines (of any kind) within a hunk but never across hunk
/// boundaries. A marker preceded by an unclosed quote on the same line is
/// not a comment start — single-line best effort, since diff fragments are
/// not parseable compilation units.
pub fn scan_comments(diff: &UnifiedDiff, syntax: &CommentSyntax) -> Vec<CommentSpan> {
    let mut spans = Vec::new();
    for (file_index, file) in diff.files.iter().enumerate() {
        for (hunk_index, hunk) in file.hunks.iter().enumerate() {
            scan_hunk(file_index, hunk_index, hunk, syntax, &mut spans);
        }
    }
    spans
}

/// Number of spans flagged as TODO comments.
pub fn count_todos(spans: &[CommentSpan]) -> usize {
    spans.iter().filter(|s| s.is_todo).count()
}

/// Why a TODO-related diff produced no triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkipReason {
    /// More than one TODO comment; likely a comment update, which would be
    /// noise.
    MultipleTodos,
    /// No comment containing the token at all.
    NoTodo,
}

/// One labeled-ready sample: the diff with its TODO comment extracted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triple {
    pub code_change: String,
    pub todo_comment: String,
    pub commit_msg: String,
    pub scope: LineKind,
    pub repo: String,
    pub commit_id: String,
    pub language: Language,
}

/// Provenance carried into each triple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripleMeta {
    pub repo: String,
    pub commit_id: String,
    pub language: Language,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SplitOutcome {
    Triple(Box<Triple>),
    Skip(SkipReason),
}

/// Split a diff into a triple: the unique TODO span's lines leave the diff
/// and become `todo_comment` (markers and change labels stripped,
/// lowercased); the remaining diff, rendered through
/// [`Normalizer::normalize_diff`], becomes `code_change`. Diffs with zero or
/// multiple TODO comments are skipped, not errors.
pub fn split_triple(
    diff: &UnifiedDiff,
    normalized_msg: &str,
    syntax: &CommentSyntax,
    meta: &TripleMeta,
    normalizer: &Normalizer,
) -> SplitOutcome {
    let spans = scan_comments(diff, syntax);
    let mut todos = spans.iter().filter(|s| s.is_todo);
    let Some(span) = todos.next() else {
        return SplitOutcome::Skip(SkipReason::NoTodo);
    };
    if todos.next().is_some() {
        return SplitOutcome::Skip(SkipReason::MultipleTodos);
    }

    let scope = scope_kind(span, diff);
    let remaining = remove_span(diff, span);
    SplitOutcome::Triple(Box::new(Triple {
        code_change: normalizer.normalize_diff(&remaining),
        todo_comment: span.text.to_lowercase(),
        commit_msg: normalized_msg.to_string(),
        scope,
        repo: meta.repo.clone(),
        commit_id: meta.commit_id.clone(),
        language: meta.language,
    }))
}

/// Concatenate line contents with single newlines, removing comment markers
/// from the edges of each line and trimming each line. Change markers are
/// absent by construction: `DiffLine::content` excludes them.
pub fn strip_change_markers(lines: &[DiffLine]) -> String {
    lines
        .iter()
        .map(|l| strip_comment_edges(&l.content))
        .collect::<Vec<_>>()
        .join("\n")
}

const PREFIX_MARKERS: &[&str] = &["'''", "\"\"\"", "/*", "//", "#"];
const SUFFIX_MARKERS: &[&str] = &["'''", "\"\"\"", "*/"];

fn strip_comment_edges(s: &str) -> &str {
    let mut t = s.trim();
    for m in PREFIX_MARKERS {
        if let Some(rest) = t.strip_prefix(m) {
            t = rest;
            break;
        }
    }
    for m in SUFFIX_MARKERS {
        if let Some(rest) = t.strip_suffix(m) {
            t = rest;
            break;
        }
    }
    t.trim()
}

fn remove_span(diff: &UnifiedDiff, span: &CommentSpan) -> UnifiedDiff {
    let mut files = Vec::with_capacity(diff.files.len());
    for (fi, file) in diff.files.iter().enumerate() {
        let mut out_file = file.clone();
        out_file.hunks = Vec::with_capacity(file.hunks.len());
        for (hi, hunk) in file.hunks.iter().enumerate() {
            if (fi, hi) != (span.file_index, span.hunk_index) {
                out_file.hunks.push(hunk.clone());
                continue;
            }
            let kept: Vec<DiffLine> = hunk
                .lines
                .iter()
                .enumerate()
                .filter(|(li, _)| !span.line_indices.contains(li))
                .map(|(_, l)| l.clone())
                .collect();
            if kept.is_empty() {
                continue;
            }
            out_file
                .hunks
                .push(Hunk::from_lines(hunk.old_start, hunk.new_start, hunk.section(), kept));
        }
        files.push(out_file);
    }
    UnifiedDiff::new(files)
}

enum CommentStart {
    Line { at: usize, marker_len: usize },
    Block { at: usize, delim: usize },
}

/// First comment start in a line, honoring single-line quote state. Python
/// block delimiters are only recognized when they open the line (standalone
/// triple-quoted blocks); mid-line triple quotes are string literals.
fn first_comment_start(content: &str, syntax: &CommentSyntax) -> Option<CommentStart> {
    let mut best: Option<CommentStart> = None;
    let mut consider = |candidate: CommentStart| {
        let pos = match candidate {
            CommentStart::Line { at, .. } | CommentStart::Block { at, .. } => at,
        };
        let better = match &best {
            None => true,
            Some(CommentStart::Line { at, .. }) | Some(CommentStart::Block { at, .. }) => pos < *at,
        };
        if better {
            best = Some(candidate);
        }
    };

    for marker in syntax.line_markers {
        if let Some(at) = find_unquoted(content, marker) {
            consider(CommentStart::Line { at, marker_len: marker.len() });
        }
    }
    for (i, (open, _)) in syntax.block_delimiters.iter().enumerate() {
        match syntax.language {
            Language::Python => {
                let indent = content.len() - content.trim_start().len();
                if content[indent..].starts_with(open) {
                    consider(CommentStart::Block { at: indent, delim: i });
                }
            }
            Language::Java => {
                if let Some(at) = find_unquoted(content, open) {
                    consider(CommentStart::Block { at, delim: i });
                }
            }
        }
    }
    best
}

/// First occurrence of `needle` that is not inside a single- or double-quoted
/// string opened earlier on the same line.
fn find_unquoted(content: &str, needle: &str) -> Option<usize> {
    let bytes = content.as_bytes();
    let nb = needle.as_bytes();
    let mut in_single = false;
    let mut in_double = false;
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        if b == b'\\' && (in_single || in_double) {
            i += 2;
            continue;
        }
        if b == b'\'' && !in_double {
            in_single = !in_single;
        } else if b == b'"' && !in_single {
            in_double = !in_double;
        } else if !in_single && !in_double && bytes[i..].starts_with(nb) {
            return Some(i);
        }
        i += 1;
    }
    None
}

fn is_full_line_comment(content: &str, syntax: &CommentSyntax) -> Option<(usize, usize)> {
    match first_comment_start(content, syntax) {
        Some(CommentStart::Line { at, marker_len }) if content[..at].trim().is_empty() => {
            Some((at, marker_len))
        }
        _ => None,
    }
}

fn scan_hunk(
    file_index: usize,
    hunk_index: usize,
    hunk: &Hunk,
    syntax: &CommentSyntax,
    spans: &mut Vec<CommentSpan>,
) {
    let lines = &hunk.lines;
    let mut i = 0;
    while i < lines.len() {
        let content = &lines[i].content;
        let Some(start) = first_comment_start(content, syntax) else {
            i += 1;
            continue;
        };
        match start {
            CommentStart::Line { at, marker_len } => {
                let end;
                let mut texts: Vec<String> = Vec::new();
                if content[..at].trim().is_empty() {
                    // Whole-line comments merge while the change kind holds.
                    let kind = lines[i].kind;
                    texts.push(content[at + marker_len..].trim().to_string());
                    let mut j = i + 1;
                    while j < lines.len() && lines[j].kind == kind {
                        match is_full_line_comment(&lines[j].content, syntax) {
                            Some((at, len)) => {
                                texts.push(lines[j].content[at + len..].trim().to_string());
                                j += 1;
                            }
                            None => break,
                        }
                    }
                    end = j;
                } else {
                    // Trailing comment: a one-line span on its own.
                    texts.push(content[at + marker_len..].trim().to_string());
                    end = i + 1;
                }
                push_span(spans, file_index, hunk_index, i..end, CommentKind::Line, texts);
                i = end;
            }
            CommentStart::Block { at, delim } => {
                let (open, close) = syntax.block_delimiters[delim];
                let after_open = &content[at + open.len()..];
                let mut texts: Vec<String> = Vec::new();
                let end;
                if let Some(close_pos) = after_open.find(close) {
                    texts.push(after_open[..close_pos].trim().to_string());
                    end = i + 1;
                } else {
                    texts.push(after_open.trim().to_string());
                    let mut j = i + 1;
                    loop {
                        let Some(line) = lines.get(j) else {
                            break; // unterminated: span runs to hunk end
                        };
                        if let Some(close_pos) = line.content.find(close) {
                            texts.push(line.content[..close_pos].trim().to_string());
                            j += 1;
                            break;
                        }
                        texts.push(line.content.trim().to_string());
                        j += 1;
                    }
                    end = j;
                }
                push_span(spans, file_index, hunk_index, i..end, CommentKind::Block, texts);
                i = end;
            }
        }
    }
}

fn push_span(
    spans: &mut Vec<CommentSpan>,
    file_index: usize,
    hunk_index: usize,
    range: std::ops::Range<usize>,
    kind: CommentKind,
    texts: Vec<String>,
) {
    let line_indices: Vec<usize> = range.clone().collect();
    let token_line_index = texts
        .iter()
        .position(|t| contains_todo_token(t))
        .map(|offset| range.start + offset);
    spans.push(CommentSpan {
        file_index,
        hunk_index,
        line_indices,
        text: texts.join("\n").trim().to_string(),
        kind,
        is_todo: token_line_index.is_some(),
        token_line_index,
    });
}
