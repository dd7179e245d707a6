//! Structured model of unified-diff text.
//!
//! A [`UnifiedDiff`] is an ordered list of file sections; each file carries
//! its raw header lines plus a list of [`Hunk`]s, and every hunk body line is
//! classified as [`LineKind::Added`], [`LineKind::Removed`] or
//! [`LineKind::Equal`]. Parsing preserves enough raw text (header lines, hunk
//! header lines, trailing-newline state) that [`render`] reproduces
//! well-formed input byte for byte.

use std::fmt;

use thiserror::Error;

/// Change kind of one diff body line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LineKind {
    Added,
    Removed,
    Equal,
}

impl LineKind {
    /// The marker character this kind renders as.
    pub fn marker(self) -> char {
        match self {
            LineKind::Added => '+',
            LineKind::Removed => '-',
            LineKind::Equal => ' ',
        }
    }
}

impl fmt::Display for LineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LineKind::Added => "added",
            LineKind::Removed => "removed",
            LineKind::Equal => "equal",
        };
        f.write_str(s)
    }
}

/// Classify a hunk body marker character.
pub fn line_kind(marker: char) -> Result<LineKind, DiffError> {
    match marker {
        '+' => Ok(LineKind::Added),
        '-' => Ok(LineKind::Removed),
        ' ' => Ok(LineKind::Equal),
        other => Err(DiffError::UnknownMarker(other)),
    }
}

/// One classified body line. `content` excludes the leading marker character.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffLine {
    pub kind: LineKind,
    pub content: String,
    pub old_lineno: Option<u32>,
    pub new_lineno: Option<u32>,
    /// True when a `\ No newline at end of file` marker followed this line.
    pub no_newline_after: bool,
}

impl DiffLine {
    pub fn new(kind: LineKind, content: impl Into<String>) -> Self {
        DiffLine {
            kind,
            content: content.into(),
            old_lineno: None,
            new_lineno: None,
            no_newline_after: false,
        }
    }
}

/// A contiguous change region with declared old/new coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hunk {
    pub old_start: u32,
    pub old_len: u32,
    pub new_start: u32,
    pub new_len: u32,
    /// Raw `@@ ... @@` header line, preserved verbatim for rendering.
    header: String,
    pub lines: Vec<DiffLine>,
}

impl Hunk {
    /// Build a hunk from classified lines. Lengths are derived from the line
    /// kinds and line numbers are assigned from the given starts, so the
    /// accounting invariants hold by construction. `section` is the text that
    /// follows the closing `@@` (pass `""` for none; a leading space is added
    /// for non-empty sections).
    pub fn from_lines(old_start: u32, new_start: u32, section: &str, mut lines: Vec<DiffLine>) -> Self {
        let mut old_len = 0u32;
        let mut new_len = 0u32;
        let mut old_no = old_start;
        let mut new_no = new_start;
        for line in &mut lines {
            match line.kind {
                LineKind::Added => {
                    new_len += 1;
                    line.old_lineno = None;
                    line.new_lineno = Some(new_no);
                    new_no += 1;
                }
                LineKind::Removed => {
                    old_len += 1;
                    line.old_lineno = Some(old_no);
                    line.new_lineno = None;
                    old_no += 1;
                }
                LineKind::Equal => {
                    old_len += 1;
                    new_len += 1;
                    line.old_lineno = Some(old_no);
                    line.new_lineno = Some(new_no);
                    old_no += 1;
                    new_no += 1;
                }
            }
        }
        let mut section_part = String::new();
        if !section.is_empty() {
            section_part.push(' ');
            section_part.push_str(section);
        }
        let header = format!(
            "@@ -{} +{} @@{}",
            format_range(old_start, old_len),
            format_range(new_start, new_len),
            section_part
        );
        Hunk { old_start, old_len, new_start, new_len, header, lines }
    }

    /// The raw hunk header line, e.g. `@@ -1,3 +1,4 @@ fn main() {`.
    pub fn header(&self) -> &str {
        &self.header
    }

    /// The section heading after the closing `@@`, without its leading space.
    pub fn section(&self) -> &str {
        match self.header.get(2..).and_then(|rest| rest.find(" @@")) {
            Some(idx) => {
                let after = &self.header[2 + idx + 3..];
                after.strip_prefix(' ').unwrap_or(after)
            }
            None => "",
        }
    }

    pub fn count(&self, kind: LineKind) -> usize {
        self.lines.iter().filter(|l| l.kind == kind).count()
    }
}

// Git omits the length when it is 1.
fn format_range(start: u32, len: u32) -> String {
    if len == 1 {
        format!("{start}")
    } else {
        format!("{start},{len}")
    }
}

/// One file section of a diff: raw header lines plus hunks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileDiff {
    pub old_path: String,
    pub new_path: String,
    /// Everything between the previous section and the first hunk, verbatim.
    pub header_lines: Vec<String>,
    pub hunks: Vec<Hunk>,
    pub is_binary: bool,
}

impl FileDiff {
    pub fn new(old_path: impl Into<String>, new_path: impl Into<String>) -> Self {
        FileDiff {
            old_path: old_path.into(),
            new_path: new_path.into(),
            header_lines: Vec::new(),
            hunks: Vec::new(),
            is_binary: false,
        }
    }
}

/// A parsed unified diff: an ordered sequence of file sections.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct UnifiedDiff {
    pub files: Vec<FileDiff>,
    final_newline: bool,
}

impl UnifiedDiff {
    pub fn new(files: Vec<FileDiff>) -> Self {
        UnifiedDiff { files, final_newline: true }
    }

    /// Iterate over all body lines of every hunk of every file.
    pub fn body_lines(&self) -> impl Iterator<Item = &DiffLine> {
        self.files.iter().flat_map(|f| f.hunks.iter()).flat_map(|h| h.lines.iter())
    }
}

/// Errors raised by strict parsing.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum DiffError {
    #[error("malformed hunk header at line {line_no}: {text}")]
    MalformedHunkHeader { line_no: usize, text: String },
    #[error("hunk at line {line_no} declares {declared} but contains {actual} lines for the {side} side")]
    LineCountMismatch { line_no: usize, side: &'static str, declared: u32, actual: u32 },
    #[error("unknown line marker {0:?}")]
    UnknownMarker(char),
    #[error("unexpected line {line_no} outside any recognized diff structure: {text}")]
    UnexpectedLine { line_no: usize, text: String },
}

/// Non-fatal observations recorded by lenient parsing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseWarning {
    /// Declared hunk lengths disagreed with the body; lengths were re-derived.
    LineCountMismatch { line_no: usize },
    /// A line was not recognized and was kept verbatim as header text.
    UnexpectedLine { line_no: usize },
    /// A blank body line was read as an empty context line.
    BlankContextLine { line_no: usize },
    /// Input bytes were not valid UTF-8 and were decoded lossily.
    LossyUtf8,
}

impl fmt::Display for ParseWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseWarning::LineCountMismatch { line_no } => {
                write!(f, "line {line_no}: hunk lengths re-derived from body")
            }
            ParseWarning::UnexpectedLine { line_no } => {
                write!(f, "line {line_no}: unrecognized line kept as header text")
            }
            ParseWarning::BlankContextLine { line_no } => {
                write!(f, "line {line_no}: blank line read as empty context line")
            }
            ParseWarning::LossyUtf8 => write!(f, "invalid UTF-8 replaced during decoding"),
        }
    }
}

/// Header prefixes recognized in strict mode. Any of these lines may appear
/// before the first hunk of a file section.
const HEADER_PREFIXES: &[&str] = &[
    "diff --git",
    "index ",
    "--- ",
    "+++ ",
    "new file mode",
    "deleted file mode",
    "old mode",
    "new mode",
    "similarity index",
    "rename from",
    "rename to",
    "Binary files",
];

const NO_NEWLINE_MARKER: &str = "\\ No newline at end of file";

fn is_header_line(line: &str) -> bool {
    HEADER_PREFIXES.iter().any(|p| line.starts_with(p)) || line == "---" || line == "+++"
}

/// Parse unified-diff text, rejecting malformed hunks.
pub fn parse_unified_diff(text: &str) -> Result<UnifiedDiff, DiffError> {
    let mut warnings = Vec::new();
    parse_impl(text, true, &mut warnings)
}

/// Parse unified-diff text, re-deriving lengths and recording warnings where
/// the input is malformed. Mined diffs are messy; this mode never fails.
pub fn parse_unified_diff_lenient(text: &str) -> (UnifiedDiff, Vec<ParseWarning>) {
    let mut warnings = Vec::new();
    let diff = parse_impl(text, false, &mut warnings).expect("lenient parse is total");
    (diff, warnings)
}

/// Decode bytes as UTF-8 (lossily, with a warning) and parse leniently.
pub fn parse_unified_diff_bytes(bytes: &[u8]) -> (UnifiedDiff, Vec<ParseWarning>) {
    let text = String::from_utf8_lossy(bytes);
    let (diff, mut warnings) = parse_unified_diff_lenient(&text);
    if matches!(text, std::borrow::Cow::Owned(_)) {
        warnings.push(ParseWarning::LossyUtf8);
    }
    (diff, warnings)
}

struct Section {
    header_lines: Vec<String>,
    hunks: Vec<Hunk>,
}

impl Section {
    fn finish(self) -> FileDiff {
        let (old_path, new_path) = derive_paths(&self.header_lines);
        let is_binary = self.header_lines.iter().any(|l| l.starts_with("Binary files"));
        FileDiff {
            old_path,
            new_path,
            header_lines: self.header_lines,
            hunks: self.hunks,
            is_binary,
        }
    }
}

fn strip_prefix_path(path: &str) -> String {
    path.strip_prefix("a/")
        .or_else(|| path.strip_prefix("b/"))
        .unwrap_or(path)
        .to_string()
}

/// Old/new paths are informational; headers are kept verbatim for rendering.
/// Priority: `---`/`+++` lines, then `rename from`/`rename to`, then the
/// `diff --git` line, then a `Binary files` marker.
fn derive_paths(headers: &[String]) -> (String, String) {
    let mut old_path = String::new();
    let mut new_path = String::new();
    for line in headers {
        if let Some(rest) = line.strip_prefix("--- ") {
            old_path = strip_prefix_path(rest.split('\t').next().unwrap_or(rest));
        } else if let Some(rest) = line.strip_prefix("+++ ") {
            new_path = strip_prefix_path(rest.split('\t').next().unwrap_or(rest));
        }
    }
    if old_path.is_empty() && new_path.is_empty() {
        for line in headers {
            if let Some(rest) = line.strip_prefix("rename from ") {
                old_path = rest.to_string();
            } else if let Some(rest) = line.strip_prefix("rename to ") {
                new_path = rest.to_string();
            }
        }
    }
    if old_path.is_empty() && new_path.is_empty() {
        for line in headers {
            if let Some(rest) = line.strip_prefix("diff --git ") {
                // Ambiguous for paths containing " b/"; best effort only.
                if let Some(idx) = rest.rfind(" b/") {
                    old_path = strip_prefix_path(&rest[..idx]);
                    new_path = strip_prefix_path(&rest[idx + 1..]);
                }
            }
        }
    }
    if old_path.is_empty() && new_path.is_empty() {
        for line in headers {
            if let Some(rest) = line.strip_prefix("Binary files ") {
                if let Some(rest) = rest.strip_suffix(" differ") {
                    if let Some(idx) = rest.rfind(" and ") {
                        old_path = strip_prefix_path(&rest[..idx]);
                        new_path = strip_prefix_path(&rest[idx + 5..]);
                    }
                }
            }
        }
    }
    (old_path, new_path)
}

struct HunkHeader {
    old_start: u32,
    old_len: u32,
    new_start: u32,
    new_len: u32,
}

/// Parse `@@ -S[,L] +S[,L] @@[ section]`. Omitted lengths default to 1.
fn parse_hunk_header(line: &str) -> Option<HunkHeader> {
    let rest = line.strip_prefix("@@ -")?;
    let (old_part, rest) = rest.split_once(" +")?;
    let (new_part, _section) = rest.split_once(" @@")?;
    let parse_range = |part: &str| -> Option<(u32, u32)> {
        match part.split_once(',') {
            Some((s, l)) => Some((s.parse().ok()?, l.parse().ok()?)),
            None => Some((part.parse().ok()?, 1)),
        }
    };
    let (old_start, old_len) = parse_range(old_part)?;
    let (new_start, new_len) = parse_range(new_part)?;
    Some(HunkHeader { old_start, old_len, new_start, new_len })
}

fn parse_impl(text: &str, strict: bool, warnings: &mut Vec<ParseWarning>) -> Result<UnifiedDiff, DiffError> {
    let mut lines: Vec<&str> = text.split('\n').collect();
    let final_newline = match lines.last() {
        Some(&"") => {
            lines.pop();
            true
        }
        _ => !text.is_empty() && text.ends_with('\n'),
    };
    if lines.is_empty() {
        return Ok(UnifiedDiff { files: Vec::new(), final_newline: true });
    }

    let mut files: Vec<FileDiff> = Vec::new();
    let mut current: Option<Section> = None;
    let mut i = 0usize;

    while i < lines.len() {
        let line = lines[i];
        let line_no = i + 1;

        if line.starts_with("@@") {
            let header = parse_hunk_header(line).ok_or(DiffError::MalformedHunkHeader {
                line_no,
                text: line.to_string(),
            });
            let header = match header {
                Ok(h) => h,
                Err(e) if strict => return Err(e),
                Err(_) => {
                    // Lenient: keep the junk line as header text.
                    warnings.push(ParseWarning::UnexpectedLine { line_no });
                    current
                        .get_or_insert_with(|| Section { header_lines: Vec::new(), hunks: Vec::new() })
                        .header_lines
                        .push(line.to_string());
                    i += 1;
                    continue;
                }
            };
            let section = match &mut current {
                Some(s) => s,
                None if strict => {
                    return Err(DiffError::UnexpectedLine { line_no, text: line.to_string() })
                }
                None => {
                    warnings.push(ParseWarning::UnexpectedLine { line_no });
                    current = Some(Section { header_lines: Vec::new(), hunks: Vec::new() });
                    current.as_mut().unwrap()
                }
            };
            i += 1;
            let hunk = read_hunk_body(line, line_no, header, &lines, &mut i, strict, warnings)?;
            section.hunks.push(hunk);
            continue;
        }

        let starts_new_section = line.starts_with("diff --git ")
            || (line.starts_with("--- ")
                && current.as_ref().map_or(true, |s| {
                    !s.hunks.is_empty() || s.header_lines.iter().any(|h| h.starts_with("--- "))
                }));

        if starts_new_section {
            if let Some(section) = current.take() {
                files.push(section.finish());
            }
            current = Some(Section { header_lines: vec![line.to_string()], hunks: Vec::new() });
            i += 1;
            continue;
        }

        if is_header_line(line) {
            match &mut current {
                Some(s) if s.hunks.is_empty() => s.header_lines.push(line.to_string()),
                _ if strict => {
                    return Err(DiffError::UnexpectedLine { line_no, text: line.to_string() })
                }
                _ => {
                    // Lenient: headers after hunks open a new section.
                    warnings.push(ParseWarning::UnexpectedLine { line_no });
                    if let Some(section) = current.take() {
                        files.push(section.finish());
                    }
                    current = Some(Section { header_lines: vec![line.to_string()], hunks: Vec::new() });
                }
            }
            i += 1;
            continue;
        }

        if strict {
            return Err(DiffError::UnexpectedLine { line_no, text: line.to_string() });
        }
        warnings.push(ParseWarning::UnexpectedLine { line_no });
        current
            .get_or_insert_with(|| Section { header_lines: Vec::new(), hunks: Vec::new() })
            .header_lines
            .push(line.to_string());
        i += 1;
    }

    if let Some(section) = current.take() {
        files.push(section.finish());
    }
    Ok(UnifiedDiff { files, final_newline })
}

fn read_hunk_body(
    header_line: &str,
    header_line_no: usize,
    header: HunkHeader,
    lines: &[&str],
    i: &mut usize,
    strict: bool,
    warnings: &mut Vec<ParseWarning>,
) -> Result<Hunk, DiffError> {
    let mut body: Vec<DiffLine> = Vec::new();
    let mut old_seen = 0u32;
    let mut new_seen = 0u32;
    let mut old_no = header.old_start;
    let mut new_no = header.new_start;

    while old_seen < header.old_len || new_seen < header.new_len {
        let Some(&line) = lines.get(*i) else {
            if strict {
                let (side, declared, actual) = if old_seen < header.old_len {
                    ("old", header.old_len, old_seen)
                } else {
                    ("new", header.new_len, new_seen)
                };
                return Err(DiffError::LineCountMismatch { line_no: header_line_no, side, declared, actual });
            }
            warnings.push(ParseWarning::LineCountMismatch { line_no: header_line_no });
            break;
        };
        let line_no = *i + 1;
        let mut chars = line.chars();
        match chars.next() {
            Some('+') => {
                let mut dl = DiffLine::new(LineKind::Added, chars.as_str());
                dl.new_lineno = Some(new_no);
                new_no += 1;
                new_seen += 1;
                body.push(dl);
            }
            Some('-') => {
                let mut dl = DiffLine::new(LineKind::Removed, chars.as_str());
                dl.old_lineno = Some(old_no);
                old_no += 1;
                old_seen += 1;
                body.push(dl);
            }
            Some(' ') => {
                let mut dl = DiffLine::new(LineKind::Equal, chars.as_str());
                dl.old_lineno = Some(old_no);
                dl.new_lineno = Some(new_no);
                old_no += 1;
                new_no += 1;
                old_seen += 1;
                new_seen += 1;
                body.push(dl);
            }
            Some('\\') => {
                if let Some(last) = body.last_mut() {
                    last.no_newline_after = true;
                } else if strict {
                    return Err(DiffError::UnexpectedLine { line_no, text: line.to_string() });
                } else {
                    warnings.push(ParseWarning::UnexpectedLine { line_no });
                }
            }
            None => {
                // Blank line: some tools strip the single space of an empty
                // context line. Tolerated in lenient mode only.
                if strict {
                    return Err(DiffError::UnexpectedLine { line_no, text: line.to_string() });
                }
                warnings.push(ParseWarning::BlankContextLine { line_no });
                let mut dl = DiffLine::new(LineKind::Equal, "");
                dl.old_lineno = Some(old_no);
                dl.new_lineno = Some(new_no);
                old_no += 1;
                new_no += 1;
                old_seen += 1;
                new_seen += 1;
                body.push(dl);
            }
            Some(_) => {
                // Body ended early: declared lengths overshoot the real body.
                if strict {
                    let (side, declared, actual) = if old_seen < header.old_len {
                        ("old", header.old_len, old_seen)
                    } else {
                        ("new", header.new_len, new_seen)
                    };
                    return Err(DiffError::LineCountMismatch { line_no: header_line_no, side, declared, actual });
                }
                warnings.push(ParseWarning::LineCountMismatch { line_no: header_line_no });
                break;
            }
        }
        *i += 1;
    }

    // A no-newline marker may follow the final body line of either side.
    while let Some(&line) = lines.get(*i) {
        if !line.starts_with('\\') {
            break;
        }
        if let Some(last) = body.last_mut() {
            last.no_newline_after = true;
        }
        *i += 1;
    }

    let (old_len, new_len) = if strict {
        (header.old_len, header.new_len)
    } else {
        (old_seen, new_seen)
    };
    Ok(Hunk {
        old_start: header.old_start,
        old_len,
        new_start: header.new_start,
        new_len,
        header: header_line.to_string(),
        lines: body,
    })
}

/// Render a diff back to unified-diff text. For any diff produced by
/// [`parse_unified_diff`] on well-formed input, the output is byte-identical
/// to that input.
pub fn render(diff: &UnifiedDiff) -> String {
    let mut out: Vec<String> = Vec::new();
    for file in &diff.files {
        out.extend(file.header_lines.iter().cloned());
        for hunk in &file.hunks {
            out.push(hunk.header.clone());
            for line in &hunk.lines {
                let mut rendered = String::with_capacity(line.content.len() + 1);
                rendered.push(line.kind.marker());
                rendered.push_str(&line.content);
                out.push(rendered);
                if line.no_newline_after {
                    out.push(NO_NEWLINE_MARKER.to_string());
                }
            }
        }
    }
    if out.is_empty() {
        return String::new();
    }
    let mut text = out.join("\n");
    if diff.final_newline {
        text.push('\n');
    }
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn marker_classification() {
        assert_eq!(line_kind('+').unwrap(), LineKind::Added);
        assert_eq!(line_kind('-').unwrap(), LineKind::Removed);
        assert_eq!(line_kind(' ').unwrap(), LineKind::Equal);
        assert_eq!(line_kind('?'), Err(DiffError::UnknownMarker('?')));
    }

    #[test]
    fn empty_input_parses_to_zero_files() {
        let diff = parse_unified_diff("").unwrap();
        assert!(diff.files.is_empty());
        assert_eq!(render(&diff), "");
    }

    #[test]
    fn single_hunk_kinds_and_lengths() {
        let text = "--- a/f\n+++ b/f\n@@ -1,2 +1,2 @@\n a\n-b\n+c\n";
        let diff = parse_unified_diff(text).unwrap();
        assert_eq!(diff.files.len(), 1);
        let hunk = &diff.files[0].hunks[0];
        assert_eq!((hunk.old_len, hunk.new_len), (2, 2));
        let kinds: Vec<LineKind> = hunk.lines.iter().map(|l| l.kind).collect();
        assert_eq!(kinds, vec![LineKind::Equal, LineKind::Removed, LineKind::Added]);
        assert_eq!(render(&diff), text);
    }

    #[test]
    fn hunk_render_matches_canonical_form() {
        let hunk = Hunk::from_lines(
            1,
            1,
            "",
            vec![
                DiffLine::new(LineKind::Equal, "a"),
                DiffLine::new(LineKind::Removed, "b"),
                DiffLine::new(LineKind::Added, "c"),
            ],
        );
        assert_eq!(hunk.header(), "@@ -1,2 +1,2 @@");
        let mut file = FileDiff::new("f", "f");
        file.hunks.push(hunk);
        let diff = UnifiedDiff::new(vec![file]);
        assert_eq!(render(&diff), "@@ -1,2 +1,2 @@\n a\n-b\n+c\n");
    }

    #[test]
    fn line_numbers_follow_hunk_starts() {
        let text = "--- a/f\n+++ b/f\n@@ -3,3 +7,3 @@\n a\n-b\n+c\n d\n";
        let diff = parse_unified_diff(text).unwrap();
        let lines = &diff.files[0].hunks[0].lines;
        assert_eq!((lines[0].old_lineno, lines[0].new_lineno), (Some(3), Some(7)));
        assert_eq!((lines[1].old_lineno, lines[1].new_lineno), (Some(4), None));
        assert_eq!((lines[2].old_lineno, lines[2].new_lineno), (None, Some(8)));
        assert_eq!((lines[3].old_lineno, lines[3].new_lineno), (Some(5), Some(9)));
    }

    #[test]
    fn omitted_length_defaults_to_one() {
        let text = "--- a/f\n+++ b/f\n@@ -1 +1 @@\n-b\n+c\n";
        let diff = parse_unified_diff(text).unwrap();
        let hunk = &diff.files[0].hunks[0];
        assert_eq!((hunk.old_len, hunk.new_len), (1, 1));
        assert_eq!(render(&diff), text);
    }

    #[test]
    fn no_newline_marker_attaches_to_previous_line() {
        let text = "--- a/f\n+++ b/f\n@@ -1 +1 @@\n-old\n\\ No newline at end of file\n+new\n\\ No newline at end of file\n";
        let diff = parse_unified_diff(text).unwrap();
        let lines = &diff.files[0].hunks[0].lines;
        assert!(lines[0].no_newline_after);
        assert!(lines[1].no_newline_after);
        assert_eq!(render(&diff), text);
    }

    #[test]
    fn binary_marker_sets_flag_and_keeps_hunks_empty() {
        let text = "diff --git a/img.png b/img.png\nindex 1111111..2222222 100644\nBinary files a/img.png and b/img.png differ\n";
        let diff = parse_unified_diff(text).unwrap();
        let file = &diff.files[0];
        assert!(file.is_binary);
        assert!(file.hunks.is_empty());
        assert_eq!(file.old_path, "img.png");
        assert_eq!(render(&diff), text);
    }

    #[test]
    fn rename_without_hunks_round_trips() {
        let text = "diff --git a/old.rs b/new.rs\nsimilarity index 100%\nrename from old.rs\nrename to new.rs\n";
        let diff = parse_unified_diff(text).unwrap();
        let file = &diff.files[0];
        assert_eq!(file.old_path, "old.rs");
        assert_eq!(file.new_path, "new.rs");
        assert_eq!(render(&diff), text);
    }

    #[test]
    fn malformed_hunk_header_is_rejected() {
        let text = "--- a/f\n+++ b/f\n@@ -x +1 @@\n a\n";
        match parse_unified_diff(text) {
            Err(DiffError::MalformedHunkHeader { line_no: 3, .. }) => {}
            other => panic!("expected MalformedHunkHeader, got {other:?}"),
        }
    }

    #[test]
    fn strict_rejects_length_mismatch_lenient_rederives() {
        let text = "--- a/f\n+++ b/f\n@@ -1,3 +1,3 @@\n a\n-b\n+c\n";
        match parse_unified_diff(text) {
            Err(DiffError::LineCountMismatch { .. }) => {}
            other => panic!("expected LineCountMismatch, got {other:?}"),
        }
        let (diff, warnings) = parse_unified_diff_lenient(text);
        let hunk = &diff.files[0].hunks[0];
        assert_eq!((hunk.old_len, hunk.new_len), (2, 2));
        assert!(matches!(warnings[0], ParseWarning::LineCountMismatch { .. }));
    }

    #[test]
    fn hunk_accounting_matches_declared_lengths() {
        let text = "--- a/f\n+++ b/f\n@@ -10,4 +20,3 @@ fn ctx()\n a\n-b\n-c\n+d\n e\n";
        let diff = parse_unified_diff(text).unwrap();
        let hunk = &diff.files[0].hunks[0];
        assert_eq!(hunk.old_len as usize, hunk.count(LineKind::Removed) + hunk.count(LineKind::Equal));
        assert_eq!(hunk.new_len as usize, hunk.count(LineKind::Added) + hunk.count(LineKind::Equal));
        assert_eq!(hunk.header(), "@@ -10,4 +20,3 @@ fn ctx()");
        assert_eq!(render(&diff), text);
    }

    #[test]
    fn two_file_diff_round_trips() {
        let text = concat!(
            "diff --git a/one.py b/one.py\n",
            "index 3f1a2b4..9c8d7e6 100644\n",
            "--- a/one.py\n",
            "+++ b/one.py\n",
            "@@ -1,2 +1,2 @@\n",
            " import os\n",
            "-x = 1\n",
            "+x = 2\n",
            "diff --git a/two.py b/two.py\n",
            "new file mode 100644\n",
            "index 0000000..e69de29\n",
            "--- /dev/null\n",
            "+++ b/two.py\n",
            "@@ -0,0 +1 @@\n",
            "+print()\n",
        );
        let diff = parse_unified_diff(text).unwrap();
        assert_eq!(diff.files.len(), 2);
        assert_eq!(diff.files[1].old_path, "/dev/null");
        assert_eq!(render(&diff), text);
    }

    #[test]
    fn missing_final_newline_is_preserved() {
        let text = "--- a/f\n+++ b/f\n@@ -1 +1 @@\n-b\n+c";
        let diff = parse_unified_diff(text).unwrap();
        assert_eq!(render(&diff), text);
    }

    #[test]
    fn lossy_bytes_record_warning() {
        let bytes = b"--- a/f\n+++ b/f\n@@ -1 +1 @@\n-\xff\n+ok\n";
        let (diff, warnings) = parse_unified_diff_bytes(bytes);
        assert_eq!(diff.files.len(), 1);
        assert!(warnings.contains(&ParseWarning::LossyUtf8));
    }
}
