//! Positive/negative/discard labeling from the change scope of a TODO
//! comment.
//!
//! A TODO on a removed line means the task was just performed (the comment
//! left with the code): positive. A TODO on an unchanged line means the
//! change is unrelated to the task: negative. A TODO on an added line is the
//! comment's first appearance, which cannot be an obsolete TODO: discarded.

use crate::comments::CommentSpan;
use crate::diff::{LineKind, UnifiedDiff};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Positive,
    Negative,
    Discard,
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Label::Positive => f.write_str("positive"),
            Label::Negative => f.write_str("negative"),
            Label::Discard => f.write_str("discard"),
        }
    }
}

/// The change kind of the line carrying the `todo` token. For multi-line
/// spans mixing kinds, the token line alone decides; it is where the
/// actionable text lives.
///
/// Panics if the span is not a TODO span (`is_todo` false): callers filter
/// first.
pub fn scope_kind(span: &CommentSpan, diff: &UnifiedDiff) -> LineKind {
    let index = span
        .token_line_index
        .expect("scope_kind requires a TODO span");
    diff.files[span.file_index].hunks[span.hunk_index].lines[index].kind
}

/// Removed → positive, equal → negative, added → discard.
pub fn label_triple(scope: LineKind) -> Label {
    match scope {
        LineKind::Removed => Label::Positive,
        LineKind::Equal => Label::Negative,
        LineKind::Added => Label::Discard,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comments::{scan_comments, CommentSyntax};
    use crate::diff::{DiffLine, FileDiff, Hunk, UnifiedDiff};
    use crate::ingest::Language;

    #[test]
    fn labels_are_a_bijection_on_kinds() {
        assert_eq!(label_triple(LineKind::Removed), Label::Positive);
        assert_eq!(label_triple(LineKind::Equal), Label::Negative);
        assert_eq!(label_triple(LineKind::Added), Label::Discard);
        let mut labels = [LineKind::Removed, LineKind::Equal, LineKind::Added].map(label_triple);
        labels.sort();
        assert_eq!(labels, [Label::Positive, Label::Negative, Label::Discard]);
    }

    fn diff_of(kinds_and_contents: &[(LineKind, &str)]) -> UnifiedDiff {
        let lines = kinds_and_contents
            .iter()
            .map(|(k, c)| DiffLine::new(*k, *c))
            .collect();
        let mut file = FileDiff::new("f", "f");
        file.hunks.push(Hunk::from_lines(1, 1, "", lines));
        UnifiedDiff::new(vec![file])
    }

    #[test]
    fn single_line_spans_take_their_own_kind() {
        for (kind, expected) in [
            (LineKind::Removed, LineKind::Removed),
            (LineKind::Added, LineKind::Added),
            (LineKind::Equal, LineKind::Equal),
        ] {
            let diff = diff_of(&[(kind, "# todo: x")]);
            let spans = scan_comments(&diff, &CommentSyntax::for_language(Language::Python));
            assert_eq!(scope_kind(&spans[0], &diff), expected);
        }
    }

    #[test]
    fn mixed_block_span_follows_the_token_line() {
        let diff = diff_of(&[
            (LineKind::Equal, "/* TODO refactor"),
            (LineKind::Added, " soon */"),
        ]);
        let spans = scan_comments(&diff, &CommentSyntax::for_language(Language::Java));
        assert_eq!(spans.len(), 1);
        assert_eq!(spans[0].token_line_index, Some(0));
        assert_eq!(scope_kind(&spans[0], &diff), LineKind::Equal);
    }
}
