//! Dataset persistence, deterministic splitting, statistics and review
//! sampling.
//!
//! Splits must be reproducible across platforms and reimplementations, so
//! the shuffle is pinned to a named construction: a ChaCha20 generator keyed
//! with the 64-bit seed (little-endian bytes repeated four times to fill the
//! 256-bit key) driving a Fisher-Yates shuffle from the last element down,
//! with `next_u64() % (i + 1)` as the index draw.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand_core::{RngCore, SeedableRng};
use thiserror::Error;

use crate::comments::Triple;
use crate::ingest::{ArchiveError, CommitRecord, Language};
use crate::label::Label;

/// Partition a record belongs to after splitting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        }
    }
}

/// One persisted sample. Field order here is the dataset file contract.
/// Discarded triples are never persisted, so `label` is only ever positive
/// or negative; `split` is set once the record passed through [`split`].
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct TripleRecord {
    pub repo: String,
    pub commit_id: String,
    pub language: Language,
    pub label: Label,
    pub split: Option<Split>,
    pub todo_comment: String,
    pub code_change: String,
    pub commit_msg: String,
}

impl TripleRecord {
    /// Turn a labeled triple into a record; discards yield `None`.
    pub fn from_triple(triple: &Triple, label: Label) -> Option<TripleRecord> {
        if label == Label::Discard {
            return None;
        }
        Some(TripleRecord {
            repo: triple.repo.clone(),
            commit_id: triple.commit_id.clone(),
            language: triple.language,
            label,
            split: None,
            todo_comment: triple.todo_comment.clone(),
            code_change: triple.code_change.clone(),
            commit_msg: triple.commit_msg.clone(),
        })
    }

    /// Identity and ordering key: `(repo, commit_id)` is unique because the
    /// single-TODO rule admits at most one triple per commit.
    pub fn stable_key(&self) -> (&str, &str) {
        (&self.repo, &self.commit_id)
    }
}

/// Sort records into the canonical order used before shuffling, splitting
/// and writing.
pub fn sort_by_stable_key(records: &mut [TripleRecord]) {
    records.sort_by(|a, b| a.stable_key().cmp(&b.stable_key()));
}

/// Drop records whose `(todo_comment, code_change)` was already seen,
/// keeping the earliest in stable-key order.
pub fn dedup_records(records: Vec<TripleRecord>) -> Vec<TripleRecord> {
    let mut seen = std::collections::HashSet::new();
    records
        .into_iter()
        .filter(|r| seen.insert((r.todo_comment.clone(), r.code_change.clone())))
        .collect()
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("cannot split an empty dataset")]
    EmptyDataset,
    #[error("not enough {class} samples: have {have}, want {want}")]
    InsufficientSamples { class: Label, have: usize, want: usize },
    #[error("record may not carry the discard label: {repo}/{commit_id}")]
    DiscardNotPersistable { repo: String, commit_id: String },
    #[error("schema violation at line {line_no}: {reason}")]
    SchemaViolation { line_no: usize, reason: String },
    #[error("io failure: {0}")]
    IoFailure(#[from] std::io::Error),
}

/// ChaCha20 generator keyed from a 64-bit seed: the little-endian seed bytes
/// repeated four times form the 256-bit key.
pub fn seeded_rng(seed: u64) -> rand_chacha::ChaCha20Rng {
    let mut key = [0u8; 32];
    for (i, b) in seed.to_le_bytes().iter().cycle().take(32).enumerate() {
        key[i] = *b;
    }
    rand_chacha::ChaCha20Rng::from_seed(key)
}

/// Fisher-Yates from the last element down; index draws are
/// `next_u64() % (i + 1)`.
pub fn shuffle<T>(items: &mut [T], rng: &mut impl RngCore) {
    for i in (1..items.len()).rev() {
        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
        items.swap(i, j);
    }
}

/// Train/val/test sizes for `n` records: `floor(0.8 n)` train, then half of
/// the remainder (floored) val, the rest test. Exact integer arithmetic; the
/// ratios are 8/10, 1/10, 1/10.
pub fn split_sizes(n: usize) -> (usize, usize, usize) {
    let train = n * 4 / 5;
    let rest = n - train;
    let val = rest / 2;
    (train, val, rest - val)
}

/// A deterministic, disjoint and exhaustive assignment of record ids to
/// splits.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSplit {
    pub seed: u64,
    /// Fixed 80/10/10 contract, recorded for reporting.
    pub ratios: (f64, f64, f64),
    pub assignment: BTreeMap<(String, String), Split>,
}

impl DatasetSplit {
    pub fn counts(&self) -> (usize, usize, usize) {
        let mut c = (0, 0, 0);
        for split in self.assignment.values() {
            match split {
                Split::Train => c.0 += 1,
                Split::Val => c.1 += 1,
                Split::Test => c.2 += 1,
            }
        }
        c
    }
}

/// Assign every record to train/val/test. Records are re-sorted by the
/// stable key internally, so the assignment does not depend on input order;
/// it depends only on the record keys and the seed.
pub fn split(records: &[TripleRecord], seed: u64) -> Result<DatasetSplit, DatasetError> {
    if records.is_empty() {
        return Err(DatasetError::EmptyDataset);
    }
    let mut keys: Vec<(String, String)> = records
        .iter()
        .map(|r| (r.repo.clone(), r.commit_id.clone()))
        .collect();
    keys.sort();
    let mut rng = seeded_rng(seed);
    shuffle(&mut keys, &mut rng);

    let (train_n, val_n, _) = split_sizes(keys.len());
    let mut assignment = BTreeMap::new();
    for (i, key) in keys.into_iter().enumerate() {
        let split = if i < train_n {
            Split::Train
        } else if i < train_n + val_n {
            Split::Val
        } else {
            Split::Test
        };
        assignment.insert(key, split);
    }
    Ok(DatasetSplit { seed, ratios: (0.8, 0.1, 0.1), assignment })
}

/// Stamp the split assignment onto the records.
pub fn apply_split(records: &mut [TripleRecord], split: &DatasetSplit) {
    for record in records.iter_mut() {
        let key = (record.repo.clone(), record.commit_id.clone());
        record.split = split.assignment.get(&key).copied();
    }
}

/// Per-language dataset counters, one table row group each.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct LanguageCounts {
    pub todo_commits: u64,
    pub positive: u64,
    pub negative: u64,
    pub train: u64,
    pub val: u64,
    pub test: u64,
}

/// Counts per language plus a fixed human-readable rendering.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct CountsReport {
    pub languages: BTreeMap<Language, LanguageCounts>,
}

impl CountsReport {
    pub fn zeroed() -> Self {
        let mut languages = BTreeMap::new();
        languages.insert(Language::Python, LanguageCounts::default());
        languages.insert(Language::Java, LanguageCounts::default());
        CountsReport { languages }
    }

    /// Render the counts table. Row order mirrors the published statistics:
    /// per language, TODO commits, positive, negative, then the split sizes.
    pub fn render_table(&self) -> String {
        let rows: Vec<(String, &'static str, u64)> = self
            .languages
            .iter()
            .flat_map(|(lang, c)| {
                [
                    (lang.to_string(), "todo commits", c.todo_commits),
                    (lang.to_string(), "positive samples", c.positive),
                    (lang.to_string(), "negative samples", c.negative),
                    (lang.to_string(), "train set", c.train),
                    (lang.to_string(), "val set", c.val),
                    (lang.to_string(), "test set", c.test),
                ]
            })
            .collect();

        let lang_w = rows.iter().map(|r| r.0.len()).chain(["language".len()]).max().unwrap();
        let metric_w = rows.iter().map(|r| r.1.len()).chain(["metric".len()]).max().unwrap();
        let count_w = rows
            .iter()
            .map(|r| thousands(r.2).len())
            .chain(["count".len()])
            .max()
            .unwrap();

        let mut out = String::new();
        let rule = format!(
            "+-{}-+-{}-+-{}-+\n",
            "-".repeat(lang_w),
            "-".repeat(metric_w),
            "-".repeat(count_w)
        );
        out.push_str(&rule);
        let _ = writeln!(
            out,
            "| {:<lang_w$} | {:<metric_w$} | {:>count_w$} |",
            "language", "metric", "count"
        );
        out.push_str(&rule);
        let mut current_lang: Option<&str> = None;
        for (lang, metric, count) in &rows {
            if let Some(prev) = current_lang {
                if prev != lang {
                    out.push_str(&rule);
                }
            }
            current_lang = Some(lang);
            let _ = writeln!(
                out,
                "| {:<lang_w$} | {:<metric_w$} | {:>count_w$} |",
                lang,
                metric,
                thousands(*count)
            );
        }
        out.push_str(&rule);
        out
    }
}

fn thousands(n: u64) -> String {
    let digits = n.to_string();
    let mut out = String::with_capacity(digits.len() + digits.len() / 3);
    for (i, c) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i) % 3 == 0 {
            out.push(',');
        }
        out.push(c);
    }
    out
}

/// Count labels and split sizes per language. `todo_commits` comes from the
/// run manifest; records only exist for emitted samples.
pub fn stats(records: &[TripleRecord], todo_commits: &BTreeMap<Language, u64>) -> CountsReport {
    let mut report = CountsReport::zeroed();
    for (lang, n) in todo_commits {
        report.languages.entry(*lang).or_default().todo_commits = *n;
    }
    for record in records {
        let c = report.languages.entry(record.language).or_default();
        match record.label {
            Label::Positive => c.positive += 1,
            Label::Negative => c.negative += 1,
            Label::Discard => {}
        }
        match record.split {
            Some(Split::Train) => c.train += 1,
            Some(Split::Val) => c.val += 1,
            Some(Split::Test) => c.test += 1,
            None => {}
        }
    }
    report
}

/// A human-review sample: rows to judge, with an empty verdict column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReviewSheet {
    pub rows: Vec<TripleRecord>,
}

impl ReviewSheet {
    pub fn count_with(&self, label: Label) -> usize {
        self.rows.iter().filter(|r| r.label == label).count()
    }

    /// Write the sheet as CSV with a header row and an empty `verdict`
    /// column for the reviewer to fill in.
    pub fn write_csv(&self, path: &Path) -> Result<(), DatasetError> {
        let mut writer = csv::Writer::from_path(path).map_err(csv_io)?;
        writer
            .write_record(["repo", "commit_id", "label", "todo_comment", "code_change", "commit_msg", "verdict"])
            .map_err(csv_io)?;
        for row in &self.rows {
            writer
                .write_record([
                    row.repo.as_str(),
                    row.commit_id.as_str(),
                    &row.label.to_string(),
                    row.todo_comment.as_str(),
                    row.code_change.as_str(),
                    row.commit_msg.as_str(),
                    "",
                ])
                .map_err(csv_io)?;
        }
        writer.flush()?;
        Ok(())
    }
}

fn csv_io(e: csv::Error) -> DatasetError {
    DatasetError::IoFailure(std::io::Error::other(e))
}

/// Draw exactly `n_pos` positive and `n_neg` negative records without
/// replacement, deterministically for a given seed. Records are first
/// brought into stable-key order, so the draw is independent of input
/// order; positives are shuffled and taken first, then negatives, from one
/// generator stream.
pub fn sample_for_review(
    records: &[TripleRecord],
    n_pos: usize,
    n_neg: usize,
    seed: u64,
) -> Result<ReviewSheet, DatasetError> {
    let mut sorted: Vec<&TripleRecord> = records.iter().collect();
    sorted.sort_by_key(|r| r.stable_key());
    let mut positives: Vec<&TripleRecord> = sorted.iter().copied().filter(|r| r.label == Label::Positive).collect();
    let mut negatives: Vec<&TripleRecord> = sorted.iter().copied().filter(|r| r.label == Label::Negative).collect();
    if positives.len() < n_pos {
        return Err(DatasetError::InsufficientSamples {
            class: Label::Positive,
            have: positives.len(),
            want: n_pos,
        });
    }
    if negatives.len() < n_neg {
        return Err(DatasetError::InsufficientSamples {
            class: Label::Negative,
            have: negatives.len(),
            want: n_neg,
        });
    }
    let mut rng = seeded_rng(seed);
    shuffle(&mut positives, &mut rng);
    shuffle(&mut negatives, &mut rng);
    let rows = positives
        .into_iter()
        .take(n_pos)
        .chain(negatives.into_iter().take(n_neg))
        .cloned()
        .collect();
    Ok(ReviewSheet { rows })
}

/// Write records as UTF-8 JSON lines, one flat object per line, fields in
/// the fixed contract order.
pub fn write_records(records: &[TripleRecord], path: &Path) -> Result<(), DatasetError> {
    let mut out = BufWriter::new(std::fs::File::create(path)?);
    for record in records {
        if record.label == Label::Discard {
            return Err(DatasetError::DiscardNotPersistable {
                repo: record.repo.clone(),
                commit_id: record.commit_id.clone(),
            });
        }
        let line = serde_json::to_string(record).map_err(|e| DatasetError::SchemaViolation {
            line_no: 0,
            reason: e.to_string(),
        })?;
        out.write_all(line.as_bytes())?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Read a record file written by [`write_records`].
pub fn read_records(path: &Path) -> Result<Vec<TripleRecord>, DatasetError> {
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut records = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let record: TripleRecord = serde_json::from_str(&line).map_err(|e| DatasetError::SchemaViolation {
            line_no: i + 1,
            reason: e.to_string(),
        })?;
        if record.label == Label::Discard {
            return Err(DatasetError::SchemaViolation {
                line_no: i + 1,
                reason: "discard label is not persistable".into(),
            });
        }
        records.push(record);
    }
    Ok(records)
}

/// Wire form of an extracted but not yet labeled triple: what `extract`
/// writes and `label` consumes. Unlike [`TripleRecord`] it still carries
/// added-scope samples.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct TripleLine {
    pub repo: String,
    pub commit_id: String,
    pub language: Language,
    pub scope: crate::diff::LineKind,
    pub todo_comment: String,
    pub code_change: String,
    pub commit_msg: String,
}

impl From<&Triple> for TripleLine {
    fn from(t: &Triple) -> Self {
        TripleLine {
            repo: t.repo.clone(),
            commit_id: t.commit_id.clone(),
            language: t.language,
            scope: t.scope,
            todo_comment: t.todo_comment.clone(),
            code_change: t.code_change.clone(),
            commit_msg: t.commit_msg.clone(),
        }
    }
}

impl From<TripleLine> for Triple {
    fn from(l: TripleLine) -> Self {
        Triple {
            code_change: l.code_change,
            todo_comment: l.todo_comment,
            commit_msg: l.commit_msg,
            scope: l.scope,
            repo: l.repo,
            commit_id: l.commit_id,
            language: l.language,
        }
    }
}

/// Write unlabeled triples as JSON lines.
pub fn write_triples(triples: &[Triple], path: &Path) -> Result<(), DatasetError> {
    let mut out = BufWriter::new(std::fs::File::create(path)?);
    for triple in triples {
        let line = serde_json::to_string(&TripleLine::from(triple)).map_err(|e| {
            DatasetError::SchemaViolation { line_no: 0, reason: e.to_string() }
        })?;
        out.write_all(line.as_bytes())?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Read a triples file written by [`write_triples`].
pub fn read_triples(path: &Path) -> Result<Vec<Triple>, DatasetError> {
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut triples = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let parsed: TripleLine = serde_json::from_str(&line).map_err(|e| DatasetError::SchemaViolation {
            line_no: i + 1,
            reason: e.to_string(),
        })?;
        triples.push(parsed.into());
    }
    Ok(triples)
}

/// Write commits as a patch archive readable by
/// [`crate::ingest::read_patch_archive`]. Entries are numbered in input
/// order, so reading the archive back yields the same sequence.
pub fn write_patch_archive(records: &[CommitRecord], directory: &Path) -> Result<(), ArchiveError> {
    std::fs::create_dir_all(directory)?;
    for (index, record) in records.iter().enumerate() {
        if record.message.split('\n').any(|l| l == "message-end") {
            return Err(ArchiveError::UnrepresentableMessage(record.commit_id.clone()));
        }
        let path = directory.join(format!("{index:06}_{}.patch", record.commit_id));
        let mut out = BufWriter::new(std::fs::File::create(path)?);
        write!(out, "commit: {}\ntimestamp: {}\nmessage-begin\n", record.commit_id, record.timestamp)?;
        for line in record.message.split('\n') {
            out.write_all(line.as_bytes())?;
            out.write_all(b"\n")?;
        }
        out.write_all(b"message-end\n")?;
        out.write_all(record.diff_text.as_bytes())?;
        out.flush()?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(repo: &str, id: &str, label: Label, language: Language) -> TripleRecord {
        TripleRecord {
            repo: repo.to_string(),
            commit_id: id.to_string(),
            language,
            label,
            split: None,
            todo_comment: format!("todo: item {id}"),
            code_change: "@@\n-x\n+y".to_string(),
            commit_msg: "fix.".to_string(),
        }
    }

    fn corpus(n: usize) -> Vec<TripleRecord> {
        (0..n)
            .map(|i| {
                let label = if i % 2 == 0 { Label::Positive } else { Label::Negative };
                record("repo", &format!("{i:07x}"), label, Language::Python)
            })
            .collect()
    }

    #[test]
    fn split_sizes_use_floor_arithmetic() {
        assert_eq!(split_sizes(10), (8, 1, 1));
        assert_eq!(split_sizes(74_170), (59_336, 7_417, 7_417));
        assert_eq!(split_sizes(66_287), (53_029, 6_629, 6_629));
        assert_eq!(split_sizes(1), (0, 0, 1));
        for n in 1..200 {
            let (a, b, c) = split_sizes(n);
            assert_eq!(a + b + c, n);
        }
    }

    #[test]
    fn split_rejects_empty_input() {
        assert!(matches!(split(&[], 7), Err(DatasetError::EmptyDataset)));
    }

    #[test]
    fn split_is_deterministic_and_order_independent() {
        let records = corpus(50);
        let a = split(&records, 99).unwrap();
        let mut reversed = records.clone();
        reversed.reverse();
        let b = split(&reversed, 99).unwrap();
        assert_eq!(a, b);
        let c = split(&records, 100).unwrap();
        assert_ne!(a.assignment, c.assignment);
    }

    #[test]
    fn split_partitions_exhaustively() {
        let records = corpus(37);
        let s = split(&records, 1).unwrap();
        assert_eq!(s.assignment.len(), 37);
        let (train, val, test) = s.counts();
        assert_eq!((train, val, test), split_sizes(37));
    }

    #[test]
    fn eight_records_split_six_one_one() {
        let records = corpus(8);
        let s = split(&records, 5).unwrap();
        assert_eq!(s.counts(), (6, 1, 1));
    }

    #[test]
    fn stats_of_nothing_is_all_zero() {
        let report = stats(&[], &BTreeMap::new());
        for counts in report.languages.values() {
            assert_eq!(*counts, LanguageCounts::default());
        }
    }

    #[test]
    fn stats_count_labels_and_splits() {
        let mut records = corpus(8);
        let s = split(&records, 3).unwrap();
        apply_split(&mut records, &s);
        let report = stats(&records, &BTreeMap::from([(Language::Python, 20)]));
        let py = &report.languages[&Language::Python];
        assert_eq!(py.todo_commits, 20);
        assert_eq!(py.positive, 4);
        assert_eq!(py.negative, 4);
        assert_eq!((py.train, py.val, py.test), (6, 1, 1));
        assert_eq!(py.train + py.val + py.test, py.positive + py.negative);
    }

    #[test]
    fn review_sample_is_exact_and_seeded() {
        let records = corpus(40);
        let sheet = sample_for_review(&records, 5, 5, 11).unwrap();
        assert_eq!(sheet.rows.len(), 10);
        assert_eq!(sheet.count_with(Label::Positive), 5);
        assert_eq!(sheet.count_with(Label::Negative), 5);
        let again = sample_for_review(&records, 5, 5, 11).unwrap();
        assert_eq!(sheet, again);
        let other = sample_for_review(&records, 5, 5, 12).unwrap();
        assert_ne!(sheet, other);
    }

    #[test]
    fn review_sample_rejects_small_classes() {
        let records = corpus(5); // 3 positive, 2 negative
        match sample_for_review(&records, 5, 0, 1) {
            Err(DatasetError::InsufficientSamples { class: Label::Positive, have: 3, want: 5 }) => {}
            other => panic!("expected InsufficientSamples, got {other:?}"),
        }
        let empty = sample_for_review(&records, 0, 0, 1).unwrap();
        assert!(empty.rows.is_empty());
    }

    #[test]
    fn records_round_trip_through_jsonl() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("records.jsonl");

        write_records(&[], &path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "");
        assert!(read_records(&path).unwrap().is_empty());

        let mut records = corpus(3);
        records[1].todo_comment = "todo: multi\nline ünicode".to_string();
        let s = split(&records, 1).unwrap();
        apply_split(&mut records, &s);
        write_records(&records, &path).unwrap();
        let back = read_records(&path).unwrap();
        assert_eq!(back, records);
        assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 3);
    }

    #[test]
    fn record_lines_use_fixed_field_order() {
        let mut r = record("r", "abc1234", Label::Positive, Language::Python);
        r.split = Some(Split::Train);
        let line = serde_json::to_string(&r).unwrap();
        let fields: Vec<&str> = ["repo", "commit_id", "language", "label", "split", "todo_comment", "code_change", "commit_msg"]
            .into_iter()
            .collect();
        let mut last = 0;
        for f in fields {
            let pos = line.find(&format!("\"{f}\":")).unwrap();
            assert!(pos >= last, "field {f} out of order in {line}");
            last = pos;
        }
    }

    #[test]
    fn discard_records_never_persist() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("records.jsonl");
        let r = record("r", "abc1234", Label::Discard, Language::Python);
        assert!(matches!(
            write_records(&[r], &path),
            Err(DatasetError::DiscardNotPersistable { .. })
        ));
    }

    #[test]
    fn malformed_record_line_reports_line_number() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("records.jsonl");
        let good = serde_json::to_string(&record("r", "abc1234", Label::Positive, Language::Python)).unwrap();
        std::fs::write(&path, format!("{good}\nnot json\n")).unwrap();
        match read_records(&path) {
            Err(DatasetError::SchemaViolation { line_no: 2, .. }) => {}
            other => panic!("expected SchemaViolation at line 2, got {other:?}"),
        }
    }

    #[test]
    fn archive_round_trips_through_writer_and_reader() {
        let dir = tempfile::tempdir().unwrap();
        let archive = dir.path().join("archive");
        let commits = vec![
            CommitRecord::new("r", "aaaaaaa", 10, "first\n\nbody text", "--- a/f\n+++ b/f\n").unwrap(),
            CommitRecord::new("r", "bbbbbbb", 20, "second", "").unwrap(),
        ];
        write_patch_archive(&commits, &archive).unwrap();
        let mut back = crate::ingest::read_patch_archive(&archive).unwrap();
        for r in &mut back {
            r.repo = "r".to_string();
        }
        assert_eq!(back, commits);
    }

    #[test]
    fn archive_writer_rejects_sentinel_message_line() {
        let dir = tempfile::tempdir().unwrap();
        let commits =
            vec![CommitRecord::new("r", "aaaaaaa", 10, "tricky\nmessage-end\ntail", "").unwrap()];
        match write_patch_archive(&commits, dir.path()) {
            Err(ArchiveError::UnrepresentableMessage(id)) => assert_eq!(id, "aaaaaaa"),
            other => panic!("expected UnrepresentableMessage, got {other:?}"),
        }
    }

    #[test]
    fn thousands_grouping() {
        assert_eq!(thousands(0), "0");
        assert_eq!(thousands(999), "999");
        assert_eq!(thousands(74_170), "74,170");
        assert_eq!(thousands(1_048_576), "1,048,576");
    }
}
