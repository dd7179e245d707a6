//! Golden test for the human-readable statistics table.

use std::collections::BTreeMap;
use std::path::Path;

use todo_miner::dataset::{CountsReport, LanguageCounts};
use todo_miner::ingest::Language;

/// The published corpus counts render byte-identically to the frozen table.
#[test]
fn full_corpus_counts_match_golden_rendering() {
    let mut languages = BTreeMap::new();
    languages.insert(
        Language::Python,
        LanguageCounts {
            todo_commits: 416_666,
            positive: 38_175,
            negative: 35_995,
            train: 59_336,
            val: 7_417,
            test: 7_417,
        },
    );
    languages.insert(
        Language::Java,
        LanguageCounts {
            todo_commits: 351_266,
            positive: 33_797,
            negative: 32_490,
            train: 53_029,
            val: 6_629,
            test: 6_629,
        },
    );
    let report = CountsReport { languages };

    let golden_path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/stats_golden.txt");
    let golden = std::fs::read_to_string(golden_path).unwrap();
    assert_eq!(report.render_table(), golden);
}

/// Split arithmetic is consistent inside the published table itself.
#[test]
fn published_counts_are_internally_consistent() {
    assert_eq!(38_175 + 35_995, 74_170);
    assert_eq!(59_336 + 7_417 + 7_417, 74_170);
    assert_eq!(33_797 + 32_490, 66_287);
    assert_eq!(53_029 + 6_629 + 6_629, 66_287);
}
