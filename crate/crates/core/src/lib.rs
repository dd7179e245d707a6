//! Mine git histories for TODO-comment changes and build labeled datasets.
//!
//! The pipeline walks commits, keeps the ones whose diff mentions `todo`,
//! normalizes diffs and commit messages, extracts the single TODO comment of
//! each diff into a `(code_change, todo_comment, commit_msg)` triple, labels
//! triples by the change scope of the comment, and writes deterministic
//! train/validation/test splits with statistics.
//!
//! Modules follow the pipeline stages:
//!
//! - [`ingest`]: enumerate commits from git repositories or patch archives
//!   and flag TODO-related ones.
//! - [`diff`]: parse unified-diff text into classified lines and render it
//!   back.
//! - [`normalize`]: lowercase, strip headers, substitute ID placeholders,
//!   enforce the diff size cap, truncate messages to their first sentence.
//! - [`comments`]: locate source-code comments inside a diff and split out
//!   the TODO comment.
//! - [`label`]: map the TODO comment's change scope to a sample label.
//! - [`dataset`]: persist records, split deterministically, report counts,
//!   sample review sheets.
//! - [`pipeline`]: orchestrate everything with a worker pool and a resumable
//!   run manifest.

pub mod comments;
pub mod config;
pub mod dataset;
pub mod diff;
pub mod ingest;
pub mod label;
pub mod normalize;
pub mod pipeline;

// The guide chapters double as tests: every Rust snippet in book/src runs
// under `cargo test --doc`.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/diff-model.md")]
    pub struct DiffModel;
    #[doc = include_str!("../../../book/src/mining.md")]
    pub struct Mining;
    #[doc = include_str!("../../../book/src/normalization.md")]
    pub struct Normalization;
    #[doc = include_str!("../../../book/src/todo-extraction.md")]
    pub struct TodoExtraction;
    #[doc = include_str!("../../../book/src/labeling.md")]
    pub struct Labeling;
    #[doc = include_str!("../../../book/src/datasets.md")]
    pub struct Datasets;
    #[doc = include_str!("../../../book/src/pipeline.md")]
    pub struct Pipeline;
}
