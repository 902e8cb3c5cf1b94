//! Repair datasets: hunk extraction, localization markers, dedup and
//! repository-level splits.

mod diff;
mod markers;
mod split;

pub use diff::{diff_hunks, LineRange};
pub use markers::{insert_markers, strip_markers};
pub use split::{repo_split, SplitFractions, SplitManifest, SplitName};

use std::collections::HashSet;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::curriculum::{count_hunks, CurriculumError};

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("vulnerable and fixed functions must both be non-empty")]
    EmptyFunction,
    #[error("text already contains a localization marker")]
    ContainsMarker,
    #[error("hunk {start}..{end} is empty, overlapping, unsorted or outside {lines} lines")]
    InvalidHunk { start: usize, end: usize, lines: usize },
    #[error("sample {id:?}: {reason}")]
    InconsistentSample { id: String, reason: String },
    #[error("markers: {0}")]
    Markers(#[from] CurriculumError),
    #[error("need at least 3 repositories, got {0}")]
    TooFewRepos(usize),
    #[error("split ratios must be positive and sum to 1, got {0:?}")]
    InvalidRatios([f64; 3]),
    #[error("duplicate sample id {0:?}")]
    DuplicateId(String),
    #[error("line {line}: {source}")]
    Json {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One vulnerable/fixed function pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepairSample {
    pub id: String,
    pub repo: String,
    pub cwe: Option<String>,
    pub vulnerable_fn: String,
    pub fixed_fn: String,
    pub marked_fn: String,
    pub hunks: usize,
}

impl RepairSample {
    /// Checks that the markers strip back to `vulnerable_fn` and that
    /// `hunks` matches them.
    pub fn validate(&self) -> Result<(), DatasetError> {
        let inconsistent = |reason: &str| DatasetError::InconsistentSample {
            id: self.id.clone(),
            reason: reason.to_string(),
        };
        if strip_markers(&self.marked_fn) != self.vulnerable_fn {
            return Err(inconsistent("marked_fn does not strip to vulnerable_fn"));
        }
        if count_hunks(&self.marked_fn)? != self.hunks {
            return Err(inconsistent("hunks disagrees with marked_fn"));
        }
        Ok(())
    }
}

/// Diffs the pair, marks the hunks and fills in the count.
pub fn build_sample(
    id: impl Into<String>,
    repo: impl Into<String>,
    cwe: Option<String>,
    vulnerable_fn: impl Into<String>,
    fixed_fn: impl Into<String>,
) -> Result<RepairSample, DatasetError> {
    let vulnerable_fn = vulnerable_fn.into();
    let fixed_fn = fixed_fn.into();
    let hunks = diff_hunks(&vulnerable_fn, &fixed_fn)?;
    let marked_fn = insert_markers(&vulnerable_fn, &hunks)?;
    Ok(RepairSample {
        id: id.into(),
        repo: repo.into(),
        cwe,
        hunks: hunks.len(),
        vulnerable_fn,
        fixed_fn,
        marked_fn,
    })
}

fn normalize_ws(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Drops samples whose whitespace-normalized (vulnerable, fixed) pair was
/// already seen. Order is kept and the first occurrence wins.
pub fn dedup(samples: &[RepairSample]) -> Vec<RepairSample> {
    let mut seen = HashSet::new();
    samples
        .iter()
        .filter(|s| seen.insert((normalize_ws(&s.vulnerable_fn), normalize_ws(&s.fixed_fn))))
        .cloned()
        .collect()
}

/// Reads one sample per non-blank line.
pub fn read_jsonl<T: serde::de::DeserializeOwned>(reader: impl BufRead) -> Result<Vec<T>, DatasetError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|source| DatasetError::Json { line: i + 1, source })?);
    }
    Ok(out)
}

pub fn write_jsonl<T: Serialize>(mut writer: impl Write, items: &[T]) -> Result<(), DatasetError> {
    for item in items {
        serde_json::to_writer(&mut writer, item).map_err(|source| DatasetError::Json { line: 0, source })?;
        writer.write_all(b"\n")?;
    }
    writer.flush()?;
    Ok(())
}
