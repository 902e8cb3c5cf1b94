//! Hunk-count difficulty buckets and the cumulative three-stage schedule.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::dataset::RepairSample;

pub const VUL_START: &str = "<vul_start>";
pub const VUL_END: &str = "<vul_end>";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CurriculumError {
    #[error("nested <vul_start> at byte {0}")]
    NestedMarker(usize),
    #[error("<vul_end> without matching <vul_start> at byte {0}")]
    UnmatchedEnd(usize),
    #[error("<vul_start> at byte {0} is never closed")]
    UnclosedStart(usize),
    #[error("a training sample needs at least one vulnerable hunk (sample {id:?} has {hunks})")]
    NoHunks { id: String, hunks: usize },
}

/// Number of `<vul_start>`…`<vul_end>` pairs. Pairs must not nest and must
/// be closed.
pub fn count_hunks(marked: &str) -> Result<usize, CurriculumError> {
    let mut open: Option<usize> = None;
    let mut count = 0;
    let mut pos = 0;
    while pos < marked.len() {
        let rest = &marked[pos..];
        let next_start = rest.find(VUL_START);
        let next_end = rest.find(VUL_END);
        let (at, is_start) = match (next_start, next_end) {
            (None, None) => break,
            (Some(s), None) => (s, true),
            (None, Some(e)) => (e, false),
            (Some(s), Some(e)) => {
                if s < e {
                    (s, true)
                } else {
                    (e, false)
                }
            }
        };
        let abs = pos + at;
        if is_start {
            if open.is_some() {
                return Err(CurriculumError::NestedMarker(abs));
            }
            open = Some(abs);
            pos = abs + VUL_START.len();
        } else {
            if open.take().is_none() {
                return Err(CurriculumError::UnmatchedEnd(abs));
            }
            count += 1;
            pos = abs + VUL_END.len();
        }
    }
    match open {
        Some(at) => Err(CurriculumError::UnclosedStart(at)),
        None => Ok(count),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DifficultyBucket {
    Easy,
    Medium,
    Hard,
}

impl DifficultyBucket {
    pub const ALL: [DifficultyBucket; 3] = [Self::Easy, Self::Medium, Self::Hard];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Easy => "easy",
            Self::Medium => "medium",
            Self::Hard => "hard",
        }
    }
}

impl fmt::Display for DifficultyBucket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// 1–2 hunks easy, 3–5 medium, more than 5 hard. Zero hunks is not a
/// repair task.
pub fn assign_bucket(hunks: usize) -> Result<DifficultyBucket, CurriculumError> {
    match hunks {
        0 => Err(CurriculumError::NoHunks {
            id: String::new(),
            hunks,
        }),
        1..=2 => Ok(DifficultyBucket::Easy),
        3..=5 => Ok(DifficultyBucket::Medium),
        _ => Ok(DifficultyBucket::Hard),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    pub name: String,
    pub ids: Vec<String>,
}

/// Stages in training order. Each stage contains every sample of the
/// previous one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurriculumSchedule {
    pub stages: Vec<Stage>,
}

impl CurriculumSchedule {
    pub fn cumulative(&self) -> bool {
        self.stages.windows(2).all(|w| {
            let next: std::collections::BTreeSet<&String> = w[1].ids.iter().collect();
            w[0].ids.iter().all(|id| next.contains(id))
        })
    }
}

/// Stage 1 holds easy samples, stage 2 adds medium, stage 3 adds hard.
/// Ids within a stage are sorted.
pub fn build_schedule(samples: &[RepairSample]) -> Result<CurriculumSchedule, CurriculumError> {
    let mut buckets: Vec<(DifficultyBucket, &str)> = Vec::with_capacity(samples.len());
    for s in samples {
        let bucket = assign_bucket(s.hunks).map_err(|_| CurriculumError::NoHunks {
            id: s.id.clone(),
            hunks: s.hunks,
        })?;
        buckets.push((bucket, s.id.as_str()));
    }
    let stages = DifficultyBucket::ALL
        .iter()
        .map(|&upto| {
            let mut ids: Vec<String> = buckets
                .iter()
                .filter(|(b, _)| *b <= upto)
                .map(|(_, id)| id.to_string())
                .collect();
            ids.sort();
            Stage {
                name: upto.as_str().to_string(),
                ids,
            }
        })
        .collect();
    Ok(CurriculumSchedule { stages })
}
