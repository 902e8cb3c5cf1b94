//! Repository-atomic train/val/test partitioning.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{DatasetError, RepairSample};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitName {
    Train,
    Val,
    Test,
}

impl SplitName {
    pub const ALL: [SplitName; 3] = [Self::Train, Self::Val, Self::Test];
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitFractions {
    pub train: f64,
    pub val: f64,
    pub test: f64,
}

impl SplitFractions {
    pub fn as_array(&self) -> [f64; 3] {
        [self.train, self.val, self.test]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitManifest {
    pub train: Vec<String>,
    pub val: Vec<String>,
    pub test: Vec<String>,
    pub repo_assignment: BTreeMap<String, SplitName>,
    /// Fraction of samples that landed in each split.
    pub achieved_ratios: SplitFractions,
    pub ratios: SplitFractions,
    pub seed: u64,
}

impl SplitManifest {
    pub fn ids(&self, split: SplitName) -> &[String] {
        match split {
            SplitName::Train => &self.train,
            SplitName::Val => &self.val,
            SplitName::Test => &self.test,
        }
    }
}

/// Greedy deficit packing. Repositories are taken largest first (ties by
/// id) and each goes to the split furthest below its target sample count
/// (ties in train, val, test order). The ordering is total, so the seed
/// is recorded in the manifest but never changes the result.
pub fn repo_split(
    samples: &[RepairSample],
    ratios: [f64; 3],
    seed: u64,
) -> Result<SplitManifest, DatasetError> {
    let sum: f64 = ratios.iter().sum();
    if ratios.iter().any(|r| !r.is_finite() || *r <= 0.0) || (sum - 1.0).abs() > 1e-9 {
        return Err(DatasetError::InvalidRatios(ratios));
    }
    let mut seen = HashSet::new();
    for s in samples {
        if !seen.insert(s.id.as_str()) {
            return Err(DatasetError::DuplicateId(s.id.clone()));
        }
    }

    let mut by_repo: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for s in samples {
        by_repo.entry(&s.repo).or_default().push(&s.id);
    }
    if by_repo.len() < 3 {
        return Err(DatasetError::TooFewRepos(by_repo.len()));
    }
    let mut repos: Vec<(&str, Vec<&str>)> = by_repo.into_iter().collect();
    // stable sort keeps the id order among equal sizes
    repos.sort_by(|a, b| b.1.len().cmp(&a.1.len()));

    let total = samples.len() as f64;
    let mut filled = [0usize; 3];
    let mut ids: [Vec<String>; 3] = Default::default();
    let mut repo_assignment = BTreeMap::new();
    for (repo, members) in repos {
        let mut best = 0;
        let mut best_deficit = f64::NEG_INFINITY;
        for (k, ratio) in ratios.iter().enumerate() {
            let deficit = ratio * total - filled[k] as f64;
            if deficit > best_deficit {
                best = k;
                best_deficit = deficit;
            }
        }
        filled[best] += members.len();
        ids[best].extend(members.iter().map(|id| id.to_string()));
        repo_assignment.insert(repo.to_string(), SplitName::ALL[best]);
    }
    for list in &mut ids {
        list.sort();
    }
    let frac = |k: usize| filled[k] as f64 / total;
    let [train, val, test] = ids;
    Ok(SplitManifest {
        train,
        val,
        test,
        repo_assignment,
        achieved_ratios: SplitFractions {
            train: frac(0),
            val: frac(1),
            test: frac(2),
        },
        ratios: SplitFractions {
            train: ratios[0],
            val: ratios[1],
            test: ratios[2],
        },
        seed,
    })
}
