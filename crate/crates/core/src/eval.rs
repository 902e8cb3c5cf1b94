//! Batch evaluation of predictions against dataset oracles, with means
//! broken down by hunk count, curriculum bucket and CWE.

use std::collections::{BTreeMap, HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curriculum::assign_bucket;
use crate::dataset::RepairSample;
use crate::metrics::{score_analyzed, AnalyzedCode, MetricConfig, MetricError, ScoreReport};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub id: String,
    pub prediction: String,
}

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("predictions reference unknown sample ids: {}", .0.join(", "))]
    UnknownIds(Vec<String>),
    #[error("more than one prediction for sample {0:?}")]
    DuplicatePrediction(String),
    #[error("sample {id:?}: {source}")]
    Metric {
        id: String,
        #[source]
        source: MetricError,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRow {
    pub id: String,
    pub hunks: usize,
    pub cwe: Option<String>,
    pub report: ScoreReport,
    /// Token-for-token equality with the oracle.
    pub exact_match: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StratumStats {
    pub count: usize,
    pub mean_codebleu: f64,
    pub mean_reward: f64,
    pub exact_match_rate: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub overall: StratumStats,
    /// Keys "0", "1", "2-10", ">10".
    pub by_hunks: BTreeMap<String, StratumStats>,
    /// Keys "easy", "medium", "hard", and "none" for hunk-free samples.
    pub by_bucket: BTreeMap<String, StratumStats>,
    /// CWE tag, "unknown" when absent.
    pub by_cwe: BTreeMap<String, StratumStats>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub per_sample: Vec<SampleRow>,
    pub aggregates: Aggregates,
}

pub fn hunk_stratum(hunks: usize) -> &'static str {
    match hunks {
        0 => "0",
        1 => "1",
        2..=10 => "2-10",
        _ => ">10",
    }
}

pub fn bucket_stratum(hunks: usize) -> &'static str {
    assign_bucket(hunks).map(|b| b.as_str()).unwrap_or("none")
}

pub fn cwe_stratum(cwe: Option<&str>) -> &str {
    cwe.unwrap_or("unknown")
}

/// Means over `rows`, summed in row order.
pub fn stratum_stats<'a>(rows: impl IntoIterator<Item = &'a SampleRow>) -> StratumStats {
    let mut s = StratumStats::default();
    let (mut cb, mut rw, mut em) = (0.0, 0.0, 0usize);
    for r in rows {
        s.count += 1;
        cb += r.report.codebleu;
        rw += r.report.reward;
        em += usize::from(r.exact_match);
    }
    if s.count > 0 {
        let n = s.count as f64;
        s.mean_codebleu = cb / n;
        s.mean_reward = rw / n;
        s.exact_match_rate = em as f64 / n;
    }
    s
}

fn group_by<'a>(rows: &'a [SampleRow], key: impl Fn(&SampleRow) -> String) -> BTreeMap<String, StratumStats> {
    let mut groups: BTreeMap<String, Vec<&'a SampleRow>> = BTreeMap::new();
    for r in rows {
        groups.entry(key(r)).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|(k, members)| (k, stratum_stats(members)))
        .collect()
}

pub fn aggregate(rows: &[SampleRow]) -> Aggregates {
    Aggregates {
        overall: stratum_stats(rows),
        by_hunks: group_by(rows, |r| hunk_stratum(r.hunks).to_string()),
        by_bucket: group_by(rows, |r| bucket_stratum(r.hunks).to_string()),
        by_cwe: group_by(rows, |r| cwe_stratum(r.cwe.as_deref()).to_string()),
    }
}

/// Scores each prediction against its sample's `fixed_fn`. Rows follow
/// prediction order; samples without a prediction are left out.
pub fn evaluate(
    samples: &[RepairSample],
    predictions: &[Prediction],
    cfg: &MetricConfig,
) -> Result<EvalReport, EvalError> {
    let by_id: HashMap<&str, &RepairSample> = samples.iter().map(|s| (s.id.as_str(), s)).collect();
    let mut unknown: Vec<String> = predictions
        .iter()
        .filter(|p| !by_id.contains_key(p.id.as_str()))
        .map(|p| p.id.clone())
        .collect();
    if !unknown.is_empty() {
        unknown.sort();
        unknown.dedup();
        return Err(EvalError::UnknownIds(unknown));
    }
    let mut seen = HashSet::new();
    for p in predictions {
        if !seen.insert(p.id.as_str()) {
            return Err(EvalError::DuplicatePrediction(p.id.clone()));
        }
    }

    let rows: Result<Vec<SampleRow>, EvalError> = predictions
        .par_iter()
        .map(|p| {
            let sample = by_id[p.id.as_str()];
            let cand = AnalyzedCode::new(&p.prediction);
            let oracle = AnalyzedCode::new(&sample.fixed_fn);
            let metric_err = |source| EvalError::Metric {
                id: p.id.clone(),
                source,
            };
            if oracle.tokens.is_empty() {
                return Err(metric_err(MetricError::EmptyOracle));
            }
            let report = score_analyzed(&cand, &oracle, cfg).map_err(metric_err)?;
            let exact_match = cand.tokens.len() == oracle.tokens.len()
                && cand.tokens.iter().zip(&oracle.tokens).all(|(a, b)| a.lexeme == b.lexeme);
            Ok(SampleRow {
                id: p.id.clone(),
                hunks: sample.hunks,
                cwe: sample.cwe.clone(),
                report,
                exact_match,
            })
        })
        .collect();
    let per_sample = rows?;
    let aggregates = aggregate(&per_sample);
    Ok(EvalReport {
        per_sample,
        aggregates,
    })
}
