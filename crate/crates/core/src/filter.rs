//! Rejection sampling filter for reason-then-patch responses: a schema
//! check followed by a CodeBLEU threshold against the oracle patch.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::metrics::{score_pair, MetricConfig, MetricError};

const REASON_OPEN: &str = "<reason>";
const REASON_CLOSE: &str = "</reason>";
const PATCH_OPEN: &str = "<patch>";
const PATCH_CLOSE: &str = "</patch>";

pub const DEFAULT_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParsedResponse {
    pub reason: String,
    pub patch: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SchemaErrorKind {
    MissingReason,
    MissingPatch,
    Misordered,
    Malformed,
    DuplicateTag,
    EmptySection,
}

impl SchemaErrorKind {
    pub const ALL: [SchemaErrorKind; 6] = [
        Self::MissingReason,
        Self::MissingPatch,
        Self::Misordered,
        Self::Malformed,
        Self::DuplicateTag,
        Self::EmptySection,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::MissingReason => "MissingReason",
            Self::MissingPatch => "MissingPatch",
            Self::Misordered => "Misordered",
            Self::Malformed => "Malformed",
            Self::DuplicateTag => "DuplicateTag",
            Self::EmptySection => "EmptySection",
        }
    }
}

impl fmt::Display for SchemaErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, thiserror::Error)]
#[error("{kind}: {detail}")]
pub struct SchemaError {
    pub kind: SchemaErrorKind,
    pub detail: String,
}

fn schema_err(kind: SchemaErrorKind, detail: impl Into<String>) -> SchemaError {
    SchemaError {
        kind,
        detail: detail.into(),
    }
}

/// Byte offset of the single occurrence of `tag`, `None` when absent.
fn find_unique(text: &str, tag: &str) -> Result<Option<usize>, SchemaError> {
    let mut hits = text.match_indices(tag).map(|(i, _)| i);
    let first = hits.next();
    if hits.next().is_some() {
        return Err(schema_err(SchemaErrorKind::DuplicateTag, format!("{tag} appears more than once")));
    }
    Ok(first)
}

fn pair(
    text: &str,
    open: &str,
    close: &str,
    missing: SchemaErrorKind,
) -> Result<(usize, usize), SchemaError> {
    match (find_unique(text, open)?, find_unique(text, close)?) {
        (None, None) => Err(schema_err(missing, format!("no {open} section"))),
        (Some(_), None) => Err(schema_err(SchemaErrorKind::Malformed, format!("{open} is never closed"))),
        (None, Some(_)) => Err(schema_err(SchemaErrorKind::Malformed, format!("{close} without {open}"))),
        (Some(o), Some(c)) if c < o => {
            Err(schema_err(SchemaErrorKind::Malformed, format!("{close} precedes {open}")))
        }
        (Some(o), Some(c)) => Ok((o, c)),
    }
}

/// Accepts one `<reason>` section followed by one `<patch>` section.
/// Free text may precede `<reason>`; only whitespace may sit between the
/// sections or follow `</patch>`. Section contents are returned verbatim.
pub fn parse_response(text: &str) -> Result<ParsedResponse, SchemaError> {
    // duplicates are the most specific finding, so look for them first
    for tag in [REASON_OPEN, REASON_CLOSE, PATCH_OPEN, PATCH_CLOSE] {
        find_unique(text, tag)?;
    }
    let (ro, rc) = pair(text, REASON_OPEN, REASON_CLOSE, SchemaErrorKind::MissingReason)?;
    let (po, pc) = pair(text, PATCH_OPEN, PATCH_CLOSE, SchemaErrorKind::MissingPatch)?;

    if po < ro {
        return Err(if pc < ro {
            schema_err(SchemaErrorKind::Misordered, "patch section precedes reason section")
        } else {
            schema_err(SchemaErrorKind::Malformed, "reason section opens inside patch section")
        });
    }
    if po < rc {
        return Err(schema_err(SchemaErrorKind::Malformed, "patch section opens inside reason section"));
    }
    let between = &text[rc + REASON_CLOSE.len()..po];
    if !between.trim().is_empty() {
        return Err(schema_err(SchemaErrorKind::Malformed, "text between </reason> and <patch>"));
    }
    let trailing = &text[pc + PATCH_CLOSE.len()..];
    if !trailing.trim().is_empty() {
        return Err(schema_err(SchemaErrorKind::Malformed, "text after </patch>"));
    }

    let reason = &text[ro + REASON_OPEN.len()..rc];
    let patch = &text[po + PATCH_OPEN.len()..pc];
    if reason.trim().is_empty() {
        return Err(schema_err(SchemaErrorKind::EmptySection, "reason section is blank"));
    }
    if patch.trim().is_empty() {
        return Err(schema_err(SchemaErrorKind::EmptySection, "patch section is blank"));
    }
    Ok(ParsedResponse {
        reason: reason.to_string(),
        patch: patch.to_string(),
    })
}

/// Canonical rendering; [`parse_response`] inverts it for sections that
/// are non-blank and contain no tags.
pub fn serialize(resp: &ParsedResponse) -> String {
    format!("{REASON_OPEN}{}{REASON_CLOSE}{PATCH_OPEN}{}{PATCH_CLOSE}", resp.reason, resp.patch)
}

#[derive(Debug, thiserror::Error)]
pub enum FilterError {
    #[error("threshold must lie in (0, 1), got {0}")]
    InvalidThreshold(f64),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub keep: bool,
    pub score: f64,
}

/// Keep iff `score > threshold`.
pub fn decide(score: f64, threshold: f64) -> Decision {
    Decision {
        keep: score > threshold,
        score,
    }
}

fn check_threshold(threshold: f64) -> Result<(), FilterError> {
    if threshold > 0.0 && threshold < 1.0 {
        Ok(())
    } else {
        Err(FilterError::InvalidThreshold(threshold))
    }
}

pub fn semantic_filter(
    patch: &str,
    oracle: &str,
    threshold: f64,
    cfg: &MetricConfig,
) -> Result<Decision, FilterError> {
    check_threshold(threshold)?;
    let report = score_pair(patch, oracle, cfg)?;
    Ok(decide(report.codebleu, threshold))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterItem {
    pub id: String,
    pub response: String,
    pub oracle: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeptItem {
    pub id: String,
    pub reason: String,
    pub patch: String,
    pub score: f64,
}

/// One rejected item: a schema `kind` or a semantic `score`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rejection {
    pub id: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub kind: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub score: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterReport {
    pub total: usize,
    pub kept: usize,
    pub below_threshold: usize,
    pub empty_oracle: usize,
    pub schema: BTreeMap<SchemaErrorKind, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterOutcome {
    pub kept: Vec<KeptItem>,
    pub rejected: Vec<Rejection>,
    pub report: FilterReport,
}

enum Verdict {
    Kept(KeptItem),
    Schema(SchemaError),
    Below(f64),
    EmptyOracle,
}

fn judge(item: &FilterItem, threshold: f64, cfg: &MetricConfig) -> Verdict {
    let parsed = match parse_response(&item.response) {
        Ok(p) => p,
        Err(e) => return Verdict::Schema(e),
    };
    match score_pair(&parsed.patch, &item.oracle, cfg) {
        Ok(report) => {
            let d = decide(report.codebleu, threshold);
            if d.keep {
                Verdict::Kept(KeptItem {
                    id: item.id.clone(),
                    reason: parsed.reason,
                    patch: parsed.patch,
                    score: d.score,
                })
            } else {
                Verdict::Below(d.score)
            }
        }
        Err(_) => Verdict::EmptyOracle,
    }
}

/// Schema check then semantic threshold for every item, in parallel.
/// Output order follows input order.
pub fn filter_batch(
    items: &[FilterItem],
    threshold: f64,
    cfg: &MetricConfig,
) -> Result<FilterOutcome, FilterError> {
    check_threshold(threshold)?;
    cfg.validate()?;
    let verdicts: Vec<Verdict> = items.par_iter().map(|it| judge(it, threshold, cfg)).collect();

    let mut out = FilterOutcome {
        kept: Vec::new(),
        rejected: Vec::new(),
        report: FilterReport {
            total: items.len(),
            ..Default::default()
        },
    };
    for (item, verdict) in items.iter().zip(verdicts) {
        let reject = |kind: Option<String>, detail: Option<String>, score: Option<f64>| Rejection {
            id: item.id.clone(),
            kind,
            detail,
            score,
        };
        match verdict {
            Verdict::Kept(k) => out.kept.push(k),
            Verdict::Schema(e) => {
                *out.report.schema.entry(e.kind).or_insert(0) += 1;
                out.rejected.push(reject(Some(e.kind.to_string()), Some(e.detail), None));
            }
            Verdict::Below(score) => {
                out.report.below_threshold += 1;
                out.rejected.push(reject(None, None, Some(score)));
            }
            Verdict::EmptyOracle => {
                out.report.empty_oracle += 1;
                out.rejected.push(reject(Some("EmptyOracle".into()), None, None));
            }
        }
    }
    out.report.kept = out.kept.len();
    Ok(out)
}
