//! Sentence-level BLEU over code tokens, plain and keyword-weighted.

use std::collections::{BTreeMap, HashMap};

use super::{MetricConfig, MetricError};
use crate::code_model::{Token, TokenKind};

/// Clipped n-gram precisions `p_1..p_N'` where `N' = min(N, |cand|, |ref|)`.
/// With `weighted`, every n-gram counts with the mean weight of its tokens.
pub fn ngram_precisions(
    cand: &[Token],
    reference: &[Token],
    cfg: &MetricConfig,
    weighted: bool,
) -> Vec<f64> {
    let order = cfg.max_ngram.min(cand.len()).min(reference.len());
    let weight = |t: &Token| {
        if !weighted {
            1.0
        } else if t.kind == TokenKind::Keyword {
            cfg.keyword_weight
        } else {
            cfg.other_weight
        }
    };
    let cand_weights: Vec<f64> = cand.iter().map(weight).collect();
    let cand_lex: Vec<&str> = cand.iter().map(|t| t.lexeme.as_str()).collect();
    let ref_lex: Vec<&str> = reference.iter().map(|t| t.lexeme.as_str()).collect();

    (1..=order)
        .map(|n| {
            let ref_counts = count_ngrams(&ref_lex, n);
            // (count, weight) per distinct candidate n-gram; ordered so the
            // float sums below are reproducible
            let mut cand_counts: BTreeMap<&[&str], (usize, f64)> = BTreeMap::new();
            for (i, gram) in cand_lex.windows(n).enumerate() {
                let w = cand_weights[i..i + n].iter().sum::<f64>() / n as f64;
                cand_counts.entry(gram).or_insert((0, w)).0 += 1;
            }
            let mut matched = 0.0;
            let mut total = 0.0;
            for (gram, (count, w)) in &cand_counts {
                let clipped = (*count).min(ref_counts.get(gram).copied().unwrap_or(0));
                matched += clipped as f64 * w;
                total += *count as f64 * w;
            }
            if total > 0.0 {
                matched / total
            } else {
                0.0
            }
        })
        .collect()
}

fn count_ngrams<'a>(tokens: &'a [&'a str], n: usize) -> HashMap<&'a [&'a str], usize> {
    let mut counts = HashMap::new();
    for gram in tokens.windows(n) {
        *counts.entry(gram).or_insert(0) += 1;
    }
    counts
}

/// `1` when the candidate is at least as long as the reference, otherwise
/// `exp(1 - |ref| / |cand|)`.
pub fn brevity_penalty(cand_len: usize, ref_len: usize) -> f64 {
    if cand_len >= ref_len {
        1.0
    } else if cand_len == 0 {
        0.0
    } else {
        (1.0 - ref_len as f64 / cand_len as f64).exp()
    }
}

fn combine(precisions: &[f64], cand_len: usize, ref_len: usize, epsilon: f64) -> f64 {
    if precisions.is_empty() {
        return 0.0;
    }
    let log_mean = precisions
        .iter()
        .map(|&p| if p > 0.0 { p.ln() } else { epsilon.ln() })
        .sum::<f64>()
        / precisions.len() as f64;
    (brevity_penalty(cand_len, ref_len) * log_mean.exp()).clamp(0.0, 1.0)
}

fn score(
    cand: &[Token],
    reference: &[Token],
    cfg: &MetricConfig,
    weighted: bool,
) -> Result<f64, MetricError> {
    if reference.is_empty() {
        return Err(MetricError::EmptyOracle);
    }
    if cand.is_empty() {
        return Ok(0.0);
    }
    let precisions = ngram_precisions(cand, reference, cfg, weighted);
    Ok(combine(
        &precisions,
        cand.len(),
        reference.len(),
        cfg.smoothing_epsilon,
    ))
}

/// BLEU = BP · exp(mean log p_n), with zero precisions smoothed.
pub fn bleu(cand: &[Token], reference: &[Token], cfg: &MetricConfig) -> Result<f64, MetricError> {
    score(cand, reference, cfg, false)
}

/// BLEU with keyword-weighted n-gram matches.
pub fn weighted_bleu(
    cand: &[Token],
    reference: &[Token],
    cfg: &MetricConfig,
) -> Result<f64, MetricError> {
    score(cand, reference, cfg, true)
}
