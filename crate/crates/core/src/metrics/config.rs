use serde::{Deserialize, Serialize};

use super::MetricError;

/// Scoring parameters. Field names are also the config-file keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricConfig {
    /// Highest n-gram order for BLEU.
    pub max_ngram: usize,
    /// Weighted-BLEU weight of keyword tokens.
    pub keyword_weight: f64,
    /// Weighted-BLEU weight of every other token.
    pub other_weight: f64,
    /// CodeBLEU mixture (bleu, weighted bleu, ast, dfg); sums to 1.
    pub codebleu_weights: [f64; 4],
    pub min_subtree_height: usize,
    /// Replaces zero n-gram precisions.
    pub smoothing_epsilon: f64,
}

impl Default for MetricConfig {
    fn default() -> Self {
        MetricConfig {
            max_ngram: 4,
            keyword_weight: 1.0,
            other_weight: 0.2,
            codebleu_weights: [0.25; 4],
            min_subtree_height: 1,
            smoothing_epsilon: 1e-9,
        }
    }
}

impl MetricConfig {
    pub fn validate(&self) -> Result<(), MetricError> {
        let invalid = |msg: String| Err(MetricError::InvalidConfig(msg));
        if self.max_ngram < 1 {
            return invalid("max_ngram must be at least 1".into());
        }
        if self.min_subtree_height < 1 {
            return invalid("min_subtree_height must be at least 1".into());
        }
        for (name, w) in [
            ("keyword_weight", self.keyword_weight),
            ("other_weight", self.other_weight),
        ] {
            if !(w.is_finite() && w >= 0.0) {
                return invalid(format!("{name} must be a finite non-negative number"));
            }
        }
        if self
            .codebleu_weights
            .iter()
            .any(|w| !(w.is_finite() && *w >= 0.0))
        {
            return invalid("codebleu_weights must be finite and non-negative".into());
        }
        let sum: f64 = self.codebleu_weights.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return invalid(format!("codebleu_weights must sum to 1, got {sum}"));
        }
        if !(self.smoothing_epsilon > 0.0 && self.smoothing_epsilon < 1.0) {
            return invalid("smoothing_epsilon must lie in (0, 1)".into());
        }
        Ok(())
    }
}
