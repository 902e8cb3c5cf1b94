//! Patch similarity: BLEU, keyword-weighted BLEU, subtree and data-flow
//! agreement, the composite reward and CodeBLEU.

mod bleu;
mod config;
mod report;
mod similarity;

pub use bleu::{bleu, brevity_penalty, ngram_precisions, weighted_bleu};
pub use config::MetricConfig;
pub use report::{codebleu, score_analyzed, score_pair, AnalyzedCode, Degradation, ScoreReport};
pub use similarity::{
    ast_similarity, combine_codebleu, composite_reward, dfg_similarity, RewardVector,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricError {
    #[error("oracle is empty")]
    EmptyOracle,
    #[error("invalid metric configuration: {0}")]
    InvalidConfig(String),
}
