use crate::code_model::{intersection_size, DataFlowGraph, SubtreeInterner, SyntaxTree};

use super::MetricConfig;

/// Share of the oracle's subtrees (with multiplicity) that the candidate
/// also contains. Two empty decompositions count as a perfect match.
pub fn ast_similarity(cand: &SyntaxTree, oracle: &SyntaxTree, cfg: &MetricConfig) -> f64 {
    let mut interner = SubtreeInterner::new();
    let oracle_bag = interner.bag(oracle, cfg.min_subtree_height);
    let cand_bag = interner.bag(cand, cfg.min_subtree_height);
    let oracle_total: usize = oracle_bag.values().sum();
    if oracle_total == 0 {
        return if cand_bag.is_empty() { 1.0 } else { 0.0 };
    }
    intersection_size(&cand_bag, &oracle_bag) as f64 / oracle_total as f64
}

/// Share of the oracle's flow edges (with multiplicity) found in the
/// candidate. `None` when the oracle has no edges: the component is then
/// left out of the composite scores.
pub fn dfg_similarity(cand: &DataFlowGraph, oracle: &DataFlowGraph) -> Option<f64> {
    if oracle.edges.is_empty() {
        return None;
    }
    Some(cand.intersection_size(oracle) as f64 / oracle.edges.len() as f64)
}

/// Agreement scores feeding the reward. Structural components are `None`
/// when excluded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardVector {
    pub bleu: f64,
    pub sim_ast: Option<f64>,
    pub sim_dfg: Option<f64>,
}

/// Mean of the available components (L1 norm over their count).
pub fn composite_reward(r: &RewardVector) -> f64 {
    let parts: Vec<f64> = [Some(r.bleu), r.sim_ast, r.sim_dfg]
        .into_iter()
        .flatten()
        .collect();
    let l1: f64 = parts.iter().map(|v| v.abs()).sum();
    (l1 / parts.len() as f64).clamp(0.0, 1.0)
}

/// Weighted CodeBLEU mixture of (bleu, weighted bleu, ast, dfg). Weights of
/// unavailable components are redistributed proportionally over the rest.
pub fn combine_codebleu(components: [Option<f64>; 4], weights: [f64; 4]) -> f64 {
    let mut weight_sum = 0.0;
    let mut total = 0.0;
    for (value, w) in components.iter().zip(weights) {
        if let Some(v) = value {
            weight_sum += w;
            total += w * v;
        }
    }
    if weight_sum <= 0.0 {
        return 0.0;
    }
    (total / weight_sum).clamp(0.0, 1.0)
}
