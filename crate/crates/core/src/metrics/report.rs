use serde::{Deserialize, Serialize};

use super::bleu::{bleu, weighted_bleu};
use super::similarity::{
    ast_similarity, combine_codebleu, composite_reward, dfg_similarity, RewardVector,
};
use super::{MetricConfig, MetricError};
use crate::code_model::{extract_dfg, parse, tokenize, DataFlowGraph, SyntaxTree, Token};

/// Which components fell back instead of being measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Degradation {
    CandidateUnparseable,
    OracleUnparseable,
    EmptyOracleDfg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub bleu: f64,
    pub weighted_bleu: f64,
    pub sim_ast: f64,
    pub sim_dfg: f64,
    /// Mean of bleu, sim_ast and sim_dfg (minus excluded components).
    pub reward: f64,
    pub codebleu: f64,
    pub degraded: Vec<Degradation>,
}

impl ScoreReport {
    pub fn is_degraded(&self, flag: Degradation) -> bool {
        self.degraded.contains(&flag)
    }
}

/// A code fragment tokenized, parsed and analysed once, so it can be
/// scored against many counterparts (an oracle against a whole rollout
/// group, say).
#[derive(Debug, Clone)]
pub struct AnalyzedCode {
    pub tokens: Vec<Token>,
    pub tree: Option<SyntaxTree>,
    pub dfg: Option<DataFlowGraph>,
}

impl AnalyzedCode {
    pub fn new(text: &str) -> Self {
        let tokens = tokenize(text);
        let tree = parse(&tokens).tree;
        let dfg = tree.as_ref().map(extract_dfg);
        AnalyzedCode { tokens, tree, dfg }
    }
}

/// Scores two analysed fragments. Total over candidates: an unparseable
/// candidate scores zero on the structural components.
pub fn score_analyzed(
    cand: &AnalyzedCode,
    oracle: &AnalyzedCode,
    cfg: &MetricConfig,
) -> Result<ScoreReport, MetricError> {
    cfg.validate()?;
    let bleu = bleu(&cand.tokens, &oracle.tokens, cfg)?;
    let weighted_bleu = weighted_bleu(&cand.tokens, &oracle.tokens, cfg)?;
    let mut degraded = Vec::new();
    if cand.tree.is_none() {
        degraded.push(Degradation::CandidateUnparseable);
    }

    let (Some(oracle_tree), Some(oracle_dfg)) = (&oracle.tree, &oracle.dfg) else {
        degraded.push(Degradation::OracleUnparseable);
        return Ok(ScoreReport {
            bleu,
            weighted_bleu,
            sim_ast: 0.0,
            sim_dfg: 0.0,
            reward: bleu,
            codebleu: combine_codebleu(
                [Some(bleu), Some(weighted_bleu), None, None],
                cfg.codebleu_weights,
            ),
            degraded,
        });
    };
    if oracle_dfg.edges.is_empty() {
        degraded.push(Degradation::EmptyOracleDfg);
    }

    let (sim_ast, sim_dfg, dfg_component, codebleu) = match (&cand.tree, &cand.dfg) {
        (Some(cand_tree), Some(cand_dfg)) => {
            let sim_ast = ast_similarity(cand_tree, oracle_tree, cfg);
            let dfg_component = dfg_similarity(cand_dfg, oracle_dfg);
            // an excluded component still reports whether both sides agree
            let sim_dfg = dfg_component.unwrap_or(if cand_dfg.edges.is_empty() { 1.0 } else { 0.0 });
            let codebleu = combine_codebleu(
                [Some(bleu), Some(weighted_bleu), Some(sim_ast), dfg_component],
                cfg.codebleu_weights,
            );
            (sim_ast, sim_dfg, dfg_component, codebleu)
        }
        _ => {
            let dfg_component = (!oracle_dfg.edges.is_empty()).then_some(0.0);
            let codebleu = combine_codebleu(
                [Some(bleu), Some(weighted_bleu), None, None],
                cfg.codebleu_weights,
            );
            (0.0, 0.0, dfg_component, codebleu)
        }
    };
    let reward = composite_reward(&RewardVector {
        bleu,
        sim_ast: Some(sim_ast),
        sim_dfg: dfg_component,
    });
    Ok(ScoreReport {
        bleu,
        weighted_bleu,
        sim_ast,
        sim_dfg,
        reward,
        codebleu,
        degraded,
    })
}

/// Full pipeline for one (candidate, oracle) pair.
pub fn score_pair(cand: &str, oracle: &str, cfg: &MetricConfig) -> Result<ScoreReport, MetricError> {
    let oracle = AnalyzedCode::new(oracle);
    if oracle.tokens.is_empty() {
        return Err(MetricError::EmptyOracle);
    }
    score_analyzed(&AnalyzedCode::new(cand), &oracle, cfg)
}

pub fn codebleu(cand: &str, oracle: &str, cfg: &MetricConfig) -> Result<f64, MetricError> {
    score_pair(cand, oracle, cfg).map(|r| r.codebleu)
}
