//! Group-relative policy optimization arithmetic.
//!
//! Rewards for the M rollouts of one prompt are normalized within the
//! group; the policy objective combines importance ratios, a clipped
//! surrogate and a KL penalty. Log-probabilities come from an external
//! policy; nothing here computes gradients.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GrpoError {
    #[error("a reward group needs at least 2 rewards, got {0}")]
    GroupTooSmall(usize),
    #[error("{name} must be {requirement}, got {value}")]
    InvalidParameter {
        name: &'static str,
        requirement: &'static str,
        value: f64,
    },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
}

/// Defaults for the tunable constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GrpoConfig {
    /// Added to the group standard deviation.
    pub epsilon: f64,
    /// Ratio clipping half-width.
    pub clip_eps: f64,
    /// KL penalty coefficient.
    pub beta: f64,
}

impl Default for GrpoConfig {
    fn default() -> Self {
        GrpoConfig {
            epsilon: 1e-4,
            clip_eps: 0.2,
            beta: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardGroup {
    pub prompt_id: String,
    pub rewards: Vec<f64>,
    pub mu: f64,
    /// Population standard deviation.
    pub sigma: f64,
    pub advantages: Vec<f64>,
    pub epsilon: f64,
}

fn check_finite(values: &[f64]) -> Result<(), GrpoError> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(GrpoError::NonFinite(i)),
        None => Ok(()),
    }
}

/// `A_j = (R_j - mu) / (sigma + epsilon)`. A group whose rewards are all
/// equal gets exactly zero advantages.
pub fn normalize_advantages(rewards: &[f64], epsilon: f64) -> Result<RewardGroup, GrpoError> {
    if rewards.len() < 2 {
        return Err(GrpoError::GroupTooSmall(rewards.len()));
    }
    if !(epsilon.is_finite() && epsilon >= 0.0) {
        return Err(GrpoError::InvalidParameter {
            name: "epsilon",
            requirement: "finite and non-negative",
            value: epsilon,
        });
    }
    check_finite(rewards)?;
    let m = rewards.len() as f64;
    let constant = rewards.iter().all(|&r| r == rewards[0]);
    let (mu, sigma) = if constant {
        (rewards[0], 0.0)
    } else {
        let mu = rewards.iter().sum::<f64>() / m;
        let var = rewards.iter().map(|r| (r - mu).powi(2)).sum::<f64>() / m;
        (mu, var.sqrt())
    };
    let advantages = if constant {
        vec![0.0; rewards.len()]
    } else {
        let denom = sigma + epsilon;
        rewards.iter().map(|r| (r - mu) / denom).collect()
    };
    Ok(RewardGroup {
        prompt_id: String::new(),
        rewards: rewards.to_vec(),
        mu,
        sigma,
        advantages,
        epsilon,
    })
}

impl RewardGroup {
    pub fn new(
        prompt_id: impl Into<String>,
        rewards: &[f64],
        epsilon: f64,
    ) -> Result<Self, GrpoError> {
        let mut group = normalize_advantages(rewards, epsilon)?;
        group.prompt_id = prompt_id.into();
        Ok(group)
    }

    pub fn len(&self) -> usize {
        self.rewards.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rewards.is_empty()
    }
}

/// Sequence log-probabilities of each rollout under the current and the
/// sampling policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyEval {
    pub logp_new: Vec<f64>,
    pub logp_old: Vec<f64>,
}

impl PolicyEval {
    fn validate(&self) -> Result<(), GrpoError> {
        if self.logp_new.len() != self.logp_old.len() {
            return Err(GrpoError::LengthMismatch {
                left: self.logp_new.len(),
                right: self.logp_old.len(),
            });
        }
        check_finite(&self.logp_new)?;
        check_finite(&self.logp_old)
    }
}

/// `exp(logp_new - logp_old)` per rollout.
pub fn importance_ratios(eval: &PolicyEval) -> Result<Vec<f64>, GrpoError> {
    eval.validate()?;
    Ok(eval
        .logp_new
        .iter()
        .zip(&eval.logp_old)
        .map(|(new, old)| (new - old).exp())
        .collect())
}

/// Naive estimator of KL[old || new] from samples drawn under the old
/// policy: the mean of `logp_old - logp_new`.
pub fn kl_estimate(eval: &PolicyEval) -> Result<f64, GrpoError> {
    eval.validate()?;
    if eval.logp_new.is_empty() {
        return Ok(0.0);
    }
    let sum: f64 = eval
        .logp_old
        .iter()
        .zip(&eval.logp_new)
        .map(|(old, new)| old - new)
        .sum();
    Ok(sum / eval.logp_new.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurrogateReport {
    pub ratios: Vec<f64>,
    pub per_sample_objective: Vec<f64>,
    pub mean_objective: f64,
    pub kl_estimate: f64,
    /// `-mean_objective + beta * kl_estimate`; minimized by the trainer.
    pub loss: f64,
}

/// Per sample `min(r A, clip(r, 1 - eps, 1 + eps) A)`, averaged, with the
/// KL penalty folded into the loss.
pub fn clipped_surrogate(
    ratios: &[f64],
    advantages: &[f64],
    clip_eps: f64,
    kl_estimate: f64,
    beta: f64,
) -> Result<SurrogateReport, GrpoError> {
    if ratios.len() != advantages.len() {
        return Err(GrpoError::LengthMismatch {
            left: ratios.len(),
            right: advantages.len(),
        });
    }
    if !(clip_eps.is_finite() && clip_eps > 0.0) {
        return Err(GrpoError::InvalidParameter {
            name: "clip_eps",
            requirement: "positive",
            value: clip_eps,
        });
    }
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(GrpoError::InvalidParameter {
            name: "beta",
            requirement: "non-negative",
            value: beta,
        });
    }
    check_finite(ratios)?;
    check_finite(advantages)?;
    let (lo, hi) = (1.0 - clip_eps, 1.0 + clip_eps);
    let per_sample_objective: Vec<f64> = ratios
        .iter()
        .zip(advantages)
        .map(|(&r, &a)| (r * a).min(r.clamp(lo, hi) * a))
        .collect();
    let mean_objective = if per_sample_objective.is_empty() {
        0.0
    } else {
        per_sample_objective.iter().sum::<f64>() / per_sample_objective.len() as f64
    };
    Ok(SurrogateReport {
        ratios: ratios.to_vec(),
        per_sample_objective,
        mean_objective,
        kl_estimate,
        loss: -mean_objective + beta * kl_estimate,
    })
}

/// Full objective for one group: ratios and KL from `eval`, advantages
/// from `group`.
pub fn group_objective(
    group: &RewardGroup,
    eval: &PolicyEval,
    cfg: &GrpoConfig,
) -> Result<SurrogateReport, GrpoError> {
    if eval.logp_new.len() != group.len() {
        return Err(GrpoError::LengthMismatch {
            left: eval.logp_new.len(),
            right: group.len(),
        });
    }
    let ratios = importance_ratios(eval)?;
    let kl = kl_estimate(eval)?;
    clipped_surrogate(&ratios, &group.advantages, cfg.clip_eps, kl, cfg.beta)
}
