//! One GRPO step for a group of eight rollouts: rewards from the scorer,
//! group-normalized advantages, then the clipped surrogate with its KL
//! penalty. Log-probabilities would come from the policy being trained.

use repairscore::grpo::{group_objective, GrpoConfig, PolicyEval, RewardGroup, SurrogateReport};
use repairscore::metrics::{score_pair, MetricConfig};

const ORACLE: &str = "if (idx >= len) return -1; buf[idx] = value;";

const ROLLOUTS: [&str; 8] = [
    "if (idx >= len) return -1; buf[idx] = value;",
    "if (i >= n) return -1; buf[i] = v;",
    "if (idx > len) return -1; buf[idx] = value;",
    "buf[idx] = value;",
    "if (idx < 0) return -1; buf[idx] = value;",
    "if (idx >= len) return 0; buf[idx] = value;",
    "return -1;",
    "while (idx >= len) idx--; buf[idx] = value;",
];

pub fn run_example() -> SurrogateReport {
    let metric = MetricConfig::default();
    let rewards: Vec<f64> = ROLLOUTS
        .iter()
        .map(|r| score_pair(r, ORACLE, &metric).unwrap().reward)
        .collect();

    let cfg = GrpoConfig::default();
    let group = RewardGroup::new("bounds-check", &rewards, cfg.epsilon).unwrap();
    println!("mu {:.4} sigma {:.4}", group.mu, group.sigma);
    for (r, a) in group.rewards.iter().zip(&group.advantages) {
        println!("reward {r:.4} advantage {a:+.4}");
    }

    let eval = PolicyEval {
        logp_new: vec![-11.2, -12.0, -11.9, -14.1, -12.6, -12.2, -15.0, -13.3],
        logp_old: vec![-11.5, -12.1, -12.0, -13.8, -12.5, -12.3, -14.6, -13.4],
    };
    let report = group_objective(&group, &eval, &cfg).unwrap();
    println!("mean objective {:.5}", report.mean_objective);
    println!("kl estimate    {:.5}", report.kl_estimate);
    println!("loss           {:.5}", report.loss);
    report
}

fn main() {
    run_example();
}
