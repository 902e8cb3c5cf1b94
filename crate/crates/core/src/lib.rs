//! Scoring and training support for automated vulnerability repair.
//!
//! A candidate patch is compared with an oracle patch three ways: lexical
//! n-gram overlap, shared syntax subtrees, and shared data-flow edges
//! between normalized variable slots. The same scores drive a
//! rejection-sampling filter, group-relative advantages for RL, a reward
//! service and a stratified evaluation report.
//!
//! ```
//! use repairscore::metrics::{score_pair, MetricConfig};
//!
//! let oracle = "if (len > cap) return -1; memcpy(dst, src, len);";
//! let cand = "if (n > size) return -1; memcpy(out, in, n);";
//! let report = score_pair(cand, oracle, &MetricConfig::default()).unwrap();
//! // renaming leaves structure and data flow untouched
//! assert_eq!(report.sim_ast, 1.0);
//! assert_eq!(report.sim_dfg, 1.0);
//! assert!(report.bleu < 1.0);
//! ```

pub mod cli;
pub mod code_model;
pub mod config;
pub mod curriculum;
pub mod dataset;
pub mod eval;
pub mod filter;
pub mod grpo;
pub mod metrics;
pub mod service;

pub use config::Settings;
pub use metrics::{score_pair, MetricConfig, ScoreReport};
