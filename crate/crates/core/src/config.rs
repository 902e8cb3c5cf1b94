//! Run settings shared by every command: scoring parameters, GRPO
//! constants, the filter threshold and split parameters.
//!
//! Settings are layered: built-in defaults, then a config file (JSON
//! object or `key=value` lines), then individual overrides.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::filter::DEFAULT_THRESHOLD;
use crate::grpo::GrpoConfig;
use crate::metrics::MetricConfig;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: expected key=value, got {text:?}")]
    Syntax { line: usize, text: String },
    #[error("invalid settings: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Settings {
    pub max_ngram: usize,
    pub keyword_weight: f64,
    pub other_weight: f64,
    pub codebleu_weights: [f64; 4],
    pub min_subtree_height: usize,
    pub smoothing_epsilon: f64,
    pub epsilon: f64,
    pub clip_eps: f64,
    pub beta: f64,
    pub threshold: f64,
    pub ratios: [f64; 3],
    pub seed: u64,
}

impl Default for Settings {
    fn default() -> Self {
        let m = MetricConfig::default();
        let g = GrpoConfig::default();
        Settings {
            max_ngram: m.max_ngram,
            keyword_weight: m.keyword_weight,
            other_weight: m.other_weight,
            codebleu_weights: m.codebleu_weights,
            min_subtree_height: m.min_subtree_height,
            smoothing_epsilon: m.smoothing_epsilon,
            epsilon: g.epsilon,
            clip_eps: g.clip_eps,
            beta: g.beta,
            threshold: DEFAULT_THRESHOLD,
            ratios: [0.8, 0.1, 0.1],
            seed: 0,
        }
    }
}

impl Settings {
    pub fn metric(&self) -> MetricConfig {
        MetricConfig {
            max_ngram: self.max_ngram,
            keyword_weight: self.keyword_weight,
            other_weight: self.other_weight,
            codebleu_weights: self.codebleu_weights,
            min_subtree_height: self.min_subtree_height,
            smoothing_epsilon: self.smoothing_epsilon,
        }
    }

    pub fn grpo(&self) -> GrpoConfig {
        GrpoConfig {
            epsilon: self.epsilon,
            clip_eps: self.clip_eps,
            beta: self.beta,
        }
    }

    /// Parses a JSON object, or `key=value` lines with `#` comments.
    pub fn from_str_any(text: &str) -> Result<Self, ConfigError> {
        let trimmed = text.trim_start();
        let layer = if trimmed.starts_with('{') {
            match serde_json::from_str::<Value>(text) {
                Ok(Value::Object(map)) => map,
                Ok(_) => return Err(ConfigError::Invalid("expected a JSON object".into())),
                Err(e) => return Err(ConfigError::Invalid(e.to_string())),
            }
        } else {
            parse_key_values(text)?
        };
        Settings::default().merged(layer)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_str_any(&text)
    }

    /// Applies `key=value` overrides on top of these settings.
    pub fn with_overrides<'a>(
        &self,
        pairs: impl IntoIterator<Item = (&'a str, &'a str)>,
    ) -> Result<Self, ConfigError> {
        let mut layer = Map::new();
        for (k, v) in pairs {
            layer.insert(k.trim().to_string(), parse_value(v));
        }
        self.merged(layer)
    }

    fn merged(&self, layer: Map<String, Value>) -> Result<Self, ConfigError> {
        let Value::Object(mut base) = serde_json::to_value(self).expect("settings serialize") else {
            unreachable!("settings serialize to an object")
        };
        base.extend(layer);
        let settings: Settings =
            serde_json::from_value(Value::Object(base)).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        settings.validate()?;
        Ok(settings)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.metric()
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let g = self.grpo();
        if !(g.epsilon.is_finite() && g.epsilon >= 0.0) {
            return Err(ConfigError::Invalid("epsilon must be finite and non-negative".into()));
        }
        if !(g.clip_eps.is_finite() && g.clip_eps > 0.0) {
            return Err(ConfigError::Invalid("clip_eps must be positive".into()));
        }
        if !(g.beta.is_finite() && g.beta >= 0.0) {
            return Err(ConfigError::Invalid("beta must be non-negative".into()));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(ConfigError::Invalid("threshold must lie in (0, 1)".into()));
        }
        let sum: f64 = self.ratios.iter().sum();
        if self.ratios.iter().any(|r| !(r.is_finite() && *r > 0.0)) || (sum - 1.0).abs() > 1e-9 {
            return Err(ConfigError::Invalid("ratios must be positive and sum to 1".into()));
        }
        Ok(())
    }
}

/// A bare value is read as JSON when possible, as a comma-separated
/// number list when it contains commas, and as a string otherwise.
fn parse_value(raw: &str) -> Value {
    let raw = raw.trim();
    if let Ok(v) = serde_json::from_str::<Value>(raw) {
        return v;
    }
    if raw.contains(',') {
        let items: Option<Vec<Value>> = raw
            .split(',')
            .map(|s| serde_json::from_str::<Value>(s.trim()).ok())
            .collect();
        if let Some(items) = items {
            return Value::Array(items);
        }
    }
    Value::String(raw.to_string())
}

fn parse_key_values(text: &str) -> Result<Map<String, Value>, ConfigError> {
    let mut map = Map::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(ConfigError::Syntax {
                line: i + 1,
                text: line.to_string(),
            });
        };
        map.insert(k.trim().to_string(), parse_value(v));
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_components() {
        let s = Settings::default();
        assert_eq!(s.metric(), MetricConfig::default());
        assert_eq!(s.grpo(), GrpoConfig::default());
        s.validate().unwrap();
    }

    #[test]
    fn key_value_file() {
        let s = Settings::from_str_any(
            "# tuning\nthreshold = 0.6\nratios=0.7,0.2,0.1\nseed=42\ncodebleu_weights = [0.4,0.2,0.2,0.2]\n",
        )
        .unwrap();
        assert_eq!(s.threshold, 0.6);
        assert_eq!(s.ratios, [0.7, 0.2, 0.1]);
        assert_eq!(s.seed, 42);
        assert_eq!(s.codebleu_weights, [0.4, 0.2, 0.2, 0.2]);
        assert_eq!(s.max_ngram, 4);
    }

    #[test]
    fn json_file() {
        let s = Settings::from_str_any(r#"{"beta": 0.01, "max_ngram": 2}"#).unwrap();
        assert_eq!((s.beta, s.max_ngram), (0.01, 2));
    }

    #[test]
    fn overrides_win_over_file() {
        let file = Settings::from_str_any("threshold=0.6\nseed=1").unwrap();
        let s = file.with_overrides([("threshold", "0.7")]).unwrap();
        assert_eq!((s.threshold, s.seed), (0.7, 1));
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(Settings::from_str_any("thresold=0.6").is_err());
        assert!(Settings::from_str_any("threshold=1.5").is_err());
        assert!(Settings::from_str_any("ratios=0.5,0.5,0.5").is_err());
        assert!(Settings::from_str_any("just words").is_err());
        assert!(Settings::from_str_any("[1,2]").is_err());
    }
}
