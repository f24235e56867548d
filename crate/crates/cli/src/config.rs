use lclab_core::LogConcaveMeasure;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::UsageError;

/// One experiment run as read from `--config`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<LogConcaveMeasure>,
    #[serde(default)]
    pub params: BTreeMap<String, Value>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(experiment: &str) -> Self {
        ExperimentConfig { experiment: experiment.to_string(), measure: None, params: BTreeMap::new(), seed: 0, out: None }
    }

    pub fn from_json(text: &str) -> Result<Self, UsageError> {
        serde_json::from_str(text).map_err(|e| UsageError(format!("malformed config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, UsageError> {
        let text = std::fs::read_to_string(path).map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn with_param(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), v.into());
        self
    }

    pub fn with_measure(mut self, m: LogConcaveMeasure) -> Self {
        self.measure = Some(m);
        self
    }

    pub fn params(&self) -> Params<'_> {
        Params(&self.params)
    }
}

/// Typed access to the `params` map.
pub struct Params<'a>(&'a BTreeMap<String, Value>);

impl Params<'_> {
    /// Rejects any key outside `allowed`.
    pub fn restrict(&self, allowed: &[&str]) -> Result<(), UsageError> {
        match self.0.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(UsageError(format!("unknown param '{k}' (accepted: {})", allowed.join(", ")))),
            None => Ok(()),
        }
    }

    pub fn f64(&self, key: &str, default: f64) -> Result<f64, UsageError> {
        match self.0.get(key) {
            None => Ok(default),
            Some(v) => v.as_f64().ok_or_else(|| UsageError(format!("param '{key}' must be a number"))),
        }
    }

    pub fn usize(&self, key: &str, default: usize) -> Result<usize, UsageError> {
        match self.0.get(key) {
            None => Ok(default),
            Some(v) => v
                .as_u64()
                .map(|u| u as usize)
                .ok_or_else(|| UsageError(format!("param '{key}' must be a non-negative integer"))),
        }
    }

    pub fn str<'b>(&'b self, key: &str, default: &'b str) -> Result<&'b str, UsageError> {
        match self.0.get(key) {
            None => Ok(default),
            Some(v) => v.as_str().ok_or_else(|| UsageError(format!("param '{key}' must be a string"))),
        }
    }

    pub fn f64_list(&self, key: &str, default: &[f64]) -> Result<Vec<f64>, UsageError> {
        match self.0.get(key) {
            None => Ok(default.to_vec()),
            Some(Value::Array(xs)) => xs
                .iter()
                .map(|x| x.as_f64().ok_or_else(|| UsageError(format!("param '{key}' must hold numbers"))))
                .collect(),
            Some(v) => v.as_f64().map(|x| vec![x]).ok_or_else(|| UsageError(format!("param '{key}' must be a list of numbers"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let c = ExperimentConfig::new("spectral_gap_fd")
            .with_measure(LogConcaveMeasure::interval(0.0, 3.0))
            .with_param("grid", 2000)
            .with_param("radii", vec![1.0, 2.0]);
        assert_eq!(ExperimentConfig::from_json(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(ExperimentConfig::from_json(r#"{"experiment": "x", "sead": 3}"#).is_err());
        let c = ExperimentConfig::from_json(r#"{"experiment": "x", "params": {"grid": 10}}"#).unwrap();
        assert!(c.params().restrict(&["grid"]).is_ok());
        assert!(c.params().restrict(&["n"]).is_err());
    }

    #[test]
    fn typed_params() {
        let c = ExperimentConfig::from_json(r#"{"experiment": "x", "params": {"s": 2, "r": [1, 2.5], "k": -1}}"#).unwrap();
        let p = c.params();
        assert_eq!(p.f64("s", 0.0).unwrap(), 2.0);
        assert_eq!(p.f64_list("r", &[]).unwrap(), vec![1.0, 2.5]);
        assert!(p.usize("k", 0).is_err());
        assert_eq!(p.usize("missing", 7).unwrap(), 7);
    }
}
