use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::cascade::CapitalConfig;
use crate::market_data::{ReferencePriceMode, DEFAULT_IQR_MULTIPLIER};

pub const SEED_ENV: &str = "CASCADENET_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioKind {
    General,
    Single,
    Simultaneous,
}

/// Every tunable of a pipeline run. Serialised as a flat JSON object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub input_csv: Option<PathBuf>,
    pub start_date: Option<NaiveDate>,
    pub end_date: Option<NaiveDate>,
    pub theta_list: Vec<f64>,
    pub alpha_level: f64,
    pub iqr_multiplier: f64,
    pub capital_ratio: f64,
    pub min_capital_ratio: f64,
    pub shock_low: f64,
    pub shock_high: f64,
    pub systemic_failure_count: usize,
    pub influence_threshold: f64,
    /// Shock applied to the first target in the single illustrative
    /// capital/loss cascade exported as a heatmap.
    pub example_shock: f64,
    pub n_runs: usize,
    pub seed: u64,
    pub reference_price_mode: ReferencePriceMode,
    pub output_dir: PathBuf,
    /// Empty means: general, plus single/simultaneous when targets allow.
    pub scenarios: Vec<ScenarioKind>,
    pub targets: Vec<String>,
    pub transpose_exposures: bool,
    pub shock_all: bool,
    pub dump_adjacency: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let capital = CapitalConfig::default();
        Self {
            input_csv: None,
            start_date: None,
            end_date: None,
            theta_list: vec![0.3, 0.5],
            alpha_level: 0.95,
            iqr_multiplier: DEFAULT_IQR_MULTIPLIER,
            capital_ratio: capital.capital_ratio,
            min_capital_ratio: capital.min_capital_ratio,
            shock_low: capital.shock_low,
            shock_high: capital.shock_high,
            systemic_failure_count: capital.systemic_failure_count,
            influence_threshold: 0.5,
            example_shock: 0.3,
            n_runs: 1000,
            seed: 42,
            reference_price_mode: ReferencePriceMode::Mean,
            output_dir: PathBuf::from("out"),
            scenarios: Vec::new(),
            targets: Vec::new(),
            transpose_exposures: false,
            shock_all: false,
            dump_adjacency: false,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Invalid(String),
}

impl RunConfig {
    pub fn capital(&self) -> CapitalConfig {
        CapitalConfig {
            capital_ratio: self.capital_ratio,
            min_capital_ratio: self.min_capital_ratio,
            shock_low: self.shock_low,
            shock_high: self.shock_high,
            systemic_failure_count: self.systemic_failure_count,
        }
    }

    /// Defaults, then `CASCADENET_SEED`, then the keys present in the file.
    pub fn from_sources(file: Option<&Path>, env_seed: Option<&str>) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        if let Some(raw) = env_seed {
            cfg.seed = raw
                .trim()
                .parse()
                .map_err(|_| ConfigError::Invalid(format!("{SEED_ENV}=`{raw}` is not a seed")))?;
        }
        let Some(path) = file else {
            return Ok(cfg);
        };
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        cfg.overlay_json(&text)
    }

    /// Applies the keys of a flat JSON object on top of `self`.
    pub fn overlay_json(&self, text: &str) -> Result<Self, ConfigError> {
        let overlay: serde_json::Map<String, serde_json::Value> =
            serde_json::from_str(text).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let mut base = match serde_json::to_value(self) {
            Ok(serde_json::Value::Object(m)) => m,
            _ => unreachable!("RunConfig serialises to an object"),
        };
        base.extend(overlay);
        serde_json::from_value(serde_json::Value::Object(base))
            .map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("RunConfig is serialisable") + "\n"
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if self.theta_list.is_empty() {
            return bad("theta_list must not be empty".into());
        }
        if let Some(t) = self.theta_list.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
            return bad(format!("every theta must be positive, got {t}"));
        }
        if let (Some(s), Some(e)) = (self.start_date, self.end_date) {
            if s >= e {
                return bad(format!("start date {s} must precede end date {e}"));
            }
        }
        if !(self.alpha_level > 0.0 && self.alpha_level < 1.0) {
            return bad(format!("alpha_level must lie in (0, 1), got {}", self.alpha_level));
        }
        if self.n_runs == 0 {
            return bad("n_runs must be at least 1".into());
        }
        if self.influence_threshold.is_nan() || self.influence_threshold <= 0.0 {
            return bad("influence_threshold must be positive".into());
        }
        if !(self.example_shock > 0.0 && self.example_shock < 1.0) {
            return bad("example_shock must lie in (0, 1)".into());
        }
        self.capital()
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))
    }
}
