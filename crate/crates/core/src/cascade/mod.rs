//! Default cascades.
//!
//! Two engines share [`CascadeState`]:
//!
//! * the capital/loss engine ([`apply_shock`], [`gai_kapadia_step`],
//!   [`run_cascade`], [`monte_carlo`]): every asset holds capital
//!   `K_i = c P_i` and fails once it drops below `K_min,i = m P_i`; a failed
//!   asset `i` passes `L_ij = max(0, E_ij - (K_i - D_i))` to each `j` it is
//!   exposed to, exactly once, in the iteration after it fails;
//! * the influence engine ([`deterministic_cascade`], [`recursion_step`]):
//!   asset `i` fails when the summed filtered correlation to failed assets
//!   exceeds a threshold.
//!
//! Both update synchronously and never revive a failed asset.

mod capital;
mod export;
mod influence;
mod monte_carlo;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use capital::{apply_shock, gai_kapadia_step, run_cascade};
pub use export::{write_heatmap, write_simulation_json, write_simulation_table};
pub use influence::{deterministic_cascade, recursion_step};
pub use monte_carlo::{monte_carlo, run_stream, Scenario, SimulationReport};

/// Capital buffers and shock distribution, as fractions of the reference
/// price.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapitalConfig {
    pub capital_ratio: f64,
    pub min_capital_ratio: f64,
    pub shock_low: f64,
    pub shock_high: f64,
    /// A run is a systemic failure when strictly more assets than this fail.
    pub systemic_failure_count: usize,
}

impl Default for CapitalConfig {
    fn default() -> Self {
        Self {
            capital_ratio: 0.2,
            min_capital_ratio: 0.1,
            shock_low: 0.1,
            shock_high: 0.5,
            systemic_failure_count: 5,
        }
    }
}

impl CapitalConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.min_capital_ratio && self.min_capital_ratio < self.capital_ratio) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < min_capital_ratio < capital_ratio, got {} and {}",
                self.min_capital_ratio, self.capital_ratio
            )));
        }
        if !(0.0 < self.shock_low && self.shock_low <= self.shock_high && self.shock_high < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < shock_low <= shock_high < 1, got {} and {}",
                self.shock_low, self.shock_high
            )));
        }
        Ok(())
    }
}

/// Settings of the correlation-influence model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeterministicConfig {
    pub influence_threshold: f64,
    pub theta: f64,
}

impl Default for DeterministicConfig {
    fn default() -> Self {
        Self {
            influence_threshold: 0.5,
            theta: 0.3,
        }
    }
}

/// Per-asset state of one cascade.
///
/// `history[t]` is the default vector after iteration `t`; `history[0]`
/// reflects the initial shocks. Only iterations that add at least one
/// default are recorded, so `iteration == history.len() - 1`.
/// The influence engine leaves the capital vectors empty.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadeState {
    pub capitals: Vec<f64>,
    pub min_capitals: Vec<f64>,
    /// Capital at the moment of default; NaN while solvent.
    pub default_capitals: Vec<f64>,
    pub defaulted: Vec<bool>,
    /// Assets that failed in the latest iteration and have not yet passed on
    /// their losses.
    pub frontier: Vec<usize>,
    pub iteration: usize,
    pub history: Vec<Vec<bool>>,
}

impl CascadeState {
    /// Fresh capital state with `K_i = capital_ratio * P_i`.
    pub fn from_prices(prices: &[f64], cfg: &CapitalConfig) -> Self {
        let n = prices.len();
        Self {
            capitals: prices.iter().map(|p| cfg.capital_ratio * p).collect(),
            min_capitals: prices.iter().map(|p| cfg.min_capital_ratio * p).collect(),
            default_capitals: vec![f64::NAN; n],
            defaulted: vec![false; n],
            frontier: Vec::new(),
            iteration: 0,
            history: vec![vec![false; n]],
        }
    }

    /// Influence-model state with the given assets already failed.
    pub fn with_defaults(n: usize, seeds: &[usize]) -> Self {
        let mut defaulted = vec![false; n];
        for &s in seeds {
            defaulted[s] = true;
        }
        Self {
            capitals: Vec::new(),
            min_capitals: Vec::new(),
            default_capitals: Vec::new(),
            frontier: seeds.to_vec(),
            iteration: 0,
            history: vec![defaulted.clone()],
            defaulted,
        }
    }

    pub fn n_assets(&self) -> usize {
        self.defaulted.len()
    }

    pub fn failed_count(&self) -> usize {
        self.defaulted.iter().filter(|d| **d).count()
    }

    pub fn failed_indices(&self) -> Vec<usize> {
        (0..self.n_assets()).filter(|&i| self.defaulted[i]).collect()
    }
}
