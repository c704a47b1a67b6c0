//! Individual and tail-risk measures on daily log returns.

mod measures;
mod report;
mod tail;

use serde::{Deserialize, Serialize};

pub use measures::{cvar, lower_order_index, risk_measures, var, MIN_OBSERVATIONS};
pub use report::{write_ccdf_csv, write_hill_csv, write_risk_report, write_tail_report, RiskRow};
pub use tail::{
    classify_tail, default_hill_k, empirical_ccdf, fit_ccdf_tail, hill_estimate, hill_plot_data,
    loss_sample, tail_fit, HillPlot, PowerLawFit, StableInterval, DEFAULT_TAIL_PERCENTILE,
    HEAVY_TAIL_ALPHA, STABLE_SPREAD,
};

/// VaR and CVaR of one asset at a confidence level, both in return space
/// (negative numbers are losses).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskMeasures {
    pub asset_id: String,
    pub alpha_level: f64,
    pub var: f64,
    pub cvar: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TailClass {
    Heavy,
    Moderate,
}

impl TailClass {
    /// Heavy iff `alpha < 3`.
    pub fn from_alpha(alpha: f64) -> Self {
        if alpha < HEAVY_TAIL_ALPHA {
            TailClass::Heavy
        } else {
            TailClass::Moderate
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            TailClass::Heavy => "Heavy tail",
            TailClass::Moderate => "Moderate tail",
        }
    }
}

/// Hill tail-index estimate for one asset's losses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub asset_id: String,
    pub alpha_hat: f64,
    pub k_used: usize,
    pub n_losses: usize,
    pub tail_class: TailClass,
    pub threshold_percentile: f64,
}

/// Empirical `P(X >= x)` at each distinct loss value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CcdfCurve {
    pub asset_id: String,
    pub points: Vec<(f64, f64)>,
}
