//! Price ingestion, cleaning, alignment and log returns.

mod clean;
mod fetch;
mod io;
mod returns;

use chrono::NaiveDate;
use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use clean::{clean_panel, clean_series, quantile_linear, DEFAULT_IQR_MULTIPLIER};
pub use fetch::{fetch_prices, FetchOptions, FetchOutcome};
pub use io::{
    load_price_csv, restrict_dates, write_normalized_prices, write_stats_csv, write_stats_json,
};
pub use returns::{align, descriptive_stats, log_returns, normalize_prices};

/// A price history as read from disk, before cleaning. `None` marks a gap.
#[derive(Debug, Clone, PartialEq)]
pub struct RawSeries {
    pub asset_id: String,
    pub dates: Vec<NaiveDate>,
    pub prices: Vec<Option<f64>>,
}

impl RawSeries {
    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }

    pub fn missing_count(&self) -> usize {
        self.prices.iter().filter(|p| p.is_none()).count()
    }
}

/// A cleaned daily price history with no gaps.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    asset_id: String,
    dates: Vec<NaiveDate>,
    prices: Vec<f64>,
}

impl PriceSeries {
    /// Builds a series, checking that dates strictly increase, prices are
    /// finite and positive, and there are at least two observations.
    pub fn new(asset_id: impl Into<String>, dates: Vec<NaiveDate>, prices: Vec<f64>) -> Result<Self> {
        let asset_id = asset_id.into();
        let unusable = |reason: String| Error::UnusableSeries {
            asset: asset_id.clone(),
            reason,
        };
        if dates.len() != prices.len() {
            return Err(unusable(format!(
                "{} dates but {} prices",
                dates.len(),
                prices.len()
            )));
        }
        if prices.len() < 2 {
            return Err(unusable(format!("{} observations, need at least 2", prices.len())));
        }
        if let Some(w) = dates.windows(2).find(|w| w[0] >= w[1]) {
            return Err(unusable(format!("dates not strictly increasing at {}", w[1])));
        }
        if let Some(p) = prices.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
            return Err(unusable(format!("non-positive or non-finite price {p}")));
        }
        Ok(Self {
            asset_id,
            dates,
            prices,
        })
    }

    pub fn asset_id(&self) -> &str {
        &self.asset_id
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn prices(&self) -> &[f64] {
        &self.prices
    }

    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }

    pub fn price_on(&self, date: NaiveDate) -> Option<f64> {
        self.dates.binary_search(&date).ok().map(|i| self.prices[i])
    }

    pub fn first_date(&self) -> NaiveDate {
        self.dates[0]
    }

    pub fn last_date(&self) -> NaiveDate {
        self.dates[self.dates.len() - 1]
    }
}

/// Prices of several assets on a shared date index (`dates.len()` rows by
/// `asset_ids.len()` columns).
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedPanel {
    pub asset_ids: Vec<String>,
    pub dates: Vec<NaiveDate>,
    pub prices: Array2<f64>,
}

/// How the scalar price level `P_i` used for exposures and capital is
/// derived from an asset's aligned price history.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ReferencePriceMode {
    #[default]
    Mean,
    First,
    Last,
}

impl AlignedPanel {
    pub fn n_assets(&self) -> usize {
        self.asset_ids.len()
    }

    pub fn reference_prices(&self, mode: ReferencePriceMode) -> Vec<f64> {
        let last = self.dates.len() - 1;
        self.prices
            .columns()
            .into_iter()
            .map(|col| match mode {
                ReferencePriceMode::Mean => col.sum() / col.len() as f64,
                ReferencePriceMode::First => col[0],
                ReferencePriceMode::Last => col[last],
            })
            .collect()
    }
}

/// Daily log returns on an aligned date index. Row `t` holds
/// `ln(P_t / P_{t-1})` and is labelled with the later date.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnMatrix {
    pub asset_ids: Vec<String>,
    pub dates: Vec<NaiveDate>,
    pub returns: Array2<f64>,
}

impl ReturnMatrix {
    pub fn new(asset_ids: Vec<String>, dates: Vec<NaiveDate>, returns: Array2<f64>) -> Result<Self> {
        if returns.nrows() != dates.len() || returns.ncols() != asset_ids.len() {
            return Err(Error::Shape(format!(
                "returns are {}x{} but there are {} dates and {} assets",
                returns.nrows(),
                returns.ncols(),
                dates.len(),
                asset_ids.len()
            )));
        }
        if returns.iter().any(|r| !r.is_finite()) {
            return Err(Error::Domain("return matrix contains non-finite entries".into()));
        }
        Ok(Self {
            asset_ids,
            dates,
            returns,
        })
    }

    pub fn n_assets(&self) -> usize {
        self.asset_ids.len()
    }

    pub fn n_observations(&self) -> usize {
        self.dates.len()
    }

    pub fn column(&self, asset: usize) -> Vec<f64> {
        self.returns.column(asset).to_vec()
    }

    pub fn index_of(&self, asset_id: &str) -> Option<usize> {
        self.asset_ids.iter().position(|a| a == asset_id)
    }
}

/// Per-asset moments and extremes of daily log returns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescriptiveStats {
    pub asset_id: String,
    pub mean: f64,
    pub std_dev: f64,
    pub min: f64,
    pub max: f64,
}
