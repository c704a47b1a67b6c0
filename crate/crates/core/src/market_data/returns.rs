use std::collections::BTreeSet;

use chrono::NaiveDate;
use ndarray::Array2;

use super::{AlignedPanel, DescriptiveStats, PriceSeries, ReturnMatrix};
use crate::{Error, Result};

/// Restricts every series to the dates present in all of them.
pub fn align(panel: &[PriceSeries]) -> Result<AlignedPanel> {
    if panel.is_empty() {
        return Err(Error::Alignment {
            ranges: "no assets supplied".into(),
        });
    }
    let mut common: BTreeSet<NaiveDate> = panel[0].dates().iter().copied().collect();
    for s in &panel[1..] {
        let dates: BTreeSet<NaiveDate> = s.dates().iter().copied().collect();
        common = common.intersection(&dates).copied().collect();
    }
    if common.len() < 2 {
        let ranges = panel
            .iter()
            .map(|s| format!("{}: {}..{}", s.asset_id(), s.first_date(), s.last_date()))
            .collect::<Vec<_>>()
            .join("; ");
        return Err(Error::Alignment { ranges });
    }

    let dates: Vec<NaiveDate> = common.into_iter().collect();
    let mut prices = Array2::zeros((dates.len(), panel.len()));
    for (j, s) in panel.iter().enumerate() {
        for (t, d) in dates.iter().enumerate() {
            // every common date is present in every series
            prices[[t, j]] = s.price_on(*d).expect("date in intersection");
        }
    }
    Ok(AlignedPanel {
        asset_ids: panel.iter().map(|s| s.asset_id().to_string()).collect(),
        dates,
        prices,
    })
}

/// `r_{i,t} = ln(P_{i,t} / P_{i,t-1})` over the common date index.
pub fn log_returns(panel: &[PriceSeries]) -> Result<ReturnMatrix> {
    let aligned = align(panel)?;
    returns_of(&aligned)
}

impl AlignedPanel {
    pub fn log_returns(&self) -> Result<ReturnMatrix> {
        returns_of(self)
    }
}

fn returns_of(aligned: &AlignedPanel) -> Result<ReturnMatrix> {
    let t = aligned.dates.len();
    let n = aligned.n_assets();
    let p = &aligned.prices;
    let returns = Array2::from_shape_fn((t - 1, n), |(row, j)| (p[[row + 1, j]] / p[[row, j]]).ln());
    ReturnMatrix::new(aligned.asset_ids.clone(), aligned.dates[1..].to_vec(), returns)
}

/// `P_t / P_0`.
pub fn normalize_prices(prices: &[f64]) -> Result<Vec<f64>> {
    let first = *prices
        .first()
        .ok_or_else(|| Error::Domain("cannot normalise an empty price list".into()))?;
    if !(first.is_finite() && first > 0.0) {
        return Err(Error::Domain(format!("first price must be positive, got {first}")));
    }
    Ok(prices.iter().map(|p| p / first).collect())
}

/// Sample mean, unbiased standard deviation, minimum and maximum per asset.
pub fn descriptive_stats(matrix: &ReturnMatrix) -> Result<Vec<DescriptiveStats>> {
    let n = matrix.n_observations();
    if n < 2 {
        return Err(Error::SampleSize {
            required: 2,
            actual: n,
        });
    }
    Ok(matrix
        .asset_ids
        .iter()
        .zip(matrix.returns.columns())
        .map(|(asset, col)| {
            // Welford
            let (mut mean, mut m2) = (0.0f64, 0.0f64);
            let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
            for (k, &x) in col.iter().enumerate() {
                let delta = x - mean;
                mean += delta / (k + 1) as f64;
                m2 += delta * (x - mean);
                min = min.min(x);
                max = max.max(x);
            }
            DescriptiveStats {
                asset_id: asset.clone(),
                mean: mean.clamp(min, max),
                std_dev: (m2.max(0.0) / (n - 1) as f64).sqrt(),
                min,
                max,
            }
        })
        .collect())
}
