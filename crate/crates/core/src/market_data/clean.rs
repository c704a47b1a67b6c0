use rayon::prelude::*;

use super::{PriceSeries, RawSeries};
use crate::{Error, Result};

pub const DEFAULT_IQR_MULTIPLIER: f64 = 1.5;

/// Fills gaps and removes price-level outliers in one pass.
///
/// 1. interior gaps are linearly interpolated by position between the
///    nearest valid neighbours;
/// 2. leading gaps take the first valid price, trailing gaps the last;
/// 3. values outside `[Q1 - m*IQR, Q3 + m*IQR]` of the filled series are
///    dropped and the series is refilled from the remaining original
///    observations using steps 1 and 2.
///
/// Quartiles are not recomputed after step 3.
pub fn clean_series(raw: &RawSeries, iqr_multiplier: f64) -> Result<PriceSeries> {
    if !(iqr_multiplier.is_finite() && iqr_multiplier >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "IQR multiplier must be a non-negative number, got {iqr_multiplier}"
        )));
    }
    let unusable = |reason: String| Error::UnusableSeries {
        asset: raw.asset_id.clone(),
        reason,
    };
    if raw.dates.len() != raw.prices.len() {
        return Err(unusable("dates and prices differ in length".into()));
    }
    let valid = raw.prices.iter().filter(|p| p.is_some()).count();
    if valid < 2 {
        return Err(unusable(format!("{valid} valid observations, need at least 2")));
    }

    let filled = fill_gaps(&raw.prices);
    let mut sorted = filled.clone();
    sorted.sort_by(f64::total_cmp);
    let q1 = quantile_linear(&sorted, 0.25);
    let q3 = quantile_linear(&sorted, 0.75);
    let iqr = q3 - q1;
    let (lo, hi) = (q1 - iqr_multiplier * iqr, q3 + iqr_multiplier * iqr);

    let kept: Vec<Option<f64>> = raw
        .prices
        .iter()
        .map(|p| p.filter(|v| *v >= lo && *v <= hi))
        .collect();
    let removed = kept.iter().zip(&raw.prices).filter(|(k, p)| k.is_none() && p.is_some()).count();
    if removed > 0 {
        log::debug!("{}: {removed} price outliers outside [{lo}, {hi}]", raw.asset_id);
    }
    if kept.iter().filter(|p| p.is_some()).count() < 2 {
        return Err(unusable("fewer than 2 observations survive the IQR filter".into()));
    }
    PriceSeries::new(raw.asset_id.clone(), raw.dates.clone(), fill_gaps(&kept))
}

/// Cleans every series independently; output order matches input order.
pub fn clean_panel(raw: &[RawSeries], iqr_multiplier: f64) -> Result<Vec<PriceSeries>> {
    raw.par_iter()
        .map(|s| clean_series(s, iqr_multiplier))
        .collect()
}

/// Linear interpolation inside, nearest-value fill at both ends. Requires at
/// least one `Some`.
fn fill_gaps(prices: &[Option<f64>]) -> Vec<f64> {
    let known: Vec<(usize, f64)> = prices
        .iter()
        .enumerate()
        .filter_map(|(i, p)| p.map(|v| (i, v)))
        .collect();
    let (first_i, first_v) = known[0];
    let (last_i, last_v) = known[known.len() - 1];

    let mut out = vec![0.0; prices.len()];
    out[..=first_i].fill(first_v);
    out[last_i..].fill(last_v);
    for pair in known.windows(2) {
        let ((i0, v0), (i1, v1)) = (pair[0], pair[1]);
        out[i0] = v0;
        let span = (i1 - i0) as f64;
        for (step, slot) in out[i0 + 1..i1].iter_mut().enumerate() {
            let w = (step + 1) as f64 / span;
            *slot = v0 + (v1 - v0) * w;
        }
    }
    out
}

/// Quantile of an ascending-sorted slice using linear interpolation between
/// order statistics at position `(n - 1) * q`.
pub fn quantile_linear(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}
