use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{CcdfCurve, TailClass, TailFit};
use crate::market_data::quantile_linear;
use crate::{Error, Result};

/// Tail indices below this are classified as heavy.
pub const HEAVY_TAIL_ALPHA: f64 = 3.0;
/// Fraction of the loss sample below the tail cut-off.
pub const DEFAULT_TAIL_PERCENTILE: f64 = 0.95;
/// Largest spread of Hill estimates allowed inside a stable window.
pub const STABLE_SPREAD: f64 = 0.2;

/// Loss magnitudes `-r` of the strictly negative returns.
pub fn loss_sample(returns: &[f64]) -> Vec<f64> {
    returns.iter().filter(|r| **r < 0.0).map(|r| -r).collect()
}

fn check_losses(losses: &[f64]) -> Result<()> {
    if let Some(x) = losses.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
        return Err(Error::Domain(format!("losses must be positive and finite, found {x}")));
    }
    Ok(())
}

fn sorted_desc(losses: &[f64]) -> Vec<f64> {
    let mut s = losses.to_vec();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// `P(X >= x)` evaluated at every distinct loss, ascending in `x`.
pub fn empirical_ccdf(asset_id: &str, losses: &[f64]) -> Result<CcdfCurve> {
    check_losses(losses)?;
    let mut sorted = losses.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let mut points = Vec::new();
    let mut i = 0;
    while i < n {
        let x = sorted[i];
        points.push((x, (n - i) as f64 / n as f64));
        while i < n && sorted[i] == x {
            i += 1;
        }
    }
    if points.len() < 2 {
        return Err(Error::Degenerate(format!(
            "CCDF needs at least 2 distinct losses, got {}",
            points.len()
        )));
    }
    Ok(CcdfCurve {
        asset_id: asset_id.to_string(),
        points,
    })
}

/// Least-squares line through the log-log CCDF above a percentile of the
/// loss sample. `slope` estimates `-alpha`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub threshold: f64,
    pub slope: f64,
    pub intercept: f64,
    pub n_points: usize,
}

pub fn fit_ccdf_tail(curve: &CcdfCurve, losses: &[f64], percentile: f64) -> Result<PowerLawFit> {
    if !(0.0..1.0).contains(&percentile) {
        return Err(Error::InvalidParameter(format!("percentile must lie in [0, 1), got {percentile}")));
    }
    let mut sorted = losses.to_vec();
    sorted.sort_by(f64::total_cmp);
    let threshold = quantile_linear(&sorted, percentile);
    let (xs, ys): (Vec<f64>, Vec<f64>) = curve
        .points
        .iter()
        .filter(|(x, _)| *x >= threshold)
        .map(|(x, p)| (x.ln(), p.ln()))
        .unzip();
    let n = xs.len();
    if n < 2 {
        return Err(Error::Degenerate("fewer than 2 CCDF points above the threshold".into()));
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    Ok(PowerLawFit {
        threshold,
        slope,
        intercept: my - slope * mx,
        n_points: n,
    })
}

/// Hill estimator over the `k` largest losses:
/// `alpha = 1 / mean_{i<=k}(ln X_(i) - ln X_(k+1))` with `X_(1) >= X_(2) >= ...`.
pub fn hill_estimate(losses: &[f64], k: usize) -> Result<f64> {
    check_losses(losses)?;
    let n = losses.len();
    if k < 1 || k >= n {
        return Err(Error::Domain(format!("k must satisfy 1 <= k < n = {n}, got {k}")));
    }
    let s = sorted_desc(losses);
    let floor = s[k].ln();
    let mean_excess = s[..k].iter().map(|x| x.ln() - floor).sum::<f64>() / k as f64;
    if mean_excess <= 0.0 {
        return Err(Error::Degenerate(format!("top {} losses are all equal", k + 1)));
    }
    Ok(1.0 / mean_excess)
}

/// Longest run of consecutive `k` whose Hill estimates stay within
/// [`STABLE_SPREAD`] of each other. Ties go to the smaller `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StableInterval {
    pub k_start: usize,
    pub k_end: usize,
    pub mean_alpha: f64,
    pub spread: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HillPlot {
    pub points: Vec<(usize, f64)>,
    pub stable: Option<StableInterval>,
}

impl HillPlot {
    pub fn in_stable(&self, k: usize) -> bool {
        self.stable
            .as_ref()
            .is_some_and(|s| (s.k_start..=s.k_end).contains(&k))
    }
}

/// Hill estimates for every `k` in `k_min..=k_max`.
pub fn hill_plot_data(losses: &[f64], k_min: usize, k_max: usize) -> Result<HillPlot> {
    check_losses(losses)?;
    let n = losses.len();
    if !(1 <= k_min && k_min < k_max && k_max < n) {
        return Err(Error::Domain(format!(
            "need 1 <= k_min < k_max < n = {n}, got k_min = {k_min}, k_max = {k_max}"
        )));
    }
    let s = sorted_desc(losses);
    let logs: Vec<f64> = s.iter().map(|x| x.ln()).collect();
    let mut prefix = vec![0.0; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] + logs[i];
    }
    let mut points = Vec::with_capacity(k_max - k_min + 1);
    for k in k_min..=k_max {
        let mean_excess = prefix[k] / k as f64 - logs[k];
        if mean_excess <= 0.0 {
            return Err(Error::Degenerate(format!("top {} losses are all equal", k + 1)));
        }
        points.push((k, 1.0 / mean_excess));
    }
    let stable = stable_interval(&points, STABLE_SPREAD);
    Ok(HillPlot { points, stable })
}

fn stable_interval(points: &[(usize, f64)], max_spread: f64) -> Option<StableInterval> {
    let mut max_q: VecDeque<usize> = VecDeque::new();
    let mut min_q: VecDeque<usize> = VecDeque::new();
    let mut left = 0;
    let mut best: Option<(usize, usize)> = None;
    for right in 0..points.len() {
        let v = points[right].1;
        while max_q.back().is_some_and(|&i| points[i].1 <= v) {
            max_q.pop_back();
        }
        max_q.push_back(right);
        while min_q.back().is_some_and(|&i| points[i].1 >= v) {
            min_q.pop_back();
        }
        min_q.push_back(right);
        while points[max_q[0]].1 - points[min_q[0]].1 > max_spread {
            left += 1;
            if max_q[0] < left {
                max_q.pop_front();
            }
            if min_q[0] < left {
                min_q.pop_front();
            }
        }
        if best.is_none_or(|(l, r)| right - left > r - l) {
            best = Some((left, right));
        }
    }
    best.map(|(l, r)| {
        let window = &points[l..=r];
        let alphas = window.iter().map(|p| p.1);
        let hi = alphas.clone().fold(f64::NEG_INFINITY, f64::max);
        let lo = alphas.clone().fold(f64::INFINITY, f64::min);
        StableInterval {
            k_start: window[0].0,
            k_end: window[window.len() - 1].0,
            mean_alpha: alphas.sum::<f64>() / window.len() as f64,
            spread: hi - lo,
        }
    })
}

pub fn classify_tail(fit: &TailFit) -> TailClass {
    TailClass::from_alpha(fit.alpha_hat)
}

/// `k = floor(0.05 n)`, at least 1: the order statistics above the 95th
/// percentile.
pub fn default_hill_k(n_losses: usize) -> usize {
    (((1.0 - DEFAULT_TAIL_PERCENTILE) * n_losses as f64 + 1e-9).floor() as usize).max(1)
}

/// Hill fit of an asset's losses at the default `k`.
pub fn tail_fit(asset_id: &str, returns: &[f64]) -> Result<TailFit> {
    let losses = loss_sample(returns);
    let n = losses.len();
    let k = default_hill_k(n);
    let alpha_hat = hill_estimate(&losses, k)?;
    Ok(TailFit {
        asset_id: asset_id.to_string(),
        alpha_hat,
        k_used: k,
        n_losses: n,
        tail_class: TailClass::from_alpha(alpha_hat),
        threshold_percentile: DEFAULT_TAIL_PERCENTILE,
    })
}
