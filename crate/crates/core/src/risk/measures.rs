use super::RiskMeasures;
use crate::{Error, Result};

pub const MIN_OBSERVATIONS: usize = 20;

/// 1-based rank `ceil(q * n)` of the lower order statistic, clamped to
/// `1..=n`. Products within 1e-9 of an integer are taken as that integer so
/// that e.g. `(1 - 0.95) * 100` selects rank 5 rather than 6.
pub fn lower_order_index(q: f64, n: usize) -> usize {
    let pos = q * n as f64;
    let nearest = pos.round();
    let rank = if (pos - nearest).abs() <= 1e-9 * pos.abs().max(1.0) {
        nearest
    } else {
        pos.ceil()
    };
    (rank as usize).clamp(1, n)
}

fn check_sample(returns: &[f64], alpha_level: f64) -> Result<()> {
    if returns.len() < MIN_OBSERVATIONS {
        return Err(Error::SampleSize {
            required: MIN_OBSERVATIONS,
            actual: returns.len(),
        });
    }
    if !(alpha_level > 0.0 && alpha_level < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "confidence level must lie in (0, 1), got {alpha_level}"
        )));
    }
    if returns.iter().any(|r| !r.is_finite()) {
        return Err(Error::Domain("returns contain non-finite values".into()));
    }
    Ok(())
}

fn sorted(returns: &[f64]) -> Vec<f64> {
    let mut s = returns.to_vec();
    s.sort_by(f64::total_cmp);
    s
}

/// Empirical VaR: the lower order statistic of rank `ceil((1 - alpha) * n)`.
pub fn var(returns: &[f64], alpha_level: f64) -> Result<f64> {
    check_sample(returns, alpha_level)?;
    let s = sorted(returns);
    Ok(s[lower_order_index(1.0 - alpha_level, s.len()) - 1])
}

/// Mean of all returns at or below the VaR.
///
/// Computed as `VaR + mean(r - VaR)`: every shortfall is `<= 0`, so the
/// result can never round above the VaR, and ties at the VaR give it exactly.
pub fn cvar(returns: &[f64], alpha_level: f64) -> Result<f64> {
    let threshold = var(returns, alpha_level)?;
    let (sum, count) = returns
        .iter()
        .filter(|r| **r <= threshold)
        .fold((0.0, 0usize), |(s, c), r| (s + (r - threshold), c + 1));
    Ok(threshold + sum / count as f64)
}

pub fn risk_measures(asset_id: &str, returns: &[f64], alpha_level: f64) -> Result<RiskMeasures> {
    Ok(RiskMeasures {
        asset_id: asset_id.to_string(),
        alpha_level,
        var: var(returns, alpha_level)?,
        cvar: cvar(returns, alpha_level)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_sample_var() {
        let mut s = vec![-0.10; 5];
        s.extend(vec![0.0; 90]);
        s.extend(vec![0.10; 5]);
        assert_eq!(var(&s, 0.95).unwrap(), -0.10);
    }

    #[test]
    fn constant_sample() {
        let s = vec![0.003; 40];
        assert_eq!(var(&s, 0.95).unwrap(), 0.003);
        assert_eq!(cvar(&s, 0.95).unwrap(), 0.003);
    }

    #[test]
    fn cvar_averages_tail() {
        let mut s = vec![-0.2, -0.1];
        s.extend(vec![0.0; 18]);
        assert_eq!(var(&s, 0.90).unwrap(), -0.1);
        assert!((cvar(&s, 0.90).unwrap() - (-0.15)).abs() < 1e-15);
    }

    #[test]
    fn sample_size_and_level_errors() {
        assert!(matches!(var(&[0.0; 19], 0.95), Err(Error::SampleSize { required: 20, actual: 19 })));
        assert!(matches!(var(&[0.0; 30], 1.0), Err(Error::InvalidParameter(_))));
        assert!(matches!(cvar(&[0.0; 30], 0.0), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn rank_rounding() {
        assert_eq!(lower_order_index(1.0 - 0.95, 100), 5);
        assert_eq!(lower_order_index(1.0 - 0.90, 20), 2);
        assert_eq!(lower_order_index(0.05, 101), 6);
        assert_eq!(lower_order_index(0.001, 20), 1);
        assert_eq!(lower_order_index(0.9999, 3), 3);
    }

    use proptest::prelude::*;

    proptest! {
        #[test]
        fn cvar_never_exceeds_var(
            r in proptest::collection::vec((-20i32..20).prop_map(|x| x as f64 * 0.013), 20..200),
            level in 0.5f64..0.999,
        ) {
            let v = var(&r, level).unwrap();
            prop_assert!(cvar(&r, level).unwrap() <= v);
            prop_assert!(r.iter().filter(|x| **x <= v).count() >= lower_order_index(1.0 - level, r.len()));
        }
    }
}
