use ndarray::Array2;

use super::{CorrelationMatrix, CorrelationNetwork, ExposureNetwork, RawExposures};
use crate::market_data::ReturnMatrix;
use crate::{Error, Result};

fn centered_columns(matrix: &ReturnMatrix) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let t = matrix.n_observations();
    if t < 2 {
        return Err(Error::SampleSize {
            required: 2,
            actual: t,
        });
    }
    let mut centered = Vec::with_capacity(matrix.n_assets());
    let mut sd = Vec::with_capacity(matrix.n_assets());
    for (asset, col) in matrix.asset_ids.iter().zip(matrix.returns.columns()) {
        let mean = col.sum() / t as f64;
        let c: Vec<f64> = col.iter().map(|x| x - mean).collect();
        let var = c.iter().map(|x| x * x).sum::<f64>() / (t - 1) as f64;
        if var.is_nan() || var <= 0.0 {
            return Err(Error::DegenerateAsset {
                asset: asset.clone(),
            });
        }
        sd.push(var.sqrt());
        centered.push(c);
    }
    Ok((centered, sd))
}

/// Per-asset sample standard deviation of log returns (divisor `T - 1`).
pub fn volatilities(matrix: &ReturnMatrix) -> Result<Vec<f64>> {
    Ok(centered_columns(matrix)?.1)
}

/// Pearson correlation with sample covariance. The result is exactly
/// symmetric with a unit diagonal.
pub fn correlation_matrix(matrix: &ReturnMatrix) -> Result<CorrelationMatrix> {
    let (centered, _) = centered_columns(matrix)?;
    let n = centered.len();
    let norms: Vec<f64> = centered
        .iter()
        .map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    let mut rho = Array2::eye(n);
    for i in 0..n {
        for j in i + 1..n {
            let dot: f64 = centered[i].iter().zip(&centered[j]).map(|(a, b)| a * b).sum();
            let r = (dot / (norms[i] * norms[j])).clamp(-1.0, 1.0);
            rho[[i, j]] = r;
            rho[[j, i]] = r;
        }
    }
    Ok(CorrelationMatrix {
        asset_ids: matrix.asset_ids.clone(),
        rho,
    })
}

/// `E_ij = rho_ij * sigma_i * P_i` off the diagonal, zero on it.
pub fn exposure_matrix(
    rho: &CorrelationMatrix,
    sigma: &[f64],
    prices: &[f64],
) -> Result<RawExposures> {
    let n = rho.asset_ids.len();
    if rho.rho.dim() != (n, n) || sigma.len() != n || prices.len() != n {
        return Err(Error::Shape(format!(
            "correlation is {:?} for {n} assets, {} volatilities, {} prices",
            rho.rho.dim(),
            sigma.len(),
            prices.len()
        )));
    }
    if let Some(p) = prices.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
        return Err(Error::Domain(format!("reference prices must be positive, got {p}")));
    }
    let matrix = Array2::from_shape_fn((n, n), |(i, j)| {
        if i == j {
            0.0
        } else {
            rho.rho[[i, j]] * sigma[i] * prices[i]
        }
    });
    Ok(RawExposures {
        asset_ids: rho.asset_ids.clone(),
        matrix,
        reference_prices: prices.to_vec(),
    })
}

/// Keeps `E_ij >= theta`, zeroes everything else (including all negative
/// exposures).
pub fn threshold_filter(raw: &RawExposures, theta: f64) -> Result<ExposureNetwork> {
    if !(theta.is_finite() && theta > 0.0) {
        return Err(Error::InvalidParameter(format!("theta must be positive, got {theta}")));
    }
    let weights = raw.matrix.mapv(|e| if e >= theta { e } else { 0.0 });
    Ok(ExposureNetwork {
        asset_ids: raw.asset_ids.clone(),
        theta,
        weights,
        reference_prices: raw.reference_prices.clone(),
    })
}

/// Undirected graph of correlations at or above `theta`.
pub fn correlation_network(rho: &CorrelationMatrix, theta: f64) -> Result<CorrelationNetwork> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::InvalidParameter(format!("theta must lie in (0, 1), got {theta}")));
    }
    let weights = Array2::from_shape_fn(rho.rho.dim(), |(i, j)| {
        let r = rho.rho[[i, j]];
        if i != j && r >= theta {
            r
        } else {
            0.0
        }
    });
    Ok(CorrelationNetwork {
        asset_ids: rho.asset_ids.clone(),
        theta,
        weights,
    })
}

/// `D_i = sum_j E~_ji`, the column sums.
pub fn incoming_exposure(net: &ExposureNetwork) -> Vec<f64> {
    net.weights.columns().into_iter().map(|c| c.sum()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::{Duration, NaiveDate};
    use ndarray::array;

    fn matrix(cols: &[Vec<f64>]) -> ReturnMatrix {
        let t = cols[0].len();
        let d0 = NaiveDate::from_ymd_opt(2020, 1, 1).unwrap();
        ReturnMatrix::new(
            (0..cols.len()).map(|i| format!("A{i}")).collect(),
            (0..t).map(|i| d0 + Duration::days(i as i64)).collect(),
            Array2::from_shape_fn((t, cols.len()), |(r, c)| cols[c][r]),
        )
        .unwrap()
    }

    fn raw(matrix: Array2<f64>) -> RawExposures {
        let n = matrix.nrows();
        RawExposures {
            asset_ids: (0..n).map(|i| format!("A{i}")).collect(),
            matrix,
            reference_prices: vec![1.0; n],
        }
    }

    #[test]
    fn identical_and_negated_columns() {
        let x = vec![0.01, -0.02, 0.03, 0.0, -0.01];
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let c = correlation_matrix(&matrix(&[x.clone(), x.clone(), neg])).unwrap();
        assert!((c.rho[[0, 1]] - 1.0).abs() < 1e-15);
        assert!((c.rho[[0, 2]] + 1.0).abs() < 1e-15);
        assert_eq!(c.rho[[1, 1]], 1.0);
    }

    #[test]
    fn zero_variance_named() {
        let err = correlation_matrix(&matrix(&[vec![0.1, 0.2, 0.3], vec![0.5; 3]])).unwrap_err();
        assert!(matches!(err, Error::DegenerateAsset { asset } if asset == "A1"));
        assert!(volatilities(&matrix(&[vec![0.0; 4]])).is_err());
    }

    #[test]
    fn volatility_of_pair() {
        let v = volatilities(&matrix(&[vec![-1.0, 1.0]])).unwrap();
        assert!((v[0] - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn exposure_hand_example() {
        let rho = CorrelationMatrix {
            asset_ids: vec!["A".into(), "B".into()],
            rho: array![[1.0, 0.5], [0.5, 1.0]],
        };
        let e = exposure_matrix(&rho, &[0.02, 0.01], &[30.0, 10.0]).unwrap();
        assert!((e.matrix[[0, 1]] - 0.30).abs() < 1e-15);
        assert!((e.matrix[[1, 0]] - 0.05).abs() < 1e-15);
        assert_eq!((e.matrix[[0, 0]], e.matrix[[1, 1]]), (0.0, 0.0));
    }

    #[test]
    fn exposure_zero_rho_and_shape() {
        let rho = CorrelationMatrix {
            asset_ids: vec!["A".into(), "B".into()],
            rho: array![[1.0, 0.0], [0.0, 1.0]],
        };
        let e = exposure_matrix(&rho, &[0.02, 0.01], &[30.0, 10.0]).unwrap();
        assert!(e.matrix.iter().all(|v| *v == 0.0));
        assert!(matches!(exposure_matrix(&rho, &[0.02], &[30.0, 10.0]), Err(Error::Shape(_))));
    }

    #[test]
    fn exposure_rows_scale_with_own_price() {
        let rho = CorrelationMatrix {
            asset_ids: vec!["A".into(), "B".into(), "C".into()],
            rho: array![[1.0, 0.3, -0.2], [0.3, 1.0, 0.6], [-0.2, 0.6, 1.0]],
        };
        let sigma = [0.01, 0.02, 0.03];
        let a = exposure_matrix(&rho, &sigma, &[10.0, 20.0, 30.0]).unwrap();
        let b = exposure_matrix(&rho, &sigma, &[20.0, 20.0, 30.0]).unwrap();
        for j in 0..3 {
            assert_eq!(b.matrix[[0, j]], 2.0 * a.matrix[[0, j]]);
            assert_eq!(b.matrix[[1, j]], a.matrix[[1, j]]);
            assert_eq!(b.matrix[[2, j]], a.matrix[[2, j]]);
        }
    }

    #[test]
    fn threshold_boundaries() {
        let net = threshold_filter(&raw(array![[0.0, 0.30], [0.29, 0.0]]), 0.3).unwrap();
        assert_eq!(net.weights[[0, 1]], 0.30);
        assert_eq!(net.weights[[1, 0]], 0.0);
        let net = threshold_filter(&raw(array![[0.0, -0.4], [0.0, 0.0]]), 0.3).unwrap();
        assert_eq!(net.weights[[0, 1]], 0.0);
        assert!(threshold_filter(&raw(array![[0.0]]), 0.0).is_err());
    }

    #[test]
    fn correlation_network_filter() {
        let rho = CorrelationMatrix {
            asset_ids: vec!["A".into(), "B".into(), "C".into()],
            rho: array![[1.0, 0.6, 0.2], [0.6, 1.0, 0.5], [0.2, 0.5, 1.0]],
        };
        let g = correlation_network(&rho, 0.5).unwrap();
        // enumerate off-diagonal entries by hand: keep (A,B)=0.6 and (B,C)=0.5
        let expected = array![[0.0, 0.6, 0.0], [0.6, 0.0, 0.5], [0.0, 0.5, 0.0]];
        assert_eq!(g.weights, expected);
        let g = correlation_network(&rho, 0.9).unwrap();
        assert!(g.weights.iter().all(|w| *w == 0.0));
        assert!(correlation_network(&rho, 1.0).is_err());
    }

    #[test]
    fn incoming_exposure_column_sums() {
        let zero = threshold_filter(&raw(Array2::zeros((3, 3))), 0.3).unwrap();
        assert_eq!(incoming_exposure(&zero), vec![0.0; 3]);
        let mut m = Array2::zeros((3, 3));
        m[[0, 1]] = 0.4;
        let single = threshold_filter(&raw(m), 0.3).unwrap();
        assert_eq!(incoming_exposure(&single), vec![0.0, 0.4, 0.0]);
    }
}
