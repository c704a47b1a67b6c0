use cascadenet::market_data::ReturnMatrix;
use cascadenet::network::{
    clustering_coefficients, correlation_matrix, exposure_matrix, incoming_exposure, threshold_filter,
    volatilities, ExposureNetwork, WeightedGraph,
};
use chrono::{Duration, NaiveDate};
use ndarray::Array2;
use proptest::prelude::*;

fn matrix(t: usize, n: usize, values: Vec<f64>) -> ReturnMatrix {
    let start = NaiveDate::from_ymd_opt(2020, 1, 1).unwrap();
    let dates = (0..t).map(|d| start + Duration::days(d as i64)).collect();
    let ids = (0..n).map(|i| format!("A{i}")).collect();
    ReturnMatrix::new(ids, dates, Array2::from_shape_vec((t, n), values).unwrap()).unwrap()
}

fn panel() -> impl Strategy<Value = ReturnMatrix> {
    (5usize..40, 2usize..7).prop_flat_map(|(t, n)| {
        proptest::collection::vec(-0.1f64..0.1, t * n).prop_map(move |v| matrix(t, n, v))
    })
}

/// Pearson correlation by explicit two-pass sums.
fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

fn not_flat(m: &ReturnMatrix) -> bool {
    (0..m.n_assets()).all(|i| {
        let c = m.column(i);
        c.iter().any(|x| (x - c[0]).abs() > 1e-6)
    })
}

fn support(net: &ExposureNetwork) -> Vec<(usize, usize)> {
    let n = net.asset_ids.len();
    (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| net.weights[[i, j]] > 0.0)
        .collect()
}

proptest! {
    #[test]
    fn correlation_matches_two_pass_oracle(m in panel()) {
        prop_assume!(not_flat(&m));
        let rho = correlation_matrix(&m).unwrap();
        let n = m.n_assets();
        for i in 0..n {
            prop_assert_eq!(rho.rho[[i, i]], 1.0);
            for j in 0..n {
                prop_assert_eq!(rho.rho[[i, j]], rho.rho[[j, i]]);
                prop_assert!(rho.rho[[i, j]].abs() <= 1.0);
                if i != j {
                    let oracle = pearson(&m.column(i), &m.column(j));
                    prop_assert!((rho.rho[[i, j]] - oracle).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn correlation_is_positive_semidefinite(m in panel()) {
        prop_assume!(not_flat(&m));
        let rho = correlation_matrix(&m).unwrap();
        let n = m.n_assets();
        let dm = nalgebra::DMatrix::from_fn(n, n, |i, j| rho.rho[[i, j]]);
        let eig = dm.symmetric_eigen();
        prop_assert!(eig.eigenvalues.iter().all(|l| *l > -1e-10), "{:?}", eig.eigenvalues);
    }

    #[test]
    fn relabeling_is_equivariant(m in panel(), seed in any::<u64>()) {
        prop_assume!(not_flat(&m));
        let n = m.n_assets();
        let mut perm: Vec<usize> = (0..n).collect();
        // deterministic shuffle from the seed
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let t = m.n_observations();
        let permuted = Array2::from_shape_fn((t, n), |(r, c)| m.returns[[r, perm[c]]]);
        let ids = perm.iter().map(|&p| m.asset_ids[p].clone()).collect();
        let pm = ReturnMatrix::new(ids, m.dates.clone(), permuted).unwrap();

        let prices: Vec<f64> = (0..n).map(|i| 10.0 + i as f64).collect();
        let pprices: Vec<f64> = perm.iter().map(|&p| prices[p]).collect();
        let e = exposure_matrix(&correlation_matrix(&m).unwrap(), &volatilities(&m).unwrap(), &prices).unwrap();
        let pe = exposure_matrix(&correlation_matrix(&pm).unwrap(), &volatilities(&pm).unwrap(), &pprices).unwrap();
        let net = threshold_filter(&e, 0.01).unwrap();
        let pnet = threshold_filter(&pe, 0.01).unwrap();
        let c = clustering_coefficients(&net);
        let pc = clustering_coefficients(&pnet);
        for a in 0..n {
            prop_assert_eq!(pc[a].clustering, c[perm[a]].clustering);
            prop_assert_eq!(pc[a].degree, c[perm[a]].degree);
            for b in 0..n {
                prop_assert_eq!(pnet.weights[[a, b]], net.weights[[perm[a], perm[b]]]);
            }
        }
    }

    #[test]
    fn threshold_support_shrinks(m in panel(), t1 in 0.0001f64..0.5, t2 in 0.0001f64..0.5) {
        prop_assume!(not_flat(&m));
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let prices: Vec<f64> = (0..m.n_assets()).map(|i| 1.0 + i as f64).collect();
        let e = exposure_matrix(&correlation_matrix(&m).unwrap(), &volatilities(&m).unwrap(), &prices).unwrap();
        let a = threshold_filter(&e, lo).unwrap();
        let b = threshold_filter(&e, hi).unwrap();
        let sa = support(&a);
        prop_assert!(support(&b).iter().all(|x| sa.contains(x)));
        for (i, j) in sa {
            prop_assert!(a.weights[[i, j]] >= lo);
            prop_assert_eq!(a.weights[[i, j]], e.matrix[[i, j]]);
        }
    }

    #[test]
    fn exposure_definition(m in panel()) {
        prop_assume!(not_flat(&m));
        let n = m.n_assets();
        let prices: Vec<f64> = (0..n).map(|i| 3.0 + 2.0 * i as f64).collect();
        let rho = correlation_matrix(&m).unwrap();
        let sigma = volatilities(&m).unwrap();
        let e = exposure_matrix(&rho, &sigma, &prices).unwrap();
        for i in 0..n {
            let col = m.column(i);
            let mean = col.iter().sum::<f64>() / col.len() as f64;
            let sd = (col.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (col.len() - 1) as f64).sqrt();
            prop_assert!((sigma[i] - sd).abs() <= 1e-12 * sd.max(1.0));
            for j in 0..n {
                let expected = if i == j { 0.0 } else { rho.rho[[i, j]] * sigma[i] * prices[i] };
                prop_assert_eq!(e.matrix[[i, j]], expected);
            }
        }
        let net = threshold_filter(&e, 1e-9).unwrap();
        let d = incoming_exposure(&net);
        for j in 0..n {
            let col: f64 = (0..n).map(|i| net.weights[[i, j]]).sum();
            prop_assert!((d[j] - col).abs() <= 1e-12 * col.abs().max(1.0));
        }
        prop_assert!(net.is_directed());
    }

    #[test]
    fn clustering_bounded(m in panel(), theta in 0.0001f64..0.05) {
        prop_assume!(not_flat(&m));
        let prices = vec![1.0; m.n_assets()];
        let e = exposure_matrix(&correlation_matrix(&m).unwrap(), &volatilities(&m).unwrap(), &prices).unwrap();
        for s in clustering_coefficients(&threshold_filter(&e, theta).unwrap()) {
            prop_assert!((0.0..=1.0).contains(&s.clustering));
            if s.degree < 2 {
                prop_assert_eq!(s.clustering, 0.0);
            }
        }
    }
}
