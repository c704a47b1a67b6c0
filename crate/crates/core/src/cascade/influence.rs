use ndarray::Array2;

use super::CascadeState;
use crate::network::CorrelationNetwork;
use crate::{Error, Result};

/// `D_i(t+1) = 1[sum_j E_ij D_j(t) > tau_i]`, optionally OR-ed with `D(t)`
/// so that failures are absorbing.
pub fn recursion_step(
    weights: &Array2<f64>,
    tau: &[f64],
    defaults: &[bool],
    absorbing: bool,
) -> Result<Vec<bool>> {
    let n = defaults.len();
    if weights.dim() != (n, n) || tau.len() != n {
        return Err(Error::Shape(format!(
            "weights {:?}, {} thresholds, {} default flags",
            weights.dim(),
            tau.len(),
            n
        )));
    }
    Ok((0..n)
        .map(|i| {
            let pressure: f64 = (0..n)
                .filter(|&j| defaults[j])
                .map(|j| weights[[i, j]])
                .sum();
            (absorbing && defaults[i]) || pressure > tau[i]
        })
        .collect())
}

/// Influence cascade on a thresholded correlation graph: starting from
/// `seeds`, asset `i` fails once `I_i = sum_j rho_ij S_j > threshold`.
pub fn deterministic_cascade(
    graph: &CorrelationNetwork,
    seeds: &[usize],
    threshold: f64,
) -> Result<CascadeState> {
    let n = graph.asset_ids.len();
    if threshold.is_nan() || threshold <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "influence threshold must be positive, got {threshold}"
        )));
    }
    if seeds.is_empty() {
        return Err(Error::InvalidParameter("at least one seed asset is required".into()));
    }
    if let Some(s) = seeds.iter().find(|s| **s >= n) {
        return Err(Error::InvalidParameter(format!("seed {s} out of range for {n} assets")));
    }

    let tau = vec![threshold; n];
    let mut state = CascadeState::with_defaults(n, seeds);
    loop {
        let next = recursion_step(&graph.weights, &tau, &state.defaulted, true)?;
        let added: Vec<usize> = (0..n).filter(|&i| next[i] && !state.defaulted[i]).collect();
        if added.is_empty() {
            break;
        }
        state.defaulted = next;
        state.frontier = added;
        state.iteration += 1;
        state.history.push(state.defaulted.clone());
    }
    state.frontier.clear();
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn graph(weights: Array2<f64>) -> CorrelationNetwork {
        CorrelationNetwork {
            asset_ids: (0..weights.nrows()).map(|i| format!("A{i}")).collect(),
            theta: 0.3,
            weights,
        }
    }

    #[test]
    fn isolated_seed() {
        let s = deterministic_cascade(&graph(Array2::zeros((3, 3))), &[1], 0.5).unwrap();
        assert_eq!(s.failed_indices(), vec![1]);
        assert_eq!(s.iteration, 0);
    }

    #[test]
    fn three_node_staged_spread() {
        let g = graph(array![[0.0, 0.6, 0.3], [0.6, 0.0, 0.3], [0.3, 0.3, 0.0]]);
        let s = deterministic_cascade(&g, &[0], 0.5).unwrap();
        assert_eq!(
            s.history,
            vec![
                vec![true, false, false],
                vec![true, true, false],
                vec![true, true, true]
            ]
        );
    }

    #[test]
    fn unreachable_threshold() {
        let w = array![[0.0, 0.9, 0.8], [0.9, 0.0, 0.7], [0.8, 0.7, 0.0]];
        let max_row = 1.7;
        let s = deterministic_cascade(&graph(w), &[0], 2.0 * max_row).unwrap();
        assert_eq!(s.failed_count(), 1);
    }

    #[test]
    fn recursion_without_defaults() {
        let w = array![[0.0, 1.0], [1.0, 0.0]];
        assert_eq!(recursion_step(&w, &[0.5, 0.5], &[false, false], false).unwrap(), vec![false, false]);
    }

    #[test]
    fn recursion_below_thresholds() {
        let w = array![[0.0, 0.2, 0.1], [0.2, 0.0, 0.1], [0.1, 0.1, 0.0]];
        let d = vec![true, true, true];
        // every row sum is below tau, so pressure alone pushes no one over
        assert_eq!(recursion_step(&w, &[0.35; 3], &d, false).unwrap(), vec![false; 3]);
        assert_eq!(recursion_step(&w, &[0.35; 3], &[true, false, false], true).unwrap(), vec![true, false, false]);
        // the absorbing flag only keeps existing defaults
        assert_eq!(recursion_step(&w, &[0.35; 3], &d, true).unwrap(), vec![true; 3]);
    }

    #[test]
    fn recursion_shape_mismatch() {
        assert!(matches!(
            recursion_step(&Array2::zeros((2, 2)), &[0.5], &[false, false], true),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn absorbing_keeps_failures() {
        let w = Array2::zeros((2, 2));
        assert_eq!(recursion_step(&w, &[0.5; 2], &[true, false], true).unwrap(), vec![true, false]);
        assert_eq!(recursion_step(&w, &[0.5; 2], &[true, false], false).unwrap(), vec![false, false]);
    }
}
