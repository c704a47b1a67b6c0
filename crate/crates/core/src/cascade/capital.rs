use super::CascadeState;
use crate::network::{incoming_exposure, ExposureNetwork};
use crate::{Error, Result};

/// Cuts `s * P_target` from the target's capital and marks it failed if the
/// capital falls strictly below its minimum.
pub fn apply_shock(
    mut state: CascadeState,
    target: usize,
    shock: f64,
    prices: &[f64],
) -> Result<CascadeState> {
    if target >= state.n_assets() || target >= prices.len() {
        return Err(Error::InvalidParameter(format!(
            "shock target {target} out of range for {} assets",
            state.n_assets()
        )));
    }
    if !(shock > 0.0 && shock < 1.0) {
        return Err(Error::InvalidParameter(format!("shock must lie in (0, 1), got {shock}")));
    }
    state.capitals[target] -= shock * prices[target];
    if !state.defaulted[target] && state.capitals[target] < state.min_capitals[target] {
        state.defaulted[target] = true;
        state.default_capitals[target] = state.capitals[target];
        state.frontier.push(target);
        let current = state.defaulted.clone();
        if let Some(last) = state.history.last_mut() {
            *last = current;
        }
    }
    Ok(state)
}

/// One synchronous propagation round.
///
/// Every asset on the frontier passes `L_ij = max(0, E_ij - (K_i - D_i))` to
/// each `j` with `E_ij > 0`, where `K_i` is its capital when it failed.
/// Losses add up on a victim; victims below their minimum capital fail and
/// form the next frontier. A round that adds no default is not counted as an
/// iteration.
pub fn gai_kapadia_step(
    mut state: CascadeState,
    net: &ExposureNetwork,
    incoming: &[f64],
) -> CascadeState {
    propagate(&mut state, net, incoming);
    state
}

fn propagate(state: &mut CascadeState, net: &ExposureNetwork, incoming: &[f64]) -> bool {
    if state.frontier.is_empty() {
        return false;
    }
    let n = state.n_assets();
    let w = &net.weights;
    let mut losses = vec![0.0; n];
    let mut frontier = std::mem::take(&mut state.frontier);
    frontier.sort_unstable();
    for &i in &frontier {
        let buffer = state.default_capitals[i] - incoming[i];
        for (j, loss) in losses.iter_mut().enumerate() {
            let e = w[[i, j]];
            if j != i && e > 0.0 {
                *loss += (e - buffer).max(0.0);
            }
        }
    }

    let mut next = Vec::new();
    for (j, loss) in losses.into_iter().enumerate() {
        state.capitals[j] -= loss;
        if !state.defaulted[j] && state.capitals[j] < state.min_capitals[j] {
            state.defaulted[j] = true;
            state.default_capitals[j] = state.capitals[j];
            next.push(j);
        }
    }
    if next.is_empty() {
        return false;
    }
    state.frontier = next;
    state.iteration += 1;
    state.history.push(state.defaulted.clone());
    true
}

/// Propagates until a round adds no default.
pub fn run_cascade(mut state: CascadeState, net: &ExposureNetwork) -> CascadeState {
    let incoming = incoming_exposure(net);
    while propagate(&mut state, net, &incoming) {}
    state.frontier.clear();
    state
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cascade::CapitalConfig;
    use ndarray::Array2;

    fn net(n: usize, edges: &[(usize, usize, f64)], prices: Vec<f64>) -> ExposureNetwork {
        let mut w = Array2::zeros((n, n));
        for &(i, j, e) in edges {
            w[[i, j]] = e;
        }
        ExposureNetwork {
            asset_ids: (0..n).map(|i| format!("A{i}")).collect(),
            theta: 0.1,
            weights: w,
            reference_prices: prices,
        }
    }

    #[test]
    fn large_shock_defaults() {
        let s = CascadeState::from_prices(&[1.0], &CapitalConfig::default());
        let s = apply_shock(s, 0, 0.3, &[1.0]).unwrap();
        assert!((s.capitals[0] + 0.1).abs() < 1e-15);
        assert!(s.defaulted[0]);
        assert_eq!(s.frontier, vec![0]);
        assert_eq!(s.history, vec![vec![true]]);
    }

    #[test]
    fn small_shock_survives() {
        let s = CascadeState::from_prices(&[1.0], &CapitalConfig::default());
        let s = apply_shock(s, 0, 0.05, &[1.0]).unwrap();
        assert!((s.capitals[0] - 0.15).abs() < 1e-15);
        assert!(!s.defaulted[0]);
    }

    #[test]
    fn shock_arguments_checked() {
        let s = CascadeState::from_prices(&[1.0], &CapitalConfig::default());
        assert!(apply_shock(s.clone(), 1, 0.3, &[1.0]).is_err());
        assert!(apply_shock(s, 0, 1.0, &[1.0]).is_err());
    }

    #[test]
    fn edgeless_network_keeps_cascade_local() {
        let prices = vec![1.0; 4];
        let n = net(4, &[], prices.clone());
        let s = CascadeState::from_prices(&prices, &CapitalConfig::default());
        let s = run_cascade(apply_shock(s, 2, 0.3, &prices).unwrap(), &n);
        assert_eq!(s.failed_indices(), vec![2]);
        assert_eq!(s.iteration, 0);
    }

    #[test]
    fn two_node_loss_passes_through() {
        // K_1 = -0.1 after the shock, D_1 = 0: L_12 = 0.5 - (-0.1) = 0.6,
        // K_2 = 0.15 - 0.6 = -0.45 < 0.1.
        let n = net(2, &[(0, 1, 0.5)], vec![1.0, 1.0]);
        let mut s = CascadeState::from_prices(&[1.0, 1.0], &CapitalConfig::default());
        s.capitals = vec![-0.1, 0.15];
        s.defaulted[0] = true;
        s.default_capitals[0] = -0.1;
        s.frontier = vec![0];
        let s = gai_kapadia_step(s, &n, &[0.0, 0.5]);
        assert!((s.capitals[1] + 0.45).abs() < 1e-15);
        assert!(s.defaulted[1]);
        assert_eq!(s.failed_count(), 2);
        assert_eq!(s.iteration, 1);
    }

    #[test]
    fn loss_uses_capital_at_default() {
        // K_1 = 0.05 < K_min = 0.1: L_12 = 0.5 - 0.05 = 0.45
        let n = net(2, &[(0, 1, 0.5)], vec![1.0, 10.0]);
        let mut s = CascadeState::from_prices(&[1.0, 10.0], &CapitalConfig::default());
        s.capitals[0] = 0.05;
        s.defaulted[0] = true;
        s.default_capitals[0] = 0.05;
        s.frontier = vec![0];
        let s = gai_kapadia_step(s, &n, &[0.0, 0.5]);
        assert!((s.capitals[1] - (2.0 - 0.45)).abs() < 1e-12);
        assert!(!s.defaulted[1]);
        assert_eq!(s.iteration, 0);
    }

    #[test]
    fn chain_defaults_in_two_iterations() {
        // A -> B -> C with exposures far above any capital buffer
        let prices = vec![1.0; 3];
        let n = net(3, &[(0, 1, 5.0), (1, 2, 5.0)], prices.clone());
        let s = CascadeState::from_prices(&prices, &CapitalConfig::default());
        let s = run_cascade(apply_shock(s, 0, 0.3, &prices).unwrap(), &n);
        assert_eq!(s.failed_count(), 3);
        assert_eq!(s.iteration, 2);
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
    fn no_initial_defaults_is_fixed_point() {
        let prices = vec![1.0; 3];
        let n = net(3, &[(0, 1, 5.0)], prices.clone());
        let s = run_cascade(CascadeState::from_prices(&prices, &CapitalConfig::default()), &n);
        assert_eq!(s.iteration, 0);
        assert_eq!(s.failed_count(), 0);
        assert_eq!(s.history.len(), 1);
    }
}
