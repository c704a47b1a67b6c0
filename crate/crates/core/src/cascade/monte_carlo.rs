use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{apply_shock, run_cascade, CapitalConfig, CascadeState};
use crate::network::ExposureNetwork;
use crate::{Error, Result};

/// Which assets receive a shock in each run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scenario {
    /// One asset drawn uniformly at random per run.
    General,
    /// Every asset shocked in every run.
    GeneralShockAll,
    SingleShock(String),
    SimultaneousShock(Vec<String>),
}

impl Scenario {
    pub fn label(&self) -> String {
        match self {
            Scenario::General => "General Simulation".into(),
            Scenario::GeneralShockAll => "General Simulation (all assets)".into(),
            Scenario::SingleShock(t) => format!("Single Shock ({t})"),
            Scenario::SimultaneousShock(ts) => format!("Simultaneous Shock ({})", ts.join(" + ")),
        }
    }

    /// Short tag for file names.
    pub fn slug(&self) -> String {
        match self {
            Scenario::General => "general".into(),
            Scenario::GeneralShockAll => "general_all".into(),
            Scenario::SingleShock(t) => format!("single_{t}"),
            Scenario::SimultaneousShock(ts) => format!("simultaneous_{}", ts.join("+")),
        }
    }

    fn fixed_targets(&self, net: &ExposureNetwork) -> Result<Option<Vec<usize>>> {
        let resolve = |t: &String| {
            net.asset_ids
                .iter()
                .position(|a| a == t)
                .ok_or_else(|| Error::UnknownAsset(t.clone()))
        };
        match self {
            Scenario::General => Ok(None),
            Scenario::GeneralShockAll => Ok(Some((0..net.asset_ids.len()).collect())),
            Scenario::SingleShock(t) => Ok(Some(vec![resolve(t)?])),
            Scenario::SimultaneousShock(ts) => {
                let idx = ts.iter().map(resolve).collect::<Result<Vec<_>>>()?;
                let mut unique = idx.clone();
                unique.sort_unstable();
                unique.dedup();
                if idx.is_empty() || unique.len() != idx.len() {
                    return Err(Error::InvalidParameter(
                        "simultaneous shock needs distinct, non-empty targets".into(),
                    ));
                }
                Ok(Some(idx))
            }
        }
    }
}

/// Aggregate of `n_runs` independent cascades.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationReport {
    pub n_runs: usize,
    pub theta: f64,
    pub scenario: Scenario,
    pub failure_probability: f64,
    pub avg_failed_assets: f64,
    pub per_run_failed_counts: Vec<usize>,
    pub seed: u64,
}

impl SimulationReport {
    /// Number of runs per failed-asset count.
    pub fn histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for c in &self.per_run_failed_counts {
            *h.entry(*c).or_insert(0) += 1;
        }
        h
    }
}

/// Random stream of run `run`: ChaCha8 keyed by `seed`, stream id `run`.
/// Independent of execution order, so serial and parallel runs agree.
pub fn run_stream(seed: u64, run: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(run);
    rng
}

fn draw_shock(rng: &mut ChaCha8Rng, cfg: &CapitalConfig) -> f64 {
    if cfg.shock_low < cfg.shock_high {
        rng.gen_range(cfg.shock_low..cfg.shock_high)
    } else {
        cfg.shock_low
    }
}

/// Seeded Monte Carlo over the capital/loss cascade.
///
/// Run `r` draws from [`run_stream`]`(seed, r)`: first the target (for
/// [`Scenario::General`]), then one `Uniform(shock_low, shock_high)` shock
/// per target in target order.
pub fn monte_carlo(
    net: &ExposureNetwork,
    cfg: &CapitalConfig,
    scenario: &Scenario,
    n_runs: usize,
    seed: u64,
) -> Result<SimulationReport> {
    cfg.validate()?;
    if n_runs == 0 {
        return Err(Error::InvalidParameter("n_runs must be at least 1".into()));
    }
    let n = net.asset_ids.len();
    if n == 0 {
        return Err(Error::InvalidParameter("network has no assets".into()));
    }
    let fixed = scenario.fixed_targets(net)?;
    let prices = &net.reference_prices;
    let initial = CascadeState::from_prices(prices, cfg);

    let counts: Vec<usize> = (0..n_runs)
        .into_par_iter()
        .map(|run| -> Result<usize> {
            let mut rng = run_stream(seed, run as u64);
            let targets = match &fixed {
                Some(t) => t.clone(),
                None => vec![rng.gen_range(0..n)],
            };
            let mut state = initial.clone();
            for t in targets {
                let s = draw_shock(&mut rng, cfg);
                state = apply_shock(state, t, s, prices)?;
            }
            Ok(run_cascade(state, net).failed_count())
        })
        .collect::<Result<_>>()?;

    let systemic = counts.iter().filter(|c| **c > cfg.systemic_failure_count).count();
    let total: usize = counts.iter().sum();
    Ok(SimulationReport {
        n_runs,
        theta: net.theta,
        scenario: scenario.clone(),
        failure_probability: systemic as f64 / n_runs as f64,
        avg_failed_assets: total as f64 / n_runs as f64,
        per_run_failed_counts: counts,
        seed,
    })
}
