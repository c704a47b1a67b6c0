use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use super::config::{RunConfig, ScenarioKind};
use crate::cascade::{
    apply_shock, deterministic_cascade, monte_carlo, run_cascade, write_heatmap,
    write_simulation_json, write_simulation_table, CascadeState, Scenario, SimulationReport,
};
use crate::format::{sig6, theta_label};
use crate::market_data::{
    self, clean_panel, descriptive_stats, load_price_csv, restrict_dates, AlignedPanel,
    ReturnMatrix,
};
use crate::network::{
    clustering_coefficients, correlation_matrix, correlation_network, export_graph,
    exposure_matrix, threshold_filter, volatilities, write_adjacency, write_correlation_matrix,
    CorrelationMatrix, ExposureNetwork, RawExposures, WeightedGraph,
};
use crate::risk::{self, RiskRow, TailFit};
use crate::{Error, Result};

/// Files produced by a subcommand, keyed by name. Written in one go at the
/// end so a failing stage leaves no partial output.
#[derive(Debug, Default)]
pub struct Outputs(BTreeMap<String, Vec<u8>>);

impl Outputs {
    fn add(&mut self, name: impl Into<String>, write: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<()> {
        let mut buf = Vec::new();
        write(&mut buf)?;
        self.0.insert(name.into(), buf);
        Ok(())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }

    pub fn get(&self, name: &str) -> Option<&[u8]> {
        self.0.get(name).map(Vec::as_slice)
    }

    pub fn extend(&mut self, other: Outputs) {
        self.0.extend(other.0);
    }

    pub fn write_to(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::with_capacity(self.0.len());
        for (name, bytes) in &self.0 {
            let path = dir.join(name);
            std::fs::write(&path, bytes)?;
            written.push(path);
        }
        Ok(written)
    }
}

/// Cleaned, aligned prices and their returns.
pub struct Panel {
    pub aligned: AlignedPanel,
    pub returns: ReturnMatrix,
}

pub fn load_panel(cfg: &RunConfig) -> Result<Panel> {
    let path = cfg
        .input_csv
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("no input CSV given (use --input)".into()))?;
    let mut raw = load_price_csv(path)?;
    restrict_dates(&mut raw, cfg.start_date, cfg.end_date);
    let cleaned = clean_panel(&raw, cfg.iqr_multiplier)?;
    let aligned = market_data::align(&cleaned)?;
    let returns = aligned.log_returns()?;
    Ok(Panel { aligned, returns })
}

pub fn cmd_stats(cfg: &RunConfig, panel: &Panel) -> Result<Outputs> {
    let stats = descriptive_stats(&panel.returns)?;
    let mut out = Outputs::default();
    out.add("descriptive_stats.csv", |w| market_data::write_stats_csv(&stats, w))?;
    out.add("descriptive_stats.json", |w| market_data::write_stats_json(&stats, w))?;
    out.add("normalized_prices.csv", |w| {
        market_data::write_normalized_prices(&panel.aligned, w)
    })?;
    log::info!("stats for {} assets over {} returns", stats.len(), panel.returns.n_observations());
    let _ = cfg;
    Ok(out)
}

struct Networks {
    rho: CorrelationMatrix,
    raw: RawExposures,
}

fn build_networks(cfg: &RunConfig, panel: &Panel) -> Result<Networks> {
    let rho = correlation_matrix(&panel.returns)?;
    let sigma = volatilities(&panel.returns)?;
    let prices = panel.aligned.reference_prices(cfg.reference_price_mode);
    let raw = exposure_matrix(&rho, &sigma, &prices)?;
    Ok(Networks { rho, raw })
}

fn correlation_clustering(rho: &CorrelationMatrix, theta: f64) -> Result<Option<Vec<f64>>> {
    if !(theta > 0.0 && theta < 1.0) {
        return Ok(None);
    }
    let g = correlation_network(rho, theta)?;
    Ok(Some(clustering_coefficients(&g).iter().map(|s| s.clustering).collect()))
}

pub fn cmd_network(cfg: &RunConfig, panel: &Panel) -> Result<Outputs> {
    let nets = build_networks(cfg, panel)?;
    let ids = &panel.returns.asset_ids;
    let mut out = Outputs::default();
    out.add("correlation_matrix.csv", |w| write_correlation_matrix(&nets.rho, w))?;

    let mut exposure_clustering: Vec<Vec<f64>> = Vec::new();
    let mut comparison: Vec<(f64, Vec<f64>, Option<Vec<f64>>)> = Vec::new();
    for &theta in &cfg.theta_list {
        let net = threshold_filter(&nets.raw, theta)?;
        let stats = clustering_coefficients(&net);
        let label = theta_label(theta);
        let mut edges = Vec::new();
        out.add(format!("exposure_nodes_theta{label}.csv"), |w| {
            export_graph(&net, &stats, w, &mut edges)
        })?;
        out.add(format!("exposure_edges_theta{label}.csv"), |w| {
            w.extend_from_slice(&edges);
            Ok(())
        })?;
        if cfg.dump_adjacency {
            out.add(format!("exposure_adjacency_theta{label}.csv"), |w| write_adjacency(&net, w))?;
        }
        let c: Vec<f64> = stats.iter().map(|s| s.clustering).collect();
        comparison.push((theta, c.clone(), correlation_clustering(&nets.rho, theta)?));
        exposure_clustering.push(c);
    }

    let mut rows = Vec::with_capacity(ids.len());
    for (i, id) in ids.iter().enumerate() {
        let r = panel.returns.column(i);
        let (var, cvar) = match risk::risk_measures(id, &r, cfg.alpha_level) {
            Ok(m) => (m.var, m.cvar),
            Err(e @ Error::SampleSize { .. }) => {
                log::warn!("{id}: VaR/CVaR skipped: {e}");
                (f64::NAN, f64::NAN)
            }
            Err(e) => return Err(e),
        };
        rows.push(RiskRow {
            asset_id: id.clone(),
            var,
            cvar,
            clustering: exposure_clustering.iter().map(|c| c[i]).collect(),
        });
    }
    out.add("risk_report.csv", |w| {
        risk::write_risk_report(&rows, cfg.alpha_level, &cfg.theta_list, w)
    })?;
    out.add("clustering_comparison.csv", |w| {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(["asset", "theta", "exposure_clustering", "correlation_clustering"])?;
        for (theta, exposure, correlation) in &comparison {
            for (i, id) in ids.iter().enumerate() {
                csv.write_record([
                    id.clone(),
                    format!("{theta}"),
                    sig6(exposure[i]),
                    correlation.as_ref().map(|c| sig6(c[i])).unwrap_or_default(),
                ])?;
            }
        }
        csv.flush()?;
        Ok(())
    })?;
    Ok(out)
}

fn resolve_scenarios(cfg: &RunConfig) -> Result<Vec<Scenario>> {
    let general = if cfg.shock_all {
        Scenario::GeneralShockAll
    } else {
        Scenario::General
    };
    let single = || {
        cfg.targets
            .first()
            .map(|t| Scenario::SingleShock(t.clone()))
            .ok_or_else(|| Error::InvalidParameter("single-shock scenario needs --target".into()))
    };
    let simultaneous = || {
        if cfg.targets.len() >= 2 {
            Ok(Scenario::SimultaneousShock(cfg.targets.clone()))
        } else {
            Err(Error::InvalidParameter(
                "simultaneous scenario needs at least two --target values".into(),
            ))
        }
    };
    if cfg.scenarios.is_empty() {
        let mut s = vec![general];
        if !cfg.targets.is_empty() {
            s.push(single()?);
        }
        if cfg.targets.len() >= 2 {
            s.push(simultaneous()?);
        }
        return Ok(s);
    }
    cfg.scenarios
        .iter()
        .map(|k| match k {
            ScenarioKind::General => Ok(general.clone()),
            ScenarioKind::Single => single(),
            ScenarioKind::Simultaneous => simultaneous(),
        })
        .collect()
}

fn clustering_delta_csv<G: WeightedGraph>(before: &G, after: &G, w: &mut Vec<u8>) -> Result<()> {
    let b = clustering_coefficients(before);
    let a = clustering_coefficients(after);
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(["asset", "clustering_before", "clustering_after", "delta"])?;
    for (x, y) in b.iter().zip(&a) {
        csv.write_record([
            x.asset_id.clone(),
            sig6(x.clustering),
            sig6(y.clustering),
            sig6(y.clustering - x.clustering),
        ])?;
    }
    csv.flush()?;
    Ok(())
}

pub fn cmd_cascade(cfg: &RunConfig, panel: &Panel) -> Result<Outputs> {
    let nets = build_networks(cfg, panel)?;
    let ids = &panel.returns.asset_ids;
    let capital = cfg.capital();
    let scenarios = resolve_scenarios(cfg)?;
    let seed_asset = match cfg.targets.first() {
        Some(t) => panel
            .returns
            .index_of(t)
            .ok_or_else(|| Error::UnknownAsset(t.clone()))?,
        None => 0,
    };

    let mut out = Outputs::default();
    let mut reports: Vec<SimulationReport> = Vec::new();
    for &theta in &cfg.theta_list {
        let label = theta_label(theta);
        let mut net: ExposureNetwork = threshold_filter(&nets.raw, theta)?;
        if cfg.transpose_exposures {
            net = net.transposed();
        }
        for scenario in &scenarios {
            let report = monte_carlo(&net, &capital, scenario, cfg.n_runs, cfg.seed)?;
            out.add(format!("monte_carlo_{}_theta{label}.json", scenario.slug()), |w| {
                write_simulation_json(&report, w)
            })?;
            reports.push(report);
        }

        // one illustrative capital/loss cascade from a fixed shock
        let state = CascadeState::from_prices(&net.reference_prices, &capital);
        let state = apply_shock(state, seed_asset, cfg.example_shock, &net.reference_prices)?;
        let state = run_cascade(state, &net);
        out.add(format!("gai_kapadia_heatmap_theta{label}.csv"), |w| write_heatmap(&state, ids, w))?;
        let after = net.without_nodes(&state.defaulted);
        out.add(format!("exposure_clustering_after_cascade_theta{label}.csv"), |w| {
            clustering_delta_csv(&net, &after, w)
        })?;

        if theta > 0.0 && theta < 1.0 {
            let graph = correlation_network(&nets.rho, theta)?;
            let state = deterministic_cascade(&graph, &[seed_asset], cfg.influence_threshold)?;
            out.add(format!("deterministic_heatmap_theta{label}.csv"), |w| {
                write_heatmap(&state, ids, w)
            })?;
            let after = graph.without_nodes(&state.defaulted);
            for (tag, g) in [("before", &graph), ("after", &after)] {
                let stats = clustering_coefficients(g);
                let mut edges = Vec::new();
                out.add(format!("correlation_nodes_{tag}_theta{label}.csv"), |w| {
                    export_graph(g, &stats, w, &mut edges)
                })?;
                out.add(format!("correlation_edges_{tag}_theta{label}.csv"), |w| {
                    w.extend_from_slice(&edges);
                    Ok(())
                })?;
            }
        } else {
            log::warn!("theta {theta} outside (0, 1): no correlation network or influence cascade");
        }
    }
    out.add("monte_carlo.csv", |w| write_simulation_table(&reports, w))?;
    Ok(out)
}

fn file_safe(asset: &str) -> String {
    asset
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

#[derive(serde::Serialize)]
struct TailSummary<'a> {
    fit: &'a TailFit,
    ccdf_fit: Option<risk::PowerLawFit>,
    hill_implied_slope: f64,
    stable_interval: Option<risk::StableInterval>,
}

pub fn cmd_tail(cfg: &RunConfig, panel: &Panel) -> Result<Outputs> {
    let _ = cfg;
    let mut out = Outputs::default();
    let mut fits = Vec::new();
    let mut extras = Vec::new();
    for (i, id) in panel.returns.asset_ids.iter().enumerate() {
        let losses = risk::loss_sample(&panel.returns.column(i));
        let curve = match risk::empirical_ccdf(id, &losses) {
            Ok(c) => c,
            Err(e) => {
                log::warn!("{id}: skipped, {} losses ({e})", losses.len());
                continue;
            }
        };
        let fit = match risk::tail_fit(id, &panel.returns.column(i)) {
            Ok(f) => f,
            Err(e) => {
                log::warn!("{id}: no tail index: {e}");
                continue;
            }
        };
        let name = file_safe(id);
        out.add(format!("ccdf_{name}.csv"), |w| risk::write_ccdf_csv(&curve, w))?;
        let ccdf_fit = risk::fit_ccdf_tail(&curve, &losses, risk::DEFAULT_TAIL_PERCENTILE).ok();

        let n = losses.len();
        let k_max = (n / 4).min(n - 1);
        let k_min = 5.min(k_max.saturating_sub(1)).max(1);
        let mut stable = None;
        if k_min < k_max {
            if let Ok(plot) = risk::hill_plot_data(&losses, k_min, k_max) {
                out.add(format!("hill_{name}.csv"), |w| risk::write_hill_csv(&plot, w))?;
                stable = plot.stable;
            }
        }
        extras.push((ccdf_fit, stable));
        fits.push(fit);
    }
    out.add("tail_report.csv", |w| risk::write_tail_report(&fits, w))?;
    out.add("tail_fits.json", |w| {
        let summary: Vec<TailSummary> = fits
            .iter()
            .zip(extras)
            .map(|(fit, (ccdf_fit, stable_interval))| TailSummary {
                fit,
                ccdf_fit,
                hill_implied_slope: -fit.alpha_hat,
                stable_interval,
            })
            .collect();
        serde_json::to_writer_pretty(&mut *w, &summary)?;
        w.push(b'\n');
        Ok(())
    })?;
    Ok(out)
}

pub fn cmd_report(cfg: &RunConfig, panel: &Panel) -> Result<Outputs> {
    let mut out = cmd_stats(cfg, panel)?;
    out.extend(cmd_network(cfg, panel)?);
    out.extend(cmd_cascade(cfg, panel)?);
    out.extend(cmd_tail(cfg, panel)?);
    out.add("config.json", |w| {
        w.extend_from_slice(cfg.to_json().as_bytes());
        Ok(())
    })?;
    Ok(out)
}
