use std::io::Write;

use serde::Serialize;

use super::{CascadeState, SimulationReport};
use crate::format::sig6;
use crate::Result;

/// Rows are iterations, columns assets, cells 0/1.
pub fn write_heatmap<W: Write>(state: &CascadeState, asset_ids: &[String], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["iteration".to_string()];
    header.extend(asset_ids.iter().cloned());
    w.write_record(&header)?;
    for (t, row) in state.history.iter().enumerate() {
        let mut rec = vec![t.to_string()];
        rec.extend(row.iter().map(|d| if *d { "1" } else { "0" }.to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct ReportJson {
    seed: u64,
    n_runs: usize,
    theta: f64,
    scenario: String,
    failure_probability: f64,
    avg_failed_assets: f64,
    histogram: std::collections::BTreeMap<usize, usize>,
}

pub fn write_simulation_json<W: Write>(report: &SimulationReport, mut out: W) -> Result<()> {
    let view = ReportJson {
        seed: report.seed,
        n_runs: report.n_runs,
        theta: report.theta,
        scenario: report.scenario.label(),
        failure_probability: report.failure_probability,
        avg_failed_assets: report.avg_failed_assets,
        histogram: report.histogram(),
    };
    serde_json::to_writer_pretty(&mut out, &view)?;
    out.write_all(b"\n")?;
    Ok(())
}

/// `scenario,theta,failure_probability,avg_failed_assets`.
pub fn write_simulation_table<W: Write>(reports: &[SimulationReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["scenario", "theta", "failure_probability", "avg_failed_assets"])?;
    for r in reports {
        w.write_record([
            r.scenario.label(),
            format!("{}", r.theta),
            sig6(r.failure_probability),
            sig6(r.avg_failed_assets),
        ])?;
    }
    w.flush()?;
    Ok(())
}
