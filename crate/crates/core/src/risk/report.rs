use std::io::Write;

use super::{CcdfCurve, HillPlot, TailFit};
use crate::format::{sig6, theta_label};
use crate::Result;

/// One line of the joined risk/topology table.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskRow {
    pub asset_id: String,
    pub var: f64,
    pub cvar: f64,
    /// Clustering coefficient per threshold, in the order of `thetas`.
    pub clustering: Vec<f64>,
}

/// `asset,var95,cvar95,clustering_theta03,clustering_theta05`.
pub fn write_risk_report<W: Write>(
    rows: &[RiskRow],
    alpha_level: f64,
    thetas: &[f64],
    out: W,
) -> Result<()> {
    let level = format!("{}", (alpha_level * 100.0 * 1e6).round() / 1e6).replace('.', "");
    let mut header = vec![
        "asset".to_string(),
        format!("var{level}"),
        format!("cvar{level}"),
    ];
    header.extend(thetas.iter().map(|t| format!("clustering_theta{}", theta_label(*t))));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&header)?;
    for r in rows {
        // NaN marks a measure that could not be computed; leave the cell empty
        let cell = |x: f64| if x.is_nan() { String::new() } else { sig6(x) };
        let mut rec = vec![r.asset_id.clone(), cell(r.var), cell(r.cvar)];
        rec.extend(r.clustering.iter().map(|c| sig6(*c)));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// `asset,pareto_alpha,n_losses,tail_type`.
pub fn write_tail_report<W: Write>(fits: &[TailFit], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["asset", "pareto_alpha", "n_losses", "tail_type"])?;
    for f in fits {
        w.write_record([
            f.asset_id.clone(),
            sig6(f.alpha_hat),
            f.n_losses.to_string(),
            f.tail_class.label().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_ccdf_csv<W: Write>(curve: &CcdfCurve, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["loss", "exceedance"])?;
    for (x, p) in &curve.points {
        w.write_record([sig6(*x), sig6(*p)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_hill_csv<W: Write>(plot: &HillPlot, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["k", "alpha_hat", "stable"])?;
    for (k, a) in &plot.points {
        let stable = if plot.in_stable(*k) { "1" } else { "0" };
        w.write_record([k.to_string(), sig6(*a), stable.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
