use std::io::Write;

use super::{CorrelationMatrix, TopologyStats, WeightedGraph};
use crate::format::sig6;
use crate::Result;

/// Exchange suffix of a ticker (`PETR4.SA -> SA`); bare tickers are `US`.
pub fn market_group(asset_id: &str) -> &str {
    asset_id.rsplit_once('.').map_or("US", |(_, suffix)| suffix)
}

fn ticker_order(ids: &[String]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..ids.len()).collect();
    order.sort_by(|&a, &b| ids[a].cmp(&ids[b]));
    order
}

/// Writes `asset,clustering,degree,market_group` and `src,dst,weight` rows,
/// sorted by ticker. Undirected edges are written once with `src < dst`.
pub fn export_graph<G, N, E>(graph: &G, stats: &[TopologyStats], nodes: N, edges: E) -> Result<()>
where
    G: WeightedGraph + ?Sized,
    N: Write,
    E: Write,
{
    let ids = graph.asset_ids();
    let order = ticker_order(ids);

    let mut w = csv::Writer::from_writer(nodes);
    w.write_record(["asset", "clustering", "degree", "market_group"])?;
    for &i in &order {
        let s = &stats[i];
        w.write_record([
            s.asset_id.clone(),
            sig6(s.clustering),
            s.degree.to_string(),
            market_group(&s.asset_id).to_string(),
        ])?;
    }
    w.flush()?;

    let weights = graph.weights();
    let mut w = csv::Writer::from_writer(edges);
    w.write_record(["src", "dst", "weight"])?;
    for &i in &order {
        for &j in &order {
            let weight = weights[[i, j]];
            if i == j || weight <= 0.0 || (!graph.is_directed() && ids[i] >= ids[j]) {
                continue;
            }
            w.write_record([ids[i].clone(), ids[j].clone(), sig6(weight)])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn write_square<W: Write>(ids: &[String], value: impl Fn(usize, usize) -> f64, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![String::new()];
    header.extend(ids.iter().cloned());
    w.write_record(&header)?;
    for (i, id) in ids.iter().enumerate() {
        let mut rec = vec![id.clone()];
        rec.extend((0..ids.len()).map(|j| sig6(value(i, j))));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Square weight matrix with tickers on both axes, in input order.
pub fn write_adjacency<G: WeightedGraph + ?Sized, W: Write>(graph: &G, out: W) -> Result<()> {
    let w = graph.weights();
    write_square(graph.asset_ids(), |i, j| w[[i, j]], out)
}

pub fn write_correlation_matrix<W: Write>(rho: &CorrelationMatrix, out: W) -> Result<()> {
    write_square(&rho.asset_ids, |i, j| rho.rho[[i, j]], out)
}
