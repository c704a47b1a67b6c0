use std::collections::HashSet;
use std::io::Write;
use std::path::Path;

use chrono::NaiveDate;

use super::{AlignedPanel, DescriptiveStats, RawSeries};
use crate::format::sig6;
use crate::{Error, Result};

/// Reads a wide price CSV (`date,<TICKER>,...`) into one raw series per
/// ticker column.
///
/// Empty cells and the literal `NaN` are gaps. Rows are sorted by date after
/// reading; a repeated date is rejected. Row numbers in errors are 1-based
/// file lines, so the first data row is row 2.
pub fn load_price_csv(path: impl AsRef<Path>) -> Result<Vec<RawSeries>> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(false)
        .from_path(path)?;

    let parse_err = |row: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        row,
        message,
    };

    let headers = reader.headers()?.clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(parse_err(1, "empty file, expected a `date,<TICKER>,...` header".into()));
    }
    if !headers[0].eq_ignore_ascii_case("date") {
        return Err(parse_err(1, format!("first column must be `date`, found `{}`", &headers[0])));
    }
    let tickers: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
    if tickers.is_empty() {
        return Err(parse_err(1, "header names no ticker columns".into()));
    }
    let mut seen_tickers = HashSet::new();
    for t in &tickers {
        if t.is_empty() || !seen_tickers.insert(t.as_str()) {
            return Err(parse_err(1, format!("empty or duplicate ticker column `{t}`")));
        }
    }

    let mut rows: Vec<(NaiveDate, usize, Vec<Option<f64>>)> = Vec::new();
    for record in reader.records() {
        let record = record?;
        let row = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let date = NaiveDate::parse_from_str(&record[0], "%Y-%m-%d")
            .map_err(|e| parse_err(row, format!("invalid date `{}`: {e}", &record[0])))?;
        let mut prices = Vec::with_capacity(tickers.len());
        for (col, cell) in record.iter().skip(1).enumerate() {
            prices.push(parse_price(cell).ok_or_else(|| Error::BadPrice {
                path: path.to_path_buf(),
                row,
                column: tickers[col].clone(),
                value: cell.to_string(),
            })?);
        }
        rows.push((date, row, prices));
    }

    rows.sort_by_key(|(date, row, _)| (*date, *row));
    if let Some(w) = rows.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(Error::DuplicateDate {
            path: path.to_path_buf(),
            row: w[1].1,
            date: w[1].0,
        });
    }

    let dates: Vec<NaiveDate> = rows.iter().map(|(d, _, _)| *d).collect();
    Ok(tickers
        .into_iter()
        .enumerate()
        .map(|(col, asset_id)| RawSeries {
            asset_id,
            dates: dates.clone(),
            prices: rows.iter().map(|(_, _, p)| p[col]).collect(),
        })
        .collect())
}

/// `Some(None)` is a gap, `None` is unparseable. Non-positive prices are
/// treated as gaps since no cleaned series may contain them.
fn parse_price(cell: &str) -> Option<Option<f64>> {
    if cell.is_empty() || cell.eq_ignore_ascii_case("nan") {
        return Some(None);
    }
    let value: f64 = cell.parse().ok()?;
    if !value.is_finite() {
        return None;
    }
    Some((value > 0.0).then_some(value))
}

/// Keeps only observations with `start <= date <= end`.
pub fn restrict_dates(series: &mut [RawSeries], start: Option<NaiveDate>, end: Option<NaiveDate>) {
    for s in series {
        let keep: Vec<bool> = s
            .dates
            .iter()
            .map(|d| start.is_none_or(|st| *d >= st) && end.is_none_or(|en| *d <= en))
            .collect();
        let mut it = keep.iter();
        s.dates.retain(|_| *it.next().unwrap());
        let mut it = keep.iter();
        s.prices.retain(|_| *it.next().unwrap());
    }
}

pub fn write_stats_csv<W: Write>(stats: &[DescriptiveStats], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["asset", "mean", "std", "min", "max"])?;
    for s in stats {
        w.write_record([
            s.asset_id.clone(),
            sig6(s.mean),
            sig6(s.std_dev),
            sig6(s.min),
            sig6(s.max),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_stats_json<W: Write>(stats: &[DescriptiveStats], mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, stats)?;
    out.write_all(b"\n")?;
    Ok(())
}

/// Wide CSV of `P_t / P_0` per asset over the aligned dates.
pub fn write_normalized_prices<W: Write>(panel: &AlignedPanel, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["date".to_string()];
    header.extend(panel.asset_ids.iter().cloned());
    w.write_record(&header)?;
    let columns: Vec<Vec<f64>> = panel
        .prices
        .columns()
        .into_iter()
        .map(|c| super::normalize_prices(&c.to_vec()))
        .collect::<Result<_>>()?;
    for (t, date) in panel.dates.iter().enumerate() {
        let mut record = vec![date.to_string()];
        record.extend(columns.iter().map(|c| sig6(c[t])));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}
