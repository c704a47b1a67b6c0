//! Minimal historical-quote client.
//!
//! The endpoint is queried once per ticker as
//! `GET {endpoint}/{ticker}?start=YYYY-MM-DD&end=YYYY-MM-DD` and must answer
//! with a CSV that has at least a `Date` and a `Low` column (the layout of
//! the usual "download history" exports). A 404 means the ticker is unknown.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Duration;

use chrono::NaiveDate;

use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct FetchOptions {
    pub endpoint: String,
    pub max_attempts: u32,
    pub backoff: Duration,
    pub timeout: Duration,
}

impl FetchOptions {
    pub fn new(endpoint: impl Into<String>) -> Self {
        Self {
            endpoint: endpoint.into(),
            max_attempts: 3,
            backoff: Duration::from_millis(500),
            timeout: Duration::from_secs(30),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FetchOutcome {
    pub tickers_written: Vec<String>,
    pub missing_tickers: Vec<String>,
    pub rows: usize,
}

/// Downloads daily lows for each ticker and writes them as a wide
/// `date,<TICKER>,...` CSV at `out`. Unknown tickers are logged and left out.
pub fn fetch_prices(
    tickers: &[String],
    start: NaiveDate,
    end: NaiveDate,
    options: &FetchOptions,
    out: impl AsRef<Path>,
) -> Result<FetchOutcome> {
    if start >= end {
        return Err(Error::InvalidParameter(format!(
            "start date {start} must precede end date {end}"
        )));
    }
    let agent = ureq::AgentBuilder::new().timeout(options.timeout).build();

    let mut columns: Vec<(String, BTreeMap<NaiveDate, f64>)> = Vec::new();
    let mut missing = Vec::new();
    for ticker in tickers {
        match fetch_one(&agent, ticker, start, end, options)? {
            Some(lows) => columns.push((ticker.clone(), lows)),
            None => {
                log::warn!("ticker {ticker} not found at {}, column omitted", options.endpoint);
                missing.push(ticker.clone());
            }
        }
    }

    let mut all_dates: Vec<NaiveDate> = columns
        .iter()
        .flat_map(|(_, c)| c.keys().copied())
        .collect();
    all_dates.sort();
    all_dates.dedup();

    let mut w = csv::Writer::from_path(out)?;
    let mut header = vec!["date".to_string()];
    header.extend(columns.iter().map(|(t, _)| t.clone()));
    w.write_record(&header)?;
    for date in &all_dates {
        let mut record = vec![date.to_string()];
        record.extend(
            columns
                .iter()
                .map(|(_, c)| c.get(date).map(|v| v.to_string()).unwrap_or_default()),
        );
        w.write_record(&record)?;
    }
    w.flush()?;

    Ok(FetchOutcome {
        tickers_written: columns.into_iter().map(|(t, _)| t).collect(),
        missing_tickers: missing,
        rows: all_dates.len(),
    })
}

fn fetch_one(
    agent: &ureq::Agent,
    ticker: &str,
    start: NaiveDate,
    end: NaiveDate,
    options: &FetchOptions,
) -> Result<Option<BTreeMap<NaiveDate, f64>>> {
    let url = format!("{}/{}", options.endpoint.trim_end_matches('/'), ticker);
    let mut attempt = 0;
    loop {
        attempt += 1;
        let response = agent
            .get(&url)
            .query("start", &start.to_string())
            .query("end", &end.to_string())
            .call();
        let err = match response {
            Ok(resp) => return parse_quote_csv(ticker, &resp.into_string()?).map(Some),
            Err(ureq::Error::Status(404, _)) => return Ok(None),
            Err(ureq::Error::Status(status, resp)) => Error::Http {
                status,
                message: format!("{url}: {}", resp.status_text()),
                retryable: status >= 500 || status == 429,
            },
            Err(ureq::Error::Transport(t)) => Error::Http {
                status: 0,
                message: format!("{url}: {t}"),
                retryable: true,
            },
        };
        let retryable = matches!(err, Error::Http { retryable: true, .. });
        if !retryable || attempt >= options.max_attempts {
            return Err(err);
        }
        log::warn!("{err}; retrying ({attempt}/{})", options.max_attempts);
        std::thread::sleep(options.backoff * attempt);
    }
}

fn parse_quote_csv(ticker: &str, body: &str) -> Result<BTreeMap<NaiveDate, f64>> {
    let bad = |message: String| Error::Parse {
        path: ticker.into(),
        row: 1,
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(body.as_bytes());
    let headers = reader.headers()?.clone();
    let find = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let date_col = find("date").ok_or_else(|| bad("response has no Date column".into()))?;
    let low_col = find("low").ok_or_else(|| bad("response has no Low column".into()))?;

    let mut out = BTreeMap::new();
    for record in reader.records() {
        let record = record?;
        let row = record.position().map(|p| p.line() as usize).unwrap_or(0);
        // some exports carry timestamps; keep the calendar date
        let date_text = record.get(date_col).unwrap_or("");
        let date = NaiveDate::parse_from_str(date_text.get(..10).unwrap_or(date_text), "%Y-%m-%d")
            .map_err(|e| Error::Parse {
                path: ticker.into(),
                row,
                message: format!("invalid date `{date_text}`: {e}"),
            })?;
        match record.get(low_col).unwrap_or("").parse::<f64>() {
            Ok(v) if v.is_finite() => {
                out.insert(date, v);
            }
            // "null" and empty cells show up for halted days
            _ => {}
        }
    }
    Ok(out)
}
