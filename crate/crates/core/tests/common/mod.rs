#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::Path;

use chrono::{Duration, NaiveDate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Wide price CSV of `tickers` over `days` consecutive dates. Each asset
/// follows a one-factor log-price walk so that the assets are correlated.
pub fn synthetic_prices(tickers: &[&str], days: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut levels: Vec<f64> = tickers.iter().map(|_| rng.gen_range(5.0..200.0)).collect();
    let loadings: Vec<f64> = tickers.iter().map(|_| rng.gen_range(0.3..1.0)).collect();
    let start = NaiveDate::from_ymd_opt(2015, 1, 2).unwrap();
    let mut out = String::from("date");
    for t in tickers {
        write!(out, ",{t}").unwrap();
    }
    out.push('\n');
    for d in 0..days {
        let market: f64 = normal(&mut rng) * 0.012;
        write!(out, "{}", start + Duration::days(d as i64)).unwrap();
        for (level, beta) in levels.iter_mut().zip(&loadings) {
            let idio = normal(&mut rng) * 0.01;
            // occasional heavy-tailed daily drop
            let jump = if rng.gen::<f64>() < 0.01 { -0.05 * rng.gen::<f64>().powf(-0.4) } else { 0.0 };
            *level *= (beta * market + idio + jump.max(-0.5)).exp();
            write!(out, ",{:.6}", level).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn write_prices(dir: &Path, tickers: &[&str], days: usize, seed: u64) -> std::path::PathBuf {
    let path = dir.join("prices.csv");
    std::fs::write(&path, synthetic_prices(tickers, days, seed)).unwrap();
    path
}

/// Inverse-CDF Pareto(alpha) sample with unit scale.
pub fn pareto_sample(alpha: f64, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| (1.0 - rng.gen::<f64>()).powf(-1.0 / alpha)).collect()
}

/// Pareto quantiles at `i / (n + 1)`.
pub fn pareto_grid(alpha: f64, n: usize) -> Vec<f64> {
    (1..=n)
        .map(|i| (1.0 - i as f64 / (n + 1) as f64).powf(-1.0 / alpha))
        .collect()
}

/// Collects every file under `dir` as (relative path, bytes), sorted.
pub fn read_tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
                files.push((rel, std::fs::read(&p).unwrap()));
            }
        }
    }
    files.sort();
    files
}
