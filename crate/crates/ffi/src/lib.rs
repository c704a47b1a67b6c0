//! C ABI over `cascadenet`.
//!
//! Every fallible function returns a [`CnStatus`]; on failure the message is
//! available from [`cn_last_error`] on the same thread. Handles are opaque
//! and must be released with their `_free` function. Panics never cross the
//! boundary: they are reported as [`CnStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use cascadenet::cascade::{apply_shock, monte_carlo, run_cascade, CapitalConfig, CascadeState, Scenario};
use cascadenet::market_data::{self, AlignedPanel, ReferencePriceMode, ReturnMatrix};
use cascadenet::network::{
    clustering_coefficients, correlation_matrix, exposure_matrix, threshold_filter, volatilities,
    ExposureNetwork,
};
use cascadenet::risk;
use cascadenet::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CnStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DataError = 3,
    IoError = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CnRefPrice {
    Mean = 0,
    First = 1,
    Last = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CnScenario {
    /// One random asset per run; `targets` is ignored.
    General = 0,
    /// Every asset every run; `targets` is ignored.
    GeneralShockAll = 1,
    /// The listed targets, shocked together every run.
    Targets = 2,
}

/// Capital-model parameters. Obtain defaults from [`cn_capital_config_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CnCapitalConfig {
    pub capital_ratio: f64,
    pub min_capital_ratio: f64,
    pub shock_low: f64,
    pub shock_high: f64,
    pub systemic_failure_count: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct CnSimulationSummary {
    pub failure_probability: f64,
    pub avg_failed_assets: f64,
}

/// Cleaned, aligned prices and their log returns.
pub struct CnPanel {
    aligned: AlignedPanel,
    returns: ReturnMatrix,
    ids: Vec<CString>,
}

/// Thresholded exposure network.
pub struct CnNetwork {
    net: ExposureNetwork,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(err: &Error) -> CnStatus {
    match err {
        Error::InvalidParameter(_) | Error::UnknownAsset(_) => CnStatus::InvalidArgument,
        e if e.is_data_error() => CnStatus::DataError,
        _ => CnStatus::IoError,
    }
}

struct Fail(CnStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(CnStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> Fail {
    Fail(CnStatus::InvalidArgument, msg.into())
}

fn guard(body: impl FnOnce() -> Result<(), Fail>) -> CnStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            CnStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            CnStatus::Panic
        }
    }
}

unsafe fn slice<'a, T>(data: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(data, len))
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn cn_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

#[no_mangle]
pub extern "C" fn cn_capital_config_default() -> CnCapitalConfig {
    let c = CapitalConfig::default();
    CnCapitalConfig {
        capital_ratio: c.capital_ratio,
        min_capital_ratio: c.min_capital_ratio,
        shock_low: c.shock_low,
        shock_high: c.shock_high,
        systemic_failure_count: c.systemic_failure_count,
    }
}

impl From<CnCapitalConfig> for CapitalConfig {
    fn from(c: CnCapitalConfig) -> Self {
        CapitalConfig {
            capital_ratio: c.capital_ratio,
            min_capital_ratio: c.min_capital_ratio,
            shock_low: c.shock_low,
            shock_high: c.shock_high,
            systemic_failure_count: c.systemic_failure_count,
        }
    }
}

/// Loads a wide price CSV, cleans each series with the given IQR multiplier
/// and aligns the assets on their common dates.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cn_panel_load_csv(
    path: *const c_char,
    iqr_multiplier: f64,
    out: *mut *mut CnPanel,
) -> CnStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        if path.is_null() {
            return Err(null("path"));
        }
        let path = PathBuf::from(
            CStr::from_ptr(path)
                .to_str()
                .map_err(|_| invalid("path is not UTF-8"))?,
        );
        let raw = market_data::load_price_csv(&path)?;
        let cleaned = market_data::clean_panel(&raw, iqr_multiplier)?;
        let aligned = market_data::align(&cleaned)?;
        let returns = aligned.log_returns()?;
        let ids = returns
            .asset_ids
            .iter()
            .map(|s| CString::new(s.as_str()).map_err(|_| invalid("ticker contains NUL")))
            .collect::<Result<_, _>>()?;
        *out = Box::into_raw(Box::new(CnPanel { aligned, returns, ids }));
        Ok(())
    })
}

/// # Safety
/// `panel` must come from [`cn_panel_load_csv`] or be null.
#[no_mangle]
pub unsafe extern "C" fn cn_panel_free(panel: *mut CnPanel) {
    if !panel.is_null() {
        drop(Box::from_raw(panel));
    }
}

/// # Safety
/// `panel` must be a live handle or null (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn cn_panel_n_assets(panel: *const CnPanel) -> usize {
    panel.as_ref().map_or(0, |p| p.returns.n_assets())
}

/// Number of log returns per asset.
///
/// # Safety
/// `panel` must be a live handle or null (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn cn_panel_n_returns(panel: *const CnPanel) -> usize {
    panel.as_ref().map_or(0, |p| p.returns.n_observations())
}

/// Ticker of asset `index`, owned by the panel; null when out of range.
///
/// # Safety
/// `panel` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn cn_panel_asset_id(panel: *const CnPanel, index: usize) -> *const c_char {
    panel
        .as_ref()
        .and_then(|p| p.ids.get(index))
        .map_or(ptr::null(), |s| s.as_ptr())
}

/// Copies the log returns of asset `index` into `out` (length `len`, which
/// must equal [`cn_panel_n_returns`]).
///
/// # Safety
/// `panel` must be a live handle and `out` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn cn_panel_returns(
    panel: *const CnPanel,
    index: usize,
    out: *mut f64,
    len: usize,
) -> CnStatus {
    guard(|| {
        let p = panel.as_ref().ok_or_else(|| null("panel"))?;
        if index >= p.returns.n_assets() {
            return Err(invalid(format!("asset index {index} out of range")));
        }
        if len != p.returns.n_observations() {
            return Err(invalid(format!(
                "buffer holds {len} values, need {}",
                p.returns.n_observations()
            )));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let dst = std::slice::from_raw_parts_mut(out, len);
        dst.copy_from_slice(&p.returns.column(index));
        Ok(())
    })
}

/// Builds the exposure network of `panel` kept at threshold `theta`.
///
/// # Safety
/// `panel` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cn_network_build(
    panel: *const CnPanel,
    theta: f64,
    ref_price: CnRefPrice,
    out: *mut *mut CnNetwork,
) -> CnStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        let p = panel.as_ref().ok_or_else(|| null("panel"))?;
        let mode = match ref_price {
            CnRefPrice::Mean => ReferencePriceMode::Mean,
            CnRefPrice::First => ReferencePriceMode::First,
            CnRefPrice::Last => ReferencePriceMode::Last,
        };
        let rho = correlation_matrix(&p.returns)?;
        let sigma = volatilities(&p.returns)?;
        let raw = exposure_matrix(&rho, &sigma, &p.aligned.reference_prices(mode))?;
        let net = threshold_filter(&raw, theta)?;
        *out = Box::into_raw(Box::new(CnNetwork { net }));
        Ok(())
    })
}

/// # Safety
/// `net` must come from [`cn_network_build`] or be null.
#[no_mangle]
pub unsafe extern "C" fn cn_network_free(net: *mut CnNetwork) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// # Safety
/// `net` must be a live handle or null (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn cn_network_n_assets(net: *const CnNetwork) -> usize {
    net.as_ref().map_or(0, |n| n.net.asset_ids.len())
}

/// Number of directed edges.
///
/// # Safety
/// `net` must be a live handle or null (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn cn_network_edge_count(net: *const CnNetwork) -> usize {
    net.as_ref().map_or(0, |n| n.net.edge_count())
}

/// Row-major copy of the `n x n` weight matrix.
///
/// # Safety
/// `net` must be a live handle and `out` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn cn_network_weights(net: *const CnNetwork, out: *mut f64, len: usize) -> CnStatus {
    guard(|| {
        let n = net.as_ref().ok_or_else(|| null("net"))?;
        let size = n.net.weights.len();
        if len != size {
            return Err(invalid(format!("buffer holds {len} values, need {size}")));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let dst = std::slice::from_raw_parts_mut(out, len);
        for (d, w) in dst.iter_mut().zip(n.net.weights.iter()) {
            *d = *w;
        }
        Ok(())
    })
}

/// Local clustering coefficient of every asset.
///
/// # Safety
/// `net` must be a live handle and `out` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn cn_network_clustering(net: *const CnNetwork, out: *mut f64, len: usize) -> CnStatus {
    guard(|| {
        let n = net.as_ref().ok_or_else(|| null("net"))?;
        if len != n.net.asset_ids.len() {
            return Err(invalid(format!("buffer holds {len} values, need {}", n.net.asset_ids.len())));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let dst = std::slice::from_raw_parts_mut(out, len);
        for (d, s) in dst.iter_mut().zip(clustering_coefficients(&n.net)) {
            *d = s.clustering;
        }
        Ok(())
    })
}

/// Seeded Monte Carlo over the capital/loss cascade. `per_run_failed` may be
/// null; otherwise it receives `n_runs` failure counts.
///
/// # Safety
/// `net` must be a live handle, `targets` valid for `n_targets` reads,
/// `summary` a valid pointer and `per_run_failed` null or valid for `n_runs`
/// writes.
#[no_mangle]
pub unsafe extern "C" fn cn_monte_carlo(
    net: *const CnNetwork,
    config: CnCapitalConfig,
    scenario: CnScenario,
    targets: *const usize,
    n_targets: usize,
    n_runs: usize,
    seed: u64,
    summary: *mut CnSimulationSummary,
    per_run_failed: *mut usize,
) -> CnStatus {
    guard(|| {
        let n = net.as_ref().ok_or_else(|| null("net"))?;
        let summary = out_ref(summary, "summary")?;
        let ids = &n.net.asset_ids;
        let scenario = match scenario {
            CnScenario::General => Scenario::General,
            CnScenario::GeneralShockAll => Scenario::GeneralShockAll,
            CnScenario::Targets => {
                let idx = slice(targets, n_targets, "targets")?;
                let names = idx
                    .iter()
                    .map(|&i| ids.get(i).cloned().ok_or_else(|| invalid(format!("target {i} out of range"))))
                    .collect::<Result<Vec<_>, _>>()?;
                match names.len() {
                    0 => return Err(invalid("targets scenario needs at least one target")),
                    1 => Scenario::SingleShock(names[0].clone()),
                    _ => Scenario::SimultaneousShock(names),
                }
            }
        };
        let report = monte_carlo(&n.net, &config.into(), &scenario, n_runs, seed)?;
        summary.failure_probability = report.failure_probability;
        summary.avg_failed_assets = report.avg_failed_assets;
        if !per_run_failed.is_null() {
            std::slice::from_raw_parts_mut(per_run_failed, n_runs)
                .copy_from_slice(&report.per_run_failed_counts);
        }
        Ok(())
    })
}

/// One capital/loss cascade on a caller-supplied network.
///
/// `weights` is the row-major `n x n` exposure matrix (entry `i*n + j` is
/// what `j` loses through `i`). `target` is shocked by `shock * prices[target]`.
/// On success `defaulted[i]` is 1 for every failed asset.
///
/// # Safety
/// `weights` must be valid for `n*n` reads, `prices` for `n` reads,
/// `defaulted` for `n` writes and `iterations` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cn_cascade_run(
    n: usize,
    weights: *const f64,
    prices: *const f64,
    config: CnCapitalConfig,
    target: usize,
    shock: f64,
    defaulted: *mut u8,
    iterations: *mut usize,
) -> CnStatus {
    guard(|| {
        if n == 0 {
            return Err(invalid("network has no assets"));
        }
        let size = n.checked_mul(n).ok_or_else(|| invalid("n too large"))?;
        let w = slice(weights, size, "weights")?;
        let p = slice(prices, n, "prices")?.to_vec();
        let iterations = out_ref(iterations, "iterations")?;
        if defaulted.is_null() {
            return Err(null("defaulted"));
        }
        if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(invalid("weights must be finite and non-negative"));
        }
        if p.iter().any(|x| !x.is_finite() || *x <= 0.0) {
            return Err(invalid("prices must be finite and positive"));
        }
        let cfg: CapitalConfig = config.into();
        cfg.validate()?;
        let mut matrix = ndarray::Array2::from_shape_vec((n, n), w.to_vec())
            .map_err(|e| invalid(e.to_string()))?;
        for i in 0..n {
            matrix[[i, i]] = 0.0;
        }
        let net = ExposureNetwork {
            asset_ids: (0..n).map(|i| i.to_string()).collect(),
            theta: 0.0,
            weights: matrix,
            reference_prices: p.clone(),
        };
        let state = CascadeState::from_prices(&p, &cfg);
        let state = run_cascade(apply_shock(state, target, shock, &p)?, &net);
        let dst = std::slice::from_raw_parts_mut(defaulted, n);
        for (d, f) in dst.iter_mut().zip(&state.defaulted) {
            *d = u8::from(*f);
        }
        *iterations = state.iteration;
        Ok(())
    })
}

/// Historical VaR of `returns` at confidence `alpha_level`.
///
/// # Safety
/// `returns` must be valid for `len` reads and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cn_var(returns: *const f64, len: usize, alpha_level: f64, out: *mut f64) -> CnStatus {
    guard(|| {
        let r = slice(returns, len, "returns")?;
        *out_ref(out, "out")? = risk::var(r, alpha_level)?;
        Ok(())
    })
}

/// Mean of the returns at or below the VaR.
///
/// # Safety
/// `returns` must be valid for `len` reads and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cn_cvar(returns: *const f64, len: usize, alpha_level: f64, out: *mut f64) -> CnStatus {
    guard(|| {
        let r = slice(returns, len, "returns")?;
        *out_ref(out, "out")? = risk::cvar(r, alpha_level)?;
        Ok(())
    })
}

/// Hill tail index from the `k` largest of the positive `losses`.
///
/// # Safety
/// `losses` must be valid for `len` reads and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cn_hill_estimate(losses: *const f64, len: usize, k: usize, out: *mut f64) -> CnStatus {
    guard(|| {
        let l = slice(losses, len, "losses")?;
        *out_ref(out, "out")? = risk::hill_estimate(l, k)?;
        Ok(())
    })
}
