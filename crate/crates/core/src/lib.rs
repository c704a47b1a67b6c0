//! Exposure-based financial networks built from equity price co-movements,
//! default-cascade simulation (deterministic influence propagation and a
//! capital/loss Monte Carlo engine), and the tail-risk measures used to
//! characterise systemic vulnerability.
//!
//! The pipeline is:
//!
//! 1. [`market_data`]: load a wide price CSV, clean each series, align and
//!    convert to log returns.
//! 2. [`risk`]: VaR/CVaR, loss CCDF, Hill tail index.
//! 3. [`network`]: correlation matrix, exposures `E_ij = rho_ij * sigma_i * P_i`,
//!    threshold filtering, clustering.
//! 4. [`cascade`]: capital/loss contagion with seeded Monte Carlo, plus the
//!    correlation-influence threshold model.
//!
//! [`cli`] wires these together into the `cascadenet` binary.

pub mod cascade;
pub mod cli;
pub mod error;
pub mod format;
pub mod market_data;
pub mod network;
pub mod risk;

pub use error::{Error, Result};
