//! Correlation and exposure networks and their topology.

mod build;
mod export;
mod topology;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

pub use build::{
    correlation_matrix, correlation_network, exposure_matrix, incoming_exposure, threshold_filter,
    volatilities,
};
pub use export::{export_graph, market_group, write_adjacency, write_correlation_matrix};
pub use topology::clustering_coefficients;

/// Pearson correlations of log returns.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub asset_ids: Vec<String>,
    pub rho: Array2<f64>,
}

/// Unfiltered `E_ij = rho_ij * sigma_i * P_i` with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct RawExposures {
    pub asset_ids: Vec<String>,
    pub matrix: Array2<f64>,
    pub reference_prices: Vec<f64>,
}

/// Directed exposure network after thresholding: every weight is either 0
/// or at least `theta`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExposureNetwork {
    pub asset_ids: Vec<String>,
    pub theta: f64,
    pub weights: Array2<f64>,
    pub reference_prices: Vec<f64>,
}

/// Undirected graph keeping correlations `rho_ij >= theta`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationNetwork {
    pub asset_ids: Vec<String>,
    pub theta: f64,
    pub weights: Array2<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopologyStats {
    pub asset_id: String,
    pub clustering: f64,
    pub degree: usize,
    pub triangles: usize,
}

/// Common view of the two network kinds.
pub trait WeightedGraph {
    fn asset_ids(&self) -> &[String];
    fn weights(&self) -> &Array2<f64>;
    fn is_directed(&self) -> bool;

    fn n_assets(&self) -> usize {
        self.asset_ids().len()
    }

    fn index_of(&self, asset_id: &str) -> Option<usize> {
        self.asset_ids().iter().position(|a| a == asset_id)
    }

    /// Edge `i - j` exists if either direction carries positive weight.
    fn undirected_support(&self) -> Vec<Vec<bool>> {
        let w = self.weights();
        let n = self.n_assets();
        (0..n)
            .map(|i| (0..n).map(|j| i != j && (w[[i, j]] > 0.0 || w[[j, i]] > 0.0)).collect())
            .collect()
    }
}

impl WeightedGraph for ExposureNetwork {
    fn asset_ids(&self) -> &[String] {
        &self.asset_ids
    }
    fn weights(&self) -> &Array2<f64> {
        &self.weights
    }
    fn is_directed(&self) -> bool {
        true
    }
}

impl WeightedGraph for CorrelationNetwork {
    fn asset_ids(&self) -> &[String] {
        &self.asset_ids
    }
    fn weights(&self) -> &Array2<f64> {
        &self.weights
    }
    fn is_directed(&self) -> bool {
        false
    }
}

fn drop_nodes(weights: &Array2<f64>, removed: &[bool]) -> Array2<f64> {
    let mut w = weights.clone();
    for (i, gone) in removed.iter().enumerate() {
        if *gone {
            w.row_mut(i).fill(0.0);
            w.column_mut(i).fill(0.0);
        }
    }
    w
}

impl ExposureNetwork {
    /// `E_ji` in place of `E_ij`, so losses flow to the other endpoint.
    pub fn transposed(&self) -> Self {
        Self {
            weights: self.weights.t().to_owned(),
            ..self.clone()
        }
    }

    /// Same node set with every edge touching a removed node deleted.
    pub fn without_nodes(&self, removed: &[bool]) -> Self {
        Self {
            weights: drop_nodes(&self.weights, removed),
            ..self.clone()
        }
    }

    pub fn edge_count(&self) -> usize {
        self.weights.iter().filter(|w| **w > 0.0).count()
    }
}

impl CorrelationNetwork {
    pub fn without_nodes(&self, removed: &[bool]) -> Self {
        Self {
            weights: drop_nodes(&self.weights, removed),
            ..self.clone()
        }
    }
}
