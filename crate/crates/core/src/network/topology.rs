use super::{TopologyStats, WeightedGraph};

/// Local clustering `C_i = 2 T_i / (k_i (k_i - 1))` on the undirected support
/// of the graph; `C_i = 0` when `k_i < 2`.
pub fn clustering_coefficients<G: WeightedGraph + ?Sized>(graph: &G) -> Vec<TopologyStats> {
    let adj = graph.undirected_support();
    let n = adj.len();
    (0..n)
        .map(|i| {
            let neighbours: Vec<usize> = (0..n).filter(|&j| adj[i][j]).collect();
            let k = neighbours.len();
            let mut triangles = 0;
            for (a, &u) in neighbours.iter().enumerate() {
                for &v in &neighbours[a + 1..] {
                    if adj[u][v] {
                        triangles += 1;
                    }
                }
            }
            let clustering = if k < 2 {
                0.0
            } else {
                2.0 * triangles as f64 / (k * (k - 1)) as f64
            };
            TopologyStats {
                asset_id: graph.asset_ids()[i].clone(),
                clustering,
                degree: k,
                triangles,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::CorrelationNetwork;
    use ndarray::Array2;

    fn graph(n: usize, edges: &[(usize, usize)]) -> CorrelationNetwork {
        let mut w = Array2::zeros((n, n));
        for &(a, b) in edges {
            w[[a, b]] = 0.7;
            w[[b, a]] = 0.7;
        }
        CorrelationNetwork {
            asset_ids: (0..n).map(|i| ((b'A' + i as u8) as char).to_string()).collect(),
            theta: 0.5,
            weights: w,
        }
    }

    fn coefficients(g: &CorrelationNetwork) -> Vec<f64> {
        clustering_coefficients(g).iter().map(|s| s.clustering).collect()
    }

    #[test]
    fn triangle_is_fully_clustered() {
        assert_eq!(coefficients(&graph(3, &[(0, 1), (1, 2), (0, 2)])), vec![1.0; 3]);
    }

    #[test]
    fn star_has_no_clustering() {
        let stats = clustering_coefficients(&graph(4, &[(0, 1), (0, 2), (0, 3)]));
        assert!(stats.iter().all(|s| s.clustering == 0.0));
        assert_eq!(stats[0].degree, 3);
    }

    #[test]
    fn mixed_four_node_graph() {
        // edges AB, AC, BC, CD: C has neighbours {A, B, D} and one triangle
        let stats = clustering_coefficients(&graph(4, &[(0, 1), (0, 2), (1, 2), (2, 3)]));
        let c: Vec<f64> = stats.iter().map(|s| s.clustering).collect();
        assert_eq!(c, vec![1.0, 1.0, 1.0 / 3.0, 0.0]);
        assert_eq!(stats[2].triangles, 1);
        assert_eq!(stats[3].degree, 1);
    }

    #[test]
    fn one_directed_edge_is_enough() {
        let mut g = graph(3, &[]);
        g.weights[[0, 1]] = 0.4;
        g.weights[[2, 1]] = 0.4;
        g.weights[[0, 2]] = 0.4;
        assert_eq!(coefficients(&g), vec![1.0; 3]);
    }
}
