//! Small synthetic graphs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::GraphError;
use crate::graph::Graph;

pub fn complete(n: u64) -> Result<Graph, GraphError> {
    Graph::from_edges((0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
}

pub fn path(n: u64) -> Result<Graph, GraphError> {
    Graph::from_edges((1..n).map(|v| (v - 1, v)))
}

pub fn cycle(n: u64) -> Result<Graph, GraphError> {
    Graph::from_edges((0..n).map(|v| (v, (v + 1) % n)))
}

/// Center 0 with leaves `1..=leaves`.
pub fn star(leaves: u64) -> Result<Graph, GraphError> {
    Graph::from_edges((1..=leaves).map(|v| (0, v)))
}

/// G(n, p) with a seeded ChaCha stream. Isolated vertices do not appear in
/// the result, since graphs are built from edges.
pub fn erdos_renyi(n: u64, p: f64, seed: u64) -> Result<Graph, GraphError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        assert_eq!(complete(5).unwrap().m(), 10);
        assert_eq!(path(4).unwrap().m(), 3);
        assert_eq!(cycle(5).unwrap().m(), 5);
        assert_eq!(star(5).unwrap().max_degree(), 5);
        assert!(path(1).is_err());
        let a = erdos_renyi(30, 0.2, 7).unwrap();
        let b = erdos_renyi(30, 0.2, 7).unwrap();
        assert_eq!(a.edges().collect::<Vec<_>>(), b.edges().collect::<Vec<_>>());
    }
}
