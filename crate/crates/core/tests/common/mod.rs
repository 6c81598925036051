//! Independent reference implementations. These deliberately avoid the
//! library's kernels and work on plain adjacency sets.
#![allow(dead_code)]

use std::collections::BTreeSet;

use densest_core::gen::erdos_renyi;
use densest_core::Graph;

pub fn adjacency(g: &Graph) -> Vec<BTreeSet<u32>> {
    g.vertices().map(|v| g.neighbors(v).iter().copied().collect()).collect()
}

/// Repeatedly delete a minimum-degree vertex; coreness is the running
/// maximum of deletion degrees.
pub fn sequential_coreness(g: &Graph) -> Vec<u32> {
    let adj = adjacency(g);
    let n = adj.len();
    let mut deg: Vec<usize> = adj.iter().map(|a| a.len()).collect();
    let mut alive = vec![true; n];
    let mut core = vec![0u32; n];
    let mut k = 0usize;
    for _ in 0..n {
        let v = (0..n).filter(|&v| alive[v]).min_by_key(|&v| (deg[v], v)).unwrap();
        k = k.max(deg[v]);
        core[v] = k as u32;
        alive[v] = false;
        for &u in &adj[v] {
            if alive[u as usize] {
                deg[u as usize] -= 1;
            }
        }
    }
    core
}

/// Edges with both endpoints in `set`, counted from scratch.
pub fn edges_within(adj: &[BTreeSet<u32>], set: &[u32]) -> u64 {
    let inside: BTreeSet<u32> = set.iter().copied().collect();
    let twice: usize = set
        .iter()
        .map(|&v| adj[v as usize].iter().filter(|u| inside.contains(u)).count())
        .sum();
    (twice / 2) as u64
}

/// Peel by `load + residual degree`. With `batch`, every vertex at the
/// minimum key leaves in one round before degrees are updated.
pub fn sequential_load_peel(g: &Graph, loads: &[u64], batch: bool) -> Vec<u32> {
    let adj = adjacency(g);
    let n = adj.len();
    let mut deg: Vec<u64> = adj.iter().map(|a| a.len() as u64).collect();
    let mut alive = vec![true; n];
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let key = |v: usize| loads[v] + deg[v];
        let min = (0..n).filter(|&v| alive[v]).map(key).min().unwrap();
        let round: Vec<usize> = if batch {
            (0..n).filter(|&v| alive[v] && key(v) == min).collect()
        } else {
            vec![(0..n).find(|&v| alive[v] && key(v) == min).unwrap()]
        };
        for &v in &round {
            alive[v] = false;
        }
        for &v in &round {
            for &u in &adj[v] {
                if alive[u as usize] {
                    deg[u as usize] -= 1;
                }
            }
            out.push(v as u32);
        }
    }
    out
}

/// Deterministic pseudo-random graph; `None` when it came out edgeless.
pub fn random_graph(n: u64, p: f64, seed: u64) -> Option<Graph> {
    erdos_renyi(n, p, seed).ok()
}
