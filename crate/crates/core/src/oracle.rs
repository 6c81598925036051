//! Exhaustive reference for small graphs.

use rayon::prelude::*;

use crate::core_decomp::exact_coreness;
use crate::density::Density;
use crate::error::OracleError;
use crate::graph::{Graph, VertexId};

/// Default vertex limit for [`brute_force_densest`].
pub const DEFAULT_LIMIT: usize = 22;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    pub rho_star: Density,
    /// Original ids, ascending. Among all maximum-density subsets this is
    /// the smallest one, then the lexicographically smallest.
    pub witness: Vec<u64>,
}

#[derive(Clone, Copy)]
struct Cand {
    density: Density,
    mask: u64,
}

/// `a` beats `b`: higher density, then fewer vertices, then the set that
/// contains the lowest vertex where they differ.
fn better(a: &Cand, b: &Cand) -> bool {
    match a.density.cmp(&b.density) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => {
            let (ca, cb) = (a.mask.count_ones(), b.mask.count_ones());
            if ca != cb {
                return ca < cb;
            }
            let diff = a.mask ^ b.mask;
            diff != 0 && a.mask & (diff & diff.wrapping_neg()) != 0
        }
    }
}

/// Maximum density over every nonempty vertex subset, by Gray-code
/// enumeration. Vertices are dense ids `0..n`, so the tie-break follows
/// ascending original id.
pub fn brute_force_densest(g: &Graph, limit: usize) -> Result<OracleResult, OracleError> {
    let n = g.n();
    if n == 0 {
        return Err(OracleError::EmptyGraph);
    }
    if n > limit || n > 40 {
        return Err(OracleError::TooLarge { n, limit: limit.min(40) });
    }
    let adj: Vec<u64> = g
        .vertices()
        .map(|v| g.neighbors(v).iter().fold(0u64, |m, &u| m | (1 << u)))
        .collect();

    // Fix the top `hi` bits per task and walk the low bits in Gray order.
    let hi = n.min(6);
    let lo = n - hi;
    let best = (0u64..1 << hi)
        .into_par_iter()
        .map(|top| {
            let mut mask = top << lo;
            let mut edges: u64 = (0..n)
                .filter(|&v| mask >> v & 1 == 1)
                .map(|v| (adj[v] & mask).count_ones() as u64)
                .sum::<u64>()
                / 2;
            let mut best: Option<Cand> = None;
            let mut consider = |mask: u64, edges: u64| {
                if mask == 0 {
                    return;
                }
                let c = Cand { density: Density::new(edges, mask.count_ones() as u64), mask };
                if best.as_ref().is_none_or(|b| better(&c, b)) {
                    best = Some(c);
                }
            };
            consider(mask, edges);
            for i in 1u64..1 << lo {
                let v = i.trailing_zeros() as usize;
                let bit = 1u64 << v;
                let deg_in = (adj[v] & mask & !bit).count_ones() as u64;
                if mask & bit == 0 {
                    mask |= bit;
                    edges += deg_in;
                } else {
                    mask &= !bit;
                    edges -= deg_in;
                }
                consider(mask, edges);
            }
            best
        })
        .reduce(|| None, |a, b| match (a, b) {
            (None, x) | (x, None) => x,
            (Some(a), Some(b)) => Some(if better(&b, &a) { b } else { a }),
        })
        .expect("n >= 1 gives a nonempty subset");

    let witness = (0..n as VertexId)
        .filter(|&v| best.mask >> v & 1 == 1)
        .map(|v| g.orig_id(v))
        .collect();
    Ok(OracleResult { rho_star: best.density, witness })
}

/// Removing a vertex whose degree is below the graph density strictly
/// increases the density. Returns whether that implication holds at `v`.
pub fn check_degree_lemma(g: &Graph, v: VertexId) -> bool {
    let (n, m, d) = (g.n() as u64, g.m() as u64, g.degree(v) as u64);
    // d < m / n
    if d * n >= m {
        return true;
    }
    // (m - d) / (n - 1) > m / n
    n > 1 && Density::new(m - d, n - 1) > Density::new(m, n)
}

/// Whether the oracle witness lies inside the exact `k`-core.
pub fn check_core_containment(g: &Graph, k: u64) -> Result<bool, OracleError> {
    let opt = brute_force_densest(g, DEFAULT_LIMIT)?;
    let dec = exact_coreness(g).map_err(|_| OracleError::EmptyGraph)?;
    Ok(opt.witness.iter().all(|id| {
        let v = g.orig_ids().binary_search(id).expect("witness id in graph") as VertexId;
        dec.label(v) as u64 >= k
    }))
}
