//! Exact and approximate k-core decomposition.
//!
//! Both variants run the same batch-peeling engine: a monotone bucket queue
//! over residual degrees (lazy entries, stale ones skipped on scan) feeds
//! rounds in which every vertex at or below the current cut is removed at
//! once. Neighbour degrees are decremented in parallel with atomics; a
//! vertex joins the next round exactly when its degree crosses the cut.

use std::sync::atomic::{AtomicU32, Ordering};

use rayon::prelude::*;

use crate::error::CoreError;
use crate::graph::{Graph, VertexId};

/// Guard used when turning real-valued bounds into integer thresholds; the
/// rounding always errs towards keeping more vertices.
const ROUNDING_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CoreKind {
    Exact,
    /// Every label is within a factor `factor` of the true core number.
    Approximate { factor: f64 },
}

#[derive(Clone, Debug)]
pub struct CoreDecomposition {
    labels: Vec<u32>,
    kmax: u32,
    kind: CoreKind,
    peel_rounds: usize,
    removal_degrees: Vec<u32>,
}

impl CoreDecomposition {
    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn label(&self, v: VertexId) -> u32 {
        self.labels[v as usize]
    }

    pub fn kmax(&self) -> u32 {
        self.kmax
    }

    pub fn kind(&self) -> CoreKind {
        self.kind
    }

    /// Number of parallel peeling rounds used to empty the graph.
    pub fn peel_rounds(&self) -> usize {
        self.peel_rounds
    }

    /// Residual degree of each vertex at the moment it was peeled.
    pub fn removal_degrees(&self) -> &[u32] {
        &self.removal_degrees
    }

    /// Label cut that keeps every vertex whose true core number is at
    /// least `k`.
    pub fn keep_threshold(&self, k: u64) -> u64 {
        match self.kind {
            CoreKind::Exact => k,
            CoreKind::Approximate { factor } => conservative_ceil(k as f64 / factor),
        }
    }

    /// Integer lower bound on the maximum subgraph density implied by the
    /// largest label: `ceil(kmax / 2)`, or `ceil(kmax / 2c)` for
    /// approximate labels.
    pub fn density_lower_bound(&self) -> u64 {
        match self.kind {
            CoreKind::Exact => (self.kmax as u64).div_ceil(2),
            CoreKind::Approximate { factor } => {
                conservative_ceil(self.kmax as f64 / (2.0 * factor))
            }
        }
    }

    /// Labels of a subgraph, given each subgraph vertex's id in the graph
    /// these labels were computed on.
    pub fn restrict(&self, parent: &[VertexId]) -> CoreDecomposition {
        let labels: Vec<u32> = parent.iter().map(|&p| self.labels[p as usize]).collect();
        let removal_degrees = parent
            .iter()
            .map(|&p| self.removal_degrees[p as usize])
            .collect();
        CoreDecomposition {
            kmax: labels.iter().copied().max().unwrap_or(0),
            labels,
            kind: self.kind,
            peel_rounds: self.peel_rounds,
            removal_degrees,
        }
    }
}

fn conservative_ceil(x: f64) -> u64 {
    (x - ROUNDING_SLACK).ceil().max(0.0) as u64
}

/// Exact core numbers by parallel bucketed peeling.
///
/// The cut `d` starts at the smallest degree; every vertex with residual
/// degree `<= d` is peeled in one round and labelled `d`, rounds repeat
/// until none remain at or below `d`, then `d` jumps to the smallest
/// remaining degree.
pub fn exact_coreness(g: &Graph) -> Result<CoreDecomposition, CoreError> {
    if g.is_empty() {
        return Err(CoreError::EmptyGraph);
    }
    Ok(banded_peel(g, CoreKind::Exact, |d| (d, d)))
}

/// Core labels within a factor `c` of the true core numbers.
///
/// Degrees are grouped into bands `[t_i, t_{i+1})` with `t_0 = 1` and
/// `t_{i+1} = floor(c * t_i) + 1`. While the smallest residual degree lies
/// in band `i`, every vertex of degree below `t_{i+1}` is batch-peeled and
/// labelled `t_i`. Such a vertex survived peeling below `t_i` and did not
/// survive peeling below `t_{i+1}`, so its core number `k` satisfies
/// `t_i <= k <= floor(c * t_i)`, which gives `k / c <= t_i <= k`.
pub fn approx_coreness(g: &Graph, c: f64) -> Result<CoreDecomposition, CoreError> {
    if c.is_nan() || c <= 1.0 || c.is_infinite() {
        return Err(CoreError::BadFactor(c));
    }
    if g.is_empty() {
        return Err(CoreError::EmptyGraph);
    }
    Ok(banded_peel(g, CoreKind::Approximate { factor: c }, |d| {
        if d == 0 {
            return (0, 0);
        }
        let mut lo = 1u32;
        loop {
            let hi = ((c * lo as f64).floor() as u32).max(lo) + 1;
            if d < hi {
                return (lo, hi - 1);
            }
            lo = hi;
        }
    }))
}

/// Induced subgraph on `{v : labels[v] >= k}`.
pub fn get_core(g: &Graph, d: &CoreDecomposition, k: u64) -> Graph {
    assert_eq!(d.labels.len(), g.n(), "decomposition does not match graph");
    let keep: Vec<bool> = d.labels.iter().map(|&l| l as u64 >= k).collect();
    g.induced_subgraph(&keep)
}

/// Shared engine. `band(d)` maps the smallest residual degree `d` to
/// `(label, cut)` with `cut >= d`; the round peels everything `<= cut`.
fn banded_peel<F>(g: &Graph, kind: CoreKind, band: F) -> CoreDecomposition
where
    F: Fn(u32) -> (u32, u32),
{
    let n = g.n();
    let max_deg = g.max_degree();
    let degree: Vec<AtomicU32> = g.vertices().map(|v| AtomicU32::new(g.degree(v) as u32)).collect();
    let mut buckets: Vec<Vec<VertexId>> = vec![Vec::new(); max_deg + 1];
    for v in g.vertices() {
        buckets[g.degree(v)].push(v);
    }

    let mut peeled = vec![false; n];
    let mut labels = vec![0u32; n];
    let mut removal_degrees = vec![0u32; n];
    let mut remaining = n;
    let mut rounds = 0usize;
    let mut scan = 0usize;
    let mut label = 0u32;
    let mut cut = 0u32;
    let mut frontier: Vec<VertexId> = Vec::new();

    while remaining > 0 {
        if frontier.is_empty() {
            // Smallest live degree among buckets at or above `scan`.
            let d_min = loop {
                debug_assert!(scan <= max_deg, "live vertices must sit in some bucket");
                let live = buckets[scan]
                    .iter()
                    .any(|&v| !peeled[v as usize] && degree[v as usize].load(Ordering::Relaxed) as usize == scan);
                if live {
                    break scan as u32;
                }
                buckets[scan].clear();
                scan += 1;
            };
            (label, cut) = band(d_min);
            let upper = (cut as usize).min(max_deg);
            for bucket in &mut buckets[scan..=upper] {
                for v in bucket.drain(..) {
                    let dv = degree[v as usize].load(Ordering::Relaxed);
                    if !peeled[v as usize] && dv <= cut && dv as usize >= scan {
                        frontier.push(v);
                    }
                }
            }
            frontier.sort_unstable();
            frontier.dedup();
            scan = upper + 1;
        }

        rounds += 1;
        for &v in &frontier {
            peeled[v as usize] = true;
            labels[v as usize] = label;
            removal_degrees[v as usize] = degree[v as usize].load(Ordering::Relaxed);
        }
        remaining -= frontier.len();

        let peeled_ref = &peeled;
        let degree_ref = &degree;
        let (mut next, mut moved) = frontier
            .par_iter()
            .fold(
                || (Vec::new(), Vec::new()),
                |(mut next, mut moved), &v| {
                    for &u in g.neighbors(v) {
                        if peeled_ref[u as usize] {
                            continue;
                        }
                        let now = degree_ref[u as usize].fetch_sub(1, Ordering::Relaxed) - 1;
                        if now == cut {
                            next.push(u);
                        } else if now > cut {
                            moved.push(u);
                        }
                    }
                    (next, moved)
                },
            )
            .reduce(
                || (Vec::new(), Vec::new()),
                |(mut a, mut b), (c, d)| {
                    a.extend(c);
                    b.extend(d);
                    (a, b)
                },
            );
        next.sort_unstable();
        moved.sort_unstable();
        moved.dedup();
        for u in moved {
            let du = degree[u as usize].load(Ordering::Relaxed);
            if du > cut {
                buckets[du as usize].push(u);
            }
        }
        frontier = next;
    }

    CoreDecomposition {
        kmax: labels.iter().copied().max().unwrap_or(0),
        labels,
        kind,
        peel_rounds: rounds,
        removal_degrees,
    }
}
