//! One refinement iteration: order the vertices, then compute every suffix
//! density of that order and charge each edge to its earlier endpoint.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::sync::atomic::{AtomicU32, Ordering as AtomicOrdering};

use rayon::prelude::*;

use crate::density::Density;
use crate::error::RefineError;
use crate::graph::{Graph, VertexId};
use crate::scan::{first_argmax, suffix_sums};

/// Batches at least this large decrement neighbour degrees in parallel.
const PAR_BATCH: usize = 512;

/// Per-vertex accumulated loads. After `t` full iterations on a fixed graph
/// the loads sum to `t * m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoadState {
    loads: Vec<u64>,
}

impl LoadState {
    pub fn zeros(n: usize) -> Self {
        LoadState { loads: vec![0; n] }
    }

    pub fn from_vec(loads: Vec<u64>) -> Self {
        LoadState { loads }
    }

    pub fn len(&self) -> usize {
        self.loads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.loads.is_empty()
    }

    pub fn get(&self, v: VertexId) -> u64 {
        self.loads[v as usize]
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.loads
    }

    pub fn total(&self) -> u64 {
        self.loads.iter().sum()
    }

    /// Loads of a subgraph's vertices, indexed by their new ids.
    pub fn restrict(&self, parent: &[VertexId]) -> LoadState {
        LoadState {
            loads: parent.iter().map(|&p| self.loads[p as usize]).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderKind {
    /// Peel by minimum `load + residual degree`.
    LoadPeel,
    /// Sort by load at the start of the iteration.
    LoadSort,
}

/// A permutation `v_1 .. v_n` of the graph's dense ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexOrdering {
    perm: Vec<VertexId>,
    kind: OrderKind,
}

impl VertexOrdering {
    pub fn new(perm: Vec<VertexId>, kind: OrderKind) -> Self {
        VertexOrdering { perm, kind }
    }

    pub fn perm(&self) -> &[VertexId] {
        &self.perm
    }

    pub fn kind(&self) -> OrderKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    /// Vertices from position `start` to the end.
    pub fn suffix(&self, start: usize) -> &[VertexId] {
        &self.perm[start..]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefineOutcome {
    pub rho_max: Density,
    /// 0-based position `i` whose suffix `v_i .. v_n` attains `rho_max`;
    /// ties go to the smallest position.
    pub best_prefix: usize,
    /// Largest load increase of any single vertex in this iteration.
    pub width: u64,
    /// Density of every suffix, when requested.
    pub densities: Option<Vec<Density>>,
    /// Edges charged to every position, when requested.
    pub charges: Option<Vec<u64>>,
}

/// How many tied vertices a peeling round may take.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PeelBatch {
    /// Every vertex at the minimum key, delayed degree updates.
    AllTies,
    /// One vertex per round (smallest key, then smallest id).
    Single,
}

/// Load ordering with batched peeling on `load(v) + residual degree(v)`.
pub fn load_peel_order(g: &Graph, loads: &LoadState) -> VertexOrdering {
    load_peel_order_with(g, loads, PeelBatch::AllTies)
}

pub fn load_peel_order_with(g: &Graph, loads: &LoadState, batch: PeelBatch) -> VertexOrdering {
    assert_eq!(loads.len(), g.n(), "loads must cover every vertex");
    let n = g.n();
    let degree: Vec<AtomicU32> = g.vertices().map(|v| AtomicU32::new(g.degree(v) as u32)).collect();
    let key = |v: VertexId| loads.get(v) + degree[v as usize].load(AtomicOrdering::Relaxed) as u64;
    let mut heap: BinaryHeap<Reverse<(u64, VertexId)>> = g.vertices().map(|v| Reverse((key(v), v))).collect();
    let mut removed = vec![false; n];
    let mut perm = Vec::with_capacity(n);
    let mut round: Vec<VertexId> = Vec::new();

    while let Some(Reverse((k, v))) = heap.pop() {
        if removed[v as usize] || k != key(v) {
            continue;
        }
        round.clear();
        round.push(v);
        if batch == PeelBatch::AllTies {
            // The heap yields (key, id) ascending, so the batch is id-ordered.
            while let Some(&Reverse((k2, u))) = heap.peek() {
                if k2 != k {
                    break;
                }
                heap.pop();
                if !removed[u as usize] && k2 == key(u) {
                    round.push(u);
                }
            }
        }
        for &u in &round {
            removed[u as usize] = true;
        }
        perm.extend_from_slice(&round);

        let removed_ref = &removed;
        let degree_ref = &degree;
        let touch = |v: VertexId| {
            g.neighbors(v)
                .iter()
                .copied()
                .filter(|&u| !removed_ref[u as usize])
                .inspect(|&u| {
                    degree_ref[u as usize].fetch_sub(1, AtomicOrdering::Relaxed);
                })
                .collect::<Vec<_>>()
        };
        let mut touched: Vec<VertexId> = if round.len() >= PAR_BATCH {
            round.par_iter().flat_map_iter(|&v| touch(v)).collect()
        } else {
            round.iter().flat_map(|&v| touch(v)).collect()
        };
        touched.sort_unstable();
        touched.dedup();
        for u in touched {
            heap.push(Reverse((key(u), u)));
        }
    }
    debug_assert_eq!(perm.len(), n);
    VertexOrdering::new(perm, OrderKind::LoadPeel)
}

/// Vertices by non-decreasing load, ties by ascending id.
pub fn load_sort_order(loads: &LoadState) -> VertexOrdering {
    let l = loads.as_slice();
    let n = l.len();
    let (lo, hi) = match (l.iter().min(), l.iter().max()) {
        (Some(&lo), Some(&hi)) => (lo, hi),
        _ => return VertexOrdering::new(Vec::new(), OrderKind::LoadSort),
    };
    let range = (hi - lo) as usize;
    let perm = if range <= 4 * n + 1024 {
        // Stable counting sort: ids are placed in ascending order per key.
        let mut start = vec![0usize; range + 2];
        for &x in l {
            start[(x - lo) as usize + 1] += 1;
        }
        for i in 1..start.len() {
            start[i] += start[i - 1];
        }
        let mut perm = vec![0 as VertexId; n];
        for (v, &x) in l.iter().enumerate() {
            let slot = &mut start[(x - lo) as usize];
            perm[*slot] = v as VertexId;
            *slot += 1;
        }
        perm
    } else {
        let mut perm: Vec<VertexId> = (0..n as VertexId).collect();
        perm.par_sort_unstable_by_key(|&v| (l[v as usize], v));
        perm
    };
    VertexOrdering::new(perm, OrderKind::LoadSort)
}

/// Charges every edge to the position of its earlier endpoint, scans the
/// charges into suffix edge counts, and adds each position's charge to its
/// vertex's load.
pub fn density_and_load_update(
    g: &Graph,
    order: &VertexOrdering,
    loads: &mut LoadState,
) -> Result<RefineOutcome, RefineError> {
    update(g, order, loads, false)
}

/// Same as [`density_and_load_update`], also returning per-position
/// densities and charges.
pub fn density_and_load_update_detailed(
    g: &Graph,
    order: &VertexOrdering,
    loads: &mut LoadState,
) -> Result<RefineOutcome, RefineError> {
    update(g, order, loads, true)
}

fn update(
    g: &Graph,
    order: &VertexOrdering,
    loads: &mut LoadState,
    detailed: bool,
) -> Result<RefineOutcome, RefineError> {
    let n = g.n();
    if order.len() != n {
        return Err(RefineError::LengthMismatch {
            expected: n,
            got: order.len(),
        });
    }
    if loads.len() != n {
        return Err(RefineError::LoadsMismatch {
            expected: n,
            got: loads.len(),
        });
    }
    let mut rank = vec![u32::MAX; n];
    for (i, &v) in order.perm().iter().enumerate() {
        let slot = rank.get_mut(v as usize).ok_or(RefineError::NotPermutation(v))?;
        if *slot != u32::MAX {
            return Err(RefineError::NotPermutation(v));
        }
        *slot = i as u32;
    }
    if n == 0 {
        return Ok(RefineOutcome {
            rho_max: Density::zero(),
            best_prefix: 0,
            width: 0,
            densities: detailed.then(Vec::new),
            charges: detailed.then(Vec::new),
        });
    }

    // charges[i] = neighbours of v_i placed after it; summing over positions
    // counts every edge exactly once, at min(rank(u), rank(v)).
    let charges: Vec<u64> = order
        .perm()
        .par_iter()
        .enumerate()
        .map(|(i, &v)| {
            g.neighbors(v)
                .iter()
                .filter(|&&u| rank[u as usize] as usize > i)
                .count() as u64
        })
        .collect();
    let remaining = suffix_sums(&charges);
    let densities: Vec<Density> = remaining
        .par_iter()
        .enumerate()
        .map(|(i, &e)| Density::new(e, (n - i) as u64))
        .collect();
    let best_prefix = first_argmax(&densities).expect("non-empty");
    let width = charges.par_iter().copied().max().unwrap_or(0);

    loads
        .loads
        .par_iter_mut()
        .enumerate()
        .for_each(|(v, l)| *l += charges[rank[v] as usize]);

    Ok(RefineOutcome {
        rho_max: densities[best_prefix],
        best_prefix,
        width,
        densities: detailed.then_some(densities),
        charges: detailed.then_some(charges),
    })
}

/// Classic min-degree peeling: one load-ordered pass from zero loads.
pub fn charikar_peel(g: &Graph) -> RefineOutcome {
    let mut loads = LoadState::zeros(g.n());
    let order = load_peel_order(g, &loads);
    density_and_load_update(g, &order, &mut loads).expect("ordering built from this graph")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(edges: &[(u64, u64)]) -> Graph {
        Graph::from_edges(edges.iter().copied()).unwrap()
    }

    fn p3() -> Graph {
        g(&[(0, 1), (1, 2)])
    }

    fn k4() -> Graph {
        g(&[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
    }

    fn tri_pendant() -> Graph {
        g(&[(0, 1), (1, 2), (2, 0), (2, 3)])
    }

    fn d(e: u64, v: u64) -> Density {
        Density::new(e, v)
    }

    #[test]
    fn peel_order_examples() {
        let o = load_peel_order(&p3(), &LoadState::zeros(3));
        assert_eq!(o.perm(), &[0, 2, 1]);
        assert_eq!(o.kind(), OrderKind::LoadPeel);
        assert_eq!(load_peel_order(&k4(), &LoadState::zeros(4)).perm(), &[0, 1, 2, 3]);
        let loads = LoadState::from_vec(vec![0, 0, 0, 10]);
        assert_eq!(load_peel_order(&tri_pendant(), &loads).perm(), &[0, 1, 2, 3]);
    }

    #[test]
    fn single_batch_peels_one_at_a_time() {
        // keys 1,2,1: v0 first; then v1 drops to key 1 and ties with v2 -> v1 (smaller id)
        let o = load_peel_order_with(&p3(), &LoadState::zeros(3), PeelBatch::Single);
        assert_eq!(o.perm(), &[0, 1, 2]);
    }

    #[test]
    fn sort_order_examples() {
        let o = load_sort_order(&LoadState::from_vec(vec![5, 2, 7, 2]));
        assert_eq!(o.perm(), &[1, 3, 0, 2]);
        assert_eq!(load_sort_order(&LoadState::zeros(4)).perm(), &[0, 1, 2, 3]);
        assert_eq!(load_sort_order(&LoadState::from_vec(vec![1, 1, 0])).perm(), &[2, 0, 1]);
        // wide key range takes the comparison-sort path
        let wide = LoadState::from_vec(vec![u64::MAX / 2, 3, 1 << 40, 3]);
        assert_eq!(load_sort_order(&wide).perm(), &[1, 3, 2, 0]);
        assert!(load_sort_order(&LoadState::zeros(0)).is_empty());
    }

    #[test]
    fn update_on_path() {
        let mut loads = LoadState::zeros(3);
        let order = VertexOrdering::new(vec![0, 1, 2], OrderKind::LoadPeel);
        let out = density_and_load_update_detailed(&p3(), &order, &mut loads).unwrap();
        assert_eq!(out.charges.unwrap(), vec![1, 1, 0]);
        assert_eq!(out.densities.unwrap(), vec![d(2, 3), d(1, 2), d(0, 1)]);
        assert_eq!(out.rho_max, d(2, 3));
        assert_eq!(out.best_prefix, 0);
        assert_eq!(out.width, 1);
        assert_eq!(loads.as_slice(), &[1, 1, 0]);
    }

    #[test]
    fn update_on_cycle_with_chord() {
        let h = g(&[(0, 1), (1, 2), (2, 3), (1, 3)]);
        let mut loads = LoadState::zeros(4);
        let order = VertexOrdering::new(vec![0, 1, 2, 3], OrderKind::LoadPeel);
        let out = density_and_load_update_detailed(&h, &order, &mut loads).unwrap();
        assert_eq!(out.charges.unwrap(), vec![1, 2, 1, 0]);
        assert_eq!(out.densities.unwrap(), vec![d(1, 1), d(1, 1), d(1, 2), d(0, 1)]);
        assert_eq!(out.rho_max, d(1, 1));
        assert_eq!(out.best_prefix, 0);
    }

    #[test]
    fn update_on_clique_any_order() {
        for perm in [vec![0, 1, 2, 3], vec![3, 1, 0, 2], vec![2, 3, 1, 0]] {
            let mut loads = LoadState::zeros(4);
            let order = VertexOrdering::new(perm, OrderKind::LoadSort);
            let out = density_and_load_update_detailed(&k4(), &order, &mut loads).unwrap();
            assert_eq!(out.charges.unwrap(), vec![3, 2, 1, 0]);
            assert_eq!(out.densities.unwrap(), vec![d(3, 2), d(1, 1), d(1, 2), d(0, 1)]);
            assert_eq!(out.rho_max, d(3, 2));
            assert_eq!(loads.total(), 6);
        }
    }

    #[test]
    fn update_rejects_bad_orderings() {
        let mut loads = LoadState::zeros(3);
        let short = VertexOrdering::new(vec![0, 1], OrderKind::LoadSort);
        assert_eq!(
            density_and_load_update(&p3(), &short, &mut loads).unwrap_err(),
            RefineError::LengthMismatch { expected: 3, got: 2 }
        );
        let dup = VertexOrdering::new(vec![0, 1, 1], OrderKind::LoadSort);
        assert_eq!(
            density_and_load_update(&p3(), &dup, &mut loads).unwrap_err(),
            RefineError::NotPermutation(1)
        );
        let out_of_range = VertexOrdering::new(vec![0, 1, 9], OrderKind::LoadSort);
        assert_eq!(
            density_and_load_update(&p3(), &out_of_range, &mut loads).unwrap_err(),
            RefineError::NotPermutation(9)
        );
        let ok = VertexOrdering::new(vec![0, 1, 2], OrderKind::LoadSort);
        let mut wrong = LoadState::zeros(2);
        assert!(matches!(
            density_and_load_update(&p3(), &ok, &mut wrong),
            Err(RefineError::LoadsMismatch { .. })
        ));
        assert_eq!(loads.total(), 0);
    }

    #[test]
    fn charikar_examples() {
        let star = Graph::from_edges((1..=5).map(|i| (0, i))).unwrap();
        assert_eq!(charikar_peel(&star).rho_max, d(5, 6));
        assert_eq!(charikar_peel(&k4()).rho_max, d(3, 2));
        let t = charikar_peel(&tri_pendant());
        assert_eq!(t.rho_max, d(1, 1));
    }

    #[test]
    fn restrict_loads() {
        let l = LoadState::from_vec(vec![4, 5, 6]);
        assert_eq!(l.restrict(&[0, 2]).as_slice(), &[4, 6]);
    }
}
