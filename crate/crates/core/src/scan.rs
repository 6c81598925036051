//! Parallel scan and reduction primitives.

use rayon::prelude::*;

const BLOCK: usize = 1 << 14;

/// `out[i] = a[i] + a[i + 1] + ... + a[n - 1]`.
///
/// Blocked two-pass scan: per-block totals, an exclusive scan over the
/// totals from the right, then an independent pass per block.
pub fn suffix_sums(a: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64; a.len()];
    if a.len() <= BLOCK {
        let mut acc = 0u64;
        for i in (0..a.len()).rev() {
            acc += a[i];
            out[i] = acc;
        }
        return out;
    }
    let totals: Vec<u64> = a.par_chunks(BLOCK).map(|c| c.iter().sum()).collect();
    let mut carry = vec![0u64; totals.len()];
    let mut acc = 0u64;
    for b in (0..totals.len()).rev() {
        carry[b] = acc;
        acc += totals[b];
    }
    out.par_chunks_mut(BLOCK)
        .zip(a.par_chunks(BLOCK))
        .zip(carry.par_iter())
        .for_each(|((dst, src), &c)| {
            let mut acc = c;
            for i in (0..src.len()).rev() {
                acc += src[i];
                dst[i] = acc;
            }
        });
    out
}

/// Index of the first maximum under `Ord`, or `None` for an empty slice.
pub fn first_argmax<T: Ord + Sync>(xs: &[T]) -> Option<usize> {
    (0..xs.len()).into_par_iter().reduce_with(|i, j| {
        // i and j come from disjoint ranges; keep the larger value, then the smaller index.
        match xs[i].cmp(&xs[j]) {
            std::cmp::Ordering::Less => j,
            std::cmp::Ordering::Greater => i,
            std::cmp::Ordering::Equal => i.min(j),
        }
    })
}
