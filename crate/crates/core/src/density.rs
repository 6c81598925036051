//! Exact subgraph densities.
//!
//! A density is kept as the raw `(edges, vertices)` pair it was measured
//! from. Comparisons cross-multiply in 128-bit integers, so two densities
//! compare equal exactly when their rational values are equal (`6/4 == 3/2`).

use std::cmp::Ordering;
use std::fmt;

#[derive(Clone, Copy, Debug)]
pub struct Density {
    edges: u64,
    verts: u64,
}

impl Density {
    /// `edges / verts`. Panics if `verts == 0`.
    pub fn new(edges: u64, verts: u64) -> Self {
        assert!(verts >= 1, "density of an empty vertex set");
        Density { edges, verts }
    }

    pub const fn zero() -> Self {
        Density { edges: 0, verts: 1 }
    }

    pub fn edges(&self) -> u64 {
        self.edges
    }

    pub fn verts(&self) -> u64 {
        self.verts
    }

    pub fn to_f64(&self) -> f64 {
        self.edges as f64 / self.verts as f64
    }

    /// Numerator and denominator in lowest terms.
    pub fn reduced(&self) -> (u64, u64) {
        let g = gcd(self.edges, self.verts);
        (self.edges / g, self.verts / g)
    }

    /// Smallest integer `k` with `k >= edges / verts`.
    pub fn ceil(&self) -> u64 {
        self.edges.div_ceil(self.verts)
    }

    /// Decimal rendering with `decimals` fractional digits, rounded half to even.
    pub fn format_fixed(&self, decimals: u32) -> String {
        let scale = 10u128.pow(decimals);
        let num = self.edges as u128 * scale;
        let den = self.verts as u128;
        let mut q = num / den;
        let r = num % den;
        if 2 * r > den || (2 * r == den && q % 2 == 1) {
            q += 1;
        }
        if decimals == 0 {
            return q.to_string();
        }
        format!(
            "{}.{:0width$}",
            q / scale,
            q % scale,
            width = decimals as usize
        )
    }

    /// True when `edges / verts > rhs` for the integer `rhs`.
    pub fn exceeds(&self, rhs: u64) -> bool {
        self.edges as u128 > rhs as u128 * self.verts as u128
    }
}

impl Default for Density {
    fn default() -> Self {
        Density::zero()
    }
}

impl PartialEq for Density {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Density {}

impl PartialOrd for Density {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Density {
    fn cmp(&self, other: &Self) -> Ordering {
        let lhs = self.edges as u128 * other.verts as u128;
        let rhs = other.edges as u128 * self.verts as u128;
        lhs.cmp(&rhs)
    }
}

impl fmt::Display for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (n, d) = self.reduced();
        write!(f, "{n}/{d}")
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}
