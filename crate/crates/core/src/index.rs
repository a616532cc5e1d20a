//! Cyclic index arithmetic shared by the 1D and 2D topologies.
//!
//! Positions are 0-based everywhere in this crate. Semantic values that the
//! construction formulas treat as elements of `[q] = {1..q}` (Partition PDA
//! vectors, MN subsets) are kept 1-based.

use serde::{Deserialize, Serialize};

/// `<a>_q`: residue of `a` modulo `q` taken in `1..=q`.
pub fn wrap1(a: i64, q: i64) -> i64 {
    let r = a.rem_euclid(q);
    if r == 0 {
        q
    } else {
        r
    }
}

/// Least non-negative residue of `a` modulo `q`.
pub fn modulo(a: i64, q: usize) -> usize {
    a.rem_euclid(q as i64) as usize
}

/// Cyclic distance `min(<a-b>, K-<a-b>)` between two 0-based positions on a
/// ring of `k` nodes.
pub fn ring_distance(a: usize, b: usize, k: usize) -> usize {
    let d = modulo(a as i64 - b as i64, k);
    d.min(k - d)
}

/// Node or user position on the `K1 x K2` torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Grid2dIndex {
    pub k1: usize,
    pub k2: usize,
}

impl Grid2dIndex {
    pub fn new(k1: usize, k2: usize) -> Self {
        Self { k1, k2 }
    }

    /// Row-major column position: `(0,0), (0,1), .., (0,K2-1), (1,0), ..`.
    pub fn flat(self, k2_len: usize) -> usize {
        self.k1 * k2_len + self.k2
    }

    pub fn from_flat(flat: usize, k2_len: usize) -> Self {
        Self {
            k1: flat / k2_len,
            k2: flat % k2_len,
        }
    }
}

/// Cache-nodes reachable from `user` on the `k1 x k2` torus: every node whose
/// row and column offsets behind the user are both below `l`.
pub fn accessible_nodes(user: Grid2dIndex, k1: usize, k2: usize, l: usize) -> Vec<Grid2dIndex> {
    let rows = offsets(user.k1, k1, l);
    let cols = offsets(user.k2, k2, l);
    let mut out = Vec::with_capacity(rows.len() * cols.len());
    for &r in &rows {
        for &c in &cols {
            out.push(Grid2dIndex::new(r, c));
        }
    }
    out.sort();
    out
}

/// Positions `p` on a ring of `k` with `mod(at - p, k) < l`, deduplicated.
pub fn offsets(at: usize, k: usize, l: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (0..l.min(k))
        .map(|d| modulo(at as i64 - d as i64, k))
        .collect();
    v.sort_unstable();
    v
}
