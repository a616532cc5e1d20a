//! The Partition PDA family.

use crate::error::{Error, Result};
use crate::index::wrap1;

use super::{PdaArray, PdaEntry};

/// `m` sub-arrays of shape `q^m x q` sharing one label space.
///
/// Rows are vectors `f ∈ [q]^m` (1-based values), enumerated with the first
/// coordinate varying fastest. Sub-array `i` has a star at `(f, k)` iff `k`
/// lies in the run `B_{f_i} = {f_i, <f_i+1>_q, .., <f_i+z-1>_q}`; every other
/// cell holds the vector `(f_1, .., f_{i-1}, k, f_{i+1}, .., f_m, <f_i-k>_q)`
/// mapped to an integer by [`PartitionFamily::phi`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionFamily {
    q: usize,
    z: usize,
    m: usize,
    sub_arrays: Vec<PdaArray>,
}

pub fn construct_partition_pda(q: usize, z: usize, m: usize) -> Result<PartitionFamily> {
    if z == 0 || z >= q {
        return Err(Error::Infeasible(format!(
            "Partition PDA needs 0 < z < q, got q={q}, z={z}"
        )));
    }
    if m == 0 {
        return Err(Error::Infeasible("Partition PDA needs m >= 1".into()));
    }
    let rows = q
        .checked_pow(m as u32)
        .filter(|&r| r.checked_mul(q * m).is_some() && r <= u32::MAX as usize / q)
        .ok_or_else(|| Error::Infeasible(format!("q^m too large for q={q}, m={m}")))?;
    let keys: Vec<Vec<u32>> = (0..rows).map(|r| row_vector(r, q, m)).collect();
    let shell = PartitionFamily {
        q,
        z,
        m,
        sub_arrays: Vec::new(),
    };
    let z_col = z * rows / q;
    let s = rows * (q - z);
    let mut sub_arrays = Vec::with_capacity(m);
    for i in 0..m {
        let body = keys
            .iter()
            .map(|f| {
                (1..=q as u32)
                    .map(|k| match shell.vector_label(i, f, k) {
                        None => PdaEntry::Star,
                        Some(v) => PdaEntry::Label(shell.phi(&v)),
                    })
                    .collect()
            })
            .collect();
        sub_arrays.push(PdaArray::from_rows(q, z_col, s, body)?.with_row_keys(keys.clone())?);
    }
    Ok(PartitionFamily { sub_arrays, ..shell })
}

/// Row `r` as a 1-based vector, first coordinate fastest.
fn row_vector(mut r: usize, q: usize, m: usize) -> Vec<u32> {
    let mut f = Vec::with_capacity(m);
    for _ in 0..m {
        f.push((r % q) as u32 + 1);
        r /= q;
    }
    f
}

impl PartitionFamily {
    pub fn q(&self) -> usize {
        self.q
    }

    pub fn z(&self) -> usize {
        self.z
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Rows per sub-array, `q^m`.
    pub fn rows(&self) -> usize {
        self.sub_arrays[0].rows()
    }

    /// Number of distinct labels, `q^m (q - z)`.
    pub fn label_count(&self) -> usize {
        self.rows() * (self.q - self.z)
    }

    pub fn sub_array(&self, i: usize) -> &PdaArray {
        &self.sub_arrays[i]
    }

    pub fn sub_arrays(&self) -> &[PdaArray] {
        &self.sub_arrays
    }

    /// 1-based vector `f` of row `r`.
    pub fn row_vector(&self, r: usize) -> Vec<u32> {
        row_vector(r, self.q, self.m)
    }

    /// Row index of the 1-based vector `f`.
    pub fn row_index(&self, f: &[u32]) -> usize {
        f.iter()
            .rev()
            .fold(0, |acc, &x| acc * self.q + (x as usize - 1))
    }

    /// The run `B_a` of 0-based columns starred when the relevant coordinate
    /// equals `a` (1-based).
    pub fn run(&self, a: u32) -> Vec<usize> {
        let mut v: Vec<usize> = (0..self.z)
            .map(|d| wrap1(a as i64 + d as i64, self.q as i64) as usize - 1)
            .collect();
        v.sort_unstable();
        v
    }

    /// Vector label of sub-array `i` (0-based) at row `f` and 1-based column
    /// `k`, or `None` for a star.
    pub fn vector_label(&self, i: usize, f: &[u32], k: u32) -> Option<Vec<u32>> {
        let q = self.q as i64;
        let fi = f[i] as i64;
        let offset = (k as i64 - fi).rem_euclid(q);
        if (offset as usize) < self.z {
            return None;
        }
        let mut v = f.to_vec();
        v[i] = k;
        v.push(wrap1(fi - k as i64, q) as u32);
        Some(v)
    }

    /// `φ(v) = 1 + Σ_{i≤m} (v_i - 1) q^{i-1} + (v_{m+1} - 1) q^m`.
    pub fn phi(&self, v: &[u32]) -> u32 {
        let mut acc = 0usize;
        let mut scale = 1usize;
        for &x in v {
            acc += (x as usize - 1) * scale;
            scale *= self.q;
        }
        acc as u32 + 1
    }

    /// Inverse of [`Self::phi`].
    pub fn vector_of(&self, label: u32) -> Vec<u32> {
        let mut rest = label as usize - 1;
        let mut v = row_vector(rest % self.rows(), self.q, self.m);
        rest /= self.rows();
        v.push(rest as u32 + 1);
        v
    }

    /// `(label, vector)` pairs for every label in ascending order.
    pub fn phi_table(&self) -> Vec<(u32, Vec<u32>)> {
        (1..=self.label_count() as u32)
            .map(|s| (s, self.vector_of(s)))
            .collect()
    }

    /// 0-based column of the tag-star of sub-array `i` at row `r`.
    pub fn tag_star(&self, i: usize, r: usize) -> usize {
        self.row_vector(r)[i] as usize - 1
    }

    /// Side-by-side concatenation: the `q^m x mq` PDA.
    pub fn combined(&self) -> PdaArray {
        let body = (0..self.rows())
            .map(|r| {
                self.sub_arrays
                    .iter()
                    .flat_map(|a| a.row(r).iter().copied())
                    .collect()
            })
            .collect();
        let keys = (0..self.rows()).map(|r| self.row_vector(r)).collect();
        PdaArray::from_rows(
            self.m * self.q,
            self.sub_arrays[0].z(),
            self.label_count(),
            body,
        )
        .and_then(|p| p.with_row_keys(keys))
        .expect("sub-arrays share their shape")
    }
}
