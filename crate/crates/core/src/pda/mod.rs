//! Placement delivery arrays.
//!
//! A `(K, F, Z, S)` PDA is an `F x K` array over `{*} ∪ [S]`: columns are
//! users, rows are packets, a star means the user caches that packet of every
//! file, and each integer is one multicast message.

mod partition;
mod verify;

use itertools::Itertools;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::HashMap;

use crate::error::{Error, Result};

pub use partition::{construct_partition_pda, PartitionFamily};
pub use verify::{gain_profile, verify_pda, PdaReport, VerifyOptions, Violation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PdaEntry {
    Star,
    Label(u32),
}

impl PdaEntry {
    pub fn is_star(self) -> bool {
        matches!(self, PdaEntry::Star)
    }

    pub fn label(self) -> Option<u32> {
        match self {
            PdaEntry::Label(s) => Some(s),
            PdaEntry::Star => None,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum EntryRepr {
    Star(String),
    Label(u32),
}

impl Serialize for PdaEntry {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            PdaEntry::Star => serializer.serialize_str("*"),
            PdaEntry::Label(s) => serializer.serialize_u32(*s),
        }
    }
}

impl<'de> Deserialize<'de> for PdaEntry {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        match EntryRepr::deserialize(deserializer)? {
            EntryRepr::Star(s) if s == "*" => Ok(PdaEntry::Star),
            EntryRepr::Star(s) => Err(serde::de::Error::custom(format!(
                "expected \"*\" or an integer label, got {s:?}"
            ))),
            EntryRepr::Label(s) => Ok(PdaEntry::Label(s)),
        }
    }
}

/// `F x K` array with its declared `Z` and `S`.
///
/// `row_keys`, when present, carries the semantic index of every row: the
/// 1-based `t`-subset for MN arrays, the vector `f` for Partition arrays.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PdaJson", into = "PdaJson")]
pub struct PdaArray {
    rows: usize,
    cols: usize,
    z: usize,
    s: usize,
    entries: Vec<PdaEntry>,
    row_keys: Option<Vec<Vec<u32>>>,
}

#[derive(Serialize, Deserialize)]
struct PdaJson {
    rows: usize,
    cols: usize,
    #[serde(rename = "Z")]
    z: usize,
    #[serde(rename = "S")]
    s: usize,
    entries: Vec<Vec<PdaEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    row_keys: Option<Vec<Vec<u32>>>,
}

impl TryFrom<PdaJson> for PdaArray {
    type Error = Error;

    fn try_from(j: PdaJson) -> Result<Self> {
        if j.entries.len() != j.rows {
            return Err(Error::Format(format!(
                "declared {} rows but found {}",
                j.rows,
                j.entries.len()
            )));
        }
        let mut p = PdaArray::from_rows(j.cols, j.z, j.s, j.entries)?;
        if let Some(keys) = j.row_keys {
            p = p.with_row_keys(keys)?;
        }
        Ok(p)
    }
}

impl From<PdaArray> for PdaJson {
    fn from(p: PdaArray) -> Self {
        PdaJson {
            rows: p.rows,
            cols: p.cols,
            z: p.z,
            s: p.s,
            entries: p.row_vecs(),
            row_keys: p.row_keys,
        }
    }
}

impl PdaArray {
    pub fn from_rows(cols: usize, z: usize, s: usize, rows: Vec<Vec<PdaEntry>>) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * cols);
        for (j, r) in rows.into_iter().enumerate() {
            if r.len() != cols {
                return Err(Error::Format(format!(
                    "row {j} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            entries.extend(r);
        }
        Ok(Self {
            rows: n,
            cols,
            z,
            s,
            entries,
            row_keys: None,
        })
    }

    pub fn with_row_keys(mut self, keys: Vec<Vec<u32>>) -> Result<Self> {
        if keys.len() != self.rows {
            return Err(Error::Format(format!(
                "{} row keys for {} rows",
                keys.len(),
                self.rows
            )));
        }
        self.row_keys = Some(keys);
        Ok(self)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Declared stars per column.
    pub fn z(&self) -> usize {
        self.z
    }

    /// Declared number of distinct labels.
    pub fn s(&self) -> usize {
        self.s
    }

    pub fn get(&self, j: usize, k: usize) -> PdaEntry {
        self.entries[j * self.cols + k]
    }

    pub fn row(&self, j: usize) -> &[PdaEntry] {
        &self.entries[j * self.cols..(j + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<PdaEntry>> {
        (0..self.rows).map(|j| self.row(j).to_vec()).collect()
    }

    pub fn row_keys(&self) -> Option<&[Vec<u32>]> {
        self.row_keys.as_deref()
    }

    /// Sorted star columns of row `j` (the set `A_j`).
    pub fn star_columns(&self, j: usize) -> Vec<usize> {
        (0..self.cols).filter(|&k| self.get(j, k).is_star()).collect()
    }

    pub fn non_star_columns(&self, j: usize) -> Vec<usize> {
        (0..self.cols).filter(|&k| !self.get(j, k).is_star()).collect()
    }

    /// Memory ratio `Z/F` of the shared-link scheme the array defines.
    pub fn memory_ratio(&self) -> crate::Rational {
        crate::Rational::new(self.z as i64, self.rows as i64)
    }

    /// Load `S/F` of the shared-link scheme the array defines.
    pub fn load(&self) -> crate::Rational {
        crate::Rational::new(self.s as i64, self.rows as i64)
    }

    #[cfg(test)]
    pub(crate) fn set(&mut self, j: usize, k: usize, e: PdaEntry) {
        self.entries[j * self.cols + k] = e;
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// MN PDA for `K` users and caching parameter `t`.
///
/// Rows are the `t`-subsets of `[K]` in lexicographic order; entry `(T, k)`
/// is a star iff `k ∈ T`, otherwise the label of `T ∪ {k}` where the
/// `(t+1)`-subsets are numbered `1..` in lexicographic order. `t = 0` gives
/// the single-row array `1 2 .. K`.
pub fn construct_mn_pda(k: usize, t: usize) -> Result<PdaArray> {
    if k == 0 {
        return Err(Error::Infeasible("MN PDA needs K >= 1".into()));
    }
    if t > k {
        return Err(Error::Infeasible(format!("MN PDA needs t <= K, got t={t}, K={k}")));
    }
    let labels: HashMap<Vec<usize>, u32> = (0..k)
        .combinations(t + 1)
        .enumerate()
        .map(|(i, c)| (c, i as u32 + 1))
        .collect();
    let subsets: Vec<Vec<usize>> = (0..k).combinations(t).collect();
    let mut rows = Vec::with_capacity(subsets.len());
    for subset in &subsets {
        let row = (0..k)
            .map(|col| {
                if subset.contains(&col) {
                    PdaEntry::Star
                } else {
                    let mut union = subset.clone();
                    union.push(col);
                    union.sort_unstable();
                    PdaEntry::Label(labels[&union])
                }
            })
            .collect();
        rows.push(row);
    }
    let z = if t == 0 { 0 } else { binomial(k - 1, t - 1) };
    let keys = subsets
        .iter()
        .map(|s| s.iter().map(|&x| x as u32 + 1).collect())
        .collect();
    PdaArray::from_rows(k, z, binomial(k, t + 1), rows)?.with_row_keys(keys)
}
