//! Star-only placement/retrieve maps and labelled delivery arrays.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::{BTreeMap, HashMap};
use std::hash::Hash;

use crate::error::{Error, Result};

/// Rows x columns map whose entries are either a star or null. Stores the
/// sorted star columns of every row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarMap {
    rows: usize,
    cols: usize,
    stars: Vec<Vec<usize>>,
}

impl StarMap {
    pub fn new(cols: usize, mut stars: Vec<Vec<usize>>) -> Result<Self> {
        for (j, row) in stars.iter_mut().enumerate() {
            row.sort_unstable();
            if row.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Format(format!("row {j} lists a star column twice")));
            }
            if let Some(&c) = row.last() {
                if c >= cols {
                    return Err(Error::Format(format!(
                        "row {j} has star at column {c} outside 0..{cols}"
                    )));
                }
            }
        }
        Ok(Self {
            rows: stars.len(),
            cols,
            stars,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, j: usize) -> &[usize] {
        &self.stars[j]
    }

    pub fn is_star(&self, j: usize, k: usize) -> bool {
        self.stars[j].binary_search(&k).is_ok()
    }

    /// Sorted null columns of row `j`.
    pub fn complement(&self, j: usize) -> Vec<usize> {
        (0..self.cols).filter(|&k| !self.is_star(j, k)).collect()
    }

    pub fn column_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.cols];
        for row in &self.stars {
            for &k in row {
                counts[k] += 1;
            }
        }
        counts
    }

    pub fn total_stars(&self) -> usize {
        self.stars.iter().map(Vec::len).sum()
    }

    /// Cyclic right shift of every row by `shift` columns.
    pub fn rotate(&self, shift: usize) -> StarMap {
        if self.cols == 0 {
            return self.clone();
        }
        let stars = self
            .stars
            .iter()
            .map(|row| {
                let mut r: Vec<usize> = row.iter().map(|&k| (k + shift) % self.cols).collect();
                r.sort_unstable();
                r
            })
            .collect();
        StarMap {
            rows: self.rows,
            cols: self.cols,
            stars,
        }
    }
}

/// Multicast label carried by a delivery-array cell.
///
/// `Plain` is an ordinary PDA integer. `TypeI`/`TypeII` are the two label
/// families of the hybrid 2D scheme. `Sub` tags a label of a component
/// scheme with the sub-problem it belongs to (baseline: coded column and
/// user column; grouping: node group and user group).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Plain(u32),
    TypeI(u32),
    TypeII { s: u32, e: Vec<u32> },
    Sub { block: u32, group: u32, s: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DeliveryEntry {
    Star,
    /// Not yet filled; only present in partially built arrays.
    Null,
    /// The user neither retrieves nor needs this packet.
    Idle,
    Label(Label),
}

impl DeliveryEntry {
    pub fn label(&self) -> Option<&Label> {
        match self {
            DeliveryEntry::Label(l) => Some(l),
            _ => None,
        }
    }

    pub fn is_star(&self) -> bool {
        matches!(self, DeliveryEntry::Star)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum EntryRepr {
    Null(()),
    Mark(String),
    Int(u32),
    Sub {
        block: u32,
        group: u32,
        s: u32,
    },
    TypeII {
        s: u32,
        e: Vec<u32>,
    },
    TypeI {
        type1: u32,
    },
}

impl Serialize for DeliveryEntry {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = match self {
            DeliveryEntry::Star => EntryRepr::Mark("*".into()),
            DeliveryEntry::Idle => EntryRepr::Mark("-".into()),
            DeliveryEntry::Null => EntryRepr::Null(()),
            DeliveryEntry::Label(Label::Plain(s)) => EntryRepr::Int(*s),
            DeliveryEntry::Label(Label::TypeI(s)) => EntryRepr::TypeI { type1: *s },
            DeliveryEntry::Label(Label::TypeII { s, e }) => EntryRepr::TypeII {
                s: *s,
                e: e.clone(),
            },
            DeliveryEntry::Label(Label::Sub { block, group, s }) => EntryRepr::Sub {
                block: *block,
                group: *group,
                s: *s,
            },
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DeliveryEntry {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = EntryRepr::deserialize(deserializer)?;
        Ok(match repr {
            EntryRepr::Null(()) => DeliveryEntry::Null,
            EntryRepr::Mark(m) if m == "*" => DeliveryEntry::Star,
            EntryRepr::Mark(m) if m == "-" => DeliveryEntry::Idle,
            EntryRepr::Mark(m) => {
                return Err(serde::de::Error::custom(format!("unknown cell marker {m:?}")))
            }
            EntryRepr::Int(s) => DeliveryEntry::Label(Label::Plain(s)),
            EntryRepr::TypeI { type1 } => DeliveryEntry::Label(Label::TypeI(type1)),
            EntryRepr::TypeII { s, e } => DeliveryEntry::Label(Label::TypeII { s, e }),
            EntryRepr::Sub { block, group, s } => {
                DeliveryEntry::Label(Label::Sub { block, group, s })
            }
        })
    }
}

/// Rows x users array of stars and multicast labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeliveryArray {
    rows: usize,
    cols: usize,
    cells: Vec<DeliveryEntry>,
}

impl DeliveryArray {
    pub fn filled(rows: usize, cols: usize, entry: DeliveryEntry) -> Self {
        Self {
            rows,
            cols,
            cells: vec![entry; rows * cols],
        }
    }

    pub fn from_rows(cols: usize, rows: Vec<Vec<DeliveryEntry>>) -> Result<Self> {
        let n = rows.len();
        let mut cells = Vec::with_capacity(n * cols);
        for (j, r) in rows.into_iter().enumerate() {
            if r.len() != cols {
                return Err(Error::Format(format!(
                    "row {j} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            cells.extend(r);
        }
        Ok(Self {
            rows: n,
            cols,
            cells,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, j: usize, k: usize) -> &DeliveryEntry {
        &self.cells[j * self.cols + k]
    }

    pub fn set(&mut self, j: usize, k: usize, entry: DeliveryEntry) {
        self.cells[j * self.cols + k] = entry;
    }

    pub fn row(&self, j: usize) -> &[DeliveryEntry] {
        &self.cells[j * self.cols..(j + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<DeliveryEntry>> {
        (0..self.rows).map(|j| self.row(j).to_vec()).collect()
    }

    pub fn count(&self, pred: impl Fn(&DeliveryEntry) -> bool) -> usize {
        self.cells.iter().filter(|c| pred(c)).count()
    }

    pub fn star_map(&self) -> StarMap {
        let stars = (0..self.rows)
            .map(|j| {
                (0..self.cols)
                    .filter(|&k| self.get(j, k).is_star())
                    .collect()
            })
            .collect();
        StarMap {
            rows: self.rows,
            cols: self.cols,
            stars,
        }
    }

    pub fn rotate(&self, shift: usize) -> DeliveryArray {
        let mut out = self.clone();
        if self.cols == 0 {
            return out;
        }
        for j in 0..self.rows {
            for k in 0..self.cols {
                out.set(j, (k + shift) % self.cols, self.get(j, k).clone());
            }
        }
        out
    }

    /// Cells grouped by label, in canonical label order; cells in row-major
    /// order within each group.
    pub fn label_cells(&self) -> BTreeMap<&Label, Vec<(usize, usize)>> {
        let mut map: BTreeMap<&Label, Vec<(usize, usize)>> = BTreeMap::new();
        for j in 0..self.rows {
            for k in 0..self.cols {
                if let Some(l) = self.get(j, k).label() {
                    map.entry(l).or_default().push((j, k));
                }
            }
        }
        map
    }

    pub fn c3_violations(&self) -> Vec<PairViolation<Label>> {
        c3_violations(
            self.rows,
            self.cols,
            |j, k| self.get(j, k).is_star(),
            |j, k| self.get(j, k).label().cloned(),
        )
    }
}

/// Two equal labels whose 2x2 sub-array is not of the form `[s *; * s]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairViolation<L> {
    pub label: L,
    pub first: (usize, usize),
    pub second: (usize, usize),
}

/// Scan every pair of equal labels and report each pair that shares a row,
/// shares a column, or whose crossing cells are not both stars.
pub fn c3_violations<L: Clone + Eq + Hash>(
    rows: usize,
    cols: usize,
    is_star: impl Fn(usize, usize) -> bool,
    label_at: impl Fn(usize, usize) -> Option<L>,
) -> Vec<PairViolation<L>> {
    let mut groups: HashMap<L, Vec<(usize, usize)>> = HashMap::new();
    let mut order = Vec::new();
    for j in 0..rows {
        for k in 0..cols {
            if let Some(l) = label_at(j, k) {
                let cells = groups.entry(l.clone()).or_default();
                if cells.is_empty() {
                    order.push(l);
                }
                cells.push((j, k));
            }
        }
    }
    let mut out = Vec::new();
    for l in order {
        let cells = &groups[&l];
        for (a, &(j1, k1)) in cells.iter().enumerate() {
            for &(j2, k2) in &cells[a + 1..] {
                let ok = j1 != j2 && k1 != k2 && is_star(j1, k2) && is_star(j2, k1);
                if !ok {
                    out.push(PairViolation {
                        label: l.clone(),
                        first: (j1, k1),
                        second: (j2, k2),
                    });
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn star_map_rotation_wraps() {
        let m = StarMap::new(5, vec![vec![0, 2], vec![4]]).unwrap();
        let r = m.rotate(2);
        assert_eq!(r.row(0), &[2, 4]);
        assert_eq!(r.row(1), &[1]);
        assert_eq!(m.rotate(5), m);
    }

    #[test]
    fn star_map_rejects_out_of_range() {
        assert!(StarMap::new(3, vec![vec![3]]).is_err());
        assert!(StarMap::new(3, vec![vec![1, 1]]).is_err());
    }

    #[test]
    fn entry_json_forms() {
        let cells = vec![
            DeliveryEntry::Star,
            DeliveryEntry::Idle,
            DeliveryEntry::Null,
            DeliveryEntry::Label(Label::Plain(4)),
            DeliveryEntry::Label(Label::TypeI(7)),
            DeliveryEntry::Label(Label::TypeII {
                s: 1,
                e: vec![3, 2, 1],
            }),
            DeliveryEntry::Label(Label::Sub {
                block: 1,
                group: 2,
                s: 3,
            }),
        ];
        let text = serde_json::to_string(&cells).unwrap();
        assert_eq!(
            text,
            r#"["*","-",null,4,{"type1":7},{"s":1,"e":[3,2,1]},{"block":1,"group":2,"s":3}]"#
        );
        let back: Vec<DeliveryEntry> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cells);
    }

    #[test]
    fn c3_detects_same_row() {
        let v = c3_violations(1, 2, |_, _| false, |_, _| Some(1u32));
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].first, (0, 0));
        assert_eq!(v[0].second, (0, 1));
    }
}
