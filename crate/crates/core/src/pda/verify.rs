//! Checks for the PDA conditions C1-C5.

use serde::Serialize;
use std::collections::BTreeMap;

use crate::arrays::c3_violations;
use crate::error::{Error, Result};
use crate::macc1d::{node_columns, retrieve_runs};

use super::PdaArray;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Stars per row, enables C4 (and C5 together with `l`).
    pub t: Option<usize>,
    /// Access span, enables C5.
    pub l: Option<usize>,
}

/// One located failure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "condition", rename_all = "snake_case")]
pub enum Violation {
    C1 { col: usize, expected: usize, found: usize },
    C2Missing { label: u32 },
    C2OutOfRange { label: u32, row: usize, col: usize },
    C3 { label: u32, first: (usize, usize), second: (usize, usize) },
    C4 { row: usize, expected: usize, found: usize },
    C5 { label: u32, first: (usize, usize), second: (usize, usize) },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PdaReport {
    pub c1_ok: bool,
    pub c2_ok: bool,
    pub c3_ok: bool,
    pub c4_ok: Option<bool>,
    pub c5_ok: Option<bool>,
    /// Label multiplicity -> number of labels with that multiplicity.
    pub gain_histogram: BTreeMap<usize, usize>,
    pub violations: Vec<Violation>,
}

impl PdaReport {
    /// True when every evaluated condition holds.
    pub fn all_ok(&self) -> bool {
        self.c1_ok
            && self.c2_ok
            && self.c3_ok
            && self.c4_ok.unwrap_or(true)
            && self.c5_ok.unwrap_or(true)
    }
}

/// Multiplicity of every label.
pub fn gain_profile(p: &PdaArray) -> BTreeMap<u32, usize> {
    let mut g = BTreeMap::new();
    for j in 0..p.rows() {
        for &e in p.row(j) {
            if let Some(s) = e.label() {
                *g.entry(s).or_insert(0) += 1;
            }
        }
    }
    g
}

pub fn verify_pda(p: &PdaArray, opts: VerifyOptions) -> Result<PdaReport> {
    if opts.l.is_some() && opts.t.is_none() {
        return Err(Error::Usage("checking C5 needs t as well as L".into()));
    }
    let mut violations = Vec::new();

    for k in 0..p.cols() {
        let found = (0..p.rows()).filter(|&j| p.get(j, k).is_star()).count();
        if found != p.z() {
            violations.push(Violation::C1 {
                col: k,
                expected: p.z(),
                found,
            });
        }
    }
    let c1_ok = violations.is_empty();

    let profile = gain_profile(p);
    let before = violations.len();
    for j in 0..p.rows() {
        for k in 0..p.cols() {
            if let Some(s) = p.get(j, k).label() {
                if s == 0 || s as usize > p.s() {
                    violations.push(Violation::C2OutOfRange { label: s, row: j, col: k });
                }
            }
        }
    }
    for s in 1..=p.s() as u32 {
        if !profile.contains_key(&s) {
            violations.push(Violation::C2Missing { label: s });
        }
    }
    let c2_ok = violations.len() == before;

    let pairs = c3_violations(
        p.rows(),
        p.cols(),
        |j, k| p.get(j, k).is_star(),
        |j, k| p.get(j, k).label(),
    );
    let c3_ok = pairs.is_empty();
    violations.extend(pairs.into_iter().map(|v| Violation::C3 {
        label: v.label,
        first: v.first,
        second: v.second,
    }));

    let c4_ok = opts.t.map(|t| {
        let before = violations.len();
        for j in 0..p.rows() {
            let found = p.row(j).iter().filter(|e| e.is_star()).count();
            if found != t {
                violations.push(Violation::C4 { row: j, expected: t, found });
            }
        }
        violations.len() == before
    });

    let c5_ok = match (opts.t, opts.l) {
        (Some(t), Some(l)) => {
            let found = c5_violations(p, t, l);
            let ok = found.is_empty();
            violations.extend(found);
            Some(ok)
        }
        _ => None,
    };

    let mut gain_histogram = BTreeMap::new();
    for &g in profile.values() {
        *gain_histogram.entry(g).or_insert(0) += 1;
    }

    Ok(PdaReport {
        c1_ok,
        c2_ok,
        c3_ok,
        c4_ok,
        c5_ok,
        gain_histogram,
        violations,
    })
}

/// For equal labels at `(j1,k1)` and `(j2,k2)`: with `i1` the rank of `k1`
/// in `A_{j1} ∪ {k1}`, the shifted column `k1 + (i1-1)(L-1)` must lie in the
/// user-retrieve set of row `j2`, and symmetrically.
fn c5_violations(p: &PdaArray, t: usize, l: usize) -> Vec<Violation> {
    let k = p.cols() + t * (l.max(1) - 1);
    let retrieve: Vec<Vec<bool>> = (0..p.rows())
        .map(|j| {
            let mut mask = vec![false; k];
            let c = node_columns(&p.star_columns(j), l);
            for run in retrieve_runs(&c, l, k) {
                for x in run {
                    mask[x] = true;
                }
            }
            mask
        })
        .collect();
    let shifted = |j: usize, col: usize| {
        let rank = p.row(j)[..col].iter().filter(|e| e.is_star()).count();
        col + rank * (l.max(1) - 1)
    };
    let mut cells: BTreeMap<u32, Vec<(usize, usize)>> = BTreeMap::new();
    for j in 0..p.rows() {
        for c in 0..p.cols() {
            if let Some(s) = p.get(j, c).label() {
                cells.entry(s).or_default().push((j, c));
            }
        }
    }
    let mut out = Vec::new();
    for (s, cells) in cells {
        for (a, &(j1, k1)) in cells.iter().enumerate() {
            for &(j2, k2) in &cells[a + 1..] {
                let ok = retrieve[j2][shifted(j1, k1) % k] && retrieve[j1][shifted(j2, k2) % k];
                if !ok {
                    out.push(Violation::C5 {
                        label: s,
                        first: (j1, k1),
                        second: (j2, k2),
                    });
                }
            }
        }
    }
    out
}
