#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use gridcache::arrays::{DeliveryArray, Label};
use gridcache::macc1d::cwlzc_scheme;
use gridcache::macc2d::{baseline_scheme, grouping_scheme, hybrid_scheme};
use gridcache::pda::PdaArray;
use gridcache::sim::{DeliveryOptions, DemandVector, FileLibrary, Simulator};
use gridcache::{CodedCachingScheme, Macc1dScheme, Macc2dScheme, Rational};

/// Naive C3 scan: every pair of equal labels must sit in distinct rows and
/// columns with stars at both crossings. Returns the offending pairs.
pub fn brute_c3<L: Ord + Clone>(
    rows: usize,
    cols: usize,
    star: impl Fn(usize, usize) -> bool,
    label: impl Fn(usize, usize) -> Option<L>,
) -> Vec<((usize, usize), (usize, usize))> {
    let mut cells = Vec::new();
    for j in 0..rows {
        for k in 0..cols {
            if let Some(l) = label(j, k) {
                cells.push((l, j, k));
            }
        }
    }
    let mut bad = Vec::new();
    for a in 0..cells.len() {
        for b in a + 1..cells.len() {
            let (la, j1, k1) = &cells[a];
            let (lb, j2, k2) = &cells[b];
            if la != lb {
                continue;
            }
            if j1 == j2 || k1 == k2 || !star(*j1, *k2) || !star(*j2, *k1) {
                bad.push(((*j1, *k1), (*j2, *k2)));
            }
        }
    }
    bad
}

pub fn brute_c3_pda(p: &PdaArray) -> Vec<((usize, usize), (usize, usize))> {
    brute_c3(p.rows(), p.cols(), |j, k| p.get(j, k).is_star(), |j, k| p.get(j, k).label())
}

pub fn brute_c3_delivery(q: &DeliveryArray) -> Vec<((usize, usize), (usize, usize))> {
    brute_c3(q.rows(), q.cols(), |j, k| q.get(j, k).is_star(), |j, k| q.get(j, k).label().cloned())
}

pub fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

pub fn r(a: i64, b: i64) -> Rational {
    Rational::new(a, b)
}

pub fn int(a: i64) -> Rational {
    Rational::from_integer(a)
}

/// 2D instances with `K1 K2 <= 24` covering every scheme kind.
pub fn matrix_2d() -> Vec<Macc2dScheme> {
    let mut out = Vec::new();
    // Baseline with K2 <= L.
    for (k1, k2, l) in [(4, 2, 2), (3, 2, 2), (6, 2, 3), (5, 3, 3), (3, 3, 3)] {
        for t in 0..=k1 / l {
            out.push(baseline_scheme(k1, k2, l, int(t as i64), k1 * k2).unwrap());
        }
    }
    // Baseline with K2 > L, t on the grid {0, K2/L, ..}.
    for (k1, k2, l) in [(5, 4, 2), (4, 3, 2), (6, 4, 2), (5, 3, 2), (6, 3, 1)] {
        for t1 in 0..=k1 / l {
            let t = r((t1 * k2) as i64, l as i64);
            out.push(baseline_scheme(k1, k2, l, t, k1 * k2).unwrap());
        }
    }
    for (k1, k2, l) in [(4, 4, 2), (6, 4, 2), (4, 2, 2), (6, 3, 3), (2, 2, 2), (3, 3, 1)] {
        for t in 0..=k1 * k2 / (l * l) {
            out.push(grouping_scheme(k1, k2, l, t, k1 * k2).unwrap());
        }
    }
    for (k1, k2, l) in [(5, 3, 2), (4, 3, 2), (7, 3, 2), (6, 4, 3), (6, 3, 2), (8, 3, 2), (5, 4, 2), (4, 5, 2), (3, 4, 1)] {
        for t in 1..=k1 / l {
            out.push(hybrid_scheme(k1, k2, l, t, k1 * k2, None).unwrap());
        }
    }
    out
}

/// 1D instances with `K <= 8`.
pub fn matrix_1d() -> Vec<Macc1dScheme> {
    let mut out = Vec::new();
    for k in 1..=8 {
        for l in 1..=k {
            for t in 0..=k / l {
                out.push(cwlzc_scheme(k, l, t, k).unwrap());
            }
        }
    }
    out
}

/// Simulate the all-distinct demand; returns the measured load after
/// checking every user decodes.
pub fn simulate_all_distinct<S: CodedCachingScheme + ?Sized>(s: &S, packet_size: usize) -> Rational {
    let users = s.topology().users();
    let lib = FileLibrary::for_scheme(s, users, packet_size, 7);
    let sim = Simulator::new(s, &lib).expect("placement");
    let d = DemandVector::all_distinct(users, users).unwrap();
    let (log, verdicts) = sim.run(&d, DeliveryOptions::default()).unwrap();
    let failed: Vec<_> = verdicts.iter().filter(|v| !v.ok).collect();
    assert!(failed.is_empty(), "decode failures: {failed:?}");
    log.load()
}

/// Type II labels of a delivery array: the set of `s` values and of `e`
/// vectors, plus each label's multiplicity.
pub fn type2_census(q: &DeliveryArray) -> (BTreeSet<u32>, BTreeSet<Vec<u32>>, BTreeMap<Label, usize>) {
    let mut ss = BTreeSet::new();
    let mut es = BTreeSet::new();
    let mut mult = BTreeMap::new();
    for j in 0..q.rows() {
        for k in 0..q.cols() {
            if let Some(l @ Label::TypeII { s, e }) = q.get(j, k).label() {
                ss.insert(*s);
                es.insert(e.clone());
                *mult.entry(l.clone()).or_insert(0) += 1;
            }
        }
    }
    (ss, es, mult)
}

/// Every vector of `[q]^len` with 1-based entries.
pub fn all_vectors(q: u32, len: usize) -> BTreeSet<Vec<u32>> {
    let mut out = BTreeSet::new();
    let total = (q as usize).pow(len as u32);
    for mut idx in 0..total {
        let mut v = Vec::with_capacity(len);
        for _ in 0..len {
            v.push((idx % q as usize) as u32 + 1);
            idx /= q as usize;
        }
        out.insert(v);
    }
    out
}
