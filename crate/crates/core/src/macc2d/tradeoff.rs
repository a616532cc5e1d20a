//! Closed-form loads, corner points and lower convex envelopes.
//!
//! Everything here is generic over [`Scalar`]; persisted values use
//! [`crate::Rational`].

use crate::error::{Error, Result};
use crate::Scalar;

use super::SchemeFamily;

/// One achievable `(M/N, R)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct TradeoffPoint<T> {
    pub memory_ratio: T,
    /// `M = (M/N) N` in files.
    pub memory: T,
    pub load: T,
    pub kind: SchemeFamily,
    /// Caching parameter `t = K1 K2 M/N`.
    pub t: T,
}

fn n<T: Scalar>(v: usize) -> T {
    T::from_usize_exact(v)
}

/// Baseline: `(K1K2 - tLK2)/(t+1)` when `K2 <= L`, otherwise
/// `(K1K2 - tL^2)/(γt+1)` with `γ = L/K2`.
pub fn baseline_load<T: Scalar>(k1: usize, k2: usize, l: usize, t: T) -> T {
    let total: T = n(k1 * k2);
    if k2 <= l {
        (total - t.clone() * n(l * k2)) / (t + T::one())
    } else {
        let gamma = n::<T>(l) / n(k2);
        (total - t.clone() * n(l * l)) / (gamma * t + T::one())
    }
}

/// Grouping: `(K1K2 - tL^2)/(t+1)`.
pub fn grouping_load<T: Scalar>(k1: usize, k2: usize, l: usize, t: T) -> T {
    (n::<T>(k1 * k2) - t.clone() * n(l * l)) / (t + T::one())
}

/// Hybrid with an outer PDA of `F1'` rows and `S1'` labels:
/// `(K2tL - tL^2)/t + K2 S1'/F1'`.
pub fn hybrid_load_general<T: Scalar>(k2: usize, l: usize, t: usize, s1: usize, f1: usize) -> T {
    (n::<T>(k2 * t * l) - n(t * l * l)) / n(t) + n::<T>(k2 * s1) / n(f1)
}

/// Hybrid with the MN outer PDA: `(K2tL - tL^2)/t + (K1K2 - K2tL)/(t+1)`.
pub fn hybrid_load<T: Scalar>(k1: usize, k2: usize, l: usize, t: usize) -> T {
    (n::<T>(k2 * t * l) - n(t * l * l)) / n(t) + (n::<T>(k1 * k2) - n(k2 * t * l)) / n(t + 1)
}

fn point<T: Scalar>(k1: usize, k2: usize, nf: usize, t: T, load: T, kind: SchemeFamily) -> TradeoffPoint<T> {
    let ratio = t.clone() / n(k1 * k2);
    TradeoffPoint {
        memory: ratio.clone() * n(nf),
        memory_ratio: ratio,
        load,
        kind,
        t,
    }
}

fn ratio_point<T: Scalar>(k1: usize, k2: usize, nf: usize, ratio: T, kind: SchemeFamily) -> TradeoffPoint<T> {
    point(k1, k2, nf, ratio * n(k1 * k2), T::zero(), kind)
}

/// Every corner point of one scheme family, ascending in memory.
pub fn corner_points<T: Scalar>(
    k1: usize,
    k2: usize,
    l: usize,
    nf: usize,
    kind: SchemeFamily,
) -> Result<Vec<TradeoffPoint<T>>> {
    if l == 0 || l > k1 || k1 == 0 || k2 == 0 {
        return Err(Error::Infeasible(format!(
            "need 1 <= L <= K1, got K1={k1}, K2={k2}, L={l}"
        )));
    }
    let mut out = Vec::new();
    match kind {
        SchemeFamily::Baseline => {
            for t1 in 0..=k1 / l {
                let t = if k2 <= l {
                    n::<T>(t1)
                } else {
                    n::<T>(t1 * k2) / n(l)
                };
                out.push(point(k1, k2, nf, t.clone(), baseline_load(k1, k2, l, t), kind));
            }
            let full = if k2 <= l { k2 * l } else { l * l };
            let full_ratio = T::one() / n(full);
            if out.last().map_or(true, |p| p.memory_ratio < full_ratio) {
                out.push(ratio_point(k1, k2, nf, full_ratio, kind));
            }
        }
        SchemeFamily::Grouping => {
            if k1 % l != 0 || k2 % l != 0 {
                return Err(Error::Infeasible(format!(
                    "grouping needs L | K1 and L | K2, got K1={k1}, K2={k2}, L={l}"
                )));
            }
            for t in 0..=k1 * k2 / (l * l) {
                out.push(point(k1, k2, nf, n(t), grouping_load(k1, k2, l, n::<T>(t)), kind));
            }
        }
        SchemeFamily::Hybrid => {
            if k2 <= l {
                return Err(Error::Infeasible(format!(
                    "hybrid needs K2 > L, got K2={k2}, L={l}"
                )));
            }
            out.push(point(k1, k2, nf, T::zero(), n(k1 * k2), kind));
            for t in 1..=k1 / l {
                out.push(point(k1, k2, nf, n(t), hybrid_load(k1, k2, l, t), kind));
            }
            out.push(ratio_point(k1, k2, nf, T::one() / n(l * l), kind));
        }
    }
    Ok(out)
}

/// Lower convex envelope, ascending in memory, ending at the first vertex
/// of minimum load.
pub fn lower_convex_envelope<T: Scalar>(points: &[TradeoffPoint<T>]) -> Vec<TradeoffPoint<T>> {
    let mut sorted: Vec<TradeoffPoint<T>> = points.to_vec();
    sorted.sort_by(|a, b| {
        a.memory_ratio
            .partial_cmp(&b.memory_ratio)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.load.partial_cmp(&b.load).unwrap_or(std::cmp::Ordering::Equal))
    });
    sorted.dedup_by(|later, earlier| later.memory_ratio == earlier.memory_ratio);

    let cross = |a: &TradeoffPoint<T>, b: &TradeoffPoint<T>, c: &TradeoffPoint<T>| {
        (b.memory_ratio.clone() - a.memory_ratio.clone()) * (c.load.clone() - a.load.clone())
            - (b.load.clone() - a.load.clone()) * (c.memory_ratio.clone() - a.memory_ratio.clone())
    };
    let mut hull: Vec<TradeoffPoint<T>> = Vec::new();
    for p in sorted {
        while hull.len() >= 2 && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], &p) <= T::zero() {
            hull.pop();
        }
        hull.push(p);
    }
    if let Some(best) = (0..hull.len()).fold(None, |acc: Option<usize>, i| match acc {
        Some(b) if hull[b].load <= hull[i].load => Some(b),
        _ => Some(i),
    }) {
        hull.truncate(best + 1);
    }
    hull
}

/// Load of the envelope at memory ratio `x` by linear interpolation; beyond
/// the last vertex the load stays at its minimum. `None` below the first
/// vertex.
pub fn envelope_at<T: Scalar>(envelope: &[TradeoffPoint<T>], x: &T) -> Option<T> {
    let first = envelope.first()?;
    if *x < first.memory_ratio {
        return None;
    }
    for w in envelope.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if *x <= b.memory_ratio {
            let span = b.memory_ratio.clone() - a.memory_ratio.clone();
            let frac = (x.clone() - a.memory_ratio.clone()) / span;
            return Some(a.load.clone() + frac * (b.load.clone() - a.load.clone()));
        }
    }
    envelope.last().map(|p| p.load.clone())
}

/// Union of the corner points of every feasible requested family and their
/// lower convex envelope. Infeasible families are skipped.
pub fn tradeoff_envelope<T: Scalar>(
    k1: usize,
    k2: usize,
    l: usize,
    nf: usize,
    kinds: &[SchemeFamily],
) -> Vec<TradeoffPoint<T>> {
    let all: Vec<TradeoffPoint<T>> = kinds
        .iter()
        .filter_map(|&kind| corner_points(k1, k2, l, nf, kind).ok())
        .flatten()
        .collect();
    lower_convex_envelope(&all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn r(a: i64, b: i64) -> Rational {
        Rational::new(a, b)
    }

    #[test]
    fn closed_forms() {
        assert_eq!(baseline_load(12, 8, 2, r(8, 1)), r(64, 3));
        assert_eq!(baseline_load(4, 4, 2, r(1, 1)), r(8, 1));
        assert_eq!(baseline_load(5, 4, 2, r(0, 1)), r(20, 1));
        assert_eq!(grouping_load(4, 4, 2, r(1, 1)), r(6, 1));
        assert_eq!(grouping_load(6, 4, 2, r(3, 1)), r(3, 1));
        assert_eq!(hybrid_load::<Rational>(5, 3, 2, 2), r(3, 1));
        assert_eq!(hybrid_load::<Rational>(12, 8, 2, 8), r(12, 1) + r(96 - 128, 9));
        assert_eq!(hybrid_load_general::<Rational>(3, 2, 2, 1, 3), r(3, 1));
    }

    #[test]
    fn float_and_exact_agree() {
        let exact = baseline_load(12, 8, 2, r(8, 1));
        let float = baseline_load(12, 8, 2, 8.0f64);
        assert!((float - 64.0 / 3.0).abs() < 1e-12);
        assert_eq!(exact, r(64, 3));
    }

    #[test]
    fn hybrid_corners() {
        let pts = corner_points::<Rational>(5, 3, 2, 15, SchemeFamily::Hybrid).unwrap();
        let got: Vec<(Rational, Rational)> =
            pts.iter().map(|p| (p.memory_ratio, p.load)).collect();
        assert_eq!(
            got,
            vec![
                (r(0, 1), r(15, 1)),
                (r(1, 15), r(2, 1) + r(9, 2)),
                (r(2, 15), r(3, 1)),
                (r(1, 4), r(0, 1)),
            ]
        );
        assert_eq!(pts[2].memory, r(2, 1));
    }

    #[test]
    fn grouping_needs_divisibility() {
        assert!(corner_points::<Rational>(11, 9, 2, 99, SchemeFamily::Grouping).is_err());
    }

    #[test]
    fn single_point_envelope() {
        let p = TradeoffPoint {
            memory_ratio: r(1, 2),
            memory: r(1, 1),
            load: r(3, 1),
            kind: SchemeFamily::Baseline,
            t: r(1, 1),
        };
        assert_eq!(lower_convex_envelope(&[p.clone()]), vec![p]);
    }

    #[test]
    fn envelope_drops_dominated_points() {
        let mk = |m: i64, l: i64| TradeoffPoint {
            memory_ratio: r(m, 1),
            memory: r(m, 1),
            load: r(l, 1),
            kind: SchemeFamily::Baseline,
            t: r(m, 1),
        };
        let env = lower_convex_envelope(&[mk(0, 10), mk(1, 9), mk(2, 2), mk(3, 0), mk(4, 0), mk(5, 1)]);
        let xs: Vec<Rational> = env.iter().map(|p| p.memory_ratio).collect();
        assert_eq!(xs, vec![r(0, 1), r(2, 1), r(3, 1)]);
        assert_eq!(envelope_at(&env, &r(1, 1)), Some(r(6, 1)));
        assert_eq!(envelope_at(&env, &r(9, 1)), Some(r(0, 1)));
    }
}
