//! Baseline: an independent 1D scheme along every node column.
//!
//! With `K2 <= L` each file is split into `K2` subfiles and node column
//! `b` runs the 1D scheme on subfile `b`. With `K2 > L` each file is split
//! into `L` subfiles, MDS-encoded to `K2` coded subfiles, and node column `b`
//! runs the 1D scheme with `t1 = tL/K2` on coded subfile `b`. Users in
//! column `c` are served the 1D deliveries of every coded column they read.

use crate::arrays::{DeliveryArray, DeliveryEntry, Label, StarMap};
use crate::error::{Error, Result};
use crate::index::modulo;
use crate::macc1d::cwlzc_scheme;
use crate::mds::ReedSolomon;
use crate::scheme::CodedCachingScheme;
use crate::Rational;

use super::{baseline_load, Macc2dScheme, SchemeDetail, SchemeKind};

fn show(points: &[Rational]) -> String {
    points
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

/// `t` must lie on `{0, 1, .., floor(K1/L)}` when `K2 <= L` and on
/// `{0, K2/L, .., floor(K1/L) K2/L}` otherwise.
pub fn baseline_scheme(k1: usize, k2: usize, l: usize, t: Rational, n: usize) -> Result<Macc2dScheme> {
    if l == 0 || l > k1 || k2 == 0 {
        return Err(Error::Infeasible(format!(
            "baseline needs 1 <= L <= K1 and K2 >= 1, got K1={k1}, K2={k2}, L={l}"
        )));
    }
    let step = if k2 <= l {
        Rational::from_integer(1)
    } else {
        Rational::new(k2 as i64, l as i64)
    };
    let max_t1 = k1 / l;
    let steps = t / step;
    if !steps.is_integer() || *steps.numer() < 0 || *steps.numer() as usize > max_t1 {
        let grid: Vec<Rational> = (0..=max_t1 as i64).map(|i| step * Rational::from_integer(i)).collect();
        let below = grid.iter().rev().find(|&&g| g < t).copied();
        let above = grid.iter().find(|&&g| g > t).copied();
        let nearest: Vec<Rational> = below.into_iter().chain(above).collect();
        return Err(Error::OffGrid {
            t: t.to_string(),
            nearest: show(&nearest),
        });
    }
    let t1 = *steps.numer() as usize;
    let inner = cwlzc_scheme(k1, l, t1, n)?;
    let (kind, mds) = if k2 <= l {
        (SchemeKind::BaselineSmall, None)
    } else {
        (SchemeKind::BaselineMds, Some(ReedSolomon::new(l, k2)?))
    };

    let f1 = inner.rows();
    let users = k1 * k2;
    let c1 = inner.placement();
    let u1 = &inner.retrieve().map;
    let reads = |c: usize, b: usize| modulo(c as i64 - b as i64, k2) < l;

    let mut placement = Vec::with_capacity(k2 * f1);
    let mut retrieve = Vec::with_capacity(k2 * f1);
    let mut delivery = DeliveryArray::filled(k2 * f1, users, DeliveryEntry::Idle);
    for b in 0..k2 {
        for j in 0..f1 {
            let row = b * f1 + j;
            placement.push(c1.row(j).iter().map(|&x| x * k2 + b).collect());
            let mut got = Vec::new();
            for x in 0..k1 {
                for c in (0..k2).filter(|&c| reads(c, b)) {
                    let user = x * k2 + c;
                    if u1.is_star(j, x) {
                        got.push(user);
                        delivery.set(row, user, DeliveryEntry::Star);
                    } else {
                        let s = inner.plain_label(j, x).ok_or_else(|| {
                            Error::Construction(format!("inner row {j} column {x} has no label"))
                        })?;
                        delivery.set(
                            row,
                            user,
                            DeliveryEntry::Label(Label::Sub {
                                block: b as u32,
                                group: c as u32,
                                s,
                            }),
                        );
                    }
                }
            }
            retrieve.push(got);
        }
    }

    Ok(Macc2dScheme {
        kind,
        k1,
        k2,
        l,
        t,
        n,
        rounds: k1,
        round_shift: k2,
        placement: StarMap::new(users, placement)?,
        retrieve: StarMap::new(users, retrieve)?,
        delivery,
        load: baseline_load(k1, k2, l, t),
        detail: SchemeDetail::Baseline { inner, mds },
    })
}
