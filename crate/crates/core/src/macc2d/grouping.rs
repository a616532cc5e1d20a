//! Grouping (`L | K1`, `L | K2`): the nodes split into `L^2` stride-`L`
//! groups of `K1K2/L^2` nodes. Each user reads exactly one node of every
//! group, so each group runs the shared-link MN scheme on its own subfile,
//! once for every one of the `L^2` user groups.

use serde::Serialize;

use crate::arrays::{DeliveryArray, DeliveryEntry, Label, StarMap};
use crate::error::{Error, Result};
use crate::index::{modulo, Grid2dIndex};
use crate::pda::construct_mn_pda;
use crate::Rational;

use super::{grouping_load, Macc2dScheme, SchemeDetail, SchemeKind};

/// Nodes `(j1 + i1 L, j2 + i2 L)`, listed in MN column order
/// `i1 (K2/L) + i2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NodeGroup {
    pub j1: usize,
    pub j2: usize,
    pub nodes: Vec<Grid2dIndex>,
}

/// Position within group `(j1, j2)` of the single node user `u` reads.
fn member_for(u: Grid2dIndex, j1: usize, j2: usize, k1: usize, k2: usize, l: usize) -> usize {
    let a = modulo(u.k1 as i64 - modulo(u.k1 as i64 - j1 as i64, l) as i64, k1);
    let b = modulo(u.k2 as i64 - modulo(u.k2 as i64 - j2 as i64, l) as i64, k2);
    (a / l) * (k2 / l) + b / l
}

pub fn grouping_scheme(k1: usize, k2: usize, l: usize, t: usize, n: usize) -> Result<Macc2dScheme> {
    if l == 0 || k1 % l != 0 || k2 % l != 0 {
        return Err(Error::Infeasible(format!(
            "grouping needs L | K1 and L | K2, got K1={k1}, K2={k2}, L={l}"
        )));
    }
    let k_hat = k1 * k2 / (l * l);
    if t > k_hat {
        return Err(Error::Infeasible(format!(
            "grouping needs t <= K1K2/L^2 = {k_hat}, got t={t}"
        )));
    }
    let mn = construct_mn_pda(k_hat, t)?;
    let f_hat = mn.rows();
    let users = k1 * k2;

    let mut groups = Vec::with_capacity(l * l);
    for j1 in 0..l {
        for j2 in 0..l {
            let mut nodes = Vec::with_capacity(k_hat);
            for i1 in 0..k1 / l {
                for i2 in 0..k2 / l {
                    nodes.push(Grid2dIndex::new(j1 + i1 * l, j2 + i2 * l));
                }
            }
            groups.push(NodeGroup { j1, j2, nodes });
        }
    }

    let mut placement = Vec::with_capacity(l * l * f_hat);
    let mut retrieve = Vec::with_capacity(l * l * f_hat);
    let mut delivery = DeliveryArray::filled(l * l * f_hat, users, DeliveryEntry::Null);
    for (g, group) in groups.iter().enumerate() {
        let member: Vec<usize> = (0..users)
            .map(|u| member_for(Grid2dIndex::from_flat(u, k2), group.j1, group.j2, k1, k2, l))
            .collect();
        for j in 0..f_hat {
            let row = g * f_hat + j;
            placement.push(
                mn.star_columns(j)
                    .into_iter()
                    .map(|i| group.nodes[i].flat(k2))
                    .collect(),
            );
            let mut got = Vec::new();
            for u in 0..users {
                match mn.get(j, member[u]).label() {
                    None => {
                        got.push(u);
                        delivery.set(row, u, DeliveryEntry::Star);
                    }
                    Some(s) => {
                        let user = Grid2dIndex::from_flat(u, k2);
                        let user_group = (user.k1 % l) * l + user.k2 % l;
                        delivery.set(
                            row,
                            u,
                            DeliveryEntry::Label(Label::Sub {
                                block: g as u32,
                                group: user_group as u32,
                                s,
                            }),
                        );
                    }
                }
            }
            retrieve.push(got);
        }
    }

    let t = Rational::from_integer(t as i64);
    Ok(Macc2dScheme {
        kind: SchemeKind::Grouping,
        k1,
        k2,
        l,
        t,
        n,
        rounds: 1,
        round_shift: 0,
        placement: StarMap::new(users, placement)?,
        retrieve: StarMap::new(users, retrieve)?,
        delivery,
        load: grouping_load(k1, k2, l, t),
        detail: SchemeDetail::Grouping { mn, groups },
    })
}
