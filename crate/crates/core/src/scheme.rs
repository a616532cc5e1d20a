//! Common interface the simulator drives every scheme through.

use serde::{Deserialize, Serialize};

use crate::arrays::{DeliveryArray, DeliveryEntry, Label, StarMap};
use crate::index::{accessible_nodes, offsets, Grid2dIndex};
use crate::pda::PdaArray;
use crate::Rational;

/// Who can read which cache-node. Nodes and users share an index space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Topology {
    /// Every user owns a private cache.
    SharedLink { users: usize },
    /// User `k` reads nodes `k' ` with `mod(k - k', K) < L`.
    Line { k: usize, l: usize },
    /// User `(k1,k2)` reads the `L x L` block of nodes behind it on the torus.
    Grid { k1: usize, k2: usize, l: usize },
}

impl Topology {
    pub fn nodes(&self) -> usize {
        match *self {
            Topology::SharedLink { users } => users,
            Topology::Line { k, .. } => k,
            Topology::Grid { k1, k2, .. } => k1 * k2,
        }
    }

    pub fn users(&self) -> usize {
        self.nodes()
    }

    /// Sorted nodes readable by `user`.
    pub fn accessible(&self, user: usize) -> Vec<usize> {
        match *self {
            Topology::SharedLink { .. } => vec![user],
            Topology::Line { k, l } => offsets(user, k, l),
            Topology::Grid { k1, k2, l } => {
                let mut v: Vec<usize> =
                    accessible_nodes(Grid2dIndex::from_flat(user, k2), k1, k2, l)
                        .into_iter()
                        .map(|n| n.flat(k2))
                        .collect();
                v.sort_unstable();
                v
            }
        }
    }
}

/// How rows of the round arrays map onto packets of a file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    /// Segment `(round, row)` is packet `round * rows + row`.
    Uncoded,
    /// Each file is split into `source_blocks` blocks which are MDS-encoded
    /// to `coded_blocks`; row `row` of round `round` is position
    /// `round * rows_per_block + row % rows_per_block` of coded block
    /// `row / rows_per_block`.
    Mds {
        source_blocks: usize,
        coded_blocks: usize,
        rows_per_block: usize,
    },
}

/// A scheme given by its round-0 placement, retrieve and delivery arrays.
/// Round `r` arrays are the round-0 arrays right-shifted by
/// `r * round_shift()` columns.
pub trait CodedCachingScheme {
    fn topology(&self) -> Topology;

    fn layout(&self) -> Layout {
        Layout::Uncoded
    }

    /// Rows per round.
    fn rows(&self) -> usize;

    fn rounds(&self) -> usize;

    fn round_shift(&self) -> usize;

    fn first_round_placement(&self) -> &StarMap;

    fn first_round_retrieve(&self) -> &StarMap;

    fn first_round_delivery(&self) -> &DeliveryArray;

    fn closed_form_load(&self) -> Rational;

    /// Fraction of the library each node stores.
    fn memory_ratio(&self) -> Rational;

    fn node_placement(&self, round: usize) -> StarMap {
        self.first_round_placement()
            .rotate(round * self.round_shift())
    }

    fn user_retrieve(&self, round: usize) -> StarMap {
        self.first_round_retrieve().rotate(round * self.round_shift())
    }

    fn user_delivery(&self, round: usize) -> DeliveryArray {
        self.first_round_delivery()
            .rotate(round * self.round_shift())
    }

    /// Packets per file.
    fn packets_per_file(&self) -> usize {
        match self.layout() {
            Layout::Uncoded => self.rounds() * self.rows(),
            Layout::Mds {
                source_blocks,
                rows_per_block,
                ..
            } => source_blocks * self.rounds() * rows_per_block,
        }
    }
}

/// Users retrieving each row: the union of the placement stars of every
/// node they can read.
pub fn derive_user_retrieve(placement: &StarMap, topology: Topology) -> StarMap {
    let users = topology.users();
    let readers: Vec<Vec<usize>> = (0..topology.nodes())
        .map(|node| {
            (0..users)
                .filter(|&u| topology.accessible(u).contains(&node))
                .collect()
        })
        .collect();
    let rows = (0..placement.rows())
        .map(|j| {
            let mut v: Vec<usize> = placement
                .row(j)
                .iter()
                .flat_map(|&n| readers[n].iter().copied())
                .collect();
            v.sort_unstable();
            v.dedup();
            v
        })
        .collect();
    StarMap::new(users, rows).expect("user indices in range")
}

/// A shared-link PDA run directly: user `k` caches the starred packets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SharedLinkScheme {
    pda: PdaArray,
    stars: StarMap,
    delivery: DeliveryArray,
}

impl SharedLinkScheme {
    pub fn new(pda: PdaArray) -> Self {
        let stars = StarMap::new(
            pda.cols(),
            (0..pda.rows()).map(|j| pda.star_columns(j)).collect(),
        )
        .expect("PDA columns in range");
        let body = pda
            .row_vecs()
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|e| match e.label() {
                        Some(s) => DeliveryEntry::Label(Label::Plain(s)),
                        None => DeliveryEntry::Star,
                    })
                    .collect()
            })
            .collect();
        let delivery = DeliveryArray::from_rows(pda.cols(), body).expect("rectangular PDA");
        Self {
            pda,
            stars,
            delivery,
        }
    }

    pub fn pda(&self) -> &PdaArray {
        &self.pda
    }
}

impl CodedCachingScheme for SharedLinkScheme {
    fn topology(&self) -> Topology {
        Topology::SharedLink {
            users: self.pda.cols(),
        }
    }

    fn rows(&self) -> usize {
        self.pda.rows()
    }

    fn rounds(&self) -> usize {
        1
    }

    fn round_shift(&self) -> usize {
        0
    }

    fn first_round_placement(&self) -> &StarMap {
        &self.stars
    }

    fn first_round_retrieve(&self) -> &StarMap {
        &self.stars
    }

    fn first_round_delivery(&self) -> &DeliveryArray {
        &self.delivery
    }

    fn closed_form_load(&self) -> Rational {
        self.pda.load()
    }

    fn memory_ratio(&self) -> Rational {
        self.pda.memory_ratio()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::macc1d::cwlzc_scheme;
    use crate::pda::construct_mn_pda;

    #[test]
    fn line_accessibility() {
        let t = Topology::Line { k: 5, l: 2 };
        assert_eq!(t.accessible(0), vec![0, 4]);
        assert_eq!(t.accessible(3), vec![2, 3]);
    }

    #[test]
    fn grid_accessibility_is_flat() {
        let t = Topology::Grid { k1: 3, k2: 3, l: 2 };
        assert_eq!(t.accessible(4), vec![0, 1, 3, 4]);
    }

    #[test]
    fn retrieve_is_derivable_in_1d() {
        let s = cwlzc_scheme(7, 3, 2, 7).unwrap();
        for r in 0..s.rounds() {
            assert_eq!(
                derive_user_retrieve(&s.node_placement(r), s.topology()),
                s.user_retrieve(r)
            );
        }
    }

    #[test]
    fn shared_link_parameters() {
        let s = SharedLinkScheme::new(construct_mn_pda(3, 2).unwrap());
        assert_eq!(s.packets_per_file(), 3);
        assert_eq!(s.memory_ratio(), Rational::new(2, 3));
        assert_eq!(s.closed_form_load(), Rational::new(1, 3));
    }
}
