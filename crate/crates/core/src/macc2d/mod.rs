//! Schemes for a `K1 x K2` torus of cache-nodes where user `(k1,k2)` reads
//! the `L x L` block of nodes `(k1 - a, k2 - b)`, `0 <= a, b < L`.
//!
//! Users and nodes are columns in row-major order (see
//! [`crate::Grid2dIndex::flat`]). Every scheme keeps its round-0 arrays;
//! round `r` shifts them right by `r * round_shift` columns.

mod baseline;
mod grouping;
mod hybrid;
pub mod tradeoff;

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::arrays::{DeliveryArray, StarMap};
use crate::error::Error;
use crate::macc1d::{HorizontalFamily, Macc1dScheme};
use crate::mds::ReedSolomon;
use crate::pda::PdaArray;
use crate::scheme::{CodedCachingScheme, Layout, Topology};
use crate::Rational;

pub use baseline::baseline_scheme;
pub use grouping::{grouping_scheme, NodeGroup};
pub use hybrid::{hybrid_build_c, hybrid_build_u, hybrid_fill_type1, hybrid_fill_type2, hybrid_scheme};
pub use tradeoff::{
    baseline_load, corner_points, envelope_at, grouping_load, hybrid_load, hybrid_load_general,
    lower_convex_envelope, tradeoff_envelope, TradeoffPoint,
};

/// The three scheme families compared in tradeoff sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeFamily {
    Baseline,
    Grouping,
    Hybrid,
}

impl SchemeFamily {
    pub fn name(self) -> &'static str {
        match self {
            SchemeFamily::Baseline => "baseline",
            SchemeFamily::Grouping => "grouping",
            SchemeFamily::Hybrid => "hybrid",
        }
    }
}

impl fmt::Display for SchemeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "baseline" => Ok(SchemeFamily::Baseline),
            "grouping" => Ok(SchemeFamily::Grouping),
            "hybrid" => Ok(SchemeFamily::Hybrid),
            other => Err(Error::Usage(format!(
                "unknown scheme kind {other:?} (expected baseline, grouping or hybrid)"
            ))),
        }
    }
}

/// Concrete scheme variant; the baseline splits by whether `K2 <= L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SchemeKind {
    #[serde(rename = "baseline-small")]
    BaselineSmall,
    #[serde(rename = "baseline-mds")]
    BaselineMds,
    #[serde(rename = "grouping")]
    Grouping,
    #[serde(rename = "hybrid")]
    Hybrid,
}

impl SchemeKind {
    pub fn family(self) -> SchemeFamily {
        match self {
            SchemeKind::BaselineSmall | SchemeKind::BaselineMds => SchemeFamily::Baseline,
            SchemeKind::Grouping => SchemeFamily::Grouping,
            SchemeKind::Hybrid => SchemeFamily::Hybrid,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::BaselineSmall => "baseline-small",
            SchemeKind::BaselineMds => "baseline-mds",
            SchemeKind::Grouping => "grouping",
            SchemeKind::Hybrid => "hybrid",
        }
    }
}

/// Kind-specific building blocks kept alongside the arrays.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SchemeDetail {
    /// One 1D scheme per node column; `mds` present when `K2 > L`.
    Baseline {
        inner: Macc1dScheme,
        mds: Option<ReedSolomon>,
    },
    /// MN array shared by all node groups.
    Grouping {
        mn: PdaArray,
        groups: Vec<NodeGroup>,
    },
    Hybrid {
        outer: Macc1dScheme,
        family: HorizontalFamily,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Macc2dScheme {
    kind: SchemeKind,
    k1: usize,
    k2: usize,
    l: usize,
    t: Rational,
    n: usize,
    rounds: usize,
    round_shift: usize,
    placement: StarMap,
    retrieve: StarMap,
    delivery: DeliveryArray,
    load: Rational,
    detail: SchemeDetail,
}

impl Macc2dScheme {
    pub fn kind(&self) -> SchemeKind {
        self.kind
    }

    pub fn k1(&self) -> usize {
        self.k1
    }

    pub fn k2(&self) -> usize {
        self.k2
    }

    pub fn l(&self) -> usize {
        self.l
    }

    /// `t = K1 K2 M/N`; integral except for the baseline with `K2 > L`.
    pub fn t(&self) -> Rational {
        self.t
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn detail(&self) -> &SchemeDetail {
        &self.detail
    }

    /// `M = N t/(K1K2)` in files.
    pub fn memory(&self) -> Rational {
        self.memory_ratio() * Rational::from_integer(self.n as i64)
    }

    pub fn point(&self) -> TradeoffPoint<Rational> {
        TradeoffPoint {
            memory_ratio: self.memory_ratio(),
            memory: self.memory(),
            load: self.load,
            kind: self.kind.family(),
            t: self.t,
        }
    }
}

impl CodedCachingScheme for Macc2dScheme {
    fn topology(&self) -> Topology {
        Topology::Grid {
            k1: self.k1,
            k2: self.k2,
            l: self.l,
        }
    }

    fn layout(&self) -> Layout {
        match &self.detail {
            SchemeDetail::Baseline {
                inner,
                mds: Some(rs),
            } => Layout::Mds {
                source_blocks: rs.k(),
                coded_blocks: rs.n(),
                rows_per_block: inner.rows(),
            },
            _ => Layout::Uncoded,
        }
    }

    fn rows(&self) -> usize {
        self.placement.rows()
    }

    fn rounds(&self) -> usize {
        self.rounds
    }

    fn round_shift(&self) -> usize {
        self.round_shift
    }

    fn first_round_placement(&self) -> &StarMap {
        &self.placement
    }

    fn first_round_retrieve(&self) -> &StarMap {
        &self.retrieve
    }

    fn first_round_delivery(&self) -> &DeliveryArray {
        &self.delivery
    }

    fn closed_form_load(&self) -> Rational {
        self.load
    }

    fn memory_ratio(&self) -> Rational {
        self.t / Rational::from_integer((self.k1 * self.k2) as i64)
    }
}
