//! Placement delivery arrays (PDAs) and the multi-access coded caching
//! schemes built from them.
//!
//! The crate covers four layers:
//!
//! * [`pda`]: construction and verification of shared-link PDAs (the
//!   Maddah-Ali–Niesen family and the Partition family).
//! * [`macc1d`]: the transformation from a qualifying PDA to a scheme for
//!   cache-nodes on a cycle where every user reads `L` consecutive nodes.
//! * [`macc2d`]: the baseline, grouping and hybrid schemes for a `K1 x K2`
//!   torus of cache-nodes, plus closed-form loads and tradeoff envelopes.
//! * [`sim`]: a byte-level simulator that places packets, runs XOR multicast
//!   delivery and checks that every user reconstructs its file.
//!
//! Loads and memory ratios are exact rationals throughout. The analytic
//! layer ([`macc2d::tradeoff`]) is generic over [`Scalar`] so the same
//! formulas can also be evaluated in floating point.

pub mod arrays;
pub mod error;
pub mod index;
pub mod io;
pub mod macc1d;
pub mod macc2d;
pub mod mds;
pub mod pda;
pub mod scheme;
pub mod sim;

use num_traits::{FromPrimitive, Num};
use std::fmt::Debug;

pub use error::{Error, Result};

/// Numeric type the closed-form loads and envelopes are evaluated in.
pub trait Scalar: Num + Clone + PartialOrd + FromPrimitive + Debug {
    fn from_usize_exact(v: usize) -> Self {
        Self::from_usize(v).expect("value representable in scalar type")
    }
}

impl<T: Num + Clone + PartialOrd + FromPrimitive + Debug> Scalar for T {}

/// Exact rational used for every persisted load and memory ratio.
pub type Rational = num_rational::Ratio<i64>;

/// Corner point evaluated exactly.
pub type ExactPoint = macc2d::tradeoff::TradeoffPoint<Rational>;

/// Corner point evaluated in `f64`, for plotting convenience only.
pub type FloatPoint = macc2d::tradeoff::TradeoffPoint<f64>;

pub use arrays::{DeliveryArray, DeliveryEntry, Label, StarMap};
pub use index::Grid2dIndex;
pub use macc1d::{Macc1dScheme, HorizontalFamily};
pub use macc2d::{Macc2dScheme, SchemeKind};
pub use pda::{PartitionFamily, PdaArray, PdaEntry, PdaReport};
pub use scheme::{CodedCachingScheme, Layout, SharedLinkScheme, Topology};
