//! From a shared-link PDA to a scheme for `K` cache-nodes on a cycle where
//! user `k` reads nodes `k, k-1, .., k-L+1`.
//!
//! Given a `(K', F', Z', S')` PDA `P` with `t` stars per row, the scheme has
//! `K = K' + t(L-1)` nodes. The `i`-th star of row `j` (0-based `i`) at
//! column `a` moves to node `a + i(L-1)`; the users reading that node form a
//! run of `L` consecutive columns; the remaining `K' - t` user columns take
//! the labels of the non-star columns of `P` in order. The round-`r` arrays
//! are the round-0 arrays cyclically right-shifted by `r`.

use crate::arrays::{DeliveryArray, DeliveryEntry, Label, StarMap};
use crate::error::{Error, Result};
use crate::pda::{construct_mn_pda, construct_partition_pda, verify_pda, PartitionFamily, PdaArray, VerifyOptions};
use crate::scheme::{CodedCachingScheme, Topology};
use crate::Rational;

/// Node columns `a_i + i(L-1)` for the sorted star columns `a` of a PDA row.
pub fn node_columns(a: &[usize], l: usize) -> Vec<usize> {
    let gap = l.max(1) - 1;
    a.iter().enumerate().map(|(i, &x)| x + i * gap).collect()
}

/// Run of `l` consecutive users (mod `k`) starting at each node column.
pub fn retrieve_runs(c: &[usize], l: usize, k: usize) -> Vec<Vec<usize>> {
    c.iter()
        .map(|&x| (0..l).map(|d| (x + d) % k).collect())
        .collect()
}

/// Node-placement array: row `j` of `p` with stars moved to
/// [`node_columns`], over `K' + t(L-1)` columns.
pub fn build_node_placement(p: &PdaArray, t: usize, l: usize) -> Result<StarMap> {
    let k = p.cols() + t * (l.max(1) - 1);
    let mut rows = Vec::with_capacity(p.rows());
    for j in 0..p.rows() {
        let a = p.star_columns(j);
        if a.len() != t {
            return Err(Error::RowStarCount {
                row: j,
                expected: t,
                found: a.len(),
            });
        }
        rows.push(node_columns(&a, l));
    }
    StarMap::new(k, rows)
}

/// User-retrieve array plus, for every row, its decomposition into the runs
/// generated by each node star (in node order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserRetrieve {
    pub map: StarMap,
    pub groups: Vec<Vec<Vec<usize>>>,
}

impl UserRetrieve {
    /// 0-based index of the run of row `j` containing user `k`.
    pub fn run_of(&self, j: usize, k: usize) -> Option<usize> {
        self.groups[j].iter().position(|run| run.contains(&k))
    }
}

pub fn build_user_retrieve(c: &StarMap, l: usize) -> Result<UserRetrieve> {
    let k = c.cols();
    let mut rows = Vec::with_capacity(c.rows());
    let mut groups = Vec::with_capacity(c.rows());
    for j in 0..c.rows() {
        let runs = retrieve_runs(c.row(j), l, k);
        let mut flat: Vec<usize> = runs.iter().flatten().copied().collect();
        flat.sort_unstable();
        if flat.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Construction(format!(
                "row {j}: node stars {:?} are closer than L={l}",
                c.row(j)
            )));
        }
        rows.push(flat);
        groups.push(runs);
    }
    Ok(UserRetrieve {
        map: StarMap::new(k, rows)?,
        groups,
    })
}

/// User-delivery array: stars where `u` has stars, and the `μ`-th non-star
/// column of row `j` of `u` carries the label at the `μ`-th non-star column
/// of row `j` of `p`.
pub fn build_user_delivery(u: &StarMap, p: &PdaArray) -> Result<DeliveryArray> {
    if u.rows() != p.rows() {
        return Err(Error::Construction(format!(
            "retrieve array has {} rows, PDA has {}",
            u.rows(),
            p.rows()
        )));
    }
    let mut q = DeliveryArray::filled(u.rows(), u.cols(), DeliveryEntry::Star);
    for j in 0..p.rows() {
        let targets = u.complement(j);
        let sources = p.non_star_columns(j);
        if targets.len() != sources.len() {
            return Err(Error::Construction(format!(
                "row {j}: {} null users but {} PDA labels",
                targets.len(),
                sources.len()
            )));
        }
        for (&k, &src) in targets.iter().zip(&sources) {
            let s = p.get(j, src).label().expect("non-star column");
            q.set(j, k, DeliveryEntry::Label(Label::Plain(s)));
        }
    }
    Ok(q)
}

/// Round-0 arrays of a 1D multi-access scheme; later rounds are rotations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Macc1dScheme {
    k: usize,
    l: usize,
    t: usize,
    n: usize,
    source: PdaArray,
    placement: StarMap,
    retrieve: UserRetrieve,
    delivery: DeliveryArray,
}

pub fn assemble_1d_scheme(p: PdaArray, l: usize, t: usize, n: usize) -> Result<Macc1dScheme> {
    if l == 0 {
        return Err(Error::Infeasible("access span L must be at least 1".into()));
    }
    let report = verify_pda(
        &p,
        VerifyOptions {
            t: Some(t),
            l: Some(l),
        },
    )?;
    for (ok, name) in [
        (report.c1_ok, "C1"),
        (report.c2_ok, "C2"),
        (report.c3_ok, "C3"),
        (report.c4_ok == Some(true), "C4"),
        (report.c5_ok == Some(true), "C5"),
    ] {
        if !ok {
            return Err(Error::ConditionFailed(name));
        }
    }
    let placement = build_node_placement(&p, t, l)?;
    let retrieve = build_user_retrieve(&placement, l)?;
    let delivery = build_user_delivery(&retrieve.map, &p)?;
    Ok(Macc1dScheme {
        k: placement.cols(),
        l,
        t,
        n,
        source: p,
        placement,
        retrieve,
        delivery,
    })
}

/// The MN-seeded instance: `K' = K - t(L-1)` and `P = MN(K', t)`.
pub fn cwlzc_scheme(k: usize, l: usize, t: usize, n: usize) -> Result<Macc1dScheme> {
    if l == 0 || l > k {
        return Err(Error::Infeasible(format!("need 1 <= L <= K, got K={k}, L={l}")));
    }
    if t > k / l {
        return Err(Error::Infeasible(format!(
            "t={t} exceeds floor(K/L)={} for K={k}, L={l}",
            k / l
        )));
    }
    let k_prime = k - t * (l - 1);
    assemble_1d_scheme(construct_mn_pda(k_prime, t)?, l, t, n)
}

impl Macc1dScheme {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn source_pda(&self) -> &PdaArray {
        &self.source
    }

    pub fn placement(&self) -> &StarMap {
        &self.placement
    }

    pub fn retrieve(&self) -> &UserRetrieve {
        &self.retrieve
    }

    pub fn delivery(&self) -> &DeliveryArray {
        &self.delivery
    }

    /// Label of the round-0 delivery array at `(j, k)`, if not a star.
    pub fn plain_label(&self, j: usize, k: usize) -> Option<u32> {
        match self.delivery.get(j, k) {
            DeliveryEntry::Label(Label::Plain(s)) => Some(*s),
            _ => None,
        }
    }

    /// `S'/F'`.
    pub fn load(&self) -> Rational {
        self.source.load()
    }

    /// `K'Z' / (F'K)`.
    pub fn memory_fraction(&self) -> Rational {
        Rational::new(
            (self.source.cols() * self.source.z()) as i64,
            (self.source.rows() * self.k) as i64,
        )
    }

    /// All `K` rounds stacked into one `KF' x K` array, round `r` labels
    /// offset by `r S'`.
    pub fn stacked_pda(&self) -> PdaArray {
        use crate::pda::PdaEntry;
        let s = self.source.s();
        let mut body = Vec::with_capacity(self.k * self.delivery.rows());
        for r in 0..self.k {
            let q = self.delivery.rotate(r);
            for j in 0..q.rows() {
                body.push(
                    q.row(j)
                        .iter()
                        .map(|e| match e {
                            DeliveryEntry::Label(Label::Plain(x)) => {
                                PdaEntry::Label(x + (r * s) as u32)
                            }
                            _ => PdaEntry::Star,
                        })
                        .collect(),
                );
            }
        }
        let z = self.delivery.rows() * self.t * self.l;
        PdaArray::from_rows(self.k, z, self.k * s, body).expect("rows have K columns")
    }
}

impl CodedCachingScheme for Macc1dScheme {
    fn topology(&self) -> Topology {
        Topology::Line {
            k: self.k,
            l: self.l,
        }
    }

    fn rows(&self) -> usize {
        self.placement.rows()
    }

    fn rounds(&self) -> usize {
        self.k
    }

    fn round_shift(&self) -> usize {
        1
    }

    fn first_round_placement(&self) -> &StarMap {
        &self.placement
    }

    fn first_round_retrieve(&self) -> &StarMap {
        &self.retrieve.map
    }

    fn first_round_delivery(&self) -> &DeliveryArray {
        &self.delivery
    }

    fn closed_form_load(&self) -> Rational {
        self.load()
    }

    fn memory_ratio(&self) -> Rational {
        self.memory_fraction()
    }
}

/// Node-placement, user-retrieve and delivery arrays of the `t` Partition
/// sub-arrays over `K2` columns with star runs of length `L`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HorizontalFamily {
    k2: usize,
    l: usize,
    partition: PartitionFamily,
    placement: Vec<StarMap>,
    retrieve: Vec<StarMap>,
}

pub fn partition_macc_family(k2: usize, l: usize, t: usize) -> Result<HorizontalFamily> {
    if l == 0 || l >= k2 {
        return Err(Error::Infeasible(format!("need 0 < L < K2, got K2={k2}, L={l}")));
    }
    if t == 0 {
        return Err(Error::Infeasible("horizontal family needs t >= 1".into()));
    }
    let partition = construct_partition_pda(k2, l, t)?;
    let rows = partition.rows();
    let mut placement = Vec::with_capacity(t);
    let mut retrieve = Vec::with_capacity(t);
    for i in 0..t {
        let tags: Vec<Vec<usize>> = (0..rows).map(|r| vec![partition.tag_star(i, r)]).collect();
        let e = StarMap::new(k2, tags)?;
        let b = build_user_retrieve(&e, l)?.map;
        placement.push(e);
        retrieve.push(b);
    }
    Ok(HorizontalFamily {
        k2,
        l,
        partition,
        placement,
        retrieve,
    })
}

impl HorizontalFamily {
    pub fn k2(&self) -> usize {
        self.k2
    }

    pub fn l(&self) -> usize {
        self.l
    }

    /// Number of members `t`.
    pub fn len(&self) -> usize {
        self.placement.len()
    }

    pub fn is_empty(&self) -> bool {
        self.placement.is_empty()
    }

    pub fn partition(&self) -> &PartitionFamily {
        &self.partition
    }

    /// `E_i`: the tag-stars of sub-array `i`.
    pub fn placement(&self, i: usize) -> &StarMap {
        &self.placement[i]
    }

    /// `B_i`: each tag-star expanded to a run of `L`.
    pub fn retrieve(&self, i: usize) -> &StarMap {
        &self.retrieve[i]
    }

    /// `H_i`: sub-array `i` of the Partition PDA.
    pub fn delivery(&self, i: usize) -> &PdaArray {
        self.partition.sub_array(i)
    }

    /// Sum over members of labels per row: `t K2^t (K2-L) / K2^t`.
    pub fn load(&self) -> Rational {
        Rational::from_integer((self.len() * (self.k2 - self.l)) as i64)
    }
}
