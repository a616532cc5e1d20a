//! Hybrid (`K2 > L`): an outer 1D scheme over the `K1` node rows combined
//! with the Partition family over the `K2` node columns.
//!
//! Rows are pairs `(j, f)`: `j` an outer row, `f ∈ [K2]^t` a Partition row,
//! stored at `j * K2^t + index(f)`. In outer row `j` the `i`-th node star
//! becomes `E_i`, every user of the `i`-th run becomes `B_i`. Users inside a
//! run miss `K2 - L` columns, served by Type I labels (shifted copies of
//! `H_i`); users outside every run miss whole blocks, served by Type II
//! labels `(s, e)` with `s` the outer label and `e ∈ [K2]^{t+1}`.

use std::collections::BTreeMap;

use crate::arrays::{DeliveryArray, DeliveryEntry, Label, StarMap};
use crate::error::{Error, Result};
use crate::macc1d::{assemble_1d_scheme, partition_macc_family, HorizontalFamily, Macc1dScheme, UserRetrieve};
use crate::pda::{construct_mn_pda, PdaArray};
use crate::scheme::CodedCachingScheme;
use crate::Rational;

use super::{hybrid_load_general, Macc2dScheme, SchemeDetail, SchemeKind};

fn check_sizes(outer_rows: &[Vec<usize>], family: &HorizontalFamily) -> Result<()> {
    for (j, row) in outer_rows.iter().enumerate() {
        if row.len() != family.len() {
            return Err(Error::Construction(format!(
                "outer row {j} has {} stars but the family has {} members",
                row.len(),
                family.len()
            )));
        }
    }
    Ok(())
}

/// Node placement: the `i`-th star of outer row `j` becomes `E_i`.
pub fn hybrid_build_c(outer: &Macc1dScheme, family: &HorizontalFamily) -> Result<StarMap> {
    let c = outer.placement();
    let k2 = family.k2();
    let f2 = family.partition().rows();
    let rows: Vec<Vec<usize>> = (0..c.rows()).map(|j| c.row(j).to_vec()).collect();
    check_sizes(&rows, family)?;
    let mut out = Vec::with_capacity(rows.len() * f2);
    for stars in &rows {
        for r in 0..f2 {
            out.push(
                stars
                    .iter()
                    .enumerate()
                    .map(|(i, &k1)| k1 * k2 + family.placement(i).row(r)[0])
                    .collect(),
            );
        }
    }
    StarMap::new(c.cols() * k2, out)
}

/// User retrieve: every user column of the `i`-th run of outer row `j`
/// becomes `B_i`.
pub fn hybrid_build_u(outer_u: &UserRetrieve, family: &HorizontalFamily) -> Result<StarMap> {
    let k2 = family.k2();
    let f2 = family.partition().rows();
    check_sizes(
        &outer_u.groups.iter().map(|g| vec![0; g.len()]).collect::<Vec<_>>(),
        family,
    )?;
    let mut out = Vec::with_capacity(outer_u.groups.len() * f2);
    for runs in &outer_u.groups {
        if runs.iter().any(|run| run.len() != family.l()) {
            return Err(Error::Construction(format!(
                "outer runs {runs:?} are not all of length L={}",
                family.l()
            )));
        }
        for r in 0..f2 {
            let mut stars = Vec::with_capacity(runs.len() * family.l() * family.l());
            for (i, run) in runs.iter().enumerate() {
                for &k1 in run {
                    stars.extend(family.retrieve(i).row(r).iter().map(|&c| k1 * k2 + c));
                }
            }
            out.push(stars);
        }
    }
    StarMap::new(outer_u.map.cols() * k2, out)
}

/// Stars from `u2d`; inside the runs of outer row `j`, the `ℓ`-th copy of
/// `B_i` becomes `H_i + v K2^t (K2 - L)` with `v = jL + ℓ`. Everything else
/// is left [`DeliveryEntry::Null`].
pub fn hybrid_fill_type1(u2d: &StarMap, outer_u: &UserRetrieve, family: &HorizontalFamily) -> DeliveryArray {
    let k2 = family.k2();
    let l = family.l();
    let f2 = family.partition().rows();
    let per_copy = (f2 * (k2 - l)) as u32;
    let mut q = DeliveryArray::filled(u2d.rows(), u2d.cols(), DeliveryEntry::Null);
    for row in 0..u2d.rows() {
        for &u in u2d.row(row) {
            q.set(row, u, DeliveryEntry::Star);
        }
    }
    for (j, runs) in outer_u.groups.iter().enumerate() {
        for (i, run) in runs.iter().enumerate() {
            let h = family.delivery(i);
            for (pos, &k1) in run.iter().enumerate() {
                let v = (j * l + pos) as u32;
                for r in 0..f2 {
                    for c in 0..k2 {
                        if let Some(s) = h.get(r, c).label() {
                            q.set(
                                j * f2 + r,
                                k1 * k2 + c,
                                DeliveryEntry::Label(Label::TypeI(s + v * per_copy)),
                            );
                        }
                    }
                }
            }
        }
    }
    q
}

/// Fill the cells of users outside every run of their outer row with
/// `(s, e)` labels. Any cell still null afterwards is an error.
pub fn hybrid_fill_type2(
    mut q: DeliveryArray,
    outer: &Macc1dScheme,
    family: &HorizontalFamily,
) -> Result<DeliveryArray> {
    let k2 = family.k2();
    let t = family.len();
    let f2 = family.partition().rows();
    let outer_q = outer.delivery();
    let outer_u = outer.retrieve();

    // S_s: columns of the outer delivery array holding label s, ascending.
    let mut columns: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for j in 0..outer_q.rows() {
        for k1 in 0..outer_q.cols() {
            if let Some(s) = outer.plain_label(j, k1) {
                columns.entry(s).or_default().push(k1);
            }
        }
    }
    for cols in columns.values_mut() {
        cols.sort_unstable();
    }

    for j in 0..outer_q.rows() {
        for k1 in outer_u.map.complement(j) {
            let s = outer
                .plain_label(j, k1)
                .ok_or_else(|| Error::Construction(format!("outer cell ({j},{k1}) has no label")))?;
            let set = &columns[&s];
            let h = set.iter().position(|&x| x == k1).expect("column listed for its label");
            let mut lambda = Vec::with_capacity(set.len() - 1);
            for &other in set.iter().filter(|&&x| x != k1) {
                let run = outer_u.run_of(j, other).ok_or_else(|| {
                    Error::Construction(format!(
                        "label {s}: column {other} is not retrieved in outer row {j}"
                    ))
                })?;
                if lambda.contains(&run) {
                    return Err(Error::Construction(format!(
                        "label {s}: two columns of outer row {j} fall in run {run}"
                    )));
                }
                lambda.push(run);
            }
            let rest: Vec<usize> = (0..t).filter(|i| !lambda.contains(i)).collect();
            for r in 0..f2 {
                let f = family.partition().row_vector(r);
                for c in 0..k2 {
                    let mut e = Vec::with_capacity(t + 1);
                    e.extend(lambda[..h].iter().map(|&i| f[i]));
                    e.push(c as u32 + 1);
                    e.extend(lambda[h..].iter().map(|&i| f[i]));
                    e.extend(rest.iter().map(|&i| f[i]));
                    q.set(
                        j * f2 + r,
                        k1 * k2 + c,
                        DeliveryEntry::Label(Label::TypeII { s, e }),
                    );
                }
            }
        }
    }
    if let Some(row) = (0..q.rows()).find(|&r| q.row(r).contains(&DeliveryEntry::Null)) {
        let col = q.row(row).iter().position(|e| *e == DeliveryEntry::Null).unwrap();
        return Err(Error::Construction(format!("cell ({row},{col}) left unfilled")));
    }
    Ok(q)
}

/// Hybrid scheme over an outer PDA with `K1 - t(L-1)` columns and `t` stars
/// per row; MN when `outer_pda` is `None`.
pub fn hybrid_scheme(
    k1: usize,
    k2: usize,
    l: usize,
    t: usize,
    n: usize,
    outer_pda: Option<PdaArray>,
) -> Result<Macc2dScheme> {
    if l == 0 || k2 <= l {
        return Err(Error::Infeasible(format!(
            "hybrid needs K2 > L >= 1, got K2={k2}, L={l}"
        )));
    }
    if t == 0 || t > k1 / l {
        return Err(Error::Infeasible(format!(
            "hybrid needs 1 <= t <= floor(K1/L) = {}, got t={t}",
            k1 / l
        )));
    }
    let k1_prime = k1 - t * (l - 1);
    let p = match outer_pda {
        Some(p) => p,
        None => construct_mn_pda(k1_prime, t)?,
    };
    if p.cols() != k1_prime {
        return Err(Error::Infeasible(format!(
            "outer PDA has {} columns, expected K1 - t(L-1) = {k1_prime}",
            p.cols()
        )));
    }
    let outer = assemble_1d_scheme(p, l, t, n)?;
    let family = partition_macc_family(k2, l, t)?;
    let placement = hybrid_build_c(&outer, &family)?;
    let retrieve = hybrid_build_u(outer.retrieve(), &family)?;
    let partial = hybrid_fill_type1(&retrieve, outer.retrieve(), &family);
    let delivery = hybrid_fill_type2(partial, &outer, &family)?;
    let src = outer.source_pda();
    let load = hybrid_load_general(k2, l, t, src.s(), src.rows());
    Ok(Macc2dScheme {
        kind: SchemeKind::Hybrid,
        k1,
        k2,
        l,
        t: Rational::from_integer(t as i64),
        n,
        rounds: k1,
        round_shift: k2,
        placement,
        retrieve,
        delivery,
        load,
        detail: SchemeDetail::Hybrid { outer, family },
    })
}

impl Macc2dScheme {
    /// Distinct Type I and Type II labels in the round-0 delivery array.
    pub fn label_census(&self) -> (usize, usize) {
        let cells = self.first_round_delivery().label_cells();
        let type1 = cells.keys().filter(|l| matches!(l, Label::TypeI(_))).count();
        let type2 = cells.keys().filter(|l| matches!(l, Label::TypeII { .. })).count();
        (type1, type2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::derive_user_retrieve;

    fn flagship() -> Macc2dScheme {
        hybrid_scheme(5, 3, 2, 2, 15, None).unwrap()
    }

    fn row(j: usize, f: [u32; 2]) -> usize {
        j * 9 + (f[0] as usize - 1) + 3 * (f[1] as usize - 1)
    }

    fn col(k1: usize, k2: usize) -> usize {
        (k1 - 1) * 3 + (k2 - 1)
    }

    #[test]
    fn flagship_counts() {
        let s = flagship();
        assert_eq!(s.rows(), 27);
        assert_eq!(s.label_census(), (54, 27));
        assert_eq!(s.closed_form_load(), Rational::from_integer(3));
        assert_eq!(s.packets_per_file(), 135);
    }

    #[test]
    fn flagship_type2_cells() {
        let s = flagship();
        let want = DeliveryEntry::Label(Label::TypeII { s: 1, e: vec![3, 2, 1] });
        let q = s.first_round_delivery();
        assert_eq!(*q.get(row(0, [3, 2]), col(5, 1)), want);
        assert_eq!(*q.get(row(1, [3, 1]), col(3, 2)), want);
        assert_eq!(*q.get(row(2, [2, 1]), col(1, 3)), want);
        assert_eq!(q.label_cells()[&Label::TypeII { s: 1, e: vec![3, 2, 1] }].len(), 3);
    }

    #[test]
    fn flagship_type1_layout() {
        let s = flagship();
        let SchemeDetail::Hybrid { family, .. } = s.detail() else {
            panic!("wrong detail");
        };
        let q = s.first_round_delivery();
        // Outer row 0 runs: {1,2} carry H1, H1+9; {3,4} carry H2, H2+9.
        let expect = [(0usize, 0usize, 0u32), (0, 1, 9), (1, 2, 0), (1, 3, 9)];
        for (i, k1, off) in expect {
            for r in 0..9 {
                for c in 0..3 {
                    let want = match family.delivery(i).get(r, c).label() {
                        Some(x) => DeliveryEntry::Label(Label::TypeI(x + off)),
                        None => DeliveryEntry::Star,
                    };
                    assert_eq!(*q.get(r, k1 * 3 + c), want);
                }
            }
        }
    }

    #[test]
    fn placement_examples() {
        let s = flagship();
        let c = s.first_round_placement();
        // Outer row {1,2} puts E1 on node row 1 and E2 on node row 3.
        assert_eq!(c.row(row(0, [2, 3])), &[col(1, 2), col(3, 3)]);
        assert_eq!(derive_user_retrieve(c, s.topology()), *s.first_round_retrieve());
    }

    #[test]
    fn null_census_per_row() {
        let s = flagship();
        let q = s.first_round_delivery();
        for r in 0..q.rows() {
            let stars = q.row(r).iter().filter(|e| e.is_star()).count();
            let t1 = q.row(r).iter().filter(|e| matches!(e.label(), Some(Label::TypeI(_)))).count();
            let t2 = q.row(r).iter().filter(|e| matches!(e.label(), Some(Label::TypeII { .. }))).count();
            assert_eq!((stars, t1, t2), (8, 4, 3));
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(hybrid_scheme(5, 2, 2, 1, 10, None).is_err());
        assert!(hybrid_scheme(5, 3, 2, 3, 15, None).is_err());
        assert!(hybrid_scheme(5, 3, 2, 0, 15, None).is_err());
        let wrong = construct_mn_pda(4, 2).unwrap();
        assert!(hybrid_scheme(5, 3, 2, 2, 15, Some(wrong)).is_err());
    }
}
