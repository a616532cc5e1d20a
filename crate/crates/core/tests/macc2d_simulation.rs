mod common;

use common::{int, matrix_2d, r, simulate_all_distinct};
use gridcache::index::accessible_nodes;
use gridcache::macc2d::{grouping_scheme, SchemeDetail, SchemeKind};
use gridcache::scheme::derive_user_retrieve;
use gridcache::sim::{measure_worst_case, DeliveryOptions, DemandVector, FileLibrary, Simulator};
use gridcache::{CodedCachingScheme, Grid2dIndex, Macc2dScheme, Rational};

/// Closed forms written out independently of the library.
fn expected_load(s: &Macc2dScheme) -> Rational {
    let (k1, k2, l) = (s.k1() as i64, s.k2() as i64, s.l() as i64);
    let t = s.t();
    let one = int(1);
    match s.kind() {
        SchemeKind::BaselineSmall => (int(k1 * k2) - t * int(l * k2)) / (t + one),
        SchemeKind::BaselineMds => (int(k1 * k2) - t * int(l * l)) / (r(l, k2) * t + one),
        SchemeKind::Grouping => (int(k1 * k2) - t * int(l * l)) / (t + one),
        SchemeKind::Hybrid => (int(k2 * l) * t - t * int(l * l)) / t + (int(k1 * k2) - t * int(k2 * l)) / (t + one),
    }
}

fn describe(s: &Macc2dScheme) -> String {
    format!("{} ({},{},{}) t={}", s.kind().name(), s.k1(), s.k2(), s.l(), s.t())
}

#[test]
fn measured_load_equals_closed_form() {
    for s in matrix_2d() {
        assert_eq!(s.closed_form_load(), expected_load(&s), "{}", describe(&s));
        assert_eq!(simulate_all_distinct(&s, 4), expected_load(&s), "{}", describe(&s));
    }
}

#[test]
fn random_demands_decode() {
    for s in matrix_2d() {
        let users = s.k1() * s.k2();
        let lib = FileLibrary::for_scheme(&s, users, 4, 11);
        let sim = Simulator::new(&s, &lib).unwrap();
        let demands: Vec<DemandVector> = (0..100).map(|seed| DemandVector::seeded(users, users, seed)).collect();
        for d in &demands {
            let (_, verdicts) = sim.run(d, DeliveryOptions::default()).unwrap();
            assert!(verdicts.iter().all(|v| v.ok), "{} demand {:?}", describe(&s), d.0);
        }
        let worst = measure_worst_case(&sim, &demands[..5], DeliveryOptions::default()).unwrap();
        assert_eq!(worst, s.closed_form_load());
    }
}

#[test]
fn memory_is_exact() {
    for s in matrix_2d() {
        assert_eq!(s.memory_ratio(), s.t() / int((s.k1() * s.k2()) as i64));
        let mut per_node = vec![0usize; s.k1() * s.k2()];
        for round in 0..s.rounds() {
            for (n, c) in s.node_placement(round).column_counts().into_iter().enumerate() {
                per_node[n] += c;
            }
        }
        // Every row stores one packet-sized segment; MDS segments are
        // coded packets of the same size.
        let total = s.packets_per_file() as i64;
        for c in per_node {
            assert_eq!(int(c as i64), s.memory_ratio() * int(total), "{}", describe(&s));
        }
    }
}

#[test]
fn retrieve_derivable_and_rounds_close() {
    for s in matrix_2d() {
        for round in 0..s.rounds() {
            let c = s.node_placement(round);
            assert_eq!(c, s.first_round_placement().rotate(round * s.round_shift()));
            assert_eq!(derive_user_retrieve(&c, s.topology()), s.user_retrieve(round), "{}", describe(&s));
        }
        let cols = s.k1() * s.k2();
        assert_eq!((s.rounds() * s.round_shift()) % cols, 0, "{}", describe(&s));
    }
}

#[test]
fn grouping_nodes_never_share_a_user() {
    for (k1, k2, l) in [(4, 4, 2), (6, 4, 2), (6, 6, 3), (6, 3, 3)] {
        let s = grouping_scheme(k1, k2, l, 1, k1 * k2).unwrap();
        let SchemeDetail::Grouping { groups, .. } = s.detail() else {
            panic!("grouping detail");
        };
        assert_eq!(groups.len(), l * l);
        for u in 0..k1 * k2 {
            let reach = accessible_nodes(Grid2dIndex::from_flat(u, k2), k1, k2, l);
            for g in groups {
                assert_eq!(g.nodes.iter().filter(|n| reach.contains(n)).count(), 1);
            }
        }
    }
}

#[test]
fn all_same_demand_with_elimination_stays_below_worst_case() {
    let s = grouping_scheme(4, 4, 2, 1, 16).unwrap();
    let lib = FileLibrary::for_scheme(&s, 16, 4, 3);
    let sim = Simulator::new(&s, &lib).unwrap();
    let same = DemandVector(vec![5; 16]);
    let opts = DeliveryOptions { eliminate_redundant: true };
    let (log, verdicts) = sim.run(&same, opts).unwrap();
    assert!(verdicts.iter().all(|v| v.ok));
    assert!(log.load() < int(6));
    assert_eq!(measure_worst_case(&sim, &[same], opts).unwrap(), int(6));
}

#[test]
fn hybrid_with_partition_outer() {
    use common::{all_vectors, brute_c3_delivery, type2_census};
    use gridcache::macc2d::hybrid_scheme;
    use gridcache::macc2d::tradeoff::hybrid_load_general;
    use gridcache::pda::construct_partition_pda;
    use std::collections::BTreeSet;

    // One 3x3 sub-array with two stars per row stands in for the outer PDA.
    let outer = construct_partition_pda(3, 2, 1).unwrap().sub_array(0).clone();
    let (s1, f1) = (outer.s(), outer.rows());
    let s = hybrid_scheme(5, 3, 2, 2, 15, Some(outer)).unwrap();
    let q = s.first_round_delivery();
    assert!(brute_c3_delivery(q).is_empty());
    let (ss, es, _) = type2_census(q);
    assert_eq!(ss, (1..=s1 as u32).collect::<BTreeSet<_>>());
    assert_eq!(es, all_vectors(3, 3));
    let want: Rational = hybrid_load_general(3, 2, 2, s1, f1);
    assert_eq!(s.closed_form_load(), want);
    assert_eq!(simulate_all_distinct(&s, 4), want);
}
