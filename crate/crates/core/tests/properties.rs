use proptest::prelude::*;

use shbm::bipartite::{deferred_acceptance, BipartiteInstance, Side};
use shbm::classes::{ClassCertificate, ClassHint};
use shbm::hypergraph::{lex_cmp, BMatching, HypergraphInstance};
use shbm::io::{instance_to_json, parse_instance, InstanceFile};
use shbm::laminar::solve_laminar;
use shbm::random::{gen_random, rng_from, GenSizes};
use shbm::stability::{enumerate_stable, find_blocking_edges, find_stable_containing, is_stable};
use shbm::subpath::solve_subpath;
use shbm::subtree::solve_subtree;
use shbm::uda::{
    find_doubly_blocking, random_uda, reduce_to_shbm, solve_uda_half_stable, uda_is_stable, UdaSizes,
};

fn sizes(n: usize, m: usize, cap: u32, w: i64) -> GenSizes {
    GenSizes { n_vertices: n, n_edges: m, max_edge_size: 3, min_capacity: 1, max_capacity: cap, max_weight: w }
}

fn small(class: ClassHint, seed: u64, w: i64) -> InstanceFile {
    gen_random(class, seed, &sizes(5 + (seed % 3) as usize, 6 + (seed % 4) as usize, 2, w)).unwrap()
}

fn path_of(f: &InstanceFile) -> Vec<usize> {
    match f.certificate.for_class(ClassHint::Subpath) {
        Some(ClassCertificate::PathOrdering(p)) => p,
        other => panic!("no path ordering: {other:?}"),
    }
}

fn tree_of(f: &InstanceFile) -> Vec<Option<usize>> {
    match f.certificate.for_class(ClassHint::Subtree) {
        Some(ClassCertificate::TreeWitness(t)) => t,
        other => panic!("no tree witness: {other:?}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn generator_is_deterministic(seed in any::<u64>()) {
        for class in [ClassHint::Laminar, ClassHint::Subpath, ClassHint::Subtree, ClassHint::General] {
            let a = small(class, seed, 3);
            let b = small(class, seed, 3);
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn json_round_trip(seed in any::<u64>()) {
        for class in [ClassHint::Laminar, ClassHint::Subpath, ClassHint::Subtree, ClassHint::Bipartite] {
            let f = small(class, seed, 4);
            let back = parse_instance(&instance_to_json(&f)).unwrap();
            prop_assert_eq!(back, f);
        }
    }

    #[test]
    fn laminar_output_is_stable(seed in any::<u64>()) {
        let f = small(ClassHint::Laminar, seed, 0);
        let m = solve_laminar(&f.instance).unwrap();
        m.check_feasible(&f.instance).unwrap();
        prop_assert!(find_blocking_edges(&f.instance, &m).unwrap().is_stable());
    }

    #[test]
    fn subtree_output_is_stable(seed in any::<u64>()) {
        let f = small(ClassHint::Subtree, seed, 0);
        let m = solve_subtree(&f.instance, &tree_of(&f)).unwrap();
        prop_assert!(is_stable(&f.instance, &m).unwrap());
    }

    #[test]
    fn blocking_edges_are_exactly_non_dominated(seed in any::<u64>(), mask in any::<u16>()) {
        let f = small(ClassHint::General, seed, 0);
        let inst = &f.instance;
        let mut m = BMatching::empty(inst);
        for e in 0..inst.n_edges() {
            if mask & (1 << e) != 0 && inst.edge(e).iter().all(|&v| m.load(v) < inst.capacity(v)) {
                m.insert(inst, e);
            }
        }
        let report = find_blocking_edges(inst, &m).unwrap();
        for e in 0..inst.n_edges() {
            let dominated = m.contains(e)
                || inst.edge(e).iter().any(|&v| {
                    inst.capacity(v) == 0
                        || (m.load(v) >= inst.capacity(v) && m.at(inst, v).all(|f| inst.prefers(v, f, e)))
                });
            prop_assert_eq!(report.blocking.contains(&e), !dominated);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn subpath_dp_matches_enumeration(seed in any::<u64>()) {
        let f = small(ClassHint::Subpath, seed, 5);
        let all = enumerate_stable(&f.instance, None).unwrap();
        let best = all.iter().map(|m| m.weight(&f.instance)).max();
        let dp = solve_subpath(&f.instance, &path_of(&f)).unwrap();
        prop_assert_eq!(dp.as_ref().map(|(_, w)| *w), best);
        if let Some((m, _)) = dp {
            prop_assert!(all.contains(&m));
        }
    }

    #[test]
    fn pruned_search_agrees_with_enumeration(seed in any::<u64>()) {
        let f = small(ClassHint::General, seed, 0);
        let inst = &f.instance;
        let all = enumerate_stable(inst, None).unwrap();
        for e in 0..inst.n_edges() {
            let expected = all.iter().any(|m| m.contains(e));
            let found = find_stable_containing(inst, &[e], 1_000_000).unwrap();
            prop_assert_eq!(found.is_some(), expected);
            if let Some(m) = found {
                prop_assert!(m.contains(e) && all.contains(&m));
            }
        }
    }

    #[test]
    fn deferred_acceptance_is_stable(seed in any::<u64>()) {
        let f = small(ClassHint::Bipartite, seed, 0);
        let b = BipartiteInstance::from_two_coloring(f.instance).unwrap();
        for side in [Side::Left, Side::Right] {
            let m = deferred_acceptance(&b, side);
            prop_assert!(is_stable(b.graph(), &m).unwrap());
        }
    }

    #[test]
    fn half_stable_has_no_doubly_blocking_triple(seed in any::<u64>()) {
        let sizes = UdaSizes {
            students: 4,
            universities: 2,
            max_programs_per_university: 2,
            max_list_len: 3,
            min_capacity: 1,
            max_capacity: 2,
            max_quota: 2,
            max_weight: 0,
        };
        let inst = random_uda(&mut rng_from(seed), &sizes);
        let mu = solve_uda_half_stable(&inst);
        mu.check_feasible(&inst).unwrap();
        prop_assert!(find_doubly_blocking(&inst, &mu).unwrap().is_empty());
        // The reduction preserves stability in both directions.
        let reduced = reduce_to_shbm(&inst);
        let m = reduced.to_matching(&mu).unwrap();
        prop_assert_eq!(uda_is_stable(&inst, &mu).unwrap().is_none(), is_stable(&reduced.instance, &m).unwrap());
    }

    #[test]
    fn tie_break_is_a_total_order(a in proptest::collection::vec(0usize..6, 0..5),
                                  b in proptest::collection::vec(0usize..6, 0..5)) {
        prop_assert_eq!(lex_cmp(&a, &b), lex_cmp(&b, &a).reverse());
        if a.len() < b.len() && b.starts_with(&a) {
            prop_assert_eq!(lex_cmp(&a, &b), std::cmp::Ordering::Greater);
        }
    }
}

#[test]
fn instance_equality_survives_weight_strip() {
    let f = small(ClassHint::General, 3, 2);
    let plain: HypergraphInstance = f.instance.with_weights(None).unwrap();
    assert!(!plain.has_weights());
    assert_eq!(plain.edges(), f.instance.edges());
}
