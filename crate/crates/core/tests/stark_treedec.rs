mod common;

use common::*;
use num_bigint::BigUint;
use proptest::prelude::*;
use rand::Rng;

use wlsa_core::homcount::count_hom_ftree;
use wlsa_core::refine::same_iterated_degree_sequence;
use wlsa_core::stark::{star_structure, star_structure_with, star_universe_size, wlk_equivalent, StarSignature};
use wlsa_core::structure::graphs::{complete, cycle, path};
use wlsa_core::treedec::{exact_tree_decomposition, ftree_from_tw_structure, tw_structure_from_ftree};
use wlsa_core::{Limits, Structure};

fn treewidth(q: &Structure) -> isize {
    for w in 0..q.len() {
        if let Some(td) = exact_tree_decomposition(q, w).unwrap() {
            return td.width();
        }
    }
    unreachable!("width |Q| - 1 always fits")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn level_one_stars_refine_like_the_structures(s1 in any::<u64>(), s2 in any::<u64>()) {
        let mut r = rng(s1);
        let sig = mixed_signature();
        let n = r.gen_range(1..=4);
        let a = random_structure(&mut r, &sig, n, 6, false);
        let b = if s2 % 2 == 0 { shuffled(&mut r, &a) } else { perturbed(&mut r, &a) };
        let lim = Limits::default();
        let star = StarSignature::new(sig, 1).unwrap();
        let sa = star_structure_with(&a, &star, &lim).unwrap();
        let sb = star_structure_with(&b, &star, &lim).unwrap();
        prop_assert_eq!(
            same_iterated_degree_sequence(&sa, &sb).unwrap(),
            same_iterated_degree_sequence(&a, &b).unwrap()
        );
    }

    #[test]
    fn decompositions_verify(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=7);
        let q = random_structure(&mut r, &mixed_signature(), n, 7, false);
        let td = exact_tree_decomposition(&q, n).unwrap().expect("fits");
        prop_assert_eq!(td.verify(&q), Ok(()));
        prop_assert!(td.is_normalized(&q));
        let w = td.width();
        if w > 0 {
            prop_assert!(exact_tree_decomposition(&q, (w - 1) as usize).unwrap().is_none());
        }
    }

    #[test]
    fn translations_preserve_counts(seed in any::<u64>()) {
        let mut r = rng(seed);
        let sig = graph_signature();
        let n = r.gen_range(1..=5);
        let q = random_connected(&mut r, &sig, n, 6);
        let k = (treewidth(&q) + 1).max(1) as usize;
        prop_assume!(k <= 3);
        let lim = Limits::default();
        let star = StarSignature::new(sig.clone(), k.max(2)).unwrap();
        let td = exact_tree_decomposition(&q, k.max(2) - 1).unwrap().unwrap();
        let t = ftree_from_tw_structure(&q, &td, &star).unwrap();
        let back = tw_structure_from_ftree(&t, &star).unwrap();
        for _ in 0..3 {
            let m = r.gen_range(1..=3);
            let d = random_digraph(&mut r, m, 0.5);
            let direct = naive_hom_count(&q, &d);
            let ds = star_structure_with(&d, &star, &lim).unwrap();
            prop_assert_eq!(count_hom_ftree(&t, &ds).unwrap(), BigUint::from(direct));
            prop_assert_eq!(naive_hom_count(&back, &d), direct);
        }
    }
}

#[test]
fn known_treewidths() {
    assert_eq!(treewidth(&complete(4)), 3);
    assert_eq!(treewidth(&cycle(5)), 2);
    assert_eq!(treewidth(&path(5)), 1);
    assert_eq!(treewidth(&complete(1)), 0);
}

#[test]
fn star_sizes() {
    let lim = Limits::default();
    let s = star_structure(&cycle(4), 2, &lim).unwrap();
    assert_eq!(s.len() as u128, star_universe_size(&cycle(4), 2));
    assert_eq!(s.len(), 4 + 16 + 8);
    let tiny = Limits { max_universe: 10, ..lim };
    assert!(star_structure(&cycle(4), 2, &tiny).unwrap_err().is_resource_limit());
}

#[test]
fn level_is_reflexive() {
    let lim = Limits::default();
    for k in 1..=3 {
        assert!(wlk_equivalent(&c6_with_chord(), &c6_with_chord(), k, &lim).unwrap());
    }
    assert!(!wlk_equivalent(&cycle(4), &path(4), 1, &lim).unwrap());
}

/// Structures equivalent at level k have equal counts from every connected
/// structure of treewidth below k.
#[test]
fn equivalence_implies_equal_counts() {
    let lim = Limits::default();
    let mut r = rng(9);
    let sig = graph_signature();
    let pairs = [
        (cycle(6), two_triangles()),
        (cycle(8), wlsa_core::structure::disjoint_union(&cycle(4), &cycle(4)).unwrap()),
        (cycle(5), cycle(5)),
    ];
    let mut probes: Vec<(Structure, isize)> = Vec::new();
    while probes.len() < 60 {
        let n = r.gen_range(1..=5);
        let q = random_connected(&mut r, &sig, n, 6);
        let w = treewidth(&q);
        probes.push((q, w));
    }
    let mut used = 0;
    for (a, b) in pairs {
        for k in 2..=3usize {
            if !wlk_equivalent(&a, &b, k, &lim).unwrap() {
                continue;
            }
            for (q, w) in &probes {
                if *w < k as isize {
                    used += 1;
                    assert_eq!(naive_hom_count(q, &a), naive_hom_count(q, &b), "k={k}");
                }
            }
        }
    }
    assert!(used > 100);
}
