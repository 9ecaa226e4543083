mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;

use wlsa_core::lp::{lp_feasibility, lp_feasibility_with, Feasibility, LinearSystem, SolveOptions};
use wlsa_core::relax::{
    build_base_polytope, build_blp_system, build_frac_hom_system, build_sa_system, sa_feasible, sa_rank,
    FracHomVariant,
};
use wlsa_core::stark::wlk_equivalent;
use wlsa_core::structure::graphs::{complete, cycle};
use wlsa_core::witness::sa1_point_from_hom;
use wlsa_core::{Limits, Structure};

fn pair(seed: u64, max_a: usize, max_b: usize) -> (Structure, Structure) {
    let mut r = rng(seed);
    let sig = mixed_signature();
    let na = r.gen_range(1..=max_a);
    let nb = r.gen_range(1..=max_b);
    let a = random_structure(&mut r, &sig, na, 5, false);
    let b = random_structure(&mut r, &sig, nb, 7, false);
    (a, b)
}

/// Solves and re-checks whatever the solver returns.
fn checked(sys: &LinearSystem) -> bool {
    match lp_feasibility(sys).unwrap() {
        Feasibility::Feasible(x) => {
            assert!(sys.check_point(&x));
            true
        }
        Feasibility::Infeasible(c) => {
            assert!(c.verify(sys));
            false
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn levels_are_monotone(seed in any::<u64>()) {
        let (a, b) = pair(seed, 4, 3);
        let lim = Limits::default();
        let f: Vec<bool> = (1..=3).map(|k| sa_feasible(&a, &b, k, &lim).unwrap()).collect();
        prop_assert!(f.windows(2).all(|w| w[0] || !w[1]), "{:?}", f);
    }

    #[test]
    fn homomorphisms_give_feasible_points(seed in any::<u64>()) {
        let (a, b) = pair(seed, 4, 3);
        let lim = Limits::default();
        let hom = naive_hom_exists(&a, &b);
        if let Some(h) = wlsa_core::homcount::exists_hom(&a, &b).unwrap() {
            let sa = build_sa_system(&a, &b, 1, &lim).unwrap();
            prop_assert!(sa.system.check_point(&sa1_point_from_hom(&sa, &a, &h)));
        } else {
            prop_assert!(!hom);
        }
        if hom {
            prop_assert!(sa_feasible(&a, &b, 2, &lim).unwrap());
        }
    }

    #[test]
    fn answers_carry_certificates(seed in any::<u64>()) {
        let (a, b) = pair(seed, 4, 3);
        let lim = Limits::default();
        checked(&build_sa_system(&a, &b, 2, &lim).unwrap().system);
        checked(&build_base_polytope(&a, &b, &lim).unwrap().system);
    }

    #[test]
    fn presolve_and_row_order_do_not_matter(seed in any::<u64>()) {
        let (a, b) = pair(seed, 4, 3);
        let sys = build_sa_system(&a, &b, 1, &Limits::default()).unwrap().system;
        let plain = lp_feasibility_with(&sys, SolveOptions { presolve: false }).unwrap().is_feasible();
        let rev: Vec<usize> = (0..sys.num_rows()).rev().collect();
        prop_assert_eq!(checked(&sys), plain);
        prop_assert_eq!(checked(&sys.permute_rows(&rev)), plain);
    }

    #[test]
    fn sa1_matches_fractional_homomorphisms(seed in any::<u64>()) {
        let (a, b) = pair(seed, 5, 3);
        let lim = Limits::default();
        let sa1 = sa_feasible(&a, &b, 1, &lim).unwrap();
        let fh = checked(&build_frac_hom_system(&a, &b, FracHomVariant::Inequality, &lim).unwrap().system);
        prop_assert_eq!(sa1, fh);
    }

    #[test]
    fn base_polytope_contains_the_top_level(seed in any::<u64>()) {
        let (a, b) = pair(seed, 4, 3);
        let lim = Limits::default();
        if sa_feasible(&a, &b, 3, &lim).unwrap() {
            prop_assert!(checked(&build_base_polytope(&a, &b, &lim).unwrap().system));
        }
    }

    #[test]
    fn blp_matches_sa1_on_loop_free_sources(seed in any::<u64>()) {
        let mut r = rng(seed);
        let sig = mixed_signature();
        let na = r.gen_range(3..=5);
        let nb = r.gen_range(1..=3);
        let a = random_structure(&mut r, &sig, na, 5, true);
        let b = random_structure(&mut r, &sig, nb, 7, false);
        let lim = Limits::default();
        prop_assert_eq!(
            checked(&build_blp_system(&a, &b, &lim).unwrap().system),
            sa_feasible(&a, &b, 1, &lim).unwrap()
        );
    }
}

#[test]
fn triangle_needs_three_levels() {
    let lim = Limits::default();
    assert_eq!(sa_rank(&complete(3), &complete(2), 4, &lim).unwrap(), Some(3));
    assert_eq!(sa_rank(&cycle(6), &complete(2), 3, &lim).unwrap(), None);
    assert_eq!(sa_rank(&complete(4), &complete(3), 4, &lim).unwrap(), Some(4));
}

#[test]
fn cap_is_reported() {
    let lim = Limits { max_vars: 50, ..Limits::default() };
    let err = build_sa_system(&complete(3), &complete(3), 2, &lim).unwrap_err();
    assert!(err.is_resource_limit());
}

/// Structures that level k cannot tell apart behave the same on every target.
#[test]
fn equivalent_sources_agree_on_targets() {
    let lim = Limits::default();
    let mut r = rng(42);
    let pairs = [(cycle(6), two_triangles(), 2), (cycle(4), cycle(4), 2), (cycle(6), two_triangles(), 1)];
    for (a, a2, k) in pairs {
        assert!(wlk_equivalent(&a, &a2, k, &lim).unwrap());
        for _ in 0..6 {
            let n = r.gen_range(2..=3);
            let b = random_graph(&mut r, n, 0.6);
            assert_eq!(
                sa_feasible(&a, &b, k, &lim).unwrap(),
                sa_feasible(&a2, &b, k, &lim).unwrap(),
                "k={k} target {:?}",
                b.constraints()
            );
        }
        for b in [complete(2), complete(3)] {
            assert_eq!(sa_feasible(&a, &b, k, &lim).unwrap(), sa_feasible(&a2, &b, k, &lim).unwrap());
        }
    }
}
