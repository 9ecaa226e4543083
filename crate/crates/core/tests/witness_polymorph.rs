mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;

use wlsa_core::equitable::{verify_matrix_identities, MatrixKind};
use wlsa_core::homcount::exists_hom;
use wlsa_core::polymorph::{is_symmetric_polymorphism, power_structure, symmetric_polymorphism, SymmetricOperation};
use wlsa_core::relax::{build_sa_system, solve_sa};
use wlsa_core::structure::graphs::{complete, cycle};
use wlsa_core::witness::{chain_matrices, decompose_sa1, sa1_point_from_hom, verify_chain, Evidence};
use wlsa_core::{Limits, Rat};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn integral_points_decompose(seed in any::<u64>()) {
        let mut r = rng(seed);
        let na = r.gen_range(1..=4);
        let nb = r.gen_range(1..=3);
        let a = random_digraph(&mut r, na, 0.4);
        let b = random_digraph(&mut r, nb, 0.6);
        let lim = Limits::default();
        let Some(h) = exists_hom(&a, &b).unwrap() else { return Ok(()) };
        let sa = build_sa_system(&a, &b, 1, &lim).unwrap();
        let d = decompose_sa1(&a, &b, &sa1_point_from_hom(&sa, &a, &h), &lim).unwrap();
        prop_assert_eq!(d.m, 1);
        let chain = d.chain(&a, &b);
        prop_assert!(verify_chain(&chain).unwrap());
        let (x, y) = chain_matrices(&chain).unwrap().unwrap();
        prop_assert!(x.is_left_stochastic() && y.is_left_stochastic());
        prop_assert!(verify_matrix_identities(MatrixKind::FracHom, &a, &b, &x, &y).unwrap());
    }

    #[test]
    fn lp_points_with_small_denominators_decompose(seed in any::<u64>()) {
        let mut r = rng(seed);
        let na = r.gen_range(1..=3);
        let a = random_digraph(&mut r, na, 0.5);
        let b = random_digraph(&mut r, 2, 0.5);
        let lim = Limits { max_m: 3, ..Limits::default() };
        let (_, f) = solve_sa(&a, &b, 1, &lim).unwrap();
        let Some(p) = f.point() else { return Ok(()) };
        match decompose_sa1(&a, &b, p, &lim) {
            Ok(d) => prop_assert!(verify_chain(&d.chain(&a, &b)).unwrap()),
            Err(e) => prop_assert!(e.is_resource_limit(), "{}", e),
        }
    }
}

#[test]
fn triangle_into_edge() {
    let (a, b) = (complete(3), complete(2));
    let lim = Limits::default();
    let sa = build_sa_system(&a, &b, 1, &lim).unwrap();
    let half = Rat::new(1, 2);
    let p: Vec<Rat> = sa
        .keys
        .iter()
        .map(|k| match k {
            wlsa_core::relax::SaVar::Set { .. } => half.clone(),
            wlsa_core::relax::SaVar::Constraint { constraint, values } => {
                let _ = constraint;
                if values[0] != values[1] { half.clone() } else { Rat::zero() }
            }
        })
        .collect();
    assert!(sa.system.check_point(&p));
    let d = decompose_sa1(&a, &b, &p, &lim).unwrap();
    assert_eq!((d.m, d.x1.len(), d.x2.len()), (2, 18, 18));
    let chain = d.chain(&a, &b);
    assert!(verify_chain(&chain).unwrap());
    assert!(matches!(chain[1].evidence, Evidence::Wl1(_)));
    // There is no homomorphism, so the middle step cannot be one.
    assert!(exists_hom(&a, &b).unwrap().is_none());
    let tight = Limits { max_m: 1, ..lim };
    assert!(decompose_sa1(&a, &b, &p, &tight).unwrap_err().is_resource_limit());
}

#[test]
fn broken_chains_are_rejected() {
    let (a, b) = (cycle(4), complete(2));
    let lim = Limits::default();
    let sa = build_sa_system(&a, &b, 1, &lim).unwrap();
    let h = exists_hom(&a, &b).unwrap().unwrap();
    let d = decompose_sa1(&a, &b, &sa1_point_from_hom(&sa, &a, &h), &lim).unwrap();
    let mut chain = d.chain(&a, &b);
    chain[2].evidence = Evidence::Hom(vec![0; d.x2.len()]);
    assert!(!verify_chain(&chain).unwrap());
    chain.swap(0, 2);
    assert!(verify_chain(&chain).is_err());
}

#[test]
fn power_sizes() {
    let lim = Limits::default();
    let mut r = rng(3);
    for _ in 0..10 {
        let n = r.gen_range(1..=3);
        let b = random_digraph(&mut r, n, 0.5);
        for k in 1..=3 {
            let p = power_structure(&b, k, &lim).unwrap();
            assert_eq!(p.len(), n.pow(k as u32));
            assert_eq!(p.num_constraints(), b.num_constraints().pow(k as u32));
        }
    }
}

#[test]
fn polymorphism_search() {
    let lim = Limits::default();
    assert!(symmetric_polymorphism(&complete(2), 2, &lim).unwrap().is_none());
    assert!(symmetric_polymorphism(&complete(3), 2, &lim).unwrap().is_none());
    assert!(symmetric_polymorphism(&complete(3), 3, &lim).unwrap().is_none());
    for n in 2..=4 {
        let op = symmetric_polymorphism(&order2(), n, &lim).unwrap().expect("exists");
        assert!(is_symmetric_polymorphism(&order2(), &op, &lim).unwrap());
    }
    // min is a polymorphism of the order, a constant map is not
    let constant = SymmetricOperation {
        arity: 2,
        table: [(vec![0, 0], 1), (vec![0, 1], 1), (vec![1, 1], 0)].into_iter().collect(),
    };
    assert!(!is_symmetric_polymorphism(&order2(), &constant, &lim).unwrap());
}
