//! Shared generators and oracles for the integration tests.
#![allow(dead_code)]

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wlsa_core::lp::lp_feasibility;
use wlsa_core::structure::graphs::{cycle, undirected};
use wlsa_core::structure::{disjoint_union, is_connected, is_homomorphism};
use wlsa_core::{Constraint, Signature, Structure};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One binary symbol `E` and one ternary symbol `R`.
pub fn mixed_signature() -> Arc<Signature> {
    Arc::new(Signature::new([("E", 2), ("R", 3)]).unwrap())
}

pub fn graph_signature() -> Arc<Signature> {
    Arc::new(Signature::graph())
}

fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("e{i}")).collect()
}

/// Random structure with exactly `n` elements and up to `max_constraints`
/// constraints (repeated arguments allowed unless `loop_free`).
pub fn random_structure(
    rng: &mut impl Rng,
    sig: &Arc<Signature>,
    n: usize,
    max_constraints: usize,
    loop_free: bool,
) -> Structure {
    let m = rng.gen_range(0..=max_constraints);
    let mut cs = Vec::with_capacity(m);
    for _ in 0..m {
        let symbol = rng.gen_range(0..sig.len());
        let arity = sig.arity(symbol);
        if loop_free && arity > n {
            continue;
        }
        let args = if loop_free {
            let mut all: Vec<usize> = (0..n).collect();
            all.shuffle(rng);
            all.truncate(arity);
            all
        } else {
            (0..arity).map(|_| rng.gen_range(0..n)).collect()
        };
        cs.push(Constraint::new(symbol, args));
    }
    cs.sort();
    cs.dedup();
    Structure::new("S", sig.clone(), names(n), cs).unwrap()
}

/// Random structure whose factor graph is connected.
pub fn random_connected(rng: &mut impl Rng, sig: &Arc<Signature>, n: usize, max_constraints: usize) -> Structure {
    loop {
        let s = random_structure(rng, sig, n, max_constraints, false);
        if is_connected(&s) {
            return s;
        }
    }
}

/// A uniformly random relabelling of the elements.
pub fn shuffled(rng: &mut impl Rng, s: &Structure) -> Structure {
    let mut perm: Vec<usize> = (0..s.len()).collect();
    perm.shuffle(rng);
    s.permuted(&perm).unwrap()
}

/// `s` with one constraint moved to fresh random arguments.
pub fn perturbed(rng: &mut impl Rng, s: &Structure) -> Structure {
    let mut cs = s.constraints().to_vec();
    if cs.is_empty() {
        return s.clone();
    }
    let i = rng.gen_range(0..cs.len());
    let arity = cs[i].args.len();
    cs[i].args = (0..arity).map(|_| rng.gen_range(0..s.len())).collect();
    cs.sort();
    cs.dedup();
    Structure::new("S", s.signature_arc().clone(), s.elements().to_vec(), cs).unwrap()
}

/// Pairs for the fractional isomorphism suite: independent, relabelled and
/// perturbed copies.
pub fn frac_iso_pairs(seed: u64, count: usize) -> Vec<(Structure, Structure)> {
    let mut r = rng(seed);
    let sig = mixed_signature();
    (0..count)
        .map(|i| {
            let n = r.gen_range(1..=5);
            let a = random_structure(&mut r, &sig, n, 8, false);
            let b = match i % 3 {
                0 => {
                    let mut b = random_structure(&mut r, &sig, n, 8, false);
                    if r.gen_bool(0.5) {
                        b = b.reorder_constraints(&(0..b.num_constraints()).rev().collect::<Vec<_>>());
                    }
                    b
                }
                1 => shuffled(&mut r, &a),
                _ => {
                    let p = perturbed(&mut r, &a);
                    shuffled(&mut r, &p)
                }
            };
            (a, b)
        })
        .collect()
}

/// `2C3`: two disjoint triangles.
pub fn two_triangles() -> Structure {
    disjoint_union(&cycle(3), &cycle(3)).unwrap()
}

pub fn c6_with_chord() -> Structure {
    let mut edges: Vec<(usize, usize)> = (0..6).map(|i| (i, (i + 1) % 6)).collect();
    edges.push((0, 3));
    undirected("C6c", 6, &edges)
}

/// Graph-signature pairs used across suites.
pub fn curated_graph_pairs() -> Vec<(Structure, Structure)> {
    use wlsa_core::structure::graphs::*;
    let cube = undirected(
        "Q3",
        8,
        &[(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 7), (7, 4), (0, 4), (1, 5), (2, 6), (3, 7)],
    );
    // Two disjoint K4's: 3-regular on 8 vertices but not isomorphic to the cube.
    let two_k4 = disjoint_union(&complete(4), &complete(4)).unwrap();
    vec![
        (cycle(6), two_triangles()),
        (cycle(4), path(4)),
        (cycle(6), c6_with_chord()),
        (cube, two_k4),
        (complete(3), complete(3)),
        (cycle(5), cycle(5)),
        (complete(3), complete(2)),
    ]
}

/// Exhaustive homomorphism count with no pruning.
pub fn naive_hom_count(q: &Structure, a: &Structure) -> u64 {
    let n = q.len();
    let mut map = vec![0usize; n];
    let mut count = 0;
    loop {
        if is_homomorphism(q, a, &map) {
            count += 1;
        }
        let mut i = 0;
        loop {
            if i == n {
                return count;
            }
            map[i] += 1;
            if map[i] < a.len() {
                break;
            }
            map[i] = 0;
            i += 1;
        }
    }
}

/// Whether some map `a -> b` is a homomorphism, by exhaustive enumeration.
pub fn naive_hom_exists(a: &Structure, b: &Structure) -> bool {
    naive_hom_count(a, b) > 0
}

pub fn feasible(sys: &wlsa_core::lp::LinearSystem) -> bool {
    lp_feasibility(sys).unwrap().is_feasible()
}

/// The ordered pair relation `{(0,0), (0,1), (1,1)}`.
pub fn order2() -> Structure {
    wlsa_core::structure::graphs::directed("Le", 2, &[(0, 0), (0, 1), (1, 1)])
}

/// Random loop-free undirected graph on `n` vertices.
pub fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> Structure {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                edges.push((i, j));
            }
        }
    }
    undirected("G", n, &edges)
}

/// Random digraph on `n` vertices, loops allowed.
pub fn random_digraph(rng: &mut impl Rng, n: usize, p: f64) -> Structure {
    let mut arcs = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if rng.gen_bool(p) {
                arcs.push((i, j));
            }
        }
    }
    wlsa_core::structure::graphs::directed("D", n, &arcs)
}

/// Homomorphism check against a hash set of the target's tuples.
pub fn check_hom(a: &Structure, b: &Structure, h: &[usize]) -> bool {
    let tuples: std::collections::HashSet<(usize, Vec<usize>)> =
        b.constraints().iter().map(|c| (c.symbol, c.args.clone())).collect();
    h.len() == a.len()
        && h.iter().all(|&x| x < b.len())
        && a
            .constraints()
            .iter()
            .all(|c| tuples.contains(&(c.symbol, c.args.iter().map(|&x| h[x]).collect())))
}

/// Parameters of a partition computed by direct counting, or `None` if some
/// count differs inside a class. Keys are `(own class, symbol, position mask,
/// other class)`; element-side and constraint-side tables are kept apart.
pub type ParamTable = std::collections::BTreeMap<(bool, usize, usize, u64, usize), usize>;

pub fn equitable_parameters(s: &Structure, eclass: &[usize], cclass: &[usize]) -> Option<ParamTable> {
    use std::collections::BTreeMap;
    // incidences[(e, c)] -> position mask
    let mut per_element: Vec<BTreeMap<(usize, u64, usize), usize>> = vec![BTreeMap::new(); s.len()];
    let mut per_constraint: Vec<BTreeMap<(usize, u64, usize), usize>> = vec![BTreeMap::new(); s.num_constraints()];
    for (ci, c) in s.constraints().iter().enumerate() {
        let mut seen = Vec::new();
        for &e in &c.args {
            if seen.contains(&e) {
                continue;
            }
            seen.push(e);
            let mask = c.args.iter().enumerate().filter(|(_, &x)| x == e).fold(0u64, |m, (i, _)| m | 1 << i);
            *per_element[e].entry((c.symbol, mask, cclass[ci])).or_default() += 1;
            *per_constraint[ci].entry((c.symbol, mask, eclass[e])).or_default() += 1;
        }
    }
    let mut table = ParamTable::new();
    let mut add = |side: bool, own: usize, rows: &BTreeMap<(usize, u64, usize), usize>, first: &mut BTreeMap<usize, BTreeMap<(usize, u64, usize), usize>>| {
        match first.get(&own) {
            Some(prev) => prev == rows,
            None => {
                for (&(sym, mask, other), &n) in rows {
                    table.insert((side, own, sym, mask, other), n);
                }
                first.insert(own, rows.clone());
                true
            }
        }
    };
    let mut first_e = BTreeMap::new();
    for (e, rows) in per_element.iter().enumerate() {
        if !add(false, eclass[e], rows, &mut first_e) {
            return None;
        }
    }
    let mut first_c = BTreeMap::new();
    for (c, rows) in per_constraint.iter().enumerate() {
        if !add(true, cclass[c], rows, &mut first_c) {
            return None;
        }
    }
    Some(table)
}

pub fn class_sizes(class: &[usize]) -> Vec<usize> {
    let n = class.iter().max().map_or(0, |m| m + 1);
    let mut sizes = vec![0; n];
    for &c in class {
        sizes[c] += 1;
    }
    sizes
}
