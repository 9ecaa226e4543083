//! Acceptance run: one line per criterion, exit code 1 on any unexpected failure.

mod common;

use std::collections::HashMap;
use std::time::Instant;

use rand::Rng;

use common::*;
use wlsa_core::equitable::{
    common_equitable_partition, fractional_iso_witness, verify_matrix_identities, MatrixKind,
};
use wlsa_core::ftrees::enumerate_ftrees;
use wlsa_core::homcount::{count_hom_bruteforce, count_hom_ftree, exists_hom, is_ftree};
use wlsa_core::lp::lp_feasibility;
use wlsa_core::matrix::RatMatrix;
use wlsa_core::polymorph::{is_symmetric_polymorphism, symmetric_polymorphism};
use wlsa_core::refine::same_iterated_degree_sequence;
use wlsa_core::relax::{
    build_base_polytope, build_blp_system, build_frac_hom_system, build_frac_iso_system, build_sa_system,
    sa_feasible, sa_rank, solve_sa, FracHomVariant, SaSystem, SaVar,
};
use wlsa_core::stark::{star_structure_with, wlk_equivalent, StarSignature};
use wlsa_core::structure::graphs::{complete, cycle, directed, path};
use wlsa_core::treedec::{exact_tree_decomposition, ftree_from_tw_structure, tw_structure_from_ftree};
use wlsa_core::witness::{decompose_sa1, sa1_point_from_hom, verify_chain};
use wlsa_core::{Error, Limits, Rat, Structure};

/// Result of one criterion.
struct Outcome {
    failures: Vec<String>,
    /// Failures that match a documented conflict between the expected value
    /// and the definition; reported, but they do not fail the run.
    known: Vec<String>,
    summary: String,
}

impl Outcome {
    fn new() -> Self {
        Outcome { failures: Vec::new(), known: Vec::new(), summary: String::new() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }
}

fn frac_iso_feasible(a: &Structure, b: &Structure, lim: &Limits) -> bool {
    match build_frac_iso_system(a, b, lim) {
        Ok(m) => feasible(&m.system),
        Err(Error::InfeasibleBySize(_)) => false,
        Err(e) => panic!("frac-iso system: {e}"),
    }
}

fn label_of(c: &wlsa_core::Constraint, e: usize) -> u64 {
    c.args.iter().enumerate().filter(|(_, &x)| x == e).fold(0, |m, (i, _)| m | 1 << i)
}

/// `X M_A^l = M_B^l Y` and `M_A^l Y^T = X^T M_B^l` for every label, computed
/// entry by entry.
fn iso_identities(a: &Structure, b: &Structure, x: &RatMatrix, y: &RatMatrix) -> bool {
    if !x.is_doubly_stochastic() || !y.is_doubly_stochastic() {
        return false;
    }
    let mut labels: Vec<(usize, u64)> = Vec::new();
    for s in [a, b] {
        for c in s.constraints() {
            for &e in &c.args {
                labels.push((c.symbol, label_of(c, e)));
            }
        }
    }
    labels.sort();
    labels.dedup();
    let inc = |s: &Structure, e: usize, c: usize, l: (usize, u64)| {
        let con = &s.constraints()[c];
        con.symbol == l.0 && con.args.contains(&e) && label_of(con, e) == l.1
    };
    for &l in &labels {
        for eb in 0..b.len() {
            for ca in 0..a.num_constraints() {
                let mut lhs = Rat::zero();
                for ea in 0..a.len() {
                    if inc(a, ea, ca, l) {
                        lhs = &lhs + &x.get(eb, ea);
                    }
                }
                let mut rhs = Rat::zero();
                for cb in 0..b.num_constraints() {
                    if inc(b, eb, cb, l) {
                        rhs = &rhs + &y.get(cb, ca);
                    }
                }
                if lhs != rhs {
                    return false;
                }
            }
        }
        for ea in 0..a.len() {
            for cb in 0..b.num_constraints() {
                let mut lhs = Rat::zero();
                for ca in 0..a.num_constraints() {
                    if inc(a, ea, ca, l) {
                        lhs = &lhs + &y.get(cb, ca);
                    }
                }
                let mut rhs = Rat::zero();
                for eb in 0..b.len() {
                    if inc(b, eb, cb, l) {
                        rhs = &rhs + &x.get(eb, ea);
                    }
                }
                if lhs != rhs {
                    return false;
                }
            }
        }
    }
    true
}

fn suite_pairs() -> Vec<(Structure, Structure)> {
    let mut pairs = frac_iso_pairs(0xA11CE, 240);
    pairs.extend(curated_graph_pairs());
    pairs
}

fn ac1_frac_iso() -> Outcome {
    let lim = Limits::default();
    let mut out = Outcome::new();
    let pairs = suite_pairs();
    let (mut equiv, mut witnesses) = (0, 0);
    for (i, (a, b)) in pairs.iter().enumerate() {
        let lp = frac_iso_feasible(a, b, &lim);
        let deg = same_iterated_degree_sequence(a, b).unwrap();
        let cep = common_equitable_partition(a, b).unwrap();
        out.check(lp == deg && deg == cep.is_some(), || {
            format!("pair {i}: lp={lp} degree={deg} equitable={}", cep.is_some())
        });
        if let Some(w) = cep {
            equiv += 1;
            let (x, y) = fractional_iso_witness(&w);
            let ok = iso_identities(a, b, &x, &y)
                && verify_matrix_identities(MatrixKind::FracIso, a, b, &x, &y).unwrap();
            out.check(ok, || format!("pair {i}: witness matrices do not verify"));
            witnesses += 1;
        }
    }
    out.summary = format!("{} pairs, {equiv} equivalent, {witnesses} witnesses re-verified", pairs.len());
    out
}

fn ac2_ftree_counts() -> Outcome {
    let mut out = Outcome::new();
    let pairs = frac_iso_pairs(0xA11CE, 240);
    let trees = enumerate_ftrees(&mixed_signature(), 3).unwrap();
    let mut compared = 0;
    for (i, (a, b)) in pairs.iter().enumerate() {
        if common_equitable_partition(a, b).unwrap().is_none() {
            continue;
        }
        for t in &trees {
            let (ca, cb) = (count_hom_ftree(t, a).unwrap(), count_hom_ftree(t, b).unwrap());
            compared += 1;
            out.check(ca == cb, || format!("pair {i}: ftree {} gives {ca} vs {cb}", t.name()));
        }
    }
    let graph_trees = enumerate_ftrees(&graph_signature(), 3).unwrap();
    for (a, b) in [(cycle(4), path(4)), (cycle(6), c6_with_chord())] {
        let found = graph_trees
            .iter()
            .find(|t| count_hom_ftree(t, &a).unwrap() != count_hom_ftree(t, &b).unwrap());
        out.check(found.is_some(), || format!("no ftree with <= 3 constraints separates {} and {}", a.name(), b.name()));
    }
    let (c6, tt) = (cycle(6), two_triangles());
    let agree = graph_trees.iter().all(|t| count_hom_ftree(t, &c6).unwrap() == count_hom_ftree(t, &tt).unwrap());
    out.check(agree, || "C6 and 2C3 differ on some ftree".into());
    out.summary = format!(
        "{} mixed ftrees, {} graph ftrees, {compared} counts compared, separating trees found",
        trees.len(),
        graph_trees.len()
    );
    out
}

fn random_pair(r: &mut impl Rng, loop_free: bool) -> (Structure, Structure) {
    let sig = mixed_signature();
    let na = r.gen_range(1..=4);
    let nb = r.gen_range(1..=3);
    let lo = if loop_free { 3 } else { 1 };
    let a = random_structure(r, &sig, na.max(lo), 5, loop_free);
    let b = random_structure(r, &sig, nb.max(lo.min(3)), 8, loop_free);
    (a, b)
}

fn ac3_frac_hom() -> Outcome {
    let lim = Limits::default();
    let mut out = Outcome::new();
    let mut r = rng(0xF4AC);
    let (mut total, mut feas, mut loop_free_pairs) = (0, 0, 0);
    for i in 0..260 {
        let lf = i % 2 == 1;
        let (a, b) = random_pair(&mut r, lf);
        let sa1 = sa_feasible(&a, &b, 1, &lim).unwrap();
        let ineq = feasible(&build_frac_hom_system(&a, &b, FracHomVariant::Inequality, &lim).unwrap().system);
        out.check(sa1 == ineq, || format!("pair {i}: SA1={sa1} frac-hom={ineq}"));
        if a.is_loop_free() && b.is_loop_free() {
            loop_free_pairs += 1;
            let eq =
                feasible(&build_frac_hom_system(&a, &b, FracHomVariant::LoopFreeEquality, &lim).unwrap().system);
            out.check(sa1 == eq, || format!("pair {i}: SA1={sa1} equality variant={eq}"));
        }
        total += 1;
        feas += sa1 as usize;
    }
    out.summary = format!("{total} pairs ({feas} feasible), {loop_free_pairs} loop-free pairs checked with equalities");
    out
}

fn ac4_separation() -> Outcome {
    let lim = Limits::default();
    let mut out = Outcome::new();
    let rank = sa_rank(&complete(3), &complete(2), 4, &lim).unwrap();
    out.check(rank == Some(3), || format!("sa_rank(K3, K2, 4) = {rank:?}"));
    let (c3, c6) = (cycle(3), cycle(6));
    out.check(sa_feasible(&c3, &c6, 1, &lim).unwrap(), || "SA1(C3, C6) infeasible".into());
    let h = exists_hom(&c3, &c6).unwrap();
    out.check(h.is_none(), || "found a homomorphism C3 -> C6".into());
    out.check(!naive_hom_exists(&c3, &c6), || "oracle found a homomorphism C3 -> C6".into());
    out.check(sa_feasible(&c6, &c3, 1, &lim).unwrap(), || "SA1(C6, C3) infeasible".into());
    match exists_hom(&c6, &c3).unwrap() {
        Some(h) => out.check(check_hom(&c6, &c3, &h), || "C6 -> C3 witness is not a homomorphism".into()),
        None => out.check(false, || "no homomorphism C6 -> C3".into()),
    }
    out.summary = format!("rank(K3,K2)={rank:?}, C3/C6 both directions");
    out
}

fn ac5_star_lift() -> Outcome {
    let lim = Limits::default();
    let mut out = Outcome::new();
    let mut r = rng(0x57A2);
    let star = StarSignature::new(graph_signature(), 2).unwrap();
    let (mut n, mut feas) = (0, 0);
    while n < 30 {
        let na = r.gen_range(2..=4);
        let nb = r.gen_range(2..=4);
        let a = random_digraph(&mut r, na, 0.5);
        let b = random_digraph(&mut r, nb, 0.3);
        let direct = sa_feasible(&a, &b, 2, &lim).unwrap();
        let sa = star_structure_with(&a, &star, &lim).unwrap();
        let sb = star_structure_with(&b, &star, &lim).unwrap();
        let lifted = sa_feasible(&sa, &sb, 1, &lim).unwrap();
        out.check(direct == lifted, || format!("pair {n}: SA2={direct} SA1 on stars={lifted}"));
        n += 1;
        feas += direct as usize;
    }
    out.summary = format!("{n} pairs ({feas} feasible)");
    out
}

/// A point of `SA^1(a, b)` for loop-free `a` and a target whose relations
/// hit every element equally often in every position: uniform values.
fn uniform_point(sa: &SaSystem, a: &Structure, b: &Structure) -> Vec<Rat> {
    let by_symbol = b.constraints_by_symbol();
    let tuples: std::collections::HashSet<(usize, Vec<usize>)> =
        b.constraints().iter().map(|c| (c.symbol, c.args.clone())).collect();
    sa.keys
        .iter()
        .map(|key| match key {
            SaVar::Set { elements, .. } => Rat::new(1, (b.len() as i64).pow(elements.len() as u32)),
            SaVar::Constraint { constraint, values } => {
                let c = &a.constraints()[*constraint];
                let mut scope = c.scope();
                scope.sort_unstable();
                let image: Vec<usize> =
                    c.args.iter().map(|e| values[scope.iter().position(|x| x == e).unwrap()]).collect();
                if tuples.contains(&(c.symbol, image)) {
                    Rat::new(1, by_symbol[c.symbol].len() as i64)
                } else {
                    Rat::zero()
                }
            }
        })
        .collect()
}

fn directed_cycle(n: usize) -> Structure {
    let arcs: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    directed(&format!("D{n}"), n, &arcs)
}

fn ac6_decomposition() -> Outcome {
    let lim = Limits::default();
    let mut out = Outcome::new();
    let mut instances: Vec<(Structure, Structure, Vec<Rat>)> = Vec::new();
    let uniform = [
        (complete(3), complete(2)),
        (cycle(5), complete(2)),
        (cycle(4), complete(2)),
        (path(3), complete(2)),
        (directed_cycle(4), directed_cycle(3)),
        (directed_cycle(2), directed_cycle(3)),
    ];
    for (a, b) in uniform {
        let sa = build_sa_system(&a, &b, 1, &lim).unwrap();
        let p = uniform_point(&sa, &a, &b);
        assert!(sa.system.check_point(&p), "uniform point for {} -> {}", a.name(), b.name());
        instances.push((a, b, p));
    }
    for (a, b) in [(cycle(6), cycle(3)), (path(4), complete(2)), (cycle(6), complete(2)), (complete(3), complete(3))] {
        let sa = build_sa_system(&a, &b, 1, &lim).unwrap();
        let h = exists_hom(&a, &b).unwrap().expect("homomorphism exists");
        let p = sa1_point_from_hom(&sa, &a, &h);
        instances.push((a, b, p));
    }
    let mut r = rng(0xDEC0);
    let mut from_lp = 0;
    while from_lp < 3 {
        let na = r.gen_range(2..=3);
        let a = random_digraph(&mut r, na, 0.4);
        let b = random_digraph(&mut r, 2, 0.5);
        let (_, f) = solve_sa(&a, &b, 1, &lim).unwrap();
        if let Some(p) = f.point() {
            if Rat::common_denominator(p.iter()) <= 3.into() {
                instances.push((a, b, p.to_vec()));
                from_lp += 1;
            }
        }
    }
    let mut ms = HashMap::new();
    for (i, (a, b, p)) in instances.iter().enumerate() {
        let d = match decompose_sa1(a, b, p, &lim) {
            Ok(d) => d,
            Err(e) => {
                out.check(false, || format!("instance {i} ({} -> {}): {e}", a.name(), b.name()));
                continue;
            }
        };
        *ms.entry(d.m).or_insert(0) += 1;
        let chain = d.chain(a, b);
        out.check(verify_chain(&chain).unwrap(), || format!("instance {i}: chain rejected"));
        out.check(check_hom(a, &d.x1, &d.h1), || format!("instance {i}: A -> X1 fails"));
        out.check(check_hom(&d.x2, b, &d.h2), || format!("instance {i}: X2 -> B fails"));
        // Every element of X2 is `a:b.c/...`; the map keeps the first `b`.
        let proj_ok = (0..d.x2.len()).all(|x| {
            let name = d.x2.element_name(x);
            let first = name.split_once(':').unwrap().1.split('/').next().unwrap();
            first.rsplit_once('.').unwrap().0 == b.element_name(d.h2[x])
        });
        out.check(proj_ok, || format!("instance {i}: h2 is not the first projection"));
        let w = &d.witness;
        let t1 = equitable_parameters(&d.x1, &w.partition_a.element_class, &w.partition_a.constraint_class);
        let t2 = equitable_parameters(&d.x2, &w.partition_b.element_class, &w.partition_b.constraint_class);
        out.check(t1.is_some() && t1 == t2, || format!("instance {i}: orbit partition not equitable"));
        out.check(
            class_sizes(&w.partition_a.element_class) == class_sizes(&w.partition_b.element_class)
                && class_sizes(&w.partition_a.constraint_class) == class_sizes(&w.partition_b.constraint_class),
            || format!("instance {i}: class sizes differ"),
        );
        out.check(d.x1.len() == d.x2.len(), || format!("instance {i}: |X1| != |X2|"));
        if i == 0 {
            out.check(d.m == 2 && d.x1.len() == 18 && d.x2.len() == 18, || {
                format!("K3 -> K2: m={} |X1|={} |X2|={}", d.m, d.x1.len(), d.x2.len())
            });
        }
        out.check(d.m <= 3, || format!("instance {i}: m = {}", d.m));
    }
    let mut ms: Vec<_> = ms.into_iter().collect();
    ms.sort();
    out.summary = format!("{} decompositions, by m: {ms:?}", instances.len());
    out
}

fn ac7_treewidth_translation() -> Outcome {
    let lim = Limits::default();
    let mut out = Outcome::new();
    let mut r = rng(0x7D);
    let setups = [(graph_signature(), 2usize), (graph_signature(), 3), (mixed_signature(), 3)];
    let mut per_setup = vec![0usize; setups.len()];
    let mut counts = 0;
    for (si, (sig, k)) in setups.iter().enumerate() {
        let star = StarSignature::new(sig.clone(), *k).unwrap();
        let targets: Vec<Structure> = (0..6)
            .map(|_| {
                let n = r.gen_range(1..=4);
                random_structure(&mut r, sig, n, 7, false)
            })
            .collect();
        let stars: Vec<Structure> = targets.iter().map(|d| star_structure_with(d, &star, &lim).unwrap()).collect();
        let mut attempts = 0;
        while per_setup[si] < 20 && attempts < 5000 {
            attempts += 1;
            let n = r.gen_range(1..=5);
            let q = random_connected(&mut r, sig, n, 5);
            let Some(td) = exact_tree_decomposition(&q, k - 1).unwrap() else { continue };
            per_setup[si] += 1;
            let t = match ftree_from_tw_structure(&q, &td, &star) {
                Ok(t) => t,
                Err(e) => {
                    out.check(false, || format!("{}: ftree_from_tw_structure failed: {e}", q_desc(&q)));
                    continue;
                }
            };
            out.check(is_ftree(&t), || format!("{}: translation is not an ftree", q_desc(&q)));
            let back = tw_structure_from_ftree(&t, &star).unwrap();
            for (d, ds) in targets.iter().zip(&stars) {
                let direct = naive_hom_count(&q, d);
                let via_tree = count_hom_ftree(&t, ds).unwrap();
                let round = naive_hom_count(&back, d);
                counts += 1;
                out.check(via_tree == direct.into() && round == direct, || {
                    format!("{} on {} elements: Hom={direct} tree={via_tree} round trip={round}", q_desc(&q), d.len())
                });
            }
        }
    }
    out.check(per_setup.iter().sum::<usize>() >= 50, || format!("only {per_setup:?} structures generated"));
    out.summary = format!("{per_setup:?} structures for (graph,k=2), (graph,k=3), (mixed,k=3); {counts} counts");
    out
}

fn q_desc(q: &Structure) -> String {
    let cs: Vec<String> = (0..q.num_constraints()).map(|c| q.constraint_label(c)).collect();
    format!("Q[{}]", cs.join(" "))
}

fn ac8_count_oracles() -> Outcome {
    let mut out = Outcome::new();
    let mut r = rng(0x8C);
    let mut pairs = 0;
    let mut sizes = Vec::new();
    for (sig, max_constraints, n_targets) in [(graph_signature(), 4, 24), (mixed_signature(), 4, 8)] {
        let trees = enumerate_ftrees(&sig, max_constraints).unwrap();
        sizes.push(trees.len());
        let mut targets: Vec<Structure> = (0..n_targets)
            .map(|i| {
                let n = 1 + i % 4;
                random_structure(&mut r, &sig, n, 3 * n, false)
            })
            .collect();
        if sig.len() == 1 {
            targets.extend([complete(2), complete(3), cycle(4), path(4)]);
        }
        for t in &trees {
            for d in &targets {
                let fast = count_hom_ftree(t, d).unwrap();
                let slow = count_hom_bruteforce(t, d).unwrap();
                pairs += 1;
                out.check(fast == slow, || format!("{} on {}: dp={fast} brute={slow}", q_desc(t), q_desc(d)));
            }
        }
    }
    out.summary = format!("ftrees per signature {sizes:?}, {pairs} (tree, target) pairs");
    out
}

const WLK_CONFLICT: &str = "wlk_equivalent(C6, 2C3, 2) is true: level 2 only sees forests, which do not separate two 2-regular graphs of equal size";

fn ac9_polymorphisms_blp_wl() -> Outcome {
    let lim = Limits::default();
    let mut out = Outcome::new();
    out.check(symmetric_polymorphism(&complete(2), 2, &lim).unwrap().is_none(), || {
        "K2 has a binary symmetric polymorphism".into()
    });
    for n in 2..=4 {
        match symmetric_polymorphism(&order2(), n, &lim).unwrap() {
            Some(op) => out.check(is_symmetric_polymorphism(&order2(), &op, &lim).unwrap(), || {
                format!("arity {n} table does not verify")
            }),
            None => out.check(false, || format!("no symmetric polymorphism of arity {n} for the order")),
        }
    }
    let mut r = rng(0xB1);
    let (mut blp_pairs, mut blp_feasible) = (0, 0);
    let sig = mixed_signature();
    for i in 0..120 {
        let na = r.gen_range(3..=4);
        let nb = r.gen_range(1..=3);
        let a = random_structure(&mut r, &sig, na, 4, true);
        let b = random_structure(&mut r, &sig, nb, 7, i % 2 == 0);
        let blp = feasible(&build_blp_system(&a, &b, &lim).unwrap().system);
        let sa1 = sa_feasible(&a, &b, 1, &lim).unwrap();
        blp_pairs += 1;
        blp_feasible += blp as usize;
        out.check(blp == sa1, || format!("pair {i}: BLP={blp} SA1={sa1}"));
    }
    for (a, b) in curated_graph_pairs() {
        if a.is_loop_free() {
            let blp = feasible(&build_blp_system(&a, &b, &lim).unwrap().system);
            let sa1 = sa_feasible(&a, &b, 1, &lim).unwrap();
            blp_pairs += 1;
            blp_feasible += blp as usize;
            out.check(blp == sa1, || format!("{} -> {}: BLP={blp} SA1={sa1}", a.name(), b.name()));
        }
    }
    let (c6, tt) = (cycle(6), two_triangles());
    let w1 = wlk_equivalent(&c6, &tt, 1, &lim).unwrap();
    out.check(w1, || "wlk_equivalent(C6, 2C3, 1) is false".into());
    let w2 = wlk_equivalent(&c6, &tt, 2, &lim).unwrap();
    if w2 {
        out.known.push(WLK_CONFLICT.into());
    }
    out.summary = format!("polymorphisms checked, {blp_pairs} BLP/SA1 pairs ({blp_feasible} feasible), wl1={w1} wl2={w2}");
    out
}

fn ac10_base_polytope() -> Outcome {
    let lim = Limits::default();
    let mut out = Outcome::new();
    let mut r = rng(0xA10);
    let (mut checked, mut total) = (0, 0);
    for (sig, count) in [(mixed_signature(), 150), (graph_signature(), 100)] {
        let arity = sig.max_arity();
        for i in 0..count {
            let na = r.gen_range(1..=4);
            let nb = r.gen_range(1..=3);
            let a = random_structure(&mut r, &sig, na, 5, false);
            let b = random_structure(&mut r, &sig, nb, 8, false);
            total += 1;
            if !sa_feasible(&a, &b, arity, &lim).unwrap() {
                continue;
            }
            checked += 1;
            let p = lp_feasibility(&build_base_polytope(&a, &b, &lim).unwrap().system).unwrap();
            out.check(p.is_feasible(), || format!("pair {i} (arity {arity}): SA feasible, base polytope not"));
        }
    }
    out.summary = format!("{total} pairs, {checked} with SA^r feasible");
    out
}

fn main() {
    type Criterion = (&'static str, &'static str, fn() -> Outcome);
    let criteria: [Criterion; 10] = [
        ("AC1", "fractional isomorphism: LP, iterated degrees, equitable partitions", ac1_frac_iso),
        ("AC2", "ftree hom counts on equivalent pairs, separating trees", ac2_ftree_counts),
        ("AC3", "SA1 versus fractional homomorphism systems", ac3_frac_hom),
        ("AC4", "separation instances", ac4_separation),
        ("AC5", "SA2 versus SA1 on 2-stars", ac5_star_lift),
        ("AC6", "SA1 decompositions and chain verification", ac6_decomposition),
        ("AC7", "treewidth to ftree translations", ac7_treewidth_translation),
        ("AC8", "ftree DP versus brute force", ac8_count_oracles),
        ("AC9", "polymorphisms, BLP, WL levels", ac9_polymorphisms_blp_wl),
        ("AC10", "SA^r feasible implies base polytope feasible", ac10_base_polytope),
    ];
    let only: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut unexpected = 0;
    for (id, title, run) in criteria {
        if !only.is_empty() && !only.iter().any(|o| o.eq_ignore_ascii_case(id)) {
            continue;
        }
        let start = Instant::now();
        let o = run();
        let secs = start.elapsed().as_secs_f64();
        let status = if o.failures.is_empty() && o.known.is_empty() { "PASS" } else { "FAIL" };
        println!("{status} {id} {title} ({secs:.1}s): {}", o.summary);
        for f in o.failures.iter().take(10) {
            println!("    failure: {f}");
        }
        if o.failures.len() > 10 {
            println!("    ... {} more", o.failures.len() - 10);
        }
        for k in &o.known {
            println!("    known conflict (expected value contradicts the definition): {k}");
        }
        unexpected += o.failures.len();
    }
    if unexpected > 0 {
        std::process::exit(1);
    }
}
