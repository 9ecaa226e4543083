//! Turning a feasible level-one SA solution into a chain
//! `A -> X1 ==WL1 X2 -> B`, and checking such chains.

use std::collections::{BTreeMap, HashMap};

use num_traits::ToPrimitive;

use crate::equitable::{fractional_iso_witness, verify_common_witness, verify_equitable, CommonEquitableWitness, Partition};
use crate::error::{Error, Result};
use crate::matrix::RatMatrix;
use crate::par;
use crate::rat::Rat;
use crate::relax::{build_sa_system, Limits, SaSystem, SaVar};
use crate::structure::{is_homomorphism, Constraint, Structure};

/// A copy-indexed tuple: entry `i` is `(b_i, c_i)` with `c_i` counted from 0.
type CopyTuple = Vec<(usize, usize)>;

/// Output of [`decompose_sa1`].
#[derive(Debug, Clone)]
pub struct Decomposition {
    /// Common denominator of the solution.
    pub m: usize,
    /// Number of copy-indexed tuples.
    pub y_len: usize,
    pub x1: Structure,
    pub x2: Structure,
    /// Homomorphism `A -> X1`.
    pub h1: Vec<usize>,
    /// Homomorphism `X2 -> B`.
    pub h2: Vec<usize>,
    pub witness: CommonEquitableWitness,
}

/// Evidence attached to one step of a chain.
#[derive(Debug, Clone)]
pub enum Evidence {
    /// Element images of a homomorphism `from -> to`.
    Hom(Vec<usize>),
    /// A common equitable partition with `from` as the first structure.
    Wl1(CommonEquitableWitness),
}

#[derive(Debug, Clone)]
pub struct ChainStep {
    pub from: Structure,
    pub to: Structure,
    pub evidence: Evidence,
}

impl Decomposition {
    /// The chain `A -> X1 ==WL1 X2 -> B`.
    pub fn chain(&self, a: &Structure, b: &Structure) -> Vec<ChainStep> {
        vec![
            ChainStep {
                from: a.clone(),
                to: self.x1.clone(),
                evidence: Evidence::Hom(self.h1.clone()),
            },
            ChainStep {
                from: self.x1.clone(),
                to: self.x2.clone(),
                evidence: Evidence::Wl1(self.witness.clone()),
            },
            ChainStep {
                from: self.x2.clone(),
                to: b.clone(),
                evidence: Evidence::Hom(self.h2.clone()),
            },
        ]
    }
}

fn permutations(m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..m).collect();
    fn heap(k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(cur.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, cur, out);
            let j = if k.is_multiple_of(2) { i } else { 0 };
            cur.swap(j, k - 1);
        }
    }
    heap(m, &mut cur, &mut out);
    out.sort();
    out
}

/// All tuples over `0..base` of length `len`, lexicographically.
fn tuples(base: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|t: Vec<usize>| {
                (0..base).map(move |x| {
                    let mut t = t.clone();
                    t.push(x);
                    t
                })
            })
            .collect();
    }
    out
}

/// Multisets of size `m` over `0..n` as non-decreasing sequences.
fn multisets(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(m);
    fn rec(start: usize, n: usize, m: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for x in start..n {
            cur.push(x);
            rec(x, n, m, cur, out);
            cur.pop();
        }
    }
    rec(0, n, m, &mut cur, &mut out);
    out
}

/// Every copy-indexed tuple, lexicographically.
fn copy_tuples(nb: usize, m: usize) -> Vec<CopyTuple> {
    let mut out = Vec::new();
    for bs in tuples(nb, m) {
        let mult: Vec<usize> = (0..nb).map(|v| bs.iter().filter(|&&x| x == v).count()).collect();
        let mut used = vec![vec![false; m]; nb];
        let mut cur = Vec::with_capacity(m);
        fn rec(i: usize, bs: &[usize], mult: &[usize], used: &mut [Vec<bool>], cur: &mut CopyTuple, out: &mut Vec<CopyTuple>) {
            if i == bs.len() {
                out.push(cur.clone());
                return;
            }
            let b = bs[i];
            for c in 0..mult[b] {
                if !used[b][c] {
                    used[b][c] = true;
                    cur.push((b, c));
                    rec(i + 1, bs, mult, used, cur, out);
                    cur.pop();
                    used[b][c] = false;
                }
            }
        }
        rec(0, &bs, &mult, &mut used, &mut cur, &mut out);
    }
    out.sort();
    out
}

/// `y^b`: copies numbered in order of occurrence.
fn ordered_copies(bs: &[usize]) -> CopyTuple {
    bs.iter()
        .enumerate()
        .map(|(i, &b)| (b, bs[..i].iter().filter(|&&x| x == b).count()))
        .collect()
}

/// `<U>`: the least copy-indexed tuple whose projection has the multiset of `bs`.
fn canonical(bs: &[usize]) -> CopyTuple {
    let mut sorted = bs.to_vec();
    sorted.sort_unstable();
    ordered_copies(&sorted)
}

fn permute<T: Clone>(z: &[T], tau: &[usize]) -> Vec<T> {
    tau.iter().map(|&i| z[i].clone()).collect()
}

/// Multiplies every entry by `m` and returns it as an integer.
fn scaled(v: &Rat, m: usize) -> Result<usize> {
    let s = v * &Rat::from(m);
    if !s.is_integer() || s.is_negative() {
        return Err(Error::Internal(format!("{v} is not a multiple of 1/{m}")));
    }
    s.numer()
        .to_usize()
        .ok_or_else(|| Error::Overflow(format!("{v} * {m} does not fit")))
}

/// Builds `X1`, `X2`, the maps and the equitable partition from a point of
/// `SA^1(a, b)` (aligned with the variables of [`build_sa_system`] at `k = 1`).
pub fn decompose_sa1(a: &Structure, b: &Structure, solution: &[Rat], limits: &Limits) -> Result<Decomposition> {
    let sa = build_sa_system(a, b, 1, limits)?;
    if solution.len() != sa.system.num_vars() || !sa.system.check_point(solution) {
        return Err(Error::invalid("the solution does not satisfy SA^1"));
    }
    let denom = Rat::common_denominator(solution.iter());
    let m = match denom.to_usize() {
        Some(m) if m <= limits.max_m => m,
        _ => {
            return Err(Error::ResourceLimit(format!(
                "common denominator {denom} exceeds the cap {}",
                limits.max_m
            )))
        }
    };
    let nb = b.len();
    let ys = copy_tuples(nb, m);
    let y_index: HashMap<&CopyTuple, usize> = ys.iter().enumerate().map(|(i, y)| (y, i)).collect();
    let ny = ys.len();
    let x_of = |ea: usize, y: &CopyTuple| ea * ny + y_index[y];

    let mut names = Vec::with_capacity(a.len() * ny);
    for ea in 0..a.len() {
        for y in &ys {
            let parts: Vec<String> = y.iter().map(|&(bv, c)| format!("{}.{}", b.element_name(bv), c + 1)).collect();
            names.push(format!("{}:{}", a.element_name(ea), parts.join("/")));
        }
    }

    // The index set J, in a fixed order.
    let by_symbol = b.constraints_by_symbol();
    let mut jobs: Vec<(usize, Vec<usize>, Vec<usize>)> = Vec::new();
    for (symbol, sym) in a.signature().symbols().iter().enumerate() {
        for at in tuples(a.len(), sym.arity) {
            let compatible: Vec<usize> = by_symbol[symbol]
                .iter()
                .copied()
                .filter(|&c| {
                    let t = &b.constraints()[c].args;
                    (0..sym.arity).all(|s| (0..s).all(|s2| at[s] != at[s2] || t[s] == t[s2]))
                })
                .collect();
            for ms in multisets(compatible.len(), m) {
                jobs.push((symbol, at.clone(), ms.iter().map(|&i| compatible[i]).collect()));
            }
        }
    }
    let perms = permutations(m);
    let classes: Vec<(Vec<Constraint>, Vec<Constraint>)> = par::map(&jobs, |(symbol, at, ts)| {
        let r = at.len();
        let rows: Vec<Vec<usize>> = (0..r)
            .map(|s| ts.iter().map(|&t| b.constraints()[t].args[s]).collect())
            .collect();
        let mut q1 = Vec::with_capacity(perms.len());
        let mut q2 = Vec::with_capacity(perms.len());
        for tau in &perms {
            let args1 = (0..r).map(|s| x_of(at[s], &permute(&canonical(&rows[s]), tau))).collect();
            let args2 = (0..r).map(|s| x_of(at[s], &permute(&ordered_copies(&rows[s]), tau))).collect();
            q1.push(Constraint::new(*symbol, args1));
            q2.push(Constraint::new(*symbol, args2));
        }
        (q1, q2)
    });
    let mut c1 = Vec::new();
    let mut c2 = Vec::new();
    let mut cclass = Vec::new();
    for (j, (q1, q2)) in classes.into_iter().enumerate() {
        cclass.extend(std::iter::repeat_n(j, q1.len()));
        c1.extend(q1);
        c2.extend(q2);
    }
    let sig = a.signature_arc().clone();
    let x1 = Structure::new("X1", sig.clone(), names.clone(), c1)?;
    let x2 = Structure::new("X2", sig, names, c2)?;
    if x1.num_constraints() != cclass.len() || x2.num_constraints() != cclass.len() {
        return Err(Error::Internal("constraint classes are not disjoint".into()));
    }

    // a -> (a, <c_a>).
    let mut h1 = Vec::with_capacity(a.len());
    for ea in 0..a.len() {
        let mut ca = Vec::with_capacity(m);
        for bv in 0..nb {
            let var = sa.set_var(&[ea], &[bv]).expect("declared");
            ca.extend(std::iter::repeat_n(bv, scaled(&solution[var], m)?));
        }
        h1.push(x_of(ea, &canonical(&ca)));
    }
    if !is_homomorphism(a, &x1, &h1) {
        return Err(Error::Internal("the map into X1 is not a homomorphism".into()));
    }
    // (a, y) -> first entry of the projection of y.
    let h2: Vec<usize> = (0..a.len()).flat_map(|_| ys.iter().map(|y| y[0].0)).collect();
    if !is_homomorphism(&x2, b, &h2) {
        return Err(Error::Internal("the projection from X2 is not a homomorphism".into()));
    }
    // Orbits under permutation of positions, and one constraint class per job.
    let mut orbit_ids: BTreeMap<(usize, Vec<usize>), usize> = BTreeMap::new();
    let mut eclass = Vec::with_capacity(a.len() * ny);
    for ea in 0..a.len() {
        for y in &ys {
            let mut key: Vec<usize> = y.iter().map(|p| p.0).collect();
            key.sort_unstable();
            let next = orbit_ids.len();
            eclass.push(*orbit_ids.entry((ea, key)).or_insert(next));
        }
    }
    let part = Partition::new(eclass, cclass);
    let t1 = verify_equitable(&x1, &part)?
        .map_err(|v| Error::Internal(format!("orbit partition of X1 is not equitable: {v:?}")))?;
    let t2 = verify_equitable(&x2, &part)?
        .map_err(|v| Error::Internal(format!("orbit partition of X2 is not equitable: {v:?}")))?;
    if t1 != t2 {
        return Err(Error::Internal("X1 and X2 have different parameters".into()));
    }
    let witness = CommonEquitableWitness {
        element_sizes: part.element_class_sizes(),
        constraint_sizes: part.constraint_class_sizes(),
        partition_a: part.clone(),
        partition_b: part,
        parameters: t1,
    };
    Ok(Decomposition {
        m,
        y_len: ny,
        x1,
        x2,
        h1,
        h2,
        witness,
    })
}

/// The integral point of `SA^1(a, b)` given by a homomorphism.
pub fn sa1_point_from_hom(sa: &SaSystem, a: &Structure, h: &[usize]) -> Vec<Rat> {
    sa.keys
        .iter()
        .map(|key| {
            let hit = match key {
                SaVar::Set { elements, values } => elements.iter().zip(values).all(|(&e, &v)| h[e] == v),
                SaVar::Constraint { constraint, values } => {
                    let mut scope = a.constraints()[*constraint].scope();
                    scope.sort_unstable();
                    scope.iter().zip(values).all(|(&e, &v)| h[e] == v)
                }
            };
            if hit {
                Rat::one()
            } else {
                Rat::zero()
            }
        })
        .collect()
}

/// Re-verifies every step of a chain. Consecutive steps must share endpoints.
pub fn verify_chain(chain: &[ChainStep]) -> Result<bool> {
    for w in chain.windows(2) {
        if w[0].to != w[1].from {
            return Err(Error::invalid(format!(
                "step ends at `{}` but the next starts at `{}`",
                w[0].to.name(),
                w[1].from.name()
            )));
        }
    }
    for step in chain {
        let ok = match &step.evidence {
            Evidence::Hom(h) => step.from.same_signature(&step.to) && is_homomorphism(&step.from, &step.to, h),
            Evidence::Wl1(w) => step.from.same_signature(&step.to) && verify_common_witness(&step.from, &step.to, w)?,
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Matrices of a homomorphism: `X[b, a] = [b = h(a)]`, `Y[C_B, C_A] = [C_B = h(C_A)]`.
pub fn hom_matrices(a: &Structure, b: &Structure, h: &[usize]) -> Result<(RatMatrix, RatMatrix)> {
    if !is_homomorphism(a, b, h) {
        return Err(Error::invalid("the map is not a homomorphism"));
    }
    let mut x = RatMatrix::zeros(b.len(), a.len());
    for (ea, &eb) in h.iter().enumerate() {
        x.set(eb, ea, Rat::one());
    }
    let index: HashMap<&Constraint, usize> = b.constraints().iter().enumerate().map(|(i, c)| (c, i)).collect();
    let mut y = RatMatrix::zeros(b.num_constraints(), a.num_constraints());
    for (ca, c) in a.constraints().iter().enumerate() {
        let image = Constraint::new(c.symbol, c.args.iter().map(|&e| h[e]).collect());
        y.set(index[&image], ca, Rat::one());
    }
    Ok((x, y))
}

/// Left stochastic `X`, `Y` for the ends of a verified chain, composed step
/// by step (fractional isomorphisms from their uniform block witnesses).
pub fn chain_matrices(chain: &[ChainStep]) -> Result<Option<(RatMatrix, RatMatrix)>> {
    let Some(first) = chain.first() else { return Ok(None) };
    let mut x = RatMatrix::identity(first.from.len());
    let mut y = RatMatrix::identity(first.from.num_constraints());
    for step in chain {
        let (sx, sy) = match &step.evidence {
            Evidence::Hom(h) => hom_matrices(&step.from, &step.to, h)?,
            Evidence::Wl1(w) => fractional_iso_witness(w),
        };
        x = sx.mul(&x)?;
        y = sy.mul(&y)?;
    }
    Ok(Some((x, y)))
}
