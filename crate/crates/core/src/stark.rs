//! The `*_k` transformation: a structure over all tuples of length at most
//! `k` and all constraints, wired by diagonal and projection relations.
//!
//! Symbol names encode their parameters (positions are 1-based):
//! `T[j|S=1,2]` (diagonal tuples of length `j`), `T[j|I=2,1]` (projections
//! from length `j`), `R[S=1,2]` (diagonal constraints on `R`) and
//! `R[I=2,1]` (constraint to projected tuple). Elements are named
//! `tup:a,b` and `con:R(a,b)`.

use std::sync::Arc;

use crate::equitable::common_equitable_partition;
use crate::error::{Error, Result};
use crate::relax::Limits;
use crate::structure::{Constraint, Signature, Structure};

/// One symbol of the star signature.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum StarSymbol {
    /// Unary: tuples of length `len` constant on the positions in `set`.
    TupleDiagonal { len: usize, set: u64 },
    /// Binary: `(t, pi_proj t)` for tuples `t` of length `len`.
    TupleProjection { len: usize, proj: Vec<usize> },
    /// Unary: constraints on `symbol` constant on the positions in `set`.
    ConstraintDiagonal { symbol: usize, set: u64 },
    /// Binary: `(R(a), pi_proj a)` for constraints on `symbol`.
    ConstraintProjection { symbol: usize, proj: Vec<usize> },
}

/// The signature of `*_k` structures with the meaning of every symbol.
#[derive(Debug, Clone)]
pub struct StarSignature {
    pub base: Arc<Signature>,
    pub k: usize,
    pub signature: Arc<Signature>,
    pub symbols: Vec<StarSymbol>,
}

/// Largest base arity accepted by the transformation.
pub const MAX_STAR_ARITY: usize = 12;

fn set_list(set: u64) -> String {
    (0..64)
        .filter(|i| set >> i & 1 == 1)
        .map(|i| (i + 1).to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn proj_list(proj: &[usize]) -> String {
    proj.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",")
}

/// All tuples over `0..base` of length `len`, lexicographically.
fn all_tuples(base: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::with_capacity(len)];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|t| {
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

impl StarSignature {
    pub fn new(base: Arc<Signature>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("k must be at least 1"));
        }
        if base.max_arity() > MAX_STAR_ARITY {
            return Err(Error::ResourceLimit(format!(
                "arity {} is too large for the star transformation (max {MAX_STAR_ARITY})",
                base.max_arity()
            )));
        }
        let mut sig = Signature::default();
        let mut symbols = Vec::new();
        let mut add = |sig: &mut Signature, name: String, arity: usize, s: StarSymbol| -> Result<()> {
            sig.push(name, arity)?;
            symbols.push(s);
            Ok(())
        };
        for len in 1..=k {
            for set in 0..1u64 << len {
                add(&mut sig, format!("T[{len}|S={}]", set_list(set)), 1, StarSymbol::TupleDiagonal { len, set })?;
            }
        }
        for len in 1..=k {
            for out_len in 1..=k {
                for proj in all_tuples(len, out_len) {
                    add(
                        &mut sig,
                        format!("T[{len}|I={}]", proj_list(&proj)),
                        2,
                        StarSymbol::TupleProjection { len, proj },
                    )?;
                }
            }
        }
        for (symbol, sym) in base.symbols().iter().enumerate() {
            for set in 0..1u64 << sym.arity {
                add(
                    &mut sig,
                    format!("{}[S={}]", sym.name, set_list(set)),
                    1,
                    StarSymbol::ConstraintDiagonal { symbol, set },
                )?;
            }
            for out_len in 1..=k {
                for proj in all_tuples(sym.arity, out_len) {
                    add(
                        &mut sig,
                        format!("{}[I={}]", sym.name, proj_list(&proj)),
                        2,
                        StarSymbol::ConstraintProjection { symbol, proj },
                    )?;
                }
            }
        }
        Ok(StarSignature {
            base,
            k,
            signature: Arc::new(sig),
            symbols,
        })
    }

    /// Id of a symbol of the star signature.
    pub fn id(&self, s: &StarSymbol) -> Option<usize> {
        self.symbols.iter().position(|x| x == s)
    }
}

/// Number of elements of `a*_k`.
pub fn star_universe_size(a: &Structure, k: usize) -> u128 {
    let n = a.len() as u128;
    let mut total = a.num_constraints() as u128;
    let mut p = 1u128;
    for _ in 0..k {
        p = p.saturating_mul(n);
        total = total.saturating_add(p);
    }
    total
}

/// Position of tuple `t` (length `len`) in the universe of a star structure
/// over a base universe of size `n`.
fn tuple_index(n: usize, t: &[usize]) -> usize {
    let offset: usize = (1..t.len()).map(|j| n.pow(j as u32)).sum();
    offset + t.iter().fold(0, |acc, &x| acc * n + x)
}

/// Builds `a*_k`.
pub fn star_structure(a: &Structure, k: usize, limits: &Limits) -> Result<Structure> {
    let star = StarSignature::new(a.signature_arc().clone(), k)?;
    star_structure_with(a, &star, limits)
}

/// Builds `a*_k` over a precomputed star signature (which must have `a`'s
/// signature as base).
pub fn star_structure_with(a: &Structure, star: &StarSignature, limits: &Limits) -> Result<Structure> {
    if *star.base != *a.signature() {
        return Err(Error::SignatureMismatch("star signature built for another base".into()));
    }
    let size = star_universe_size(a, star.k);
    if size > limits.max_universe as u128 {
        return Err(Error::ResourceLimit(format!(
            "star universe has {size} elements, cap is {}",
            limits.max_universe
        )));
    }
    let n = a.len();
    let k = star.k;
    let tuples: Vec<Vec<Vec<usize>>> = (0..=k).map(|len| all_tuples(n, len)).collect();
    let tuple_offset = tuple_index(n, &vec![0; k + 1]);
    let mut elements = Vec::with_capacity(size as usize);
    for ts in &tuples[1..] {
        for t in ts {
            let names: Vec<&str> = t.iter().map(|&x| a.element_name(x)).collect();
            elements.push(format!("tup:{}", names.join(",")));
        }
    }
    for c in 0..a.num_constraints() {
        elements.push(format!("con:{}", a.constraint_label(c)));
    }
    let by_symbol = a.constraints_by_symbol();
    let families: Vec<Vec<Constraint>> = crate::par::map(&star.symbols, |sym| {
        let mut out = Vec::new();
        match sym {
            StarSymbol::TupleDiagonal { len, set } => {
                for t in &tuples[*len] {
                    if constant_on(t, *set) {
                        out.push(vec![tuple_index(n, t)]);
                    }
                }
            }
            StarSymbol::TupleProjection { len, proj } => {
                for t in &tuples[*len] {
                    let p: Vec<usize> = proj.iter().map(|&i| t[i]).collect();
                    out.push(vec![tuple_index(n, t), tuple_index(n, &p)]);
                }
            }
            StarSymbol::ConstraintDiagonal { symbol, set } => {
                for &c in &by_symbol[*symbol] {
                    if constant_on(&a.constraints()[c].args, *set) {
                        out.push(vec![tuple_offset + c]);
                    }
                }
            }
            StarSymbol::ConstraintProjection { symbol, proj } => {
                for &c in &by_symbol[*symbol] {
                    let args = &a.constraints()[c].args;
                    let p: Vec<usize> = proj.iter().map(|&i| args[i]).collect();
                    out.push(vec![tuple_offset + c, tuple_index(n, &p)]);
                }
            }
        }
        out
    })
    .into_iter()
    .enumerate()
    .map(|(id, family)| family.into_iter().map(|args| Constraint::new(id, args)).collect())
    .collect();
    let constraints = families.into_iter().flatten().collect();
    Structure::new(
        format!("{}*{}", a.name(), k),
        star.signature.clone(),
        elements,
        constraints,
    )
}

fn constant_on(t: &[usize], set: u64) -> bool {
    let mut first = None;
    for (i, &x) in t.iter().enumerate() {
        if set >> i & 1 == 1 {
            match first {
                None => first = Some(x),
                Some(f) if f != x => return false,
                _ => {}
            }
        }
    }
    true
}

/// `a` and `b` are `WL_k`-equivalent: their star structures have a common
/// equitable partition.
pub fn wlk_equivalent(a: &Structure, b: &Structure, k: usize, limits: &Limits) -> Result<bool> {
    a.check_same_signature(b)?;
    let star = StarSignature::new(a.signature_arc().clone(), k)?;
    let sa = star_structure_with(a, &star, limits)?;
    let sb = star_structure_with(b, &star, limits)?;
    Ok(common_equitable_partition(&sa, &sb)?.is_some())
}
