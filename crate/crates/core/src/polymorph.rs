//! Power structures and symmetric polymorphisms.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::homcount::exists_hom;
use crate::relax::Limits;
use crate::structure::{is_homomorphism, Constraint, Structure};

/// A symmetric operation given by its value on each multiset (a
/// non-decreasing argument list).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetricOperation {
    pub arity: usize,
    pub table: BTreeMap<Vec<usize>, usize>,
}

impl SymmetricOperation {
    pub fn apply(&self, args: &[usize]) -> usize {
        let mut key = args.to_vec();
        key.sort_unstable();
        self.table[&key]
    }
}

fn checked_pow(base: usize, exp: usize) -> Option<usize> {
    (0..exp).try_fold(1usize, |acc, _| acc.checked_mul(base))
}

fn cap(what: &str, count: Option<usize>, limits: &Limits) -> Result<usize> {
    match count {
        Some(c) if c <= limits.max_universe => Ok(c),
        _ => Err(Error::ResourceLimit(format!(
            "{what} exceeds the cap {}",
            limits.max_universe
        ))),
    }
}

/// Index of `t` in the lexicographic listing of `B^n`.
fn encode(t: &[usize], nb: usize) -> usize {
    t.iter().fold(0, |acc, &x| acc * nb + x)
}

fn decode(mut i: usize, nb: usize, n: usize) -> Vec<usize> {
    let mut t = vec![0; n];
    for slot in t.iter_mut().rev() {
        *slot = i % nb;
        i /= nb;
    }
    t
}

/// Calls `f` with every choice of one constraint per coordinate.
fn for_each_choice(lists: &[usize], n: usize, mut f: impl FnMut(&[usize])) {
    let mut idx = vec![0; n];
    if lists.is_empty() {
        return;
    }
    loop {
        f(&idx);
        let mut i = n;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] < lists.len() {
                break;
            }
            idx[i] = 0;
        }
    }
}

/// `b^n`: universe `B^n`, relations taken componentwise.
pub fn power_structure(b: &Structure, n: usize, limits: &Limits) -> Result<Structure> {
    if n == 0 {
        return Err(Error::invalid("the exponent must be at least 1"));
    }
    let nb = b.len();
    let size = cap("power universe", checked_pow(nb, n), limits)?;
    let by_symbol = b.constraints_by_symbol();
    let count = by_symbol
        .iter()
        .try_fold(0usize, |acc, l| checked_pow(l.len(), n).and_then(|c| acc.checked_add(c)));
    cap("power constraint count", count, limits)?;
    let names = (0..size)
        .map(|i| {
            let t = decode(i, nb, n);
            let parts: Vec<&str> = t.iter().map(|&x| b.element_name(x)).collect();
            format!("({})", parts.join(","))
        })
        .collect();
    let mut constraints = Vec::new();
    for (symbol, list) in by_symbol.iter().enumerate() {
        let r = b.signature().arity(symbol);
        let idx: Vec<usize> = (0..list.len()).collect();
        for_each_choice(&idx, n, |choice| {
            let args = (0..r)
                .map(|s| {
                    let col: Vec<usize> = choice.iter().map(|&c| b.constraints()[list[c]].args[s]).collect();
                    encode(&col, nb)
                })
                .collect();
            constraints.push(Constraint::new(symbol, args));
        });
    }
    Structure::new(format!("{}^{}", b.name(), n), b.signature_arc().clone(), names, constraints)
}

/// Multisets of size `n` over `0..nb`, as non-decreasing lists.
fn multisets(nb: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|t: Vec<usize>| {
                let start = t.last().copied().unwrap_or(0);
                (start..nb).map(move |x| {
                    let mut t = t.clone();
                    t.push(x);
                    t
                })
            })
            .collect();
    }
    out
}

/// True if `op` maps every constraint of `b^n` into a constraint of `b`.
pub fn is_symmetric_polymorphism(b: &Structure, op: &SymmetricOperation, limits: &Limits) -> Result<bool> {
    let power = power_structure(b, op.arity, limits)?;
    if op.table.len() != multisets(b.len(), op.arity).len() {
        return Ok(false);
    }
    let map: Vec<usize> = (0..power.len())
        .map(|i| op.apply(&decode(i, b.len(), op.arity)))
        .collect();
    Ok(is_homomorphism(&power, b, &map))
}

/// Searches for a symmetric `n`-ary polymorphism of `b`. The search runs
/// over multiset tables: a table is a homomorphism from the structure on
/// multisets obtained by sorting every tuple of `b^n`.
pub fn symmetric_polymorphism(b: &Structure, n: usize, limits: &Limits) -> Result<Option<SymmetricOperation>> {
    if n == 0 {
        return Err(Error::invalid("the arity must be at least 1"));
    }
    let nb = b.len();
    let sets = multisets(nb, n);
    cap("multiset count", Some(sets.len()), limits)?;
    let index: BTreeMap<&Vec<usize>, usize> = sets.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let power = power_structure(b, n, limits)?;
    let names: Vec<String> = sets
        .iter()
        .map(|s| {
            let parts: Vec<&str> = s.iter().map(|&x| b.element_name(x)).collect();
            format!("{{{}}}", parts.join(","))
        })
        .collect();
    let to_set = |i: usize| {
        let mut t = decode(i, nb, n);
        t.sort_unstable();
        index[&t]
    };
    let mut constraints: Vec<Constraint> = power
        .constraints()
        .iter()
        .map(|c| Constraint::new(c.symbol, c.args.iter().map(|&x| to_set(x)).collect()))
        .collect();
    constraints.sort();
    constraints.dedup();
    let quotient = Structure::new("M", Arc::clone(b.signature_arc()), names, constraints)?;
    let Some(h) = exists_hom(&quotient, b)? else { return Ok(None) };
    let op = SymmetricOperation {
        arity: n,
        table: sets.into_iter().zip(h).collect(),
    };
    if !is_symmetric_polymorphism(b, &op, limits)? {
        return Err(Error::Internal("the table found is not a polymorphism".into()));
    }
    Ok(Some(op))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::graphs::*;

    #[test]
    fn power_counts() {
        let lim = Limits::default();
        let p = power_structure(&complete(2), 2, &lim).unwrap();
        assert_eq!((p.len(), p.num_constraints()), (4, 4));
        let p = power_structure(&complete(2), 3, &lim).unwrap();
        assert_eq!((p.len(), p.num_constraints()), (8, 8));
    }

    #[test]
    fn k2_has_no_binary_symmetric_polymorphism() {
        let lim = Limits::default();
        assert!(symmetric_polymorphism(&complete(2), 2, &lim).unwrap().is_none());
        assert!(symmetric_polymorphism(&complete(2), 3, &lim).unwrap().is_some());
    }

    #[test]
    fn order_has_max() {
        let lim = Limits::default();
        let le = directed("Le", 2, &[(0, 0), (0, 1), (1, 1)]);
        for n in 2..=4 {
            assert!(symmetric_polymorphism(&le, n, &lim).unwrap().is_some());
            let max = SymmetricOperation {
                arity: n,
                table: multisets(2, n).into_iter().map(|s| {
                    let v = *s.last().unwrap();
                    (s, v)
                }).collect(),
            };
            assert!(is_symmetric_polymorphism(&le, &max, &lim).unwrap());
        }
    }
}
