//! Enumeration of ftrees up to isomorphism.
//!
//! Every ftree with `m + 1` constraints arises from one with `m` constraints
//! by attaching a constraint that meets the old tree in exactly one element
//! (all its other elements fresh). Duplicates are removed with an exact
//! canonical form: the least rooted encoding over all element roots.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::homcount::is_ftree;
use crate::structure::{factor_graph, Constraint, FactorGraph, Signature, Structure};

/// Largest constraint count accepted by [`enumerate_ftrees`].
pub const MAX_FTREE_CONSTRAINTS: usize = 5;

/// Canonical encoding of the subtree below element `e`.
fn encode_element(s: &Structure, fg: &FactorGraph, e: usize, parent: Option<usize>) -> String {
    let mut parts: Vec<String> = fg.element_adj[e]
        .iter()
        .filter(|&&c| Some(c) != parent)
        .map(|&c| encode_constraint(s, fg, c, e))
        .collect();
    parts.sort();
    format!("({})", parts.concat())
}

fn encode_constraint(s: &Structure, fg: &FactorGraph, c: usize, from: usize) -> String {
    let con = &s.constraints()[c];
    let mut children: Vec<(u64, usize)> = fg.constraint_adj[c]
        .iter()
        .filter(|&&x| x != from)
        .map(|&x| (con.positions(x), x))
        .collect();
    children.sort_unstable_by_key(|&(p, _)| p.trailing_zeros());
    let mut out = format!("{}:{:x}[", con.symbol, con.positions(from));
    for (p, y) in children {
        out.push_str(&format!("{p:x}"));
        out.push_str(&encode_element(s, fg, y, Some(c)));
    }
    out.push(']');
    out
}

/// A string identifying the ftree `t` up to isomorphism.
pub fn ftree_canonical_form(t: &Structure) -> Result<String> {
    if !is_ftree(t) {
        return Err(Error::invalid(format!("`{}` is not an ftree", t.name())));
    }
    let fg = factor_graph(t);
    Ok((0..t.len())
        .map(|r| encode_element(t, &fg, r, None))
        .min()
        .expect("non-empty universe"))
}

/// Set partitions of `0..n` as block ids in restricted-growth form.
fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn rec(n: usize, cur: &mut Vec<usize>, max: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for b in 0..=max {
            cur.push(b);
            rec(n, cur, max.max(b + 1), out);
            cur.pop();
        }
    }
    rec(n, &mut cur, 0, &mut out);
    out
}

fn build(sig: &Arc<Signature>, n: usize, constraints: Vec<Constraint>) -> Result<Structure> {
    Structure::new("T", sig.clone(), (0..n).map(|i| format!("x{i}")).collect(), constraints)
}

/// Every ftree over `sig` with at most `max_constraints` constraints, once
/// up to isomorphism, ordered by constraint count and then canonical form.
pub fn enumerate_ftrees(sig: &Arc<Signature>, max_constraints: usize) -> Result<Vec<Structure>> {
    if max_constraints > MAX_FTREE_CONSTRAINTS {
        return Err(Error::ResourceLimit(format!(
            "ftree enumeration is limited to {MAX_FTREE_CONSTRAINTS} constraints"
        )));
    }
    let partitions: Vec<Vec<Vec<usize>>> = sig.symbols().iter().map(|s| set_partitions(s.arity)).collect();
    let mut level: BTreeMap<String, Structure> = BTreeMap::new();
    let seed = build(sig, 1, Vec::new())?;
    level.insert(ftree_canonical_form(&seed)?, seed);
    let mut all: Vec<Structure> = level.values().cloned().collect();
    for _ in 0..max_constraints {
        let mut next: BTreeMap<String, Structure> = BTreeMap::new();
        for t in level.values() {
            for x in 0..t.len() {
                for (symbol, parts) in partitions.iter().enumerate() {
                    for blocks in parts {
                        let nblocks = blocks.iter().max().map_or(0, |m| m + 1);
                        for anchor in 0..nblocks {
                            let mut fresh = t.len();
                            let mut ids = vec![usize::MAX; nblocks];
                            ids[anchor] = x;
                            for id in ids.iter_mut().filter(|i| **i == usize::MAX) {
                                *id = fresh;
                                fresh += 1;
                            }
                            let c = Constraint::new(symbol, blocks.iter().map(|&b| ids[b]).collect());
                            if t.constraints().contains(&c) {
                                continue;
                            }
                            let mut cs = t.constraints().to_vec();
                            cs.push(c);
                            let grown = build(sig, fresh, cs)?;
                            let key = ftree_canonical_form(&grown)?;
                            next.entry(key).or_insert(grown);
                        }
                    }
                }
            }
        }
        all.extend(next.values().cloned());
        level = next;
    }
    Ok(all
        .into_iter()
        .enumerate()
        .map(|(i, t)| t.with_name(format!("T{i}")))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_counts() {
        let sig = Arc::new(Signature::graph());
        assert_eq!(enumerate_ftrees(&sig, 0).unwrap().len(), 1);
        assert_eq!(enumerate_ftrees(&sig, 1).unwrap().len(), 3);
        assert!(enumerate_ftrees(&sig, 6).is_err());
    }

    #[test]
    fn canonical_form_ignores_naming() {
        let sig = Arc::new(Signature::graph());
        let a = Structure::new(
            "a",
            sig.clone(),
            vec!["p".into(), "q".into(), "r".into()],
            vec![Constraint::new(0, vec![0, 1]), Constraint::new(0, vec![2, 1])],
        )
        .unwrap();
        let b = Structure::new(
            "b",
            sig,
            vec!["p".into(), "q".into(), "r".into()],
            vec![Constraint::new(0, vec![1, 0]), Constraint::new(0, vec![2, 0])],
        )
        .unwrap();
        assert_eq!(ftree_canonical_form(&a).unwrap(), ftree_canonical_form(&b).unwrap());
    }
}
