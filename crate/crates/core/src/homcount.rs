//! Homomorphism counting and search.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::structure::{factor_graph, Structure};

/// Bound on `|A|^|Q|` for exhaustive counting.
pub const BRUTE_FORCE_LIMIT: u128 = 100_000_000;

/// Bound on search nodes visited by [`exists_hom`] and [`find_isomorphism`].
pub const SEARCH_NODE_LIMIT: u64 = 50_000_000;

/// True if the factor graph of `t` is a tree.
pub fn is_ftree(t: &Structure) -> bool {
    let fg = factor_graph(t);
    let nodes = fg.num_nodes();
    if fg.edges.len() + 1 != nodes {
        return false;
    }
    let mut seen = vec![false; t.len()];
    let mut seen_c = vec![false; t.num_constraints()];
    let mut stack = vec![0];
    seen[0] = true;
    let mut count = 1;
    while let Some(e) = stack.pop() {
        for &c in &fg.element_adj[e] {
            if seen_c[c] {
                continue;
            }
            seen_c[c] = true;
            count += 1;
            for &x in &fg.constraint_adj[c] {
                if !seen[x] {
                    seen[x] = true;
                    count += 1;
                    stack.push(x);
                }
            }
        }
    }
    count == nodes
}

/// Per-element count vectors of the rooted DP: `out[e][d]` is the number of
/// homomorphisms of the subftree below `e` sending `e` to `d`.
fn rooted_tables(t: &Structure, root: usize, a: &Structure) -> Result<Vec<Vec<BigUint>>> {
    t.check_same_signature(a)?;
    if !is_ftree(t) {
        return Err(Error::invalid(format!("`{}` is not an ftree", t.name())));
    }
    if root >= t.len() {
        return Err(Error::invalid("root is not an element"));
    }
    let fg = factor_graph(t);
    let by_symbol = a.constraints_by_symbol();
    // Order (element, parent constraint) pairs so children come first when reversed.
    let mut order: Vec<(usize, Option<usize>)> = vec![(root, None)];
    let mut i = 0;
    while i < order.len() {
        let (e, parent) = order[i];
        for &c in &fg.element_adj[e] {
            if Some(c) == parent {
                continue;
            }
            for &x in &fg.constraint_adj[c] {
                if x != e {
                    order.push((x, Some(c)));
                }
            }
        }
        i += 1;
    }
    let na = a.len();
    let mut table: Vec<Vec<BigUint>> = vec![Vec::new(); t.len()];
    for &(e, parent) in order.iter().rev() {
        let mut vals = vec![BigUint::one(); na];
        for &c in &fg.element_adj[e] {
            if Some(c) == parent {
                continue;
            }
            let con = &t.constraints()[c];
            let children: Vec<usize> = fg.constraint_adj[c].iter().copied().filter(|&x| x != e).collect();
            let mut g = vec![BigUint::zero(); na];
            'tuples: for &bc in &by_symbol[con.symbol] {
                let tuple = &a.constraints()[bc].args;
                // The image must repeat wherever the constraint does.
                for (p, &x) in con.args.iter().enumerate() {
                    let q = con.args.iter().position(|&y| y == x).expect("present");
                    if tuple[p] != tuple[q] {
                        continue 'tuples;
                    }
                }
                let at = |x: usize| tuple[con.args.iter().position(|&y| y == x).expect("in scope")];
                let mut prod = BigUint::one();
                for &y in &children {
                    let v = &table[y][at(y)];
                    if v.is_zero() {
                        continue 'tuples;
                    }
                    prod *= v;
                }
                g[at(e)] += prod;
            }
            for (v, gv) in vals.iter_mut().zip(g) {
                *v *= gv;
            }
        }
        table[e] = vals;
    }
    Ok(table)
}

/// Number of homomorphisms from the ftree `t` to `a`.
pub fn count_hom_ftree(t: &Structure, a: &Structure) -> Result<BigUint> {
    count_hom_ftree_rooted_at(t, 0, a)
}

/// Same as [`count_hom_ftree`], rooting the recursion at element `root`.
pub fn count_hom_ftree_rooted_at(t: &Structure, root: usize, a: &Structure) -> Result<BigUint> {
    let table = rooted_tables(t, root, a)?;
    Ok(table[root].iter().sum())
}

/// Homomorphisms from the ftree `t` to `a` sending `root` to `target`.
pub fn count_hom_rooted(t: &Structure, root: usize, a: &Structure, target: usize) -> Result<BigUint> {
    if target >= a.len() {
        return Err(Error::invalid("target is not an element"));
    }
    let mut table = rooted_tables(t, root, a)?;
    Ok(std::mem::take(&mut table[root][target]))
}

/// Order of elements for backtracking: breadth-first over the factor graph,
/// and for each constraint the step at which its scope becomes assigned.
fn search_order(q: &Structure) -> (Vec<usize>, Vec<Vec<usize>>) {
    let fg = factor_graph(q);
    let mut order = Vec::with_capacity(q.len());
    let mut placed = vec![false; q.len()];
    for start in 0..q.len() {
        if placed[start] {
            continue;
        }
        placed[start] = true;
        let mut i = order.len();
        order.push(start);
        while i < order.len() {
            let e = order[i];
            for &c in &fg.element_adj[e] {
                for &x in &fg.constraint_adj[c] {
                    if !placed[x] {
                        placed[x] = true;
                        order.push(x);
                    }
                }
            }
            i += 1;
        }
    }
    let mut pos = vec![0; q.len()];
    for (i, &e) in order.iter().enumerate() {
        pos[e] = i;
    }
    let mut check_at = vec![Vec::new(); q.len()];
    for (c, con) in q.constraints().iter().enumerate() {
        let last = con.args.iter().map(|&x| pos[x]).max().expect("arity at least one");
        check_at[last].push(c);
    }
    (order, check_at)
}

/// Exhaustive count of homomorphisms from `q` to `a`.
pub fn count_hom_bruteforce(q: &Structure, a: &Structure) -> Result<BigUint> {
    q.check_same_signature(a)?;
    let space = (0..q.len()).try_fold(1u128, |acc, _| acc.checked_mul(a.len() as u128));
    match space {
        Some(s) if s <= BRUTE_FORCE_LIMIT => {}
        _ => {
            return Err(Error::ResourceLimit(format!(
                "{}^{} maps exceed the brute-force limit {BRUTE_FORCE_LIMIT}",
                a.len(),
                q.len()
            )))
        }
    }
    let (order, check_at) = search_order(q);
    let rels = a.relations();
    let mut map = vec![0usize; q.len()];
    let mut tuple = Vec::new();
    fn rec(
        depth: usize,
        q: &Structure,
        na: usize,
        order: &[usize],
        check_at: &[Vec<usize>],
        rels: &crate::structure::Relations,
        map: &mut [usize],
        tuple: &mut Vec<usize>,
    ) -> u64 {
        if depth == order.len() {
            return 1;
        }
        let mut total = 0;
        for d in 0..na {
            map[order[depth]] = d;
            let ok = check_at[depth].iter().all(|&c| {
                let con = &q.constraints()[c];
                tuple.clear();
                tuple.extend(con.args.iter().map(|&x| map[x]));
                rels.contains(con.symbol, tuple)
            });
            if ok {
                total += rec(depth + 1, q, na, order, check_at, rels, map, tuple);
            }
        }
        total
    }
    Ok(BigUint::from(rec(0, q, a.len(), &order, &check_at, &rels, &mut map, &mut tuple)))
}

/// Backtracking with forward checking over per-element domains.
struct Search<'a> {
    q: &'a Structure,
    b: &'a Structure,
    by_symbol: Vec<Vec<usize>>,
    element_cons: Vec<Vec<usize>>,
    injective: bool,
    nodes: u64,
}

impl Search<'_> {
    fn new<'a>(q: &'a Structure, b: &'a Structure, injective: bool) -> Search<'a> {
        let mut element_cons = vec![Vec::new(); q.len()];
        for (c, con) in q.constraints().iter().enumerate() {
            for x in con.scope() {
                element_cons[x].push(c);
            }
        }
        Search {
            q,
            b,
            by_symbol: b.constraints_by_symbol(),
            element_cons,
            injective,
            nodes: 0,
        }
    }

    /// Removes unsupported values from the domains of elements sharing a
    /// constraint with `x`. Returns false on a wipe-out.
    fn propagate(&self, x: usize, domains: &mut [Vec<bool>]) -> bool {
        let mut queue = vec![x];
        while let Some(y) = queue.pop() {
            for &c in &self.element_cons[y] {
                let con = &self.q.constraints()[c];
                let scope = con.scope();
                let mut support: Vec<Vec<bool>> = scope.iter().map(|_| vec![false; self.b.len()]).collect();
                'tuples: for &bc in &self.by_symbol[con.symbol] {
                    let t = &self.b.constraints()[bc].args;
                    for (p, &e) in con.args.iter().enumerate() {
                        let first = con.args.iter().position(|&z| z == e).expect("present");
                        if t[p] != t[first] || !domains[e][t[p]] {
                            continue 'tuples;
                        }
                    }
                    for (si, &e) in scope.iter().enumerate() {
                        let p = con.args.iter().position(|&z| z == e).expect("present");
                        support[si][t[p]] = true;
                    }
                }
                for (si, &e) in scope.iter().enumerate() {
                    let mut changed = false;
                    let mut any = false;
                    for (d, keep) in domains[e].iter_mut().zip(&support[si]) {
                        if *d && !keep {
                            *d = false;
                            changed = true;
                        }
                        any |= *d;
                    }
                    if !any {
                        return false;
                    }
                    if changed {
                        queue.push(e);
                    }
                }
            }
        }
        true
    }

    fn solve(&mut self, domains: Vec<Vec<bool>>) -> Result<Option<Vec<usize>>> {
        self.nodes += 1;
        if self.nodes > SEARCH_NODE_LIMIT {
            return Err(Error::ResourceLimit(format!(
                "homomorphism search visited more than {SEARCH_NODE_LIMIT} nodes"
            )));
        }
        let sizes: Vec<usize> = domains.iter().map(|d| d.iter().filter(|&&x| x).count()).collect();
        let pick = (0..domains.len()).filter(|&e| sizes[e] > 1).min_by_key(|&e| sizes[e]);
        let Some(x) = pick else {
            let map: Vec<usize> = domains
                .iter()
                .map(|d| d.iter().position(|&v| v).expect("non-empty domain"))
                .collect();
            if self.injective {
                let mut seen = vec![false; self.b.len()];
                if map.iter().any(|&v| std::mem::replace(&mut seen[v], true)) {
                    return Ok(None);
                }
            }
            return Ok(Some(map));
        };
        for d in 0..self.b.len() {
            if !domains[x][d] {
                continue;
            }
            let mut next = domains.clone();
            next[x] = vec![false; self.b.len()];
            next[x][d] = true;
            if self.injective {
                let mut ok = true;
                for (e, dom) in next.iter_mut().enumerate() {
                    if e != x {
                        dom[d] = false;
                        ok &= dom.iter().any(|&v| v);
                    }
                }
                if !ok {
                    continue;
                }
            }
            if self.propagate(x, &mut next) {
                if let Some(m) = self.solve(next)? {
                    return Ok(Some(m));
                }
            }
        }
        Ok(None)
    }

    fn run(mut self) -> Result<Option<Vec<usize>>> {
        let mut domains = vec![vec![true; self.b.len()]; self.q.len()];
        for x in 0..self.q.len() {
            if !self.propagate(x, &mut domains) {
                return Ok(None);
            }
        }
        self.solve(domains)
    }
}

/// A homomorphism from `a` to `b` (as element images), if one exists.
pub fn exists_hom(a: &Structure, b: &Structure) -> Result<Option<Vec<usize>>> {
    a.check_same_signature(b)?;
    let found = Search::new(a, b, false).run()?;
    if let Some(m) = &found {
        if !crate::structure::is_homomorphism(a, b, m) {
            return Err(Error::Internal("search returned a non-homomorphism".into()));
        }
    }
    Ok(found)
}

/// An isomorphism from `a` to `b`, if one exists.
pub fn find_isomorphism(a: &Structure, b: &Structure) -> Result<Option<Vec<usize>>> {
    a.check_same_signature(b)?;
    let counts = |s: &Structure| s.constraints_by_symbol().iter().map(Vec::len).collect::<Vec<_>>();
    if a.len() != b.len() || counts(a) != counts(b) {
        return Ok(None);
    }
    Search::new(a, b, true).run()
}
