//! Tree decompositions and the translations between structures of bounded
//! treewidth and ftrees over the star signature.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::stark::{StarSignature, StarSymbol};
use crate::structure::{is_connected, Constraint, Structure};

/// A tree of bags over the universe of a structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDecomposition {
    /// Sorted element sets, one per node.
    pub bags: Vec<Vec<usize>>,
    pub edges: Vec<(usize, usize)>,
}

/// Largest structure handled by [`exact_tree_decomposition`].
pub const MAX_EXACT_ELEMENTS: usize = 16;

impl TreeDecomposition {
    /// Largest bag size minus one (`-1` for an empty decomposition).
    pub fn width(&self) -> isize {
        self.bags.iter().map(|b| b.len() as isize).max().unwrap_or(0) - 1
    }

    fn neighbours(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.bags.len()];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    /// Checks that this is a tree decomposition of `q`.
    pub fn verify(&self, q: &Structure) -> std::result::Result<(), String> {
        let n = self.bags.len();
        if n == 0 {
            return Err("no bags".into());
        }
        if self.edges.len() != n - 1 {
            return Err(format!("{} nodes but {} edges", n, self.edges.len()));
        }
        if let Some(&(u, v)) = self.edges.iter().find(|&&(u, v)| u >= n || v >= n || u == v) {
            return Err(format!("bad edge ({u}, {v})"));
        }
        let adj = self.neighbours();
        if reachable(&adj, 0, |_| true).len() != n {
            return Err("the tree is not connected".into());
        }
        for bag in &self.bags {
            if bag.windows(2).any(|w| w[0] >= w[1]) || bag.iter().any(|&e| e >= q.len()) {
                return Err(format!("bag {bag:?} is not a sorted set of elements"));
            }
        }
        for (ci, c) in q.constraints().iter().enumerate() {
            let scope = c.scope();
            if !self.bags.iter().any(|b| scope.iter().all(|e| b.binary_search(e).is_ok())) {
                return Err(format!("no bag covers {}", q.constraint_label(ci)));
            }
        }
        for e in 0..q.len() {
            let holders: Vec<usize> = (0..n).filter(|&v| self.bags[v].binary_search(&e).is_ok()).collect();
            let Some(&start) = holders.first() else {
                return Err(format!("element {} is in no bag", q.element_name(e)));
            };
            let seen = reachable(&adj, start, |v| self.bags[v].binary_search(&e).is_ok());
            if seen.len() != holders.len() {
                return Err(format!("the bags holding {} are not connected", q.element_name(e)));
            }
        }
        Ok(())
    }

    /// Adjacent bags are comparable under inclusion and every constraint
    /// scope is exactly some bag.
    pub fn is_normalized(&self, q: &Structure) -> bool {
        let subset = |a: &[usize], b: &[usize]| a.iter().all(|x| b.binary_search(x).is_ok());
        self.edges.iter().all(|&(u, v)| {
            subset(&self.bags[u], &self.bags[v]) || subset(&self.bags[v], &self.bags[u])
        }) && q.constraints().iter().all(|c| {
            let mut s = c.scope();
            s.sort_unstable();
            self.bags.contains(&s)
        })
    }
}

fn reachable(adj: &[Vec<usize>], start: usize, allowed: impl Fn(usize) -> bool) -> Vec<usize> {
    let mut seen = vec![false; adj.len()];
    let mut stack = vec![start];
    seen[start] = true;
    let mut out = Vec::new();
    while let Some(v) = stack.pop() {
        out.push(v);
        for &w in &adj[v] {
            if !seen[w] && allowed(w) {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    out
}

/// Adjacency bitmasks of the graph joining elements sharing a constraint.
fn primal_graph(q: &Structure) -> Vec<u32> {
    let mut adj = vec![0u32; q.len()];
    for c in q.constraints() {
        let s = c.scope();
        for &x in &s {
            for &y in &s {
                if x != y {
                    adj[x] |= 1 << y;
                }
            }
        }
    }
    adj
}

/// Vertices outside `s` and `v` reachable from `v` through `s`.
fn q_set(adj: &[u32], s: u32, v: usize) -> u32 {
    let mut seen = 1u32 << v;
    let mut frontier = 1u32 << v;
    let mut out = 0u32;
    while frontier != 0 {
        let x = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let nb = adj[x] & !seen;
        seen |= nb;
        out |= nb & !s;
        frontier |= nb & s;
    }
    out
}

/// A decomposition of minimum width, normalized, if that width is at most
/// `width_limit`.
pub fn exact_tree_decomposition(q: &Structure, width_limit: usize) -> Result<Option<TreeDecomposition>> {
    let n = q.len();
    if n > MAX_EXACT_ELEMENTS {
        return Err(Error::ResourceLimit(format!(
            "exact treewidth is limited to {MAX_EXACT_ELEMENTS} elements, got {n}"
        )));
    }
    let adj = primal_graph(q);
    // best[s]: smallest max |Q(S', v)| over orderings eliminating exactly s first.
    let full = (1usize << n) - 1;
    let mut best = vec![u32::MAX; 1 << n];
    let mut choice = vec![0u8; 1 << n];
    best[0] = 0;
    for s in 1..=full {
        let mut rest = s;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let prev = s & !(1 << v);
            let cost = best[prev].max(q_set(&adj, prev as u32, v).count_ones());
            if cost < best[s] {
                best[s] = cost;
                choice[s] = v as u8;
            }
        }
    }
    if best[full] as usize > width_limit {
        return Ok(None);
    }
    let mut order = Vec::with_capacity(n);
    let mut s = full;
    while s != 0 {
        let v = choice[s] as usize;
        order.push(v);
        s &= !(1 << v);
    }
    order.reverse();
    let td = from_elimination_order(q, &order);
    debug_assert!(td.width() <= best[full] as isize);
    Ok(Some(normalize(q, td)))
}

/// Decomposition induced by eliminating elements in `order`.
fn from_elimination_order(q: &Structure, order: &[usize]) -> TreeDecomposition {
    let n = q.len();
    let mut adj = primal_graph(q);
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut bags = Vec::with_capacity(n);
    let mut parent = vec![None; n];
    for (i, &v) in order.iter().enumerate() {
        let later: Vec<usize> = (0..n).filter(|&w| adj[v] >> w & 1 == 1 && pos[w] > i).collect();
        for &x in &later {
            for &y in &later {
                if x != y {
                    adj[x] |= 1 << y;
                }
            }
        }
        parent[i] = later.iter().map(|&w| pos[w]).min();
        let mut bag = later;
        bag.push(v);
        bag.sort_unstable();
        bags.push(bag);
    }
    let mut edges = Vec::new();
    let mut last_root: Option<usize> = None;
    for i in 0..n {
        match parent[i] {
            Some(p) => edges.push((i, p)),
            None => {
                if let Some(r) = last_root {
                    edges.push((r, i));
                }
                last_root = Some(i);
            }
        }
    }
    TreeDecomposition { bags, edges }
}

fn intersect(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().copied().filter(|x| b.binary_search(x).is_ok()).collect()
}

/// Subdivides edges between incomparable bags and grafts a leaf bag equal to
/// each constraint scope that is not already a bag.
pub fn normalize(q: &Structure, td: TreeDecomposition) -> TreeDecomposition {
    let TreeDecomposition { mut bags, edges } = td;
    let mut out_edges = Vec::with_capacity(edges.len());
    for (u, v) in edges {
        let mid = intersect(&bags[u], &bags[v]);
        if mid.len() == bags[u].len() || mid.len() == bags[v].len() {
            out_edges.push((u, v));
        } else {
            let m = bags.len();
            bags.push(mid);
            out_edges.push((u, m));
            out_edges.push((m, v));
        }
    }
    let mut present: BTreeSet<Vec<usize>> = bags.iter().cloned().collect();
    for c in q.constraints() {
        let mut s = c.scope();
        s.sort_unstable();
        if present.contains(&s) {
            continue;
        }
        let host = bags
            .iter()
            .position(|b| s.iter().all(|x| b.binary_search(x).is_ok()))
            .expect("every scope lies in some bag");
        let leaf = bags.len();
        bags.push(s.clone());
        out_edges.push((host, leaf));
        present.insert(s);
    }
    TreeDecomposition {
        bags,
        edges: out_edges,
    }
}

/// The ftree `T` over the star signature with `Hom(T, D*_k) = Hom(q, D)`,
/// built from a normalized decomposition of width below `k`.
pub fn ftree_from_tw_structure(q: &Structure, td: &TreeDecomposition, star: &StarSignature) -> Result<Structure> {
    if *star.base != *q.signature() {
        return Err(Error::SignatureMismatch("star signature built for another base".into()));
    }
    if !is_connected(q) {
        return Err(Error::invalid("the structure must be connected"));
    }
    td.verify(q).map_err(|e| Error::invalid(format!("not a tree decomposition: {e}")))?;
    if td.width() >= star.k as isize {
        return Err(Error::invalid(format!("width {} is not below k = {}", td.width(), star.k)));
    }
    if !td.is_normalized(q) {
        return Err(Error::invalid("the decomposition is not normalized"));
    }
    if td.bags.iter().any(Vec::is_empty) {
        return Err(Error::invalid("the decomposition has an empty bag"));
    }
    let id = |s: StarSymbol| star.id(&s).ok_or_else(|| Error::Internal(format!("missing star symbol {s:?}")));
    let nodes = td.bags.len();
    let mut elements: Vec<String> = (0..nodes).map(|v| format!("n{v}")).collect();
    let mut constraints = Vec::new();
    for (v, bag) in td.bags.iter().enumerate() {
        constraints.push(Constraint::new(id(StarSymbol::TupleDiagonal { len: bag.len(), set: 0 })?, vec![v]));
    }
    for &(u, v) in &td.edges {
        let (big, small) = if td.bags[v].iter().all(|x| td.bags[u].binary_search(x).is_ok()) {
            (u, v)
        } else {
            (v, u)
        };
        let proj: Vec<usize> = td.bags[small]
            .iter()
            .map(|x| td.bags[big].binary_search(x).expect("nested bags"))
            .collect();
        let sym = id(StarSymbol::TupleProjection {
            len: td.bags[big].len(),
            proj,
        })?;
        constraints.push(Constraint::new(sym, vec![big, small]));
    }
    for (ci, c) in q.constraints().iter().enumerate() {
        let t = elements.len();
        elements.push(q.constraint_label(ci));
        let arity = c.args.len();
        constraints.push(Constraint::new(id(StarSymbol::ConstraintDiagonal { symbol: c.symbol, set: 0 })?, vec![t]));
        for i in 0..arity {
            for i2 in i + 1..arity {
                if c.args[i] == c.args[i2] {
                    let set = 1u64 << i | 1u64 << i2;
                    constraints.push(Constraint::new(
                        id(StarSymbol::ConstraintDiagonal { symbol: c.symbol, set })?,
                        vec![t],
                    ));
                }
            }
        }
        let mut scope = c.scope();
        scope.sort_unstable();
        let v = td.bags.iter().position(|b| *b == scope).expect("normalized");
        let proj: Vec<usize> = scope
            .iter()
            .map(|x| c.args.iter().position(|a| a == x).expect("in scope"))
            .collect();
        let sym = id(StarSymbol::ConstraintProjection {
            symbol: c.symbol,
            proj,
        })?;
        constraints.push(Constraint::new(sym, vec![t, v]));
    }
    Structure::new(format!("T({})", q.name()), star.signature.clone(), elements, constraints)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum NodeType {
    Tuple(usize),
    Constraint(usize),
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

/// The structure `Q` over the base signature with `Hom(Q, D) = Hom(t, D*_k)`
/// for every `D`: one fresh element per tuple position or constraint
/// position of `t`, identified along the equalities `t` imposes.
pub fn tw_structure_from_ftree(t: &Structure, star: &StarSignature) -> Result<Structure> {
    if *t.signature() != *star.signature {
        return Err(Error::SignatureMismatch("not over the given star signature".into()));
    }
    if !crate::homcount::is_ftree(t) {
        return Err(Error::invalid("the input is not an ftree"));
    }
    let mut ty: Vec<Option<NodeType>> = vec![None; t.len()];
    let mut set_type = |e: usize, nt: NodeType| -> Result<()> {
        match ty[e] {
            None => {
                ty[e] = Some(nt);
                Ok(())
            }
            Some(old) if old == nt => Ok(()),
            Some(old) => Err(Error::invalid(format!(
                "element {} is used both as {old:?} and as {nt:?}",
                t.element_name(e)
            ))),
        }
    };
    for c in t.constraints() {
        match &star.symbols[c.symbol] {
            StarSymbol::TupleDiagonal { len, .. } => set_type(c.args[0], NodeType::Tuple(*len))?,
            StarSymbol::TupleProjection { len, proj } => {
                set_type(c.args[0], NodeType::Tuple(*len))?;
                set_type(c.args[1], NodeType::Tuple(proj.len()))?;
            }
            StarSymbol::ConstraintDiagonal { symbol, .. } => set_type(c.args[0], NodeType::Constraint(*symbol))?,
            StarSymbol::ConstraintProjection { symbol, proj } => {
                set_type(c.args[0], NodeType::Constraint(*symbol))?;
                set_type(c.args[1], NodeType::Tuple(proj.len()))?;
            }
        }
    }
    // Fresh variables: `first[e] .. first[e] + width(e)`.
    let mut first = Vec::with_capacity(t.len());
    let mut total = 0;
    for (e, nt) in ty.iter().enumerate() {
        first.push(total);
        total += match nt {
            Some(NodeType::Tuple(len)) => *len,
            Some(NodeType::Constraint(s)) => star.base.arity(*s),
            None => {
                return Err(Error::invalid(format!(
                    "element {} is in no constraint, so its type is unknown",
                    t.element_name(e)
                )))
            }
        };
    }
    let mut parent: Vec<usize> = (0..total).collect();
    let mut union = |x: usize, y: usize| {
        let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
        if rx != ry {
            parent[rx.max(ry)] = rx.min(ry);
        }
    };
    for c in t.constraints() {
        match &star.symbols[c.symbol] {
            StarSymbol::TupleDiagonal { set, .. } | StarSymbol::ConstraintDiagonal { set, .. } => {
                let base = first[c.args[0]];
                let members: Vec<usize> = (0..64).filter(|i| set >> i & 1 == 1).collect();
                for w in members.windows(2) {
                    union(base + w[0], base + w[1]);
                }
            }
            StarSymbol::TupleProjection { proj, .. } | StarSymbol::ConstraintProjection { proj, .. } => {
                let (from, to) = (first[c.args[0]], first[c.args[1]]);
                for (l, &i) in proj.iter().enumerate() {
                    union(to + l, from + i);
                }
            }
        }
    }
    let mut class_of = HashMap::new();
    let mut elements = Vec::new();
    let mut rep = vec![0; total];
    for (x, slot) in rep.iter_mut().enumerate() {
        let r = find(&mut parent, x);
        *slot = *class_of.entry(r).or_insert_with(|| {
            elements.push(format!("x{}", elements.len()));
            elements.len() - 1
        });
    }
    let mut constraints = Vec::new();
    for (e, nt) in ty.iter().enumerate() {
        if let Some(NodeType::Constraint(s)) = nt {
            let args = (0..star.base.arity(*s)).map(|i| rep[first[e] + i]).collect();
            constraints.push(Constraint::new(*s, args));
        }
    }
    Structure::new("Q", star.base.clone(), elements, constraints)
}
