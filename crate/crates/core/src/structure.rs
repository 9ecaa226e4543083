//! Finite relational structures and their factor graphs.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A relation symbol with its arity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
}

/// Maximum supported arity; position sets are stored as `u64` bitmasks.
pub const MAX_ARITY: usize = 64;

/// An ordered list of relation symbols.
#[derive(Clone, Default)]
pub struct Signature {
    symbols: Vec<Symbol>,
    index: HashMap<String, usize>,
}

impl Signature {
    pub fn new<I, S>(symbols: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let mut sig = Signature::default();
        for (name, arity) in symbols {
            sig.push(name.into(), arity)?;
        }
        Ok(sig)
    }

    /// The signature of directed graphs: one binary symbol `E`.
    pub fn graph() -> Self {
        Signature::new([("E", 2)]).expect("valid signature")
    }

    pub(crate) fn push(&mut self, name: String, arity: usize) -> Result<usize> {
        if arity == 0 || arity > MAX_ARITY {
            return Err(Error::invalid(format!(
                "symbol `{name}` has arity {arity}; arities must lie in 1..={MAX_ARITY}"
            )));
        }
        if !is_token(&name) {
            return Err(Error::invalid(format!("`{name}` is not a valid symbol name")));
        }
        if self.index.contains_key(&name) {
            return Err(Error::invalid(format!("symbol `{name}` declared twice")));
        }
        let id = self.symbols.len();
        self.index.insert(name.clone(), id);
        self.symbols.push(Symbol { name, arity });
        Ok(id)
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn arity(&self, symbol: usize) -> usize {
        self.symbols[symbol].arity
    }

    pub fn name(&self, symbol: usize) -> &str {
        &self.symbols[symbol].name
    }

    pub fn lookup(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn max_arity(&self) -> usize {
        self.symbols.iter().map(|s| s.arity).max().unwrap_or(0)
    }

    /// Symbols of `self` followed by the symbols of `other` not already present.
    pub fn merge(&self, other: &Signature) -> Result<Signature> {
        let mut out = self.clone();
        for sym in &other.symbols {
            match out.lookup(&sym.name) {
                Some(id) if out.arity(id) != sym.arity => {
                    return Err(Error::SignatureMismatch(format!(
                        "symbol `{}` has arity {} and {}",
                        sym.name,
                        out.arity(id),
                        sym.arity
                    )))
                }
                Some(_) => {}
                None => {
                    out.push(sym.name.clone(), sym.arity)?;
                }
            }
        }
        Ok(out)
    }
}

impl PartialEq for Signature {
    fn eq(&self, other: &Self) -> bool {
        self.symbols == other.symbols
    }
}

impl Eq for Signature {}

impl fmt::Debug for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.symbols.iter().map(|s| format!("{}/{}", s.name, s.arity)))
            .finish()
    }
}

pub(crate) fn is_token(s: &str) -> bool {
    !s.is_empty() && !s.chars().any(|c| c.is_whitespace() || c == '#')
}

/// A constraint `R(a1, ..., ar)`; `args` are element indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Constraint {
    pub symbol: usize,
    pub args: Vec<usize>,
}

impl Constraint {
    pub fn new(symbol: usize, args: Vec<usize>) -> Self {
        Constraint { symbol, args }
    }

    /// Distinct arguments in order of first occurrence.
    pub fn scope(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.args.len());
        for &a in &self.args {
            if !out.contains(&a) {
                out.push(a);
            }
        }
        out
    }

    /// Bitmask of the (0-based) positions holding `element`.
    pub fn positions(&self, element: usize) -> u64 {
        self.args
            .iter()
            .enumerate()
            .filter(|(_, &a)| a == element)
            .fold(0u64, |m, (i, _)| m | (1 << i))
    }

    pub fn has_repeats(&self) -> bool {
        self.scope().len() < self.args.len()
    }
}

/// A finite structure over a signature.
///
/// Elements are identified by their index in [`Structure::elements`]; this
/// order is the canonical order used by every deterministic output.
#[derive(Clone)]
pub struct Structure {
    name: String,
    signature: Arc<Signature>,
    elements: Vec<String>,
    constraints: Vec<Constraint>,
}

impl Structure {
    /// Validates and builds a structure. Duplicate constraints are collapsed
    /// (first occurrence wins) with a warning.
    pub fn new(
        name: impl Into<String>,
        signature: Arc<Signature>,
        elements: Vec<String>,
        constraints: Vec<Constraint>,
    ) -> Result<Self> {
        let name = name.into();
        if !is_token(&name) {
            return Err(Error::invalid(format!("`{name}` is not a valid structure name")));
        }
        if elements.is_empty() {
            return Err(Error::invalid(format!("structure `{name}` has an empty universe")));
        }
        let mut seen = HashSet::with_capacity(elements.len());
        for e in &elements {
            if !is_token(e) {
                return Err(Error::invalid(format!("`{e}` is not a valid element name")));
            }
            if !seen.insert(e.as_str()) {
                return Err(Error::invalid(format!("element `{e}` declared twice")));
            }
        }
        let mut kept = Vec::with_capacity(constraints.len());
        let mut seen_c = HashSet::with_capacity(constraints.len());
        for c in constraints {
            if c.symbol >= signature.len() {
                return Err(Error::invalid(format!("constraint uses unknown symbol #{}", c.symbol)));
            }
            if c.args.len() != signature.arity(c.symbol) {
                return Err(Error::invalid(format!(
                    "constraint on `{}` has {} arguments, expected {}",
                    signature.name(c.symbol),
                    c.args.len(),
                    signature.arity(c.symbol)
                )));
            }
            if let Some(&bad) = c.args.iter().find(|&&a| a >= elements.len()) {
                return Err(Error::invalid(format!("constraint refers to element #{bad}")));
            }
            if seen_c.insert(c.clone()) {
                kept.push(c);
            } else {
                log::warn!(
                    "structure `{name}`: duplicate constraint {}({}) dropped",
                    signature.name(c.symbol),
                    c.args.iter().map(|&a| elements[a].as_str()).collect::<Vec<_>>().join(",")
                );
            }
        }
        Ok(Structure {
            name,
            signature,
            elements,
            constraints: kept,
        })
    }

    /// Builds a structure from string element names and `(symbol, args)` pairs.
    pub fn from_names(
        name: &str,
        signature: Arc<Signature>,
        elements: &[&str],
        constraints: &[(&str, &[&str])],
    ) -> Result<Self> {
        let index: HashMap<&str, usize> =
            elements.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        let mut cs = Vec::with_capacity(constraints.len());
        for (sym, args) in constraints {
            let s = signature
                .lookup(sym)
                .ok_or_else(|| Error::invalid(format!("unknown symbol `{sym}`")))?;
            let mut tuple = Vec::with_capacity(args.len());
            for a in *args {
                tuple.push(
                    *index
                        .get(a)
                        .ok_or_else(|| Error::invalid(format!("unknown element `{a}`")))?,
                );
            }
            cs.push(Constraint::new(s, tuple));
        }
        Structure::new(
            name,
            signature,
            elements.iter().map(|e| e.to_string()).collect(),
            cs,
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        let name = name.into();
        assert!(is_token(&name), "invalid structure name");
        self.name = name;
        self
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn signature_arc(&self) -> &Arc<Signature> {
        &self.signature
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn element_name(&self, e: usize) -> &str {
        &self.elements[e]
    }

    pub fn element_index(&self, name: &str) -> Option<usize> {
        self.elements.iter().position(|e| e == name)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    /// Always false: universes are non-empty by construction.
    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    /// Human-readable form of a constraint, e.g. `E(a,b)`.
    pub fn constraint_label(&self, c: usize) -> String {
        let con = &self.constraints[c];
        format!(
            "{}({})",
            self.signature.name(con.symbol),
            con.args.iter().map(|&a| self.elements[a].as_str()).collect::<Vec<_>>().join(",")
        )
    }

    pub fn same_signature(&self, other: &Structure) -> bool {
        Arc::ptr_eq(&self.signature, &other.signature) || *self.signature == *other.signature
    }

    pub fn check_same_signature(&self, other: &Structure) -> Result<()> {
        if self.same_signature(other) {
            Ok(())
        } else {
            Err(Error::SignatureMismatch(format!(
                "`{}` has {:?}, `{}` has {:?}",
                self.name, self.signature, other.name, other.signature
            )))
        }
    }

    /// True if no constraint repeats an element.
    pub fn is_loop_free(&self) -> bool {
        self.constraints.iter().all(|c| !c.has_repeats())
    }

    /// Constraint tuples grouped by symbol, for membership tests.
    pub fn relations(&self) -> Relations {
        let mut sets = vec![HashSet::new(); self.signature.len()];
        for c in &self.constraints {
            sets[c.symbol].insert(c.args.clone());
        }
        Relations { sets }
    }

    /// Constraints grouped by symbol (indices into [`Structure::constraints`]).
    pub fn constraints_by_symbol(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.signature.len()];
        for (i, c) in self.constraints.iter().enumerate() {
            out[c.symbol].push(i);
        }
        out
    }

    /// Re-expresses the structure over a larger signature containing every
    /// symbol of the current one with the same arity.
    pub fn with_signature(&self, signature: Arc<Signature>) -> Result<Structure> {
        let mut map = Vec::with_capacity(self.signature.len());
        for sym in self.signature.symbols() {
            match signature.lookup(&sym.name) {
                Some(id) if signature.arity(id) == sym.arity => map.push(id),
                _ => {
                    return Err(Error::SignatureMismatch(format!(
                        "symbol `{}/{}` is missing from the target signature",
                        sym.name, sym.arity
                    )))
                }
            }
        }
        let constraints = self
            .constraints
            .iter()
            .map(|c| Constraint::new(map[c.symbol], c.args.clone()))
            .collect();
        Structure::new(self.name.clone(), signature, self.elements.clone(), constraints)
    }

    /// Renames elements by `perm`: element `i` moves to position `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Structure> {
        let n = self.len();
        if perm.len() != n {
            return Err(Error::invalid("permutation length differs from universe size"));
        }
        let mut elements = vec![String::new(); n];
        let mut hit = vec![false; n];
        for (i, &p) in perm.iter().enumerate() {
            if p >= n || hit[p] {
                return Err(Error::invalid("not a permutation"));
            }
            hit[p] = true;
            elements[p] = self.elements[i].clone();
        }
        let constraints = self
            .constraints
            .iter()
            .map(|c| Constraint::new(c.symbol, c.args.iter().map(|&a| perm[a]).collect()))
            .collect();
        Structure::new(self.name.clone(), self.signature.clone(), elements, constraints)
    }

    /// The structure with its constraint list reordered by `order`.
    pub fn reorder_constraints(&self, order: &[usize]) -> Structure {
        let constraints = order.iter().map(|&i| self.constraints[i].clone()).collect();
        Structure {
            name: self.name.clone(),
            signature: self.signature.clone(),
            elements: self.elements.clone(),
            constraints,
        }
    }
}

impl PartialEq for Structure {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.same_signature(other)
            && self.elements == other.elements
            && self.constraints == other.constraints
    }
}

impl Eq for Structure {}

impl fmt::Debug for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cons: Vec<String> = (0..self.constraints.len())
            .map(|c| self.constraint_label(c))
            .collect();
        f.debug_struct("Structure")
            .field("name", &self.name)
            .field("elements", &self.elements)
            .field("constraints", &cons)
            .finish()
    }
}

/// Per-symbol tuple sets of a structure.
pub struct Relations {
    sets: Vec<HashSet<Vec<usize>>>,
}

impl Relations {
    pub fn contains(&self, symbol: usize, tuple: &[usize]) -> bool {
        self.sets[symbol].contains(tuple)
    }
}

/// Checks that `map` (indexed by elements of `a`) sends every constraint of
/// `a` to a constraint of `b`.
pub fn is_homomorphism(a: &Structure, b: &Structure, map: &[usize]) -> bool {
    if map.len() != a.len() || map.iter().any(|&x| x >= b.len()) || !a.same_signature(b) {
        return false;
    }
    let rel = b.relations();
    let mut img = Vec::new();
    a.constraints().iter().all(|c| {
        img.clear();
        img.extend(c.args.iter().map(|&x| map[x]));
        rel.contains(c.symbol, &img)
    })
}

/// Renames colliding names of `b` by appending `'` until they are fresh.
fn fresh_names(a: &Structure, b: &Structure) -> Vec<String> {
    let mut taken: HashSet<String> = a.elements.iter().cloned().collect();
    let b_names: HashSet<&str> = b.elements.iter().map(String::as_str).collect();
    let mut out = Vec::with_capacity(b.len());
    for e in &b.elements {
        let mut name = e.clone();
        while taken.contains(&name) || (name != *e && b_names.contains(name.as_str())) {
            name.push('\'');
        }
        taken.insert(name.clone());
        out.push(name);
    }
    out
}

/// Disjoint union; elements of `b` follow those of `a` and are renamed by
/// appending `'` when their names clash.
pub fn disjoint_union(a: &Structure, b: &Structure) -> Result<Structure> {
    a.check_same_signature(b)?;
    let offset = a.len();
    let mut elements = a.elements.clone();
    elements.extend(fresh_names(a, b));
    let mut constraints = a.constraints.clone();
    constraints.extend(
        b.constraints
            .iter()
            .map(|c| Constraint::new(c.symbol, c.args.iter().map(|&x| x + offset).collect())),
    );
    Structure::new(
        format!("{}+{}", a.name, b.name),
        a.signature.clone(),
        elements,
        constraints,
    )
}

/// Disjoint union of a non-empty list of structures.
pub fn disjoint_union_all(parts: &[Structure]) -> Result<Structure> {
    let (first, rest) = parts
        .split_first()
        .ok_or_else(|| Error::invalid("disjoint union of an empty list"))?;
    let mut acc = first.clone();
    for p in rest {
        acc = disjoint_union(&acc, p)?;
    }
    Ok(acc)
}

/// Substructure induced by `subset` (element indices). Element order follows
/// the original universe.
pub fn induced_substructure(s: &Structure, subset: &[usize]) -> Result<Structure> {
    if subset.is_empty() {
        return Err(Error::invalid("induced substructure of an empty set"));
    }
    let mut keep = vec![usize::MAX; s.len()];
    for &e in subset {
        if e >= s.len() {
            return Err(Error::invalid(format!("element #{e} is not in the universe")));
        }
        keep[e] = 0;
    }
    let mut elements = Vec::new();
    for (i, slot) in keep.iter_mut().enumerate() {
        if *slot == 0 {
            *slot = elements.len();
            elements.push(s.elements[i].clone());
        }
    }
    let constraints = s
        .constraints
        .iter()
        .filter(|c| c.args.iter().all(|&a| keep[a] != usize::MAX))
        .map(|c| Constraint::new(c.symbol, c.args.iter().map(|&a| keep[a]).collect()))
        .collect();
    Structure::new(s.name.clone(), s.signature.clone(), elements, constraints)
}

/// Connected components of the factor graph, each as an induced substructure,
/// ordered by their first element.
pub fn connected_components(s: &Structure) -> Vec<Structure> {
    component_sets(s)
        .into_iter()
        .enumerate()
        .map(|(i, set)| {
            induced_substructure(s, &set)
                .expect("components are non-empty")
                .with_name(format!("{}.{}", s.name, i))
        })
        .collect()
}

/// Element sets of the connected components, ordered by first element.
pub fn component_sets(s: &Structure) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..s.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for c in &s.constraints {
        let r0 = find(&mut parent, c.args[0]);
        for &a in &c.args[1..] {
            let r = find(&mut parent, a);
            if r != r0 {
                let (lo, hi) = if r < r0 { (r, r0) } else { (r0, r) };
                parent[hi] = lo;
            }
        }
    }
    let mut index: HashMap<usize, usize> = HashMap::new();
    let mut out: Vec<Vec<usize>> = Vec::new();
    for e in 0..s.len() {
        let r = find(&mut parent, e);
        let k = *index.entry(r).or_insert_with(|| {
            out.push(Vec::new());
            out.len() - 1
        });
        out[k].push(e);
    }
    out
}

pub fn is_connected(s: &Structure) -> bool {
    component_sets(s).len() == 1
}

/// Bipartite incidence graph between elements and constraints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorGraph {
    pub num_elements: usize,
    pub num_constraints: usize,
    /// `(element, constraint)` pairs, each at most once.
    pub edges: Vec<(usize, usize)>,
    pub element_adj: Vec<Vec<usize>>,
    pub constraint_adj: Vec<Vec<usize>>,
}

impl FactorGraph {
    pub fn num_nodes(&self) -> usize {
        self.num_elements + self.num_constraints
    }
}

pub fn factor_graph(s: &Structure) -> FactorGraph {
    let mut edges = Vec::new();
    let mut element_adj = vec![Vec::new(); s.len()];
    let mut constraint_adj = Vec::with_capacity(s.num_constraints());
    for (ci, c) in s.constraints.iter().enumerate() {
        let scope = c.scope();
        for &a in &scope {
            edges.push((a, ci));
            element_adj[a].push(ci);
        }
        constraint_adj.push(scope);
    }
    FactorGraph {
        num_elements: s.len(),
        num_constraints: s.num_constraints(),
        edges,
        element_adj,
        constraint_adj,
    }
}

/// Small named graphs, encoded with both orientations of every edge.
pub mod graphs {
    use super::*;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("v{i}")).collect()
    }

    /// Undirected graph on `v0..v{n-1}` with the given edges.
    pub fn undirected(name: &str, n: usize, edges: &[(usize, usize)]) -> Structure {
        let sig = Arc::new(Signature::graph());
        let mut cs = Vec::with_capacity(2 * edges.len());
        for &(u, v) in edges {
            cs.push(Constraint::new(0, vec![u, v]));
            cs.push(Constraint::new(0, vec![v, u]));
        }
        Structure::new(name, sig, names(n), cs).expect("valid graph")
    }

    /// Directed graph with exactly the given arcs.
    pub fn directed(name: &str, n: usize, arcs: &[(usize, usize)]) -> Structure {
        let sig = Arc::new(Signature::graph());
        let cs = arcs.iter().map(|&(u, v)| Constraint::new(0, vec![u, v])).collect();
        Structure::new(name, sig, names(n), cs).expect("valid graph")
    }

    pub fn cycle(n: usize) -> Structure {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        undirected(&format!("C{n}"), n, &edges)
    }

    pub fn path(n: usize) -> Structure {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        undirected(&format!("P{n}"), n, &edges)
    }

    pub fn complete(n: usize) -> Structure {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                edges.push((i, j));
            }
        }
        undirected(&format!("K{n}"), n, &edges)
    }
}
