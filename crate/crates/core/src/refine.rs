//! Incidence labels and iterated-degree colour refinement.

use std::fmt;

use crate::error::{Error, Result};
use crate::par;
use crate::structure::{Signature, Structure};

/// Incidence label `(S, R)`: the set of positions (bit `i` = position `i+1`)
/// an element occupies in a constraint on symbol `R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label {
    pub symbol: usize,
    pub positions: u64,
}

impl Label {
    pub fn new(symbol: usize, positions: u64) -> Self {
        Label { symbol, positions }
    }

    /// 1-based positions in increasing order.
    pub fn position_list(&self) -> Vec<usize> {
        (0..64).filter(|i| self.positions >> i & 1 == 1).map(|i| i + 1).collect()
    }

    /// True if `other` has the same symbol and a superset of positions.
    pub fn is_covered_by(&self, other: &Label) -> bool {
        self.symbol == other.symbol && self.positions & !other.positions == 0
    }

    pub fn display<'a>(&'a self, sig: &'a Signature) -> impl fmt::Display + 'a {
        LabelDisplay { label: self, sig }
    }
}

struct LabelDisplay<'a> {
    label: &'a Label,
    sig: &'a Signature,
}

impl fmt::Display for LabelDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ps: Vec<String> = self.label.position_list().iter().map(|p| p.to_string()).collect();
        write!(f, "({{{}}},{})", ps.join(","), self.sig.name(self.label.symbol))
    }
}

/// Entry of the matrix representation at `(element, constraint)`, or `None`
/// when the element does not occur in the constraint.
pub fn matrix_label(s: &Structure, element: usize, constraint: usize) -> Result<Option<Label>> {
    if element >= s.len() {
        return Err(Error::invalid(format!("element #{element} out of range")));
    }
    let c = s
        .constraints()
        .get(constraint)
        .ok_or_else(|| Error::invalid(format!("constraint #{constraint} out of range")))?;
    let pos = c.positions(element);
    Ok((pos != 0).then(|| Label::new(c.symbol, pos)))
}

/// Labelled incidences of every constraint: `(label, element)` pairs, one per
/// distinct element of the tuple, in first-occurrence order.
pub fn constraint_incidences(s: &Structure) -> Vec<Vec<(Label, usize)>> {
    s.constraints()
        .iter()
        .map(|c| {
            c.scope()
                .into_iter()
                .map(|a| (Label::new(c.symbol, c.positions(a)), a))
                .collect()
        })
        .collect()
}

/// Labelled incidences of every element: `(label, constraint)` pairs.
pub fn element_incidences(s: &Structure) -> Vec<Vec<(Label, usize)>> {
    let mut out = vec![Vec::new(); s.len()];
    for (ci, inc) in constraint_incidences(s).into_iter().enumerate() {
        for (l, a) in inc {
            out[a].push((l, ci));
        }
    }
    out
}

/// Stable colouring of one structure, with codes shared across all the
/// structures refined together.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Colouring {
    pub element_colour: Vec<u32>,
    pub constraint_colour: Vec<u32>,
    /// Number of rounds after which the partition stopped changing.
    pub rounds: usize,
}

/// Round-by-round refinement over the disjoint union of several structures.
pub struct Refiner {
    sizes: Vec<(usize, usize)>,
    elem_adj: Vec<Vec<(Label, u32)>>,
    con_adj: Vec<Vec<(Label, u32)>>,
    elem_col: Vec<u32>,
    con_col: Vec<u32>,
    classes: usize,
    rounds: usize,
    stable: bool,
}

impl Refiner {
    pub fn new(structures: &[Structure]) -> Result<Self> {
        Self::with_seeds(structures, 0, 1)
    }

    /// Starts from arbitrary distinct round-0 codes for elements and constraints.
    pub fn with_seeds(structures: &[Structure], element_seed: u32, constraint_seed: u32) -> Result<Self> {
        if element_seed == constraint_seed {
            return Err(Error::invalid("round-0 codes must differ"));
        }
        if let Some(first) = structures.first() {
            for s in &structures[1..] {
                first.check_same_signature(s)?;
            }
        }
        let mut elem_adj = Vec::new();
        let mut con_adj = Vec::new();
        let mut sizes = Vec::with_capacity(structures.len());
        for s in structures {
            let e0 = elem_adj.len() as u32;
            let c0 = con_adj.len() as u32;
            for inc in element_incidences(s) {
                elem_adj.push(inc.into_iter().map(|(l, c)| (l, c0 + c as u32)).collect());
            }
            for inc in constraint_incidences(s) {
                con_adj.push(inc.into_iter().map(|(l, a)| (l, e0 + a as u32)).collect());
            }
            sizes.push((s.len(), s.num_constraints()));
        }
        let elem_col = vec![element_seed; elem_adj.len()];
        let con_col = vec![constraint_seed; con_adj.len()];
        let classes = usize::from(!elem_col.is_empty()) + usize::from(!con_col.is_empty());
        Ok(Refiner {
            sizes,
            elem_adj,
            con_adj,
            elem_col,
            con_col,
            classes,
            rounds: 0,
            stable: false,
        })
    }

    /// Performs one round; returns whether the partition got finer.
    pub fn step(&mut self) -> bool {
        let elem_sig: Vec<(u32, Vec<(Label, u32)>)> = par::map(&self.elem_adj, |adj| {
            let mut v: Vec<(Label, u32)> = adj.iter().map(|&(l, c)| (l, self.con_col[c as usize])).collect();
            v.sort_unstable();
            v
        })
        .into_iter()
        .zip(&self.elem_col)
        .map(|(v, &c)| (c, v))
        .collect();
        let con_sig: Vec<(u32, Vec<(Label, u32)>)> = par::map(&self.con_adj, |adj| {
            let mut v: Vec<(Label, u32)> = adj.iter().map(|&(l, a)| (l, self.elem_col[a as usize])).collect();
            v.sort_unstable();
            v
        })
        .into_iter()
        .zip(&self.con_col)
        .map(|(v, &c)| (c, v))
        .collect();
        let (new_elem, ne) = dense_codes(&elem_sig, 0);
        let (new_con, nc) = dense_codes(&con_sig, ne as u32);
        let classes = ne + nc;
        let changed = classes != self.classes;
        self.elem_col = new_elem;
        self.con_col = new_con;
        self.classes = classes;
        if changed {
            self.rounds += 1;
        } else {
            self.stable = true;
        }
        changed
    }

    /// Refines until stable.
    pub fn run(&mut self) {
        while !self.stable {
            self.step();
        }
    }

    pub fn is_stable(&self) -> bool {
        self.stable
    }

    pub fn num_classes(&self) -> usize {
        self.classes
    }

    /// Current colouring of each input structure.
    pub fn colourings(&self) -> Vec<Colouring> {
        let mut out = Vec::with_capacity(self.sizes.len());
        let (mut e, mut c) = (0, 0);
        for &(ne, nc) in &self.sizes {
            out.push(Colouring {
                element_colour: self.elem_col[e..e + ne].to_vec(),
                constraint_colour: self.con_col[c..c + nc].to_vec(),
                rounds: self.rounds,
            });
            e += ne;
            c += nc;
        }
        out
    }
}

/// Assigns codes `offset..` to distinct signatures in sorted order.
fn dense_codes<K: Ord + Clone>(sigs: &[K], offset: u32) -> (Vec<u32>, usize) {
    let mut sorted: Vec<&K> = sigs.iter().collect();
    sorted.sort_unstable();
    sorted.dedup();
    let codes = sigs
        .iter()
        .map(|k| offset + sorted.binary_search(&k).expect("present") as u32)
        .collect();
    (codes, sorted.len())
}

/// Jointly refines structures over a shared signature to the stable colouring.
pub fn joint_refine(structures: &[Structure]) -> Result<Vec<Colouring>> {
    let mut r = Refiner::new(structures)?;
    r.run();
    Ok(r.colourings())
}

fn sorted(v: &[u32]) -> Vec<u32> {
    let mut v = v.to_vec();
    v.sort_unstable();
    v
}

/// Whether the two structures have the same iterated degree sequence.
pub fn same_iterated_degree_sequence(a: &Structure, b: &Structure) -> Result<bool> {
    a.check_same_signature(b)?;
    let cols = joint_refine(&[a.clone(), b.clone()])?;
    Ok(sorted(&cols[0].element_colour) == sorted(&cols[1].element_colour)
        && sorted(&cols[0].constraint_colour) == sorted(&cols[1].constraint_colour))
}
