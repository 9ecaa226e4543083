//! Equitable partitions, their parameters, and fractional isomorphism witnesses.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::matrix::RatMatrix;
use crate::rat::Rat;
use crate::refine::{constraint_incidences, element_incidences, joint_refine, Colouring, Label};
use crate::structure::Structure;

/// A partition of the elements and of the constraints of a structure into
/// numbered classes. Classes may be empty (useful when two structures share
/// class numbers).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub element_class: Vec<usize>,
    pub constraint_class: Vec<usize>,
    pub num_element_classes: usize,
    pub num_constraint_classes: usize,
}

impl Partition {
    /// Builds a partition; the class counts are one more than the largest ids.
    pub fn new(element_class: Vec<usize>, constraint_class: Vec<usize>) -> Self {
        let ne = element_class.iter().max().map_or(0, |m| m + 1);
        let nc = constraint_class.iter().max().map_or(0, |m| m + 1);
        Partition {
            element_class,
            constraint_class,
            num_element_classes: ne,
            num_constraint_classes: nc,
        }
    }

    /// Every element and every constraint in its own class.
    pub fn discrete(s: &Structure) -> Self {
        Partition::new((0..s.len()).collect(), (0..s.num_constraints()).collect())
    }

    /// One element class and (if there are constraints) one constraint class.
    pub fn trivial(s: &Structure) -> Self {
        Partition::new(vec![0; s.len()], vec![0; s.num_constraints()])
    }

    pub fn element_classes(&self) -> Vec<Vec<usize>> {
        group(&self.element_class, self.num_element_classes)
    }

    pub fn constraint_classes(&self) -> Vec<Vec<usize>> {
        group(&self.constraint_class, self.num_constraint_classes)
    }

    pub fn element_class_sizes(&self) -> Vec<usize> {
        self.element_classes().iter().map(Vec::len).collect()
    }

    pub fn constraint_class_sizes(&self) -> Vec<usize> {
        self.constraint_classes().iter().map(Vec::len).collect()
    }

    fn check(&self, s: &Structure) -> Result<()> {
        if self.element_class.len() != s.len() || self.constraint_class.len() != s.num_constraints() {
            return Err(Error::invalid("partition does not match the structure's size"));
        }
        if self.element_class.iter().any(|&c| c >= self.num_element_classes)
            || self.constraint_class.iter().any(|&c| c >= self.num_constraint_classes)
        {
            return Err(Error::invalid("partition uses an undeclared class"));
        }
        Ok(())
    }
}

fn group(class: &[usize], n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); n];
    for (x, &c) in class.iter().enumerate() {
        out[c].push(x);
    }
    out
}

/// Dense class ids, numbered in increasing order of colour code.
fn dense(codes: &[u32]) -> Vec<usize> {
    let distinct: BTreeSet<u32> = codes.iter().copied().collect();
    let index: BTreeMap<u32, usize> = distinct.into_iter().enumerate().map(|(i, c)| (c, i)).collect();
    codes.iter().map(|c| index[c]).collect()
}

/// Colour classes of `col` as a partition of `s`.
pub fn partition_from_colouring(s: &Structure, col: &Colouring) -> Result<Partition> {
    if col.element_colour.len() != s.len() || col.constraint_colour.len() != s.num_constraints() {
        return Err(Error::invalid("colouring does not belong to this structure"));
    }
    Ok(Partition::new(dense(&col.element_colour), dense(&col.constraint_colour)))
}

/// Parameters of an equitable partition: `c[(i, j, l)]` counts the
/// constraints of class `j` in which a member of element class `i` has label
/// `l`; `d[(j, i, l)]` counts the members of class `i` carrying label `l` in
/// a constraint of class `j`. Zero entries are omitted.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ParameterTable {
    pub c: BTreeMap<(usize, usize, Label), u64>,
    pub d: BTreeMap<(usize, usize, Label), u64>,
}

impl ParameterTable {
    /// Double counting: `c[i,j,l] * |P_i| == d[j,i,l] * |Q_j|` for all keys.
    pub fn is_consistent(&self, element_sizes: &[usize], constraint_sizes: &[usize]) -> bool {
        let keys: BTreeSet<(usize, usize, Label)> = self
            .c
            .keys()
            .copied()
            .chain(self.d.keys().map(|&(j, i, l)| (i, j, l)))
            .collect();
        keys.into_iter().all(|(i, j, l)| {
            let c = self.c.get(&(i, j, l)).copied().unwrap_or(0);
            let d = self.d.get(&(j, i, l)).copied().unwrap_or(0);
            match (element_sizes.get(i), constraint_sizes.get(j)) {
                (Some(&p), Some(&q)) => c * p as u64 == d * q as u64,
                _ => false,
            }
        })
    }
}

/// Which side of the factor graph a violation was found on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Element,
    Constraint,
}

/// Two members of one class with different labelled counts into another class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub side: Side,
    pub class: usize,
    pub first: usize,
    pub other: usize,
    pub target_class: usize,
    pub label: Label,
    pub first_count: u64,
    pub other_count: u64,
}

type Profile = BTreeMap<(usize, Label), u64>;

fn first_difference(a: &Profile, b: &Profile) -> Option<((usize, Label), u64, u64)> {
    let keys: BTreeSet<(usize, Label)> = a.keys().chain(b.keys()).copied().collect();
    keys.into_iter().find_map(|k| {
        let x = a.get(&k).copied().unwrap_or(0);
        let y = b.get(&k).copied().unwrap_or(0);
        (x != y).then_some((k, x, y))
    })
}

/// Checks (P1) and (P2). Returns the parameters, or the first violation in
/// canonical order (element side first, classes and members in order).
pub fn verify_equitable(
    s: &Structure,
    part: &Partition,
) -> Result<std::result::Result<ParameterTable, Violation>> {
    part.check(s)?;
    let elem_inc = element_incidences(s);
    let con_inc = constraint_incidences(s);
    let elem_profiles: Vec<Profile> = elem_inc
        .iter()
        .map(|inc| {
            let mut p = Profile::new();
            for &(l, c) in inc {
                *p.entry((part.constraint_class[c], l)).or_default() += 1;
            }
            p
        })
        .collect();
    let con_profiles: Vec<Profile> = con_inc
        .iter()
        .map(|inc| {
            let mut p = Profile::new();
            for &(l, a) in inc {
                *p.entry((part.element_class[a], l)).or_default() += 1;
            }
            p
        })
        .collect();

    let mut table = ParameterTable::default();
    for (side, classes, profiles) in [
        (Side::Element, part.element_classes(), &elem_profiles),
        (Side::Constraint, part.constraint_classes(), &con_profiles),
    ] {
        for (class, members) in classes.iter().enumerate() {
            let Some((&first, rest)) = members.split_first() else { continue };
            for &other in rest {
                if let Some(((target_class, label), first_count, other_count)) =
                    first_difference(&profiles[first], &profiles[other])
                {
                    return Ok(Err(Violation {
                        side,
                        class,
                        first,
                        other,
                        target_class,
                        label,
                        first_count,
                        other_count,
                    }));
                }
            }
            let dest = match side {
                Side::Element => &mut table.c,
                Side::Constraint => &mut table.d,
            };
            for (&(target, label), &n) in &profiles[first] {
                dest.insert((class, target, label), n);
            }
        }
    }
    Ok(Ok(table))
}

/// Matching equitable partitions of two structures with equal parameters and
/// equal class sizes on both sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommonEquitableWitness {
    pub partition_a: Partition,
    pub partition_b: Partition,
    pub parameters: ParameterTable,
    pub element_sizes: Vec<usize>,
    pub constraint_sizes: Vec<usize>,
}

/// Common partition of `a` and `b` induced by joint refinement, without the
/// balance check. Class ids are shared.
pub fn joint_partitions(a: &Structure, b: &Structure) -> Result<(Partition, Partition)> {
    a.check_same_signature(b)?;
    let cols = joint_refine(&[a.clone(), b.clone()])?;
    let all_e: Vec<u32> = cols[0].element_colour.iter().chain(&cols[1].element_colour).copied().collect();
    let all_c: Vec<u32> =
        cols[0].constraint_colour.iter().chain(&cols[1].constraint_colour).copied().collect();
    let de = dense(&all_e);
    let dc = dense(&all_c);
    let ne = de.iter().max().map_or(0, |m| m + 1);
    let nc = dc.iter().max().map_or(0, |m| m + 1);
    let mk = |e: &[usize], c: &[usize]| Partition {
        element_class: e.to_vec(),
        constraint_class: c.to_vec(),
        num_element_classes: ne,
        num_constraint_classes: nc,
    };
    let (ea, eb) = de.split_at(a.len());
    let (ca, cb) = dc.split_at(a.num_constraints());
    Ok((mk(ea, ca), mk(eb, cb)))
}

/// A common equitable partition found by joint refinement, or `None` if some
/// class is unbalanced.
pub fn common_equitable_partition(a: &Structure, b: &Structure) -> Result<Option<CommonEquitableWitness>> {
    let (pa, pb) = joint_partitions(a, b)?;
    let sizes = pa.element_class_sizes();
    let csizes = pa.constraint_class_sizes();
    if sizes != pb.element_class_sizes() || csizes != pb.constraint_class_sizes() {
        return Ok(None);
    }
    let ta = verify_equitable(a, &pa)?
        .map_err(|v| Error::Internal(format!("stable colouring is not equitable: {v:?}")))?;
    let tb = verify_equitable(b, &pb)?
        .map_err(|v| Error::Internal(format!("stable colouring is not equitable: {v:?}")))?;
    if ta != tb {
        return Ok(None);
    }
    Ok(Some(CommonEquitableWitness {
        partition_a: pa,
        partition_b: pb,
        parameters: ta,
        element_sizes: sizes,
        constraint_sizes: csizes,
    }))
}

/// Independently re-checks a witness against the two structures.
pub fn verify_common_witness(a: &Structure, b: &Structure, w: &CommonEquitableWitness) -> Result<bool> {
    let pa = &w.partition_a;
    let pb = &w.partition_b;
    if pa.num_element_classes != pb.num_element_classes
        || pa.num_constraint_classes != pb.num_constraint_classes
    {
        return Ok(false);
    }
    let (Ok(ta), Ok(tb)) = (verify_equitable(a, pa)?, verify_equitable(b, pb)?) else {
        return Ok(false);
    };
    Ok(ta == tb
        && ta == w.parameters
        && pa.element_class_sizes() == pb.element_class_sizes()
        && pa.constraint_class_sizes() == pb.constraint_class_sizes()
        && pa.element_class_sizes() == w.element_sizes
        && pa.constraint_class_sizes() == w.constraint_sizes)
}

fn block_matrix(rows_class: &[usize], cols_class: &[usize], sizes: &[usize]) -> RatMatrix {
    let mut m = RatMatrix::zeros(rows_class.len(), cols_class.len());
    let cols = group(cols_class, sizes.len());
    for (r, &i) in rows_class.iter().enumerate() {
        let v = Rat::new(1, sizes[i] as i64);
        for &c in &cols[i] {
            m.set(r, c, v.clone());
        }
    }
    m
}

/// Doubly stochastic `X` (B x A) and `Y` (C_B x C_A) built from uniform
/// blocks over matching classes.
pub fn fractional_iso_witness(w: &CommonEquitableWitness) -> (RatMatrix, RatMatrix) {
    let x = block_matrix(&w.partition_b.element_class, &w.partition_a.element_class, &w.element_sizes);
    let y = block_matrix(
        &w.partition_b.constraint_class,
        &w.partition_a.constraint_class,
        &w.constraint_sizes,
    );
    (x, y)
}

/// 0/1 incidence matrix (elements x constraints) for every label occurring in `s`.
pub fn incidence_matrices(s: &Structure) -> BTreeMap<Label, RatMatrix> {
    let mut out: BTreeMap<Label, RatMatrix> = BTreeMap::new();
    for (c, inc) in constraint_incidences(s).into_iter().enumerate() {
        for (l, a) in inc {
            out.entry(l)
                .or_insert_with(|| RatMatrix::zeros(s.len(), s.num_constraints()))
                .set(a, c, Rat::one());
        }
    }
    out
}

/// Which matrix identities [`verify_matrix_identities`] checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    /// Doubly stochastic `X`, `Y` with `X M_A = M_B Y` and `M_A Y^T = X^T M_B`.
    FracIso,
    /// Left stochastic `X`, `Y` with `X M_A^l <= sum over covering labels of M_B^l' Y`.
    FracHom,
    /// Doubly stochastic `X` with `X N_A = N_B X` for graph adjacency matrices.
    GraphAdjacency,
}

fn adjacency(s: &Structure) -> RatMatrix {
    let mut n = RatMatrix::zeros(s.len(), s.len());
    for c in s.constraints() {
        n.set(c.args[0], c.args[1], Rat::one());
    }
    n
}

/// Exact check of the matrix conditions of the given kind.
pub fn verify_matrix_identities(
    kind: MatrixKind,
    a: &Structure,
    b: &Structure,
    x: &RatMatrix,
    y: &RatMatrix,
) -> Result<bool> {
    a.check_same_signature(b)?;
    if x.rows() != b.len() || x.cols() != a.len() {
        return Err(Error::invalid(format!(
            "X is {}x{}, expected {}x{}",
            x.rows(),
            x.cols(),
            b.len(),
            a.len()
        )));
    }
    if kind != MatrixKind::GraphAdjacency
        && (y.rows() != b.num_constraints() || y.cols() != a.num_constraints())
    {
        return Err(Error::invalid(format!(
            "Y is {}x{}, expected {}x{}",
            y.rows(),
            y.cols(),
            b.num_constraints(),
            a.num_constraints()
        )));
    }
    match kind {
        MatrixKind::FracIso => {
            if !x.is_doubly_stochastic() || !y.is_doubly_stochastic() {
                return Ok(false);
            }
            let ma = incidence_matrices(a);
            let mb = incidence_matrices(b);
            let labels: BTreeSet<Label> = ma.keys().chain(mb.keys()).copied().collect();
            let za = RatMatrix::zeros(a.len(), a.num_constraints());
            let zb = RatMatrix::zeros(b.len(), b.num_constraints());
            let xt = x.transpose();
            let yt = y.transpose();
            for l in labels {
                let m_a = ma.get(&l).unwrap_or(&za);
                let m_b = mb.get(&l).unwrap_or(&zb);
                if x.mul(m_a)? != m_b.mul(y)? || m_a.mul(&yt)? != xt.mul(m_b)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        MatrixKind::FracHom => {
            if !x.is_left_stochastic() || !y.is_left_stochastic() {
                return Ok(false);
            }
            let yt = y.transpose();
            let b_con = b.constraints();
            for (ca, inc) in constraint_incidences(a).into_iter().enumerate() {
                for (l, a_star) in inc {
                    for bb in 0..b.len() {
                        let lhs = x.get(bb, a_star);
                        if lhs.is_zero() {
                            continue;
                        }
                        let rhs: Rat = yt
                            .row(ca)
                            .filter(|&(cb, _)| {
                                let c = &b_con[cb];
                                l.is_covered_by(&Label::new(c.symbol, c.positions(bb)))
                            })
                            .map(|(_, v)| v.clone())
                            .sum();
                        if lhs > rhs {
                            return Ok(false);
                        }
                    }
                }
            }
            Ok(true)
        }
        MatrixKind::GraphAdjacency => {
            let sig = a.signature();
            if sig.len() != 1 || sig.arity(0) != 2 {
                return Err(Error::invalid("adjacency check needs a single binary symbol"));
            }
            if !x.is_doubly_stochastic() {
                return Ok(false);
            }
            Ok(x.mul(&adjacency(a))? == adjacency(b).mul(x)?)
        }
    }
}
