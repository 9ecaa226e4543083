//! Builders for the linear systems relating two structures.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::lp::{lp_feasibility, Feasibility, LinearSystem, Relation};
use crate::matrix::RatMatrix;
use crate::par;
use crate::rat::Rat;
use crate::refine::{constraint_incidences, Label};
use crate::structure::{Relations, Structure};

/// Resource caps shared by the builders and constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Maximum number of LP variables in one system.
    pub max_vars: usize,
    /// Maximum common denominator accepted by the decomposition.
    pub max_m: usize,
    /// Maximum universe size of derived structures (stars, powers).
    pub max_universe: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_vars: 200_000,
            max_m: 4,
            max_universe: 20_000,
        }
    }
}

fn pow(base: usize, exp: usize) -> u128 {
    (0..exp).fold(1u128, |acc, _| acc.saturating_mul(base as u128))
}

fn binom(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Decodes `rank` into `len` base-`nb` digits, most significant first.
fn decode(mut rank: usize, len: usize, nb: usize, out: &mut [usize]) {
    for i in (0..len).rev() {
        out[i] = rank % nb;
        rank /= nb;
    }
}

fn encode(digits: impl Iterator<Item = usize>, nb: usize) -> usize {
    digits.fold(0, |acc, d| acc * nb + d)
}

fn sorted_scope(c: &crate::structure::Constraint) -> Vec<usize> {
    let mut s = c.scope();
    s.sort_unstable();
    s
}

/// A variable of the SA systems.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SaVar {
    /// `p_V(f)`: `elements` is `V` in increasing order, `values[i] = f(elements[i])`.
    Set { elements: Vec<usize>, values: Vec<usize> },
    /// `p_C(f)`: `values[i]` is the image of the `i`-th smallest element of the
    /// constraint's scope.
    Constraint { constraint: usize, values: Vec<usize> },
}

/// An SA-style system with its variable keys.
#[derive(Debug, Clone)]
pub struct SaSystem {
    pub system: LinearSystem,
    pub keys: Vec<SaVar>,
    set_offset: HashMap<u64, usize>,
    con_offset: Vec<usize>,
    nb: usize,
}

impl SaSystem {
    /// Index of `p_V(f)`; `elements` must be sorted.
    pub fn set_var(&self, elements: &[usize], values: &[usize]) -> Option<usize> {
        let mask = elements.iter().fold(0u64, |m, &e| m | 1 << e);
        let off = self.set_offset.get(&mask)?;
        Some(off + encode(values.iter().copied(), self.nb))
    }

    /// Index of `p_C(f)` with `values` aligned with the sorted scope.
    pub fn constraint_var(&self, constraint: usize, values: &[usize]) -> Option<usize> {
        let off = *self.con_offset.get(constraint)?;
        Some(off + encode(values.iter().copied(), self.nb))
    }

    /// The point as a map from keys to values.
    pub fn solution_map(&self, point: &[Rat]) -> HashMap<SaVar, Rat> {
        self.keys.iter().cloned().zip(point.iter().cloned()).collect()
    }
}

/// Number of variables of `SA^k(a, b)`.
pub fn sa_var_count(a: &Structure, b: &Structure, k: usize) -> u128 {
    let n = a.len();
    let nb = b.len();
    let sets: u128 = (1..=k.min(n)).map(|s| binom(n, s).saturating_mul(pow(nb, s))).sum();
    let cons: u128 = a.constraints().iter().map(|c| pow(nb, c.scope().len())).sum();
    sets.saturating_add(cons)
}

fn check_pair(a: &Structure, b: &Structure) -> Result<()> {
    a.check_same_signature(b)?;
    if a.len() > 64 {
        return Err(Error::invalid("the left structure may have at most 64 elements"));
    }
    Ok(())
}

fn check_cap(count: u128, limits: &Limits, what: &str) -> Result<()> {
    if count > limits.max_vars as u128 {
        return Err(Error::ResourceLimit(format!(
            "{what} needs {count} variables, cap is {}",
            limits.max_vars
        )));
    }
    Ok(())
}

/// Subsets of `0..n` of the given size as sorted vectors, lexicographically.
fn subsets_of_size(n: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(size);
    fn rec(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for e in start..n {
            if n - e < size - cur.len() {
                break;
            }
            cur.push(e);
            rec(e + 1, n, size, cur, out);
            cur.pop();
        }
    }
    rec(0, n, size, &mut cur, &mut out);
    out
}

/// Non-empty sub-lists of a sorted list (as index lists into it), by size then lexicographically.
fn sublists(len: usize, max_size: usize) -> Vec<Vec<usize>> {
    (1..=len.min(max_size)).flat_map(|s| subsets_of_size(len, s)).collect()
}

fn names_of(s: &Structure, idx: &[usize]) -> String {
    idx.iter().map(|&i| s.element_name(i)).collect::<Vec<_>>().join(",")
}

/// Declares the variables shared by the SA systems.
fn declare_sa_vars(a: &Structure, b: &Structure, k: usize) -> SaSystem {
    let nb = b.len();
    let mut system = LinearSystem::new();
    let mut keys = Vec::new();
    let mut set_offset = HashMap::new();
    let mut vals = vec![0; k.max(64)];
    for size in 1..=k.min(a.len()) {
        for set in subsets_of_size(a.len(), size) {
            let mask = set.iter().fold(0u64, |m, &e| m | 1 << e);
            set_offset.insert(mask, system.num_vars());
            let total = pow(nb, size) as usize;
            for r in 0..total {
                decode(r, size, nb, &mut vals);
                let values = vals[..size].to_vec();
                system.add_var(format!("p[{}->{}]", names_of(a, &set), names_of(b, &values)));
                keys.push(SaVar::Set {
                    elements: set.clone(),
                    values,
                });
            }
        }
    }
    let mut con_offset = Vec::with_capacity(a.num_constraints());
    for (ci, c) in a.constraints().iter().enumerate() {
        con_offset.push(system.num_vars());
        let w = sorted_scope(c).len();
        let label = a.constraint_label(ci);
        let mut vals = vec![0; w];
        for r in 0..pow(nb, w) as usize {
            decode(r, w, nb, &mut vals);
            system.add_var(format!("p[{}->{}]", label, names_of(b, &vals)));
            keys.push(SaVar::Constraint {
                constraint: ci,
                values: vals.clone(),
            });
        }
    }
    SaSystem {
        system,
        keys,
        set_offset,
        con_offset,
        nb,
    }
}

fn image_tuple(c: &crate::structure::Constraint, scope: &[usize], values: &[usize]) -> Vec<usize> {
    c.args
        .iter()
        .map(|x| values[scope.binary_search(x).expect("in scope")])
        .collect()
}

/// Adds, for every constraint `C`, every `U` in `subsets` of its scope and
/// every `f: U -> B`, the row `p_U(f) (rel) sum_{g|U = f} p_C(g)`, plus the
/// (SA4) rows.
fn add_constraint_rows(sa: &mut SaSystem, a: &Structure, b: &Structure, k: usize, rel: Relation) -> Result<()> {
    let nb = b.len();
    let rels: Relations = b.relations();
    for (ci, c) in a.constraints().iter().enumerate() {
        let scope = sorted_scope(c);
        let w = scope.len();
        let total = pow(nb, w) as usize;
        let off = sa.con_offset[ci];
        let mut g = vec![0; w];
        for sub in sublists(w, k) {
            let u: Vec<usize> = sub.iter().map(|&i| scope[i]).collect();
            let mut rows: Vec<Vec<(usize, Rat)>> = (0..pow(nb, u.len()) as usize)
                .map(|r| {
                    let mut f = vec![0; u.len()];
                    decode(r, u.len(), nb, &mut f);
                    vec![(sa.set_var(&u, &f).expect("declared"), Rat::one())]
                })
                .collect();
            for r in 0..total {
                decode(r, w, nb, &mut g);
                let rank = encode(sub.iter().map(|&i| g[i]), nb);
                rows[rank].push((off + r, -Rat::one()));
            }
            for row in rows {
                sa.system.add_row(row, rel, Rat::zero())?;
            }
        }
        for r in 0..total {
            decode(r, w, nb, &mut g);
            if !rels.contains(c.symbol, &image_tuple(c, &scope, &g)) {
                sa.system.add_row(vec![(off + r, Rat::one())], Relation::Eq, Rat::zero())?;
            }
        }
    }
    Ok(())
}

/// `SA^k(a, b)`.
pub fn build_sa_system(a: &Structure, b: &Structure, k: usize, limits: &Limits) -> Result<SaSystem> {
    check_pair(a, b)?;
    if k == 0 {
        return Err(Error::invalid("the level k must be at least 1"));
    }
    check_cap(sa_var_count(a, b, k), limits, &format!("SA^{k}"))?;
    let nb = b.len();
    let mut sa = declare_sa_vars(a, b, k);
    let top = k.min(a.len());
    // (SA1)
    for size in 1..=top {
        for set in subsets_of_size(a.len(), size) {
            let off = sa.set_var(&set, &vec![0; size]).expect("declared");
            let row = (0..pow(nb, size) as usize).map(|r| (off + r, Rat::one())).collect();
            sa.system.add_row(row, Relation::Eq, Rat::one())?;
        }
    }
    // (SA2)
    let mut g = vec![0; top];
    for size in 2..=top {
        for v in subsets_of_size(a.len(), size) {
            let v_off = sa.set_var(&v, &vec![0; size]).expect("declared");
            for sub in sublists(size, size - 1) {
                let u: Vec<usize> = sub.iter().map(|&i| v[i]).collect();
                let u_off = sa.set_var(&u, &vec![0; u.len()]).expect("declared");
                let mut rows: Vec<Vec<(usize, Rat)>> = (0..pow(nb, u.len()) as usize)
                    .map(|r| vec![(u_off + r, Rat::one())])
                    .collect();
                for r in 0..pow(nb, size) as usize {
                    decode(r, size, nb, &mut g);
                    let rank = encode(sub.iter().map(|&i| g[i]), nb);
                    rows[rank].push((v_off + r, -Rat::one()));
                }
                for row in rows {
                    sa.system.add_row(row, Relation::Eq, Rat::zero())?;
                }
            }
        }
    }
    // (SA3), (SA4)
    add_constraint_rows(&mut sa, a, b, k, Relation::Eq)?;
    Ok(sa)
}

/// The level-one variant with (SA3) relaxed to `<=` and (SA5) added.
pub fn build_sa_prime_system(a: &Structure, b: &Structure, limits: &Limits) -> Result<SaSystem> {
    check_pair(a, b)?;
    check_cap(sa_var_count(a, b, 1), limits, "SA'")?;
    let nb = b.len();
    let mut sa = declare_sa_vars(a, b, 1);
    for e in 0..a.len() {
        let off = sa.set_var(&[e], &[0]).expect("declared");
        let row = (0..nb).map(|r| (off + r, Rat::one())).collect();
        sa.system.add_row(row, Relation::Eq, Rat::one())?;
    }
    add_constraint_rows(&mut sa, a, b, 1, Relation::Le)?;
    for (ci, c) in a.constraints().iter().enumerate() {
        let off = sa.con_offset[ci];
        let total = pow(nb, c.scope().len()) as usize;
        let row = (0..total).map(|r| (off + r, Rat::one())).collect();
        sa.system.add_row(row, Relation::Eq, Rat::one())?;
    }
    Ok(sa)
}

/// A system over assignment variables `x[a][b]` plus possibly extra variables.
#[derive(Debug, Clone)]
pub struct AssignmentSystem {
    pub system: LinearSystem,
    /// `x[a][b]` is the index of `x_{a,b}`.
    pub x: Vec<Vec<usize>>,
}

fn declare_assignment(a: &Structure, b: &Structure) -> AssignmentSystem {
    let mut system = LinearSystem::new();
    let x = (0..a.len())
        .map(|ea| {
            (0..b.len())
                .map(|eb| system.add_var(format!("x[{},{}]", a.element_name(ea), b.element_name(eb))))
                .collect()
        })
        .collect();
    AssignmentSystem { system, x }
}

fn add_assignment_rows(s: &mut AssignmentSystem) -> Result<()> {
    for row in s.x.clone() {
        s.system
            .add_row(row.into_iter().map(|v| (v, Rat::one())).collect(), Relation::Eq, Rat::one())?;
    }
    Ok(())
}

/// The base polytope: `sum_b x_{a,b} = 1` and, for every constraint and every
/// map of its scope sending it outside the target relation,
/// `sum_{a in scope} x_{a,f(a)} <= |scope| - 1`.
pub fn build_base_polytope(a: &Structure, b: &Structure, limits: &Limits) -> Result<AssignmentSystem> {
    check_pair(a, b)?;
    let rows_needed: u128 = a.constraints().iter().map(|c| pow(b.len(), c.scope().len())).sum();
    check_cap((a.len() * b.len()) as u128 + rows_needed, limits, "base polytope")?;
    let mut s = declare_assignment(a, b);
    add_assignment_rows(&mut s)?;
    let rels = b.relations();
    let nb = b.len();
    for c in a.constraints() {
        let scope = sorted_scope(c);
        let w = scope.len();
        let mut f = vec![0; w];
        for r in 0..pow(nb, w) as usize {
            decode(r, w, nb, &mut f);
            if !rels.contains(c.symbol, &image_tuple(c, &scope, &f)) {
                let row = scope.iter().zip(&f).map(|(&ea, &eb)| (s.x[ea][eb], Rat::one())).collect();
                s.system.add_row(row, Relation::Le, Rat::from(w - 1))?;
            }
        }
    }
    Ok(s)
}

/// The basic LP relaxation: assignment variables plus, for every constraint
/// `C` and every tuple `t` of the target relation, a variable `l_{C,t}` with
/// `sum_t l_{C,t} = 1` and `sum_{t : t_i = b} l_{C,t} = x_{C[i], b}`.
pub fn build_blp_system(a: &Structure, b: &Structure, limits: &Limits) -> Result<AssignmentSystem> {
    check_pair(a, b)?;
    let by_symbol = b.constraints_by_symbol();
    let extra: u128 = a.constraints().iter().map(|c| by_symbol[c.symbol].len() as u128).sum();
    check_cap((a.len() * b.len()) as u128 + extra, limits, "BLP")?;
    let mut s = declare_assignment(a, b);
    add_assignment_rows(&mut s)?;
    for (ci, c) in a.constraints().iter().enumerate() {
        let tuples = &by_symbol[c.symbol];
        let vars: Vec<usize> = tuples
            .iter()
            .map(|&t| {
                s.system
                    .add_var(format!("l[{}->{}]", a.constraint_label(ci), b.constraint_label(t)))
            })
            .collect();
        s.system
            .add_row(vars.iter().map(|&v| (v, Rat::one())).collect(), Relation::Eq, Rat::one())?;
        for (i, &ea) in c.args.iter().enumerate() {
            for eb in 0..b.len() {
                let mut row: Vec<(usize, Rat)> = tuples
                    .iter()
                    .zip(&vars)
                    .filter(|(&t, _)| b.constraints()[t].args[i] == eb)
                    .map(|(_, &v)| (v, Rat::one()))
                    .collect();
                row.push((s.x[ea][eb], -Rat::one()));
                s.system.add_row(row, Relation::Eq, Rat::zero())?;
            }
        }
    }
    Ok(s)
}

/// A system whose variables are entries of `X` (B x A) and `Y` (C_B x C_A).
#[derive(Debug, Clone)]
pub struct MatrixSystem {
    pub system: LinearSystem,
    x: Vec<Vec<Option<usize>>>,
    y: HashMap<(usize, usize), usize>,
    dims: (usize, usize, usize, usize),
}

impl MatrixSystem {
    pub fn x_var(&self, b: usize, a: usize) -> Option<usize> {
        self.x.get(b).and_then(|r| r.get(a)).copied().flatten()
    }

    pub fn y_var(&self, cb: usize, ca: usize) -> Option<usize> {
        self.y.get(&(cb, ca)).copied()
    }

    /// Reads `X` and `Y` off a point of the system.
    pub fn matrices(&self, point: &[Rat]) -> (RatMatrix, RatMatrix) {
        let (nb, na, cb, ca) = self.dims;
        let mut x = RatMatrix::zeros(nb, na);
        for (r, row) in self.x.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                if let Some(v) = v {
                    x.set(r, c, point[*v].clone());
                }
            }
        }
        let mut y = RatMatrix::zeros(cb, ca);
        for (&(r, c), &v) in &self.y {
            y.set(r, c, point[v].clone());
        }
        (x, y)
    }
}

fn declare_matrices(a: &Structure, b: &Structure, y_allowed: impl Fn(usize, usize) -> bool) -> MatrixSystem {
    let mut system = LinearSystem::new();
    let x = (0..b.len())
        .map(|eb| {
            (0..a.len())
                .map(|ea| Some(system.add_var(format!("X[{},{}]", b.element_name(eb), a.element_name(ea)))))
                .collect()
        })
        .collect();
    let mut y = HashMap::new();
    for cb in 0..b.num_constraints() {
        for ca in 0..a.num_constraints() {
            if y_allowed(cb, ca) {
                let v = system.add_var(format!("Y[{},{}]", b.constraint_label(cb), a.constraint_label(ca)));
                y.insert((cb, ca), v);
            }
        }
    }
    MatrixSystem {
        system,
        x,
        y,
        dims: (b.len(), a.len(), b.num_constraints(), a.num_constraints()),
    }
}

/// Fractional isomorphism: doubly stochastic `X`, `Y` with
/// `X M_A^l = M_B^l Y` and `M_A^l Y^T = X^T M_B^l` for every label.
pub fn build_frac_iso_system(a: &Structure, b: &Structure, limits: &Limits) -> Result<MatrixSystem> {
    a.check_same_signature(b)?;
    if a.len() != b.len() || a.num_constraints() != b.num_constraints() {
        return Err(Error::InfeasibleBySize(format!(
            "{} elements / {} constraints against {} / {}",
            a.len(),
            a.num_constraints(),
            b.len(),
            b.num_constraints()
        )));
    }
    let count = (a.len() * a.len() + a.num_constraints() * a.num_constraints()) as u128;
    check_cap(count, limits, "fractional isomorphism")?;
    let mut ms = declare_matrices(a, b, |_, _| true);
    let (n, m) = (a.len(), a.num_constraints());
    let one = Rat::one();
    for i in 0..n {
        let row = (0..n).map(|j| (ms.x_var(i, j).expect("x"), one.clone())).collect();
        ms.system.add_row(row, Relation::Eq, one.clone())?;
        let col = (0..n).map(|j| (ms.x_var(j, i).expect("x"), one.clone())).collect();
        ms.system.add_row(col, Relation::Eq, one.clone())?;
    }
    for i in 0..m {
        let row = (0..m).map(|j| (ms.y_var(i, j).expect("y"), one.clone())).collect();
        ms.system.add_row(row, Relation::Eq, one.clone())?;
        let col = (0..m).map(|j| (ms.y_var(j, i).expect("y"), one.clone())).collect();
        ms.system.add_row(col, Relation::Eq, one.clone())?;
    }
    let inc_a = constraint_incidences(a);
    let inc_b = constraint_incidences(b);
    let labels: BTreeSet<Label> = inc_a.iter().chain(&inc_b).flatten().map(|(l, _)| *l).collect();
    // Columns of M^l: for each constraint, the element carrying l (at most one).
    let holder = |inc: &[Vec<(Label, usize)>], l: Label| -> Vec<Option<usize>> {
        inc.iter()
            .map(|v| v.iter().find(|(m, _)| *m == l).map(|(_, e)| *e))
            .collect()
    };
    for l in labels {
        let ha = holder(&inc_a, l);
        let hb = holder(&inc_b, l);
        // (X M_A)[eb, ca] = X[eb, ha[ca]];  (M_B Y)[eb, ca] = sum_{cb: hb[cb] = eb} Y[cb, ca].
        for eb in 0..n {
            for ca in 0..m {
                let mut row = Vec::new();
                if let Some(ea) = ha[ca] {
                    row.push((ms.x_var(eb, ea).expect("x"), one.clone()));
                }
                for cb in 0..m {
                    if hb[cb] == Some(eb) {
                        row.push((ms.y_var(cb, ca).expect("y"), -one.clone()));
                    }
                }
                if !row.is_empty() {
                    ms.system.add_row(row, Relation::Eq, Rat::zero())?;
                }
            }
        }
        // (M_A Y^T)[ea, cb] = sum_{ca: ha[ca] = ea} Y[cb, ca];  (X^T M_B)[ea, cb] = X[hb[cb], ea].
        for ea in 0..n {
            for cb in 0..m {
                let mut row = Vec::new();
                for ca in 0..m {
                    if ha[ca] == Some(ea) {
                        row.push((ms.y_var(cb, ca).expect("y"), one.clone()));
                    }
                }
                if let Some(eb) = hb[cb] {
                    row.push((ms.x_var(eb, ea).expect("x"), -one.clone()));
                }
                if !row.is_empty() {
                    ms.system.add_row(row, Relation::Eq, Rat::zero())?;
                }
            }
        }
    }
    Ok(ms)
}

/// Variant of the fractional homomorphism system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FracHomVariant {
    /// `X M_A^l <= sum over covering labels l' of M_B^l' Y`.
    Inequality,
    /// `X M_A^l = M_B^l Y`; only for structures without repeated elements in constraints.
    LoopFreeEquality,
}

/// True if `tb` repeats wherever `ta` does.
fn pattern_implied(ta: &[usize], tb: &[usize]) -> bool {
    (0..ta.len()).all(|i| (0..i).all(|j| ta[i] != ta[j] || tb[i] == tb[j]))
}

/// Fractional homomorphism: left stochastic `X`, `Y`. `Y` only has entries
/// between constraints on the same symbol whose tuples are compatible.
pub fn build_frac_hom_system(
    a: &Structure,
    b: &Structure,
    variant: FracHomVariant,
    limits: &Limits,
) -> Result<MatrixSystem> {
    a.check_same_signature(b)?;
    if variant == FracHomVariant::LoopFreeEquality && !(a.is_loop_free() && b.is_loop_free()) {
        return Err(Error::invalid("the equality variant needs structures without repeated elements"));
    }
    let ac = a.constraints();
    let bc = b.constraints();
    let allowed = |cb: usize, ca: usize| ac[ca].symbol == bc[cb].symbol && pattern_implied(&ac[ca].args, &bc[cb].args);
    let y_count = (0..b.num_constraints())
        .flat_map(|cb| (0..a.num_constraints()).map(move |ca| (cb, ca)))
        .filter(|&(cb, ca)| allowed(cb, ca))
        .count();
    check_cap((a.len() * b.len() + y_count) as u128, limits, "fractional homomorphism")?;
    let mut ms = declare_matrices(a, b, allowed);
    let one = Rat::one();
    for ea in 0..a.len() {
        let col = (0..b.len()).map(|eb| (ms.x_var(eb, ea).expect("x"), one.clone())).collect();
        ms.system.add_row(col, Relation::Eq, one.clone())?;
    }
    let mut y_col: Vec<Vec<usize>> = vec![Vec::new(); a.num_constraints()];
    for &(cb, ca) in ms.y.keys() {
        y_col[ca].push(cb);
    }
    for col in &mut y_col {
        col.sort_unstable();
    }
    for (ca, cbs) in y_col.iter().enumerate() {
        let row = cbs.iter().map(|&cb| (ms.y_var(cb, ca).expect("y"), one.clone())).collect();
        ms.system.add_row(row, Relation::Eq, one.clone())?;
    }
    for (ca, inc) in constraint_incidences(a).into_iter().enumerate() {
        for (l, ea) in inc {
            for eb in 0..b.len() {
                let mut row = vec![(ms.x_var(eb, ea).expect("x"), one.clone())];
                for &cb in &y_col[ca] {
                    let lb = Label::new(bc[cb].symbol, bc[cb].positions(eb));
                    let hit = match variant {
                        FracHomVariant::Inequality => l.is_covered_by(&lb),
                        FracHomVariant::LoopFreeEquality => l == lb,
                    };
                    if hit {
                        row.push((ms.y_var(cb, ca).expect("y"), -one.clone()));
                    }
                }
                let rel = match variant {
                    FracHomVariant::Inequality => Relation::Le,
                    FracHomVariant::LoopFreeEquality => Relation::Eq,
                };
                ms.system.add_row(row, rel, Rat::zero())?;
            }
        }
    }
    Ok(ms)
}

/// Feasibility of `SA^k(a, b)`.
pub fn sa_feasible(a: &Structure, b: &Structure, k: usize, limits: &Limits) -> Result<bool> {
    let sa = build_sa_system(a, b, k, limits)?;
    Ok(lp_feasibility(&sa.system)?.is_feasible())
}

/// Solves `SA^k(a, b)`, returning the system and the answer.
pub fn solve_sa(a: &Structure, b: &Structure, k: usize, limits: &Limits) -> Result<(SaSystem, Feasibility)> {
    let sa = build_sa_system(a, b, k, limits)?;
    let ans = lp_feasibility(&sa.system)?;
    Ok((sa, ans))
}

/// Smallest `k <= k_max` with `SA^k(a, b)` infeasible. Levels are solved
/// independently (concurrently when enabled) and checked for monotonicity.
pub fn sa_rank(a: &Structure, b: &Structure, k_max: usize, limits: &Limits) -> Result<Option<usize>> {
    check_pair(a, b)?;
    if k_max == 0 {
        return Err(Error::invalid("k_max must be at least 1"));
    }
    let within: Vec<usize> = (1..=k_max)
        .take_while(|&k| sa_var_count(a, b, k) <= limits.max_vars as u128)
        .collect();
    let results: Vec<Result<bool>> = par::map(&within, |&k| sa_feasible(a, b, k, limits));
    let mut feasible = Vec::with_capacity(results.len());
    for r in results {
        feasible.push(r?);
    }
    for w in feasible.windows(2) {
        if !w[0] && w[1] {
            return Err(Error::Internal("SA levels are not monotone".into()));
        }
    }
    if let Some(pos) = feasible.iter().position(|f| !f) {
        return Ok(Some(within[pos]));
    }
    if within.len() < k_max {
        let k = within.len() + 1;
        return Err(Error::ResourceLimit(format!(
            "SA^{k} needs {} variables, cap is {}",
            sa_var_count(a, b, k),
            limits.max_vars
        )));
    }
    Ok(None)
}
