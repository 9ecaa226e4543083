//! Exact LP feasibility.
//!
//! A light presolve removes fixed variables and singleton equalities, then a
//! bounded-variable phase-one simplex runs on the remaining rows. Feasible
//! answers come with a point and infeasible ones with a Farkas certificate;
//! both are re-checked exactly against the original system before returning.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::rat::Rat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub lower: Option<Rat>,
    pub upper: Option<Rat>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub terms: Vec<(usize, Rat)>,
    pub relation: Relation,
    pub rhs: Rat,
}

impl Row {
    fn lhs(&self, x: &[Rat]) -> Rat {
        self.terms.iter().map(|(j, a)| a * &x[*j]).sum()
    }

    fn holds(&self, x: &[Rat]) -> bool {
        let v = self.lhs(x);
        match self.relation {
            Relation::Le => v <= self.rhs,
            Relation::Eq => v == self.rhs,
            Relation::Ge => v >= self.rhs,
        }
    }
}

/// Linear constraints over named variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LinearSystem {
    vars: Vec<Variable>,
    rows: Vec<Row>,
}

impl LinearSystem {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a variable with bounds `[0, 1]`.
    pub fn add_var(&mut self, name: impl Into<String>) -> usize {
        self.add_var_bounded(name, Some(Rat::zero()), Some(Rat::one()))
    }

    /// Adds a variable with explicit bounds; `None` means unbounded.
    pub fn add_var_bounded(&mut self, name: impl Into<String>, lower: Option<Rat>, upper: Option<Rat>) -> usize {
        self.vars.push(Variable {
            name: name.into(),
            lower,
            upper,
        });
        self.vars.len() - 1
    }

    pub fn add_row(&mut self, terms: Vec<(usize, Rat)>, relation: Relation, rhs: Rat) -> Result<usize> {
        if let Some((j, _)) = terms.iter().find(|(j, _)| *j >= self.vars.len()) {
            return Err(Error::invalid(format!("row refers to undeclared variable #{j}")));
        }
        self.rows.push(Row { terms, relation, rhs });
        Ok(self.rows.len() - 1)
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    /// Exact check of bounds and rows at `x`.
    pub fn check_point(&self, x: &[Rat]) -> bool {
        x.len() == self.vars.len()
            && self.vars.iter().zip(x).all(|(v, val)| {
                v.lower.as_ref().is_none_or(|l| val >= l) && v.upper.as_ref().is_none_or(|u| val <= u)
            })
            && self.rows.iter().all(|r| r.holds(x))
    }

    /// The same system with rows in a different order.
    pub fn permute_rows(&self, order: &[usize]) -> LinearSystem {
        LinearSystem {
            vars: self.vars.clone(),
            rows: order.iter().map(|&i| self.rows[i].clone()).collect(),
        }
    }
}

/// Proof of infeasibility: row multipliers (`>= 0` on `<=` rows, `<= 0` on
/// `>=` rows, free on equalities) and non-negative multipliers on upper bounds
/// `x <= u` and lower bounds `-x <= -l`, whose combination has all-zero
/// coefficients and a negative right-hand side.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Certificate {
    pub rows: Vec<(usize, Rat)>,
    pub lower: Vec<(usize, Rat)>,
    pub upper: Vec<(usize, Rat)>,
}

impl Certificate {
    /// Exact verification against `sys`.
    pub fn verify(&self, sys: &LinearSystem) -> bool {
        let mut coef = vec![Rat::zero(); sys.num_vars()];
        let mut rhs = Rat::zero();
        for (i, lam) in &self.rows {
            let Some(row) = sys.rows.get(*i) else { return false };
            let sign_ok = match row.relation {
                Relation::Le => !lam.is_negative(),
                Relation::Ge => !lam.is_positive(),
                Relation::Eq => true,
            };
            if !sign_ok {
                return false;
            }
            for (j, a) in &row.terms {
                coef[*j] += lam * a;
            }
            rhs += lam * &row.rhs;
        }
        for (j, mu) in &self.upper {
            let Some(Some(u)) = sys.vars.get(*j).map(|v| v.upper.as_ref()) else { return false };
            if mu.is_negative() {
                return false;
            }
            coef[*j] += mu;
            rhs += mu * u;
        }
        for (j, nu) in &self.lower {
            let Some(Some(l)) = sys.vars.get(*j).map(|v| v.lower.as_ref()) else { return false };
            if nu.is_negative() {
                return false;
            }
            coef[*j] -= nu;
            rhs -= nu * l;
        }
        coef.iter().all(Rat::is_zero) && rhs.is_negative()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(Vec<Rat>),
    Infeasible(Certificate),
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }

    pub fn point(&self) -> Option<&[Rat]> {
        match self {
            Feasibility::Feasible(x) => Some(x),
            Feasibility::Infeasible(_) => None,
        }
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Feasibility::Feasible(_) => None,
            Feasibility::Infeasible(c) => Some(c),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub presolve: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { presolve: true }
    }
}

/// Decides feasibility exactly.
pub fn lp_feasibility(sys: &LinearSystem) -> Result<Feasibility> {
    lp_feasibility_with(sys, SolveOptions::default())
}

pub fn lp_feasibility_with(sys: &LinearSystem, opts: SolveOptions) -> Result<Feasibility> {
    let answer = solve(sys, opts.presolve)?;
    if validate(sys, &answer) {
        return Ok(answer);
    }
    if opts.presolve {
        log::warn!("presolved answer failed verification; solving without presolve");
        let answer = solve(sys, false)?;
        if validate(sys, &answer) {
            return Ok(answer);
        }
    }
    Err(Error::Internal("solver answer failed exact verification".into()))
}

fn validate(sys: &LinearSystem, answer: &Feasibility) -> bool {
    match answer {
        Feasibility::Feasible(x) => sys.check_point(x),
        Feasibility::Infeasible(c) => c.verify(sys),
    }
}

#[derive(Debug, Clone)]
enum Fixed {
    Bound,
    Row(usize, Rat),
}

struct Presolve<'a> {
    sys: &'a LinearSystem,
    rows: Vec<Vec<(usize, Rat)>>,
    cols: Vec<Vec<(usize, Rat)>>,
    rhs: Vec<Rat>,
    live: Vec<usize>,
    active: Vec<bool>,
    value: Vec<Option<Rat>>,
    stack: Vec<(usize, Fixed)>,
    queue: Vec<usize>,
}

/// Multipliers under construction, indexed densely.
struct Multipliers {
    rows: Vec<Rat>,
    lower: Vec<Rat>,
    upper: Vec<Rat>,
}

impl Multipliers {
    fn new(m: usize, n: usize) -> Self {
        Multipliers {
            rows: vec![Rat::zero(); m],
            lower: vec![Rat::zero(); n],
            upper: vec![Rat::zero(); n],
        }
    }

    fn into_certificate(self) -> Certificate {
        let nz = |v: Vec<Rat>| -> Vec<(usize, Rat)> {
            v.into_iter().enumerate().filter(|(_, x)| !x.is_zero()).collect()
        };
        Certificate {
            rows: nz(self.rows),
            lower: nz(self.lower),
            upper: nz(self.upper),
        }
    }
}

fn merge_terms(terms: &[(usize, Rat)]) -> Vec<(usize, Rat)> {
    let mut v: Vec<(usize, Rat)> = terms.to_vec();
    v.sort_by_key(|(j, _)| *j);
    let mut out: Vec<(usize, Rat)> = Vec::with_capacity(v.len());
    for (j, a) in v {
        match out.last_mut() {
            Some((k, b)) if *k == j => *b += a,
            _ => out.push((j, a)),
        }
    }
    out.retain(|(_, a)| !a.is_zero());
    out
}

impl<'a> Presolve<'a> {
    fn new(sys: &'a LinearSystem) -> Self {
        let rows: Vec<Vec<(usize, Rat)>> = sys.rows.iter().map(|r| merge_terms(&r.terms)).collect();
        let mut cols = vec![Vec::new(); sys.num_vars()];
        for (i, r) in rows.iter().enumerate() {
            for (j, a) in r {
                cols[*j].push((i, a.clone()));
            }
        }
        let live = rows.iter().map(Vec::len).collect();
        Presolve {
            sys,
            rhs: sys.rows.iter().map(|r| r.rhs.clone()).collect(),
            live,
            active: vec![true; rows.len()],
            value: vec![None; sys.num_vars()],
            stack: Vec::new(),
            queue: Vec::new(),
            rows,
            cols,
        }
    }

    fn fix(&mut self, j: usize, v: Rat, why: Fixed) {
        for (i, a) in &self.cols[j] {
            if self.active[*i] {
                self.rhs[*i] -= a * &v;
                self.live[*i] -= 1;
                if self.live[*i] <= 1 {
                    self.queue.push(*i);
                }
            }
        }
        self.value[j] = Some(v);
        self.stack.push((j, why));
    }

    /// Runs to completion; returns an infeasibility certificate if one was found.
    fn run(&mut self, enabled: bool) -> Option<Certificate> {
        let n = self.sys.num_vars();
        for j in 0..n {
            let var = &self.sys.vars[j];
            if let (Some(l), Some(u)) = (&var.lower, &var.upper) {
                match l.cmp(u) {
                    Ordering::Greater => {
                        let mut m = Multipliers::new(self.rows.len(), n);
                        m.lower[j] = Rat::one();
                        m.upper[j] = Rat::one();
                        return Some(m.into_certificate());
                    }
                    Ordering::Equal if enabled => self.fix(j, l.clone(), Fixed::Bound),
                    _ => {}
                }
            }
        }
        if !enabled {
            return None;
        }
        self.queue.extend((0..self.rows.len()).filter(|&i| self.live[i] <= 1));
        while let Some(i) = self.queue.pop() {
            if !self.active[i] {
                continue;
            }
            let rel = self.sys.rows[i].relation;
            if self.live[i] == 0 {
                let b = &self.rhs[i];
                let ok = match rel {
                    Relation::Le => !b.is_negative(),
                    Relation::Ge => !b.is_positive(),
                    Relation::Eq => b.is_zero(),
                };
                self.active[i] = false;
                if !ok {
                    let lam = match rel {
                        Relation::Le => Rat::one(),
                        Relation::Ge => -Rat::one(),
                        Relation::Eq => Rat::from_int(-i64::from(b.signum())),
                    };
                    let mut m = Multipliers::new(self.rows.len(), n);
                    m.rows[i] = lam;
                    return Some(self.unwind(m));
                }
            } else if self.live[i] == 1 && rel == Relation::Eq {
                let (j, a) = self.rows[i]
                    .iter()
                    .find(|(j, _)| self.value[*j].is_none())
                    .cloned()
                    .expect("one live term");
                let v = &self.rhs[i] / &a;
                let var = &self.sys.vars[j];
                self.active[i] = false;
                if var.upper.as_ref().is_some_and(|u| &v > u) {
                    let mut m = Multipliers::new(self.rows.len(), n);
                    m.rows[i] = -a.recip();
                    m.upper[j] = Rat::one();
                    return Some(self.unwind(m));
                }
                if var.lower.as_ref().is_some_and(|l| &v < l) {
                    let mut m = Multipliers::new(self.rows.len(), n);
                    m.rows[i] = a.recip();
                    m.lower[j] = Rat::one();
                    return Some(self.unwind(m));
                }
                self.fix(j, v, Fixed::Row(i, a));
            }
        }
        None
    }

    /// Extends multipliers of the reduced system to the original one by
    /// cancelling the columns of fixed variables, latest fix first.
    fn unwind(&self, mut m: Multipliers) -> Certificate {
        let n = self.sys.num_vars();
        let mut res = vec![Rat::zero(); n];
        for (i, lam) in m.rows.iter().enumerate() {
            if !lam.is_zero() {
                for (j, a) in &self.rows[i] {
                    res[*j] += lam * a;
                }
            }
        }
        for j in 0..n {
            res[j] += &m.upper[j];
            res[j] -= &m.lower[j];
        }
        for (k, why) in self.stack.iter().rev() {
            let r = std::mem::take(&mut res[*k]);
            if r.is_zero() {
                continue;
            }
            match why {
                Fixed::Bound => {
                    if r.is_positive() {
                        m.lower[*k] += r;
                    } else {
                        m.upper[*k] -= r;
                    }
                }
                Fixed::Row(i, a) => {
                    let mu = -(&r / a);
                    for (t, c) in &self.rows[*i] {
                        if t != k {
                            res[*t] += &mu * c;
                        }
                    }
                    m.rows[*i] += mu;
                }
            }
        }
        m.into_certificate()
    }
}

fn solve(sys: &LinearSystem, presolve: bool) -> Result<Feasibility> {
    let n = sys.num_vars();
    let mut pre = Presolve::new(sys);
    if let Some(cert) = pre.run(presolve) {
        return Ok(Feasibility::Infeasible(cert));
    }
    // Compact the remaining problem.
    let active_rows: Vec<usize> = (0..pre.rows.len()).filter(|&i| pre.active[i]).collect();
    let mut col_of = vec![usize::MAX; n];
    let mut live_vars = Vec::new();
    for &i in &active_rows {
        for (j, _) in &pre.rows[i] {
            if pre.value[*j].is_none() && col_of[*j] == usize::MAX {
                col_of[*j] = live_vars.len();
                live_vars.push(*j);
            }
        }
    }
    live_vars.sort_unstable();
    for (c, &j) in live_vars.iter().enumerate() {
        col_of[j] = c;
    }
    let reduced_rows: Vec<(Vec<(usize, Rat)>, Relation, Rat)> = active_rows
        .iter()
        .map(|&i| {
            let terms = pre.rows[i]
                .iter()
                .filter(|(j, _)| pre.value[*j].is_none())
                .map(|(j, a)| (col_of[*j], a.clone()))
                .collect();
            (terms, sys.rows[i].relation, pre.rhs[i].clone())
        })
        .collect();
    let bounds: Vec<(Option<Rat>, Option<Rat>)> = live_vars
        .iter()
        .map(|&j| (sys.vars[j].lower.clone(), sys.vars[j].upper.clone()))
        .collect();
    log::debug!(
        "lp: {} vars / {} rows, {} vars / {} rows after presolve",
        n,
        sys.num_rows(),
        live_vars.len(),
        active_rows.len()
    );

    match phase_one(&reduced_rows, &bounds)? {
        PhaseOne::Feasible(xs) => {
            let mut x: Vec<Rat> = (0..n)
                .map(|j| match &pre.value[j] {
                    Some(v) => v.clone(),
                    None => resting_value(&sys.vars[j].lower, &sys.vars[j].upper),
                })
                .collect();
            for (c, &j) in live_vars.iter().enumerate() {
                x[j] = xs[c].clone();
            }
            Ok(Feasibility::Feasible(x))
        }
        PhaseOne::Infeasible { row_mult, lower, upper } => {
            let mut m = Multipliers::new(pre.rows.len(), n);
            for (r, lam) in row_mult.into_iter().enumerate() {
                m.rows[active_rows[r]] = lam;
            }
            for (c, v) in lower.into_iter().enumerate() {
                m.lower[live_vars[c]] = v;
            }
            for (c, v) in upper.into_iter().enumerate() {
                m.upper[live_vars[c]] = v;
            }
            Ok(Feasibility::Infeasible(pre.unwind(m)))
        }
    }
}

/// Starting value of a non-basic variable: a finite bound, else zero.
fn resting_value(lower: &Option<Rat>, upper: &Option<Rat>) -> Rat {
    lower.clone().or_else(|| upper.clone()).unwrap_or_default()
}

enum PhaseOne {
    Feasible(Vec<Rat>),
    Infeasible {
        row_mult: Vec<Rat>,
        lower: Vec<Rat>,
        upper: Vec<Rat>,
    },
}

type SparseRow = Vec<(usize, Rat)>;

fn coeff(row: &SparseRow, j: usize) -> Option<&Rat> {
    row.binary_search_by_key(&j, |(k, _)| *k).ok().map(|p| &row[p].1)
}

/// `row - f * piv`, dropping zeros.
fn sub_scaled(row: &SparseRow, f: &Rat, piv: &SparseRow) -> SparseRow {
    let mut out = Vec::with_capacity(row.len() + piv.len());
    let (mut i, mut k) = (0, 0);
    while i < row.len() || k < piv.len() {
        let take_row = k >= piv.len() || (i < row.len() && row[i].0 < piv[k].0);
        let take_piv = i >= row.len() || (k < piv.len() && piv[k].0 < row[i].0);
        if take_row {
            out.push(row[i].clone());
            i += 1;
        } else if take_piv {
            out.push((piv[k].0, -(f * &piv[k].1)));
            k += 1;
        } else {
            let v = &row[i].1 - &(f * &piv[k].1);
            if !v.is_zero() {
                out.push((row[i].0, v));
            }
            i += 1;
            k += 1;
        }
    }
    out
}

/// Consecutive degenerate pivots tolerated before switching to Bland's rule.
const DEGENERATE_LIMIT: usize = 50;

/// Bounded-variable phase-one simplex. Columns: structural variables, one
/// slack per row (`a x + s = b`), then artificials.
fn phase_one(rows_in: &[(SparseRow, Relation, Rat)], bounds: &[(Option<Rat>, Option<Rat>)]) -> Result<PhaseOne> {
    let n = bounds.len();
    let m = rows_in.len();
    let mut lower: Vec<Option<Rat>> = bounds.iter().map(|b| b.0.clone()).collect();
    let mut upper: Vec<Option<Rat>> = bounds.iter().map(|b| b.1.clone()).collect();
    let mut x: Vec<Rat> = bounds.iter().map(|(l, u)| resting_value(l, u)).collect();
    for (_, rel, _) in rows_in {
        let (l, u) = match rel {
            Relation::Le => (Some(Rat::zero()), None),
            Relation::Ge => (None, Some(Rat::zero())),
            Relation::Eq => (Some(Rat::zero()), Some(Rat::zero())),
        };
        lower.push(l);
        upper.push(u);
        x.push(Rat::zero());
    }
    let mut is_art = vec![false; n + m];
    let mut rows: Vec<SparseRow> = Vec::with_capacity(m);
    let mut basis: Vec<usize> = Vec::with_capacity(m);
    let mut art_rows = Vec::new();
    for (i, (terms, _, rhs)) in rows_in.iter().enumerate() {
        let slack = n + i;
        let r: Rat = rhs - &terms.iter().map(|(j, a)| a * &x[*j]).sum::<Rat>();
        let slack_ok = lower[slack].as_ref().is_none_or(|l| &r >= l)
            && upper[slack].as_ref().is_none_or(|u| &r <= u);
        let mut row: SparseRow = terms.clone();
        row.push((slack, Rat::one()));
        if slack_ok {
            x[slack] = r;
            basis.push(slack);
        } else {
            let t = x.len();
            x.push(r.abs());
            lower.push(Some(Rat::zero()));
            upper.push(None);
            is_art.push(true);
            if r.is_negative() {
                for (_, a) in row.iter_mut() {
                    *a = -&*a;
                }
            }
            row.push((t, Rat::one()));
            basis.push(t);
            art_rows.push(i);
        }
        rows.push(row);
    }
    let ncols = x.len();

    // Reduced costs of the phase-one objective (sum of artificials).
    let mut d: SparseRow = (n + m..ncols).map(|t| (t, Rat::one())).collect();
    for &i in &art_rows {
        d = sub_scaled(&d, &Rat::one(), &rows[i]);
    }
    let mut z: Rat = (n + m..ncols).map(|t| x[t].clone()).sum();
    let mut degenerate = 0usize;
    let mut pivots = 0usize;

    loop {
        if z.is_zero() {
            log::debug!("phase one: feasible after {pivots} pivots");
            return Ok(PhaseOne::Feasible(x[..n].to_vec()));
        }
        let bland = degenerate > DEGENERATE_LIMIT;
        let mut entering: Option<(usize, i32, Rat)> = None;
        for (j, dj) in &d {
            let dir = if dj.is_negative() && upper[*j].as_ref().is_none_or(|u| &x[*j] < u) {
                1
            } else if dj.is_positive() && lower[*j].as_ref().is_none_or(|l| &x[*j] > l) {
                -1
            } else {
                continue;
            };
            if bland {
                entering = Some((*j, dir, dj.abs()));
                break;
            }
            let mag = dj.abs();
            if entering.as_ref().is_none_or(|(_, _, best)| &mag > best) {
                entering = Some((*j, dir, mag));
            }
        }
        let Some((j, dir, _)) = entering else {
            // Optimal with a positive objective: read off the certificate.
            let dmap = |c: usize| coeff(&d, c).cloned().unwrap_or_default();
            let row_mult: Vec<Rat> = (0..m).map(|i| dmap(n + i)).collect();
            let mut lo = vec![Rat::zero(); n];
            let mut up = vec![Rat::zero(); n];
            for c in 0..n {
                let v = dmap(c);
                if v.is_positive() {
                    lo[c] = v;
                } else if v.is_negative() {
                    up[c] = -v;
                }
            }
            log::debug!("phase one: infeasible after {pivots} pivots");
            return Ok(PhaseOne::Infeasible {
                row_mult,
                lower: lo,
                upper: up,
            });
        };
        let dj = coeff(&d, j).cloned().expect("entering has a reduced cost");
        let dir_r = Rat::from_int(dir as i64);

        // Ratio test.
        let mut best: Option<Rat> = match dir {
            1 => upper[j].as_ref().zip(lower[j].as_ref()).map(|(u, l)| u - l),
            _ => lower[j].as_ref().zip(upper[j].as_ref()).map(|(l, u)| u - l),
        };
        let mut leave: Option<usize> = None;
        let mut hits: Vec<(usize, Rat)> = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            if let Some(a) = coeff(row, j) {
                let delta = -(a * &dir_r);
                hits.push((i, delta.clone()));
                let b = basis[i];
                let limit = if delta.is_negative() {
                    lower[b].as_ref().map(|l| (&x[b] - l) / -&delta)
                } else {
                    upper[b].as_ref().map(|u| (u - &x[b]) / &delta)
                };
                let Some(theta) = limit else { continue };
                let better = match &best {
                    None => true,
                    Some(bv) => match theta.cmp(bv) {
                        Ordering::Less => true,
                        Ordering::Equal => leave.is_some_and(|r| basis[i] < basis[r]),
                        Ordering::Greater => false,
                    },
                };
                if better {
                    best = Some(theta);
                    leave = Some(i);
                }
            }
        }
        let Some(theta) = best else {
            return Err(Error::Internal("phase-one objective unbounded".into()));
        };
        degenerate = if theta.is_zero() { degenerate + 1 } else { 0 };
        if !theta.is_zero() {
            x[j] += &dir_r * &theta;
            for (i, delta) in &hits {
                let b = basis[*i];
                x[b] += delta * &theta;
            }
            z += &dj * &(&dir_r * &theta);
        }
        let Some(r) = leave else { continue };
        pivots += 1;
        let b = basis[r];
        if is_art[b] {
            upper[b] = Some(Rat::zero());
        }
        let a = coeff(&rows[r], j).cloned().expect("pivot element");
        let inv = a.recip();
        let piv: SparseRow = rows[r].iter().map(|(c, v)| (*c, v * &inv)).collect();
        for (i, _) in &hits {
            if *i != r {
                let f = coeff(&rows[*i], j).cloned().expect("hit row");
                rows[*i] = sub_scaled(&rows[*i], &f, &piv);
            }
        }
        d = sub_scaled(&d, &dj, &piv);
        rows[r] = piv;
        basis[r] = j;
    }
}
