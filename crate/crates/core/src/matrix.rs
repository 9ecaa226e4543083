//! Sparse exact-rational matrices.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::rat::Rat;

/// Sparse matrix with `Rat` entries; absent entries are zero.
#[derive(Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BTreeMap<usize, Rat>>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![BTreeMap::new(); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rat::one());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Rat {
        self.data[r].get(&c).cloned().unwrap_or_default()
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rat) {
        assert!(r < self.rows && c < self.cols, "index out of range");
        if v.is_zero() {
            self.data[r].remove(&c);
        } else {
            self.data[r].insert(c, v);
        }
    }

    /// Adds `v` to entry `(r, c)`.
    pub fn add_to(&mut self, r: usize, c: usize, v: &Rat) {
        let cur = self.get(r, c);
        self.set(r, c, cur + v);
    }

    /// Non-zero entries of row `r` in column order.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, &Rat)> {
        self.data[r].iter().map(|(&c, v)| (c, v))
    }

    /// All non-zero entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Rat)> {
        self.data
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |(&c, v)| (r, c, v)))
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(BTreeMap::len).sum()
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut t = RatMatrix::zeros(self.cols, self.rows);
        for (r, c, v) in self.entries() {
            t.data[c].insert(r, v.clone());
        }
        t
    }

    pub fn mul(&self, other: &RatMatrix) -> Result<RatMatrix> {
        if self.cols != other.rows {
            return Err(Error::invalid(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = RatMatrix::zeros(self.rows, other.cols);
        for (r, row) in self.data.iter().enumerate() {
            let mut acc: BTreeMap<usize, Rat> = BTreeMap::new();
            for (&k, a) in row {
                for (&c, b) in &other.data[k] {
                    *acc.entry(c).or_default() += a * b;
                }
            }
            acc.retain(|_, v| !v.is_zero());
            out.data[r] = acc;
        }
        Ok(out)
    }

    pub fn add(&self, other: &RatMatrix) -> Result<RatMatrix> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::invalid("cannot add matrices of different shapes"));
        }
        let mut out = self.clone();
        for (r, c, v) in other.entries() {
            out.add_to(r, c, v);
        }
        Ok(out)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.entries().all(|(_, _, v)| !v.is_negative())
    }

    pub fn column_sums(&self) -> Vec<Rat> {
        let mut sums = vec![Rat::zero(); self.cols];
        for (_, c, v) in self.entries() {
            sums[c] += v;
        }
        sums
    }

    pub fn row_sums(&self) -> Vec<Rat> {
        self.data.iter().map(|row| row.values().sum()).collect()
    }

    /// Non-negative with every column summing to one.
    pub fn is_left_stochastic(&self) -> bool {
        self.is_nonnegative() && self.column_sums().iter().all(Rat::is_one)
    }

    /// Non-negative with every row summing to one.
    pub fn is_right_stochastic(&self) -> bool {
        self.is_nonnegative() && self.row_sums().iter().all(Rat::is_one)
    }

    /// Square, left and right stochastic.
    pub fn is_doubly_stochastic(&self) -> bool {
        self.rows == self.cols && self.is_left_stochastic() && self.is_right_stochastic()
    }

    /// Entrywise `self <= other`.
    pub fn le(&self, other: &RatMatrix) -> bool {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return false;
        }
        for r in 0..self.rows {
            let keys: std::collections::BTreeSet<usize> =
                self.data[r].keys().chain(other.data[r].keys()).copied().collect();
            for c in keys {
                if self.get(r, c) > other.get(r, c) {
                    return false;
                }
            }
        }
        true
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RatMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "  [{}]", row.join(" "))?;
        }
        Ok(())
    }
}
