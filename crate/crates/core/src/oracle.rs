//! Exhaustive truth tables, used as ground truth by the test suites and by
//! the solver's optional cross-check.
//!
//! `tt_of_formula` evaluates clauses literal by literal and never touches
//! the decision-diagram code, so agreement between the two is evidence
//! rather than a tautology.

use rayon::prelude::*;
use thiserror::Error;

use crate::cnf::CnfFormula;
use crate::engine::{BoolFunc, Manager, Point, VarId};

pub const MAX_ORACLE_VARS: usize = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("{0} variables exceed the exhaustive limit of {MAX_ORACLE_VARS}")]
    TooLarge(usize),
    #[error("truth tables over {0} and {1} variables cannot be compared")]
    SizeMismatch(usize, usize),
}

/// `2^n` bits; bit `i` is the value at `Point::from_index(n, i)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruthTable {
    n: usize,
    words: Vec<u64>,
}

impl TruthTable {
    pub fn new(n: usize) -> Result<Self, OracleError> {
        if n > MAX_ORACLE_VARS {
            return Err(OracleError::TooLarge(n));
        }
        Ok(TruthTable {
            n,
            words: vec![0; (1usize << n).div_ceil(64)],
        })
    }

    pub fn from_fn(n: usize, f: impl Fn(u64) -> bool + Sync) -> Result<Self, OracleError> {
        let mut t = Self::new(n)?;
        let len = 1u64 << n;
        t.words.par_iter_mut().enumerate().for_each(|(w, word)| {
            let base = w as u64 * 64;
            for bit in 0..64u64.min(len - base) {
                if f(base + bit) {
                    *word |= 1 << bit;
                }
            }
        });
        Ok(t)
    }

    pub fn var_count(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> u64 {
        1 << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, index: u64) -> bool {
        (self.words[(index / 64) as usize] >> (index % 64)) & 1 == 1
    }

    pub fn set(&mut self, index: u64, value: bool) {
        let w = &mut self.words[(index / 64) as usize];
        if value {
            *w |= 1 << (index % 64);
        } else {
            *w &= !(1 << (index % 64));
        }
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| u64::from(w.count_ones())).sum()
    }

    pub fn is_all_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_all_one(&self) -> bool {
        self.count_ones() == self.len()
    }

    /// Satisfying points in lexicographic order.
    pub fn on_points(&self) -> Vec<Point> {
        (0..self.len())
            .filter(|&i| self.get(i))
            .map(|i| Point::from_index(self.n, i))
            .collect()
    }

    /// Builds the function with this table by Shannon expansion on
    /// `x1, x2, ...`.
    pub fn to_func(&self, mgr: &Manager) -> BoolFunc {
        assert_eq!(mgr.var_count(), self.n, "manager/table size mismatch");
        self.expand(mgr, 0, 0)
    }

    fn expand(&self, mgr: &Manager, var: usize, prefix: u64) -> BoolFunc {
        if var == self.n {
            return mgr.constant(self.get(prefix));
        }
        let lo = self.expand(mgr, var + 1, prefix << 1);
        let hi = self.expand(mgr, var + 1, (prefix << 1) | 1);
        let x = mgr.var(VarId(var as u32)).expect("in range");
        mgr.ite(x, hi, lo)
    }
}

/// Bit `p` is `∧ᵢ Cᵢ(p)`, by direct clause evaluation.
pub fn tt_of_formula(f: &CnfFormula) -> Result<TruthTable, OracleError> {
    let n = f.var_count;
    TruthTable::from_fn(n, |idx| {
        f.clauses.iter().all(|c| {
            c.literals().iter().any(|l| {
                let bit = (idx >> (n - 1 - l.var.index())) & 1 == 1;
                bit != l.negated
            })
        })
    })
}

/// Tabulates `f` by evaluating it at every point.
pub fn tt_of_func(mgr: &Manager, f: BoolFunc) -> Result<TruthTable, OracleError> {
    let n = mgr.var_count();
    TruthTable::from_fn(n, |idx| {
        mgr.eval(f, &Point::from_index(n, idx))
            .expect("point has manager width")
    })
}

pub fn tt_equal(a: &TruthTable, b: &TruthTable) -> Result<bool, OracleError> {
    if a.n != b.n {
        return Err(OracleError::SizeMismatch(a.n, b.n));
    }
    Ok(a.words == b.words)
}
