//! CNF formulas, sampling sets and assignments.
//!
//! Variables are 1-indexed everywhere in the public API, matching DIMACS.

mod assignment;
mod dimacs;

use std::fmt;
use std::ops::Not;

pub use assignment::Assignment;
pub use dimacs::{emit_dimacs, parse_dimacs, Dimacs};

use crate::{Error, Result};

/// A propositional variable, numbered from 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(u32);

impl Var {
    /// # Panics
    /// If `index` is zero.
    pub fn new(index: u32) -> Var {
        assert!(index > 0, "variables are numbered from 1");
        Var(index)
    }

    pub fn index(self) -> u32 {
        self.0
    }

    pub(crate) fn zero_based(self) -> usize {
        (self.0 - 1) as usize
    }

    pub fn positive(self) -> Lit {
        Lit::new(self, false)
    }

    pub fn negative(self) -> Lit {
        Lit::new(self, true)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A signed literal, stored as its DIMACS integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Lit(i32);

impl Lit {
    pub fn new(var: Var, negated: bool) -> Lit {
        let v = var.0 as i32;
        Lit(if negated { -v } else { v })
    }

    /// # Panics
    /// If `value` is zero.
    pub fn from_dimacs(value: i32) -> Lit {
        assert!(value != 0, "0 is not a literal");
        Lit(value)
    }

    pub fn to_dimacs(self) -> i32 {
        self.0
    }

    pub fn var(self) -> Var {
        Var(self.0.unsigned_abs())
    }

    pub fn is_negated(self) -> bool {
        self.0 < 0
    }

    /// The truth value of this literal when its variable takes `value`.
    pub fn eval(self, value: bool) -> bool {
        value != self.is_negated()
    }
}

impl Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(-self.0)
    }
}

impl Ord for Lit {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.var(), self.is_negated()).cmp(&(other.var(), other.is_negated()))
    }
}

impl PartialOrd for Lit {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A non-empty, non-tautological disjunction of literals, kept sorted by
/// variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clause(Vec<Lit>);

impl Clause {
    /// Normalizes `lits` (sort, drop duplicate literals). Rejects empty and
    /// tautological clauses.
    pub fn new(lits: impl IntoIterator<Item = Lit>) -> Result<Clause> {
        let mut lits: Vec<Lit> = lits.into_iter().collect();
        lits.sort();
        lits.dedup();
        if lits.is_empty() {
            return Err(Error::contract("empty clause"));
        }
        if let Some(w) = lits.windows(2).find(|w| w[0].var() == w[1].var()) {
            return Err(Error::contract(format!(
                "tautological clause on variable {}",
                w[0].var()
            )));
        }
        Ok(Clause(lits))
    }

    pub fn lits(&self) -> &[Lit] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// A CNF formula over variables `1..=num_vars`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CnfFormula {
    num_vars: u32,
    clauses: Vec<Clause>,
}

impl CnfFormula {
    pub fn new(num_vars: u32, clauses: Vec<Clause>) -> Result<CnfFormula> {
        if num_vars == 0 {
            return Err(Error::contract("a formula needs at least one variable"));
        }
        for c in &clauses {
            if let Some(l) = c.lits().iter().find(|l| l.var().0 > num_vars) {
                return Err(Error::contract(format!(
                    "literal {l} out of range for {num_vars} variables"
                )));
            }
        }
        Ok(CnfFormula { num_vars, clauses })
    }

    /// Builds a formula from DIMACS-style integer clauses.
    pub fn from_dimacs_clauses(num_vars: u32, clauses: &[Vec<i32>]) -> Result<CnfFormula> {
        let clauses = clauses
            .iter()
            .map(|c| {
                if c.contains(&0) {
                    return Err(Error::contract("0 is not a literal"));
                }
                Clause::new(c.iter().map(|&l| Lit::from_dimacs(l)))
            })
            .collect::<Result<Vec<_>>>()?;
        CnfFormula::new(num_vars, clauses)
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    /// Iterates over `1..=num_vars`.
    pub fn vars(&self) -> impl Iterator<Item = Var> {
        (1..=self.num_vars).map(Var)
    }

    /// The full support as a sampling set.
    pub fn support(&self) -> SamplingSet {
        SamplingSet {
            vars: self.vars().collect(),
        }
    }

    /// True iff every clause has a satisfied literal under `a`. Fails if `a`
    /// leaves some variable of the formula unassigned.
    pub fn evaluate(&self, a: &Assignment) -> Result<bool> {
        let values = a.dense_values(self.num_vars).ok_or_else(|| {
            Error::contract("evaluation needs an assignment total over the formula's variables")
        })?;
        Ok(self.evaluate_dense(&values))
    }

    /// Evaluation on a dense vector indexed by `var - 1`.
    pub(crate) fn evaluate_dense(&self, values: &[bool]) -> bool {
        self.clauses.iter().all(|c| {
            c.lits()
                .iter()
                .any(|l| l.eval(values[l.var().zero_based()]))
        })
    }
}

/// An ordered set of distinct variables over which hashing and blocking
/// happen.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SamplingSet {
    vars: Vec<Var>,
}

impl SamplingSet {
    pub fn new(vars: Vec<Var>, num_vars: u32) -> Result<SamplingSet> {
        if vars.is_empty() {
            return Err(Error::contract("sampling set must be non-empty"));
        }
        let mut seen = vec![false; num_vars as usize];
        for v in &vars {
            if v.0 > num_vars {
                return Err(Error::contract(format!(
                    "sampling variable {v} out of range for {num_vars} variables"
                )));
            }
            if std::mem::replace(&mut seen[v.zero_based()], true) {
                return Err(Error::contract(format!("duplicate sampling variable {v}")));
            }
        }
        Ok(SamplingSet { vars })
    }

    /// Convenience constructor from raw indices.
    pub fn from_indices(indices: &[u32], num_vars: u32) -> Result<SamplingSet> {
        if indices.contains(&0) {
            return Err(Error::contract("variables are numbered from 1"));
        }
        SamplingSet::new(indices.iter().map(|&i| Var(i)).collect(), num_vars)
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn contains(&self, v: Var) -> bool {
        self.vars.contains(&v)
    }

    /// Variables in ascending order.
    pub fn sorted(&self) -> Vec<Var> {
        let mut v = self.vars.clone();
        v.sort();
        v
    }
}

/// Restricts `a` to the variables of `s`, in `s`'s order.
pub fn project(a: &Assignment, s: &SamplingSet) -> Result<Assignment> {
    a.restrict(s.vars())
}
