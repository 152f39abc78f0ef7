use std::fmt;
use std::sync::Arc;

use super::{Lit, Var};
use crate::{Error, Result};

/// A total truth-value map over an explicit, ordered variable set.
///
/// The domain is reference counted so that many witnesses over the same
/// variables share one copy of it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment {
    domain: Arc<[Var]>,
    values: Vec<bool>,
}

impl Assignment {
    pub fn new(domain: Arc<[Var]>, values: Vec<bool>) -> Result<Assignment> {
        if domain.len() != values.len() {
            return Err(Error::contract(format!(
                "assignment has {} variables but {} values",
                domain.len(),
                values.len()
            )));
        }
        let mut sorted: Vec<Var> = domain.to_vec();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::contract("assignment domain repeats a variable"));
        }
        Ok(Assignment { domain, values })
    }

    /// Trusted constructor for domains already known to be duplicate free.
    pub(crate) fn from_parts(domain: Arc<[Var]>, values: Vec<bool>) -> Assignment {
        debug_assert_eq!(domain.len(), values.len());
        Assignment { domain, values }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Var, bool)>) -> Result<Assignment> {
        let (vars, values): (Vec<Var>, Vec<bool>) = pairs.into_iter().unzip();
        Assignment::new(vars.into(), values)
    }

    /// Builds an assignment from signed DIMACS literals, in the given order.
    pub fn from_dimacs(lits: &[i32]) -> Result<Assignment> {
        if lits.contains(&0) {
            return Err(Error::contract("0 is not a literal"));
        }
        Assignment::from_pairs(lits.iter().map(|&l| {
            let l = Lit::from_dimacs(l);
            (l.var(), !l.is_negated())
        }))
    }

    pub fn domain(&self) -> &[Var] {
        &self.domain
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn position(&self, v: Var) -> Option<usize> {
        let guess = v.zero_based();
        if self.domain.get(guess) == Some(&v) {
            return Some(guess);
        }
        self.domain.iter().position(|&d| d == v)
    }

    pub fn value(&self, v: Var) -> Option<bool> {
        self.position(v).map(|i| self.values[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (Var, bool)> + '_ {
        self.domain.iter().copied().zip(self.values.iter().copied())
    }

    /// Restriction to `vars`, in that order.
    pub fn restrict(&self, vars: &[Var]) -> Result<Assignment> {
        self.restrict_shared(&Arc::from(vars))
    }

    pub(crate) fn restrict_shared(&self, vars: &Arc<[Var]>) -> Result<Assignment> {
        let values = vars
            .iter()
            .map(|&v| {
                self.value(v)
                    .ok_or_else(|| Error::contract(format!("variable {v} is not assigned")))
            })
            .collect::<Result<Vec<bool>>>()?;
        Ok(Assignment {
            domain: vars.clone(),
            values,
        })
    }

    /// Values of `1..=num_vars` indexed by `var - 1`, if all are assigned.
    pub(crate) fn dense_values(&self, num_vars: u32) -> Option<Vec<bool>> {
        let mut out = vec![None; num_vars as usize];
        for (v, b) in self.iter() {
            if let Some(slot) = out.get_mut(v.zero_based()) {
                *slot = Some(b);
            }
        }
        out.into_iter().collect()
    }

    /// Signed literals in ascending variable order.
    pub fn to_lits(&self) -> Vec<Lit> {
        let mut lits: Vec<Lit> = self.iter().map(|(v, b)| Lit::new(v, !b)).collect();
        lits.sort();
        lits
    }
}

/// The witness line format: signed literals in ascending variable order,
/// terminated by `0`.
impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in self.to_lits() {
            write!(f, "{l} ")?;
        }
        write!(f, "0")
    }
}
