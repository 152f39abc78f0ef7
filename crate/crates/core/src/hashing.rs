//! The affine XOR hash family `H_xor(n, m, 3)`.
//!
//! A member maps `y ∈ {0,1}^n` to `{0,1}^m` with
//! `h(y)[i] = a_{i,0} ⊕ ⊕_k a_{i,k}·y[k]`. Drawing every coefficient
//! independently and uniformly yields a 3-wise independent family.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::formula::{Assignment, SamplingSet, Var};
use crate::{Error, Result};

/// Fixed-width bit vector packed into words.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Bits {
    words: Vec<u64>,
    len: usize,
}

impl Bits {
    fn zeros(len: usize) -> Bits {
        Bits {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    fn get(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    fn set(&mut self, i: usize, b: bool) {
        let mask = 1u64 << (i % 64);
        if b {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(|&i| self.get(i))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct HashRow {
    constant: bool,
    coeffs: Bits,
}

/// One member of `H_xor(n, m, 3)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HashFunction {
    n: usize,
    rows: Vec<HashRow>,
}

/// Draws a uniformly random member of `H_xor(n, m, 3)`.
///
/// Bits are consumed row by row, constant first: `a_{1,0}, a_{1,1}, ..,
/// a_{1,n}, a_{2,0}, ..`, one `bool` draw each, so a seeded generator always
/// yields the same function.
pub fn sample_hash<R: Rng + ?Sized>(rng: &mut R, n: usize, m: usize) -> Result<HashFunction> {
    if n == 0 || m == 0 {
        return Err(Error::contract(format!(
            "hash dimensions must be positive (n = {n}, m = {m})"
        )));
    }
    let rows = (0..m)
        .map(|_| {
            let constant = rng.random::<bool>();
            let mut coeffs = Bits::zeros(n);
            for k in 0..n {
                coeffs.set(k, rng.random::<bool>());
            }
            HashRow { constant, coeffs }
        })
        .collect();
    Ok(HashFunction { n, rows })
}

impl HashFunction {
    /// Builds a function from explicit rows `(a_{i,0}, [a_{i,1}, .., a_{i,n}])`.
    pub fn from_rows(n: usize, rows: &[(bool, Vec<bool>)]) -> Result<HashFunction> {
        if n == 0 || rows.is_empty() {
            return Err(Error::contract("hash dimensions must be positive"));
        }
        let rows = rows
            .iter()
            .map(|(constant, coeffs)| {
                if coeffs.len() != n {
                    return Err(Error::contract(format!(
                        "hash row has {} coefficients, expected {n}",
                        coeffs.len()
                    )));
                }
                let mut bits = Bits::zeros(n);
                for (k, &b) in coeffs.iter().enumerate() {
                    bits.set(k, b);
                }
                Ok(HashRow {
                    constant: *constant,
                    coeffs: bits,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(HashFunction { n, rows })
    }

    /// Input width.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Output width.
    pub fn m(&self) -> usize {
        self.rows.len()
    }

    pub fn constant(&self, row: usize) -> bool {
        self.rows[row].constant
    }

    /// `a_{row, k+1}` (coefficient of the `k`-th input, 0-based).
    pub fn coeff(&self, row: usize, k: usize) -> bool {
        self.rows[row].coeffs.get(k)
    }

    /// Number of nonzero coefficients in `row`, excluding the constant.
    pub fn row_weight(&self, row: usize) -> usize {
        self.rows[row].coeffs.count_ones()
    }

    /// Applies the function to the values of `y`, taken positionally.
    pub fn apply(&self, y: &Assignment) -> Result<CellId> {
        self.apply_bits(y.values())
    }

    pub fn apply_bits(&self, y: &[bool]) -> Result<CellId> {
        if y.len() != self.n {
            return Err(Error::contract(format!(
                "hash over {} inputs applied to {} values",
                self.n,
                y.len()
            )));
        }
        let bits = self
            .rows
            .iter()
            .map(|row| row.coeffs.ones().fold(row.constant, |acc, k| acc ^ y[k]))
            .collect();
        Ok(CellId { bits })
    }

    /// The constraint form of `h(x_S) = alpha`: row `i` becomes
    /// `⊕{s[k] : a_{i,k} = 1} = alpha[i] ⊕ a_{i,0}`. Every row yields one
    /// constraint, including rows with no coefficients.
    pub fn to_constraints(&self, alpha: &CellId, s: &SamplingSet) -> Result<Vec<XorConstraint>> {
        if s.len() != self.n {
            return Err(Error::contract(format!(
                "hash over {} inputs paired with {} sampling variables",
                self.n,
                s.len()
            )));
        }
        if alpha.len() != self.m() {
            return Err(Error::contract(format!(
                "cell id of width {} paired with a hash of width {}",
                alpha.len(),
                self.m()
            )));
        }
        Ok(self
            .rows
            .iter()
            .zip(alpha.bits())
            .map(|(row, &target)| {
                let mut vars: Vec<Var> = row.coeffs.ones().map(|k| s.vars()[k]).collect();
                vars.sort();
                XorConstraint {
                    vars,
                    parity: target ^ row.constant,
                }
            })
            .collect())
    }
}

/// A target vector `alpha ∈ {0,1}^m`, naming one hash cell.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellId {
    bits: Vec<bool>,
}

impl CellId {
    pub fn new(bits: Vec<bool>) -> CellId {
        CellId { bits }
    }

    pub fn zeros(m: usize) -> CellId {
        CellId {
            bits: vec![false; m],
        }
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, m: usize) -> CellId {
        CellId {
            bits: (0..m).map(|_| rng.random::<bool>()).collect(),
        }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

/// `⊕ vars = parity`. An empty variable set reads `0 = parity`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct XorConstraint {
    vars: Vec<Var>,
    parity: bool,
}

impl XorConstraint {
    /// Repeated variables cancel in pairs.
    pub fn new(vars: impl IntoIterator<Item = Var>, parity: bool) -> XorConstraint {
        let mut vars: Vec<Var> = vars.into_iter().collect();
        vars.sort();
        let mut reduced: Vec<Var> = Vec::with_capacity(vars.len());
        for v in vars {
            if reduced.last() == Some(&v) {
                reduced.pop();
            } else {
                reduced.push(v);
            }
        }
        XorConstraint {
            vars: reduced,
            parity,
        }
    }

    /// Sorted, distinct variables.
    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn parity(&self) -> bool {
        self.parity
    }

    /// `None` if `a` does not assign every variable of the constraint.
    pub fn is_satisfied_by(&self, a: &Assignment) -> Option<bool> {
        let mut acc = false;
        for &v in &self.vars {
            acc ^= a.value(v)?;
        }
        Some(acc == self.parity)
    }
}

/// Extended-DIMACS `x` line. Parity 1 prints all literals positive; parity 0
/// negates the first literal. Constraints without variables print as `x 0`
/// when unsatisfiable (`0 = 1`) and as the comment `c x 0` when trivially
/// true.
impl fmt::Display for XorConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.vars.is_empty() {
            return if self.parity {
                write!(f, "x 0")
            } else {
                write!(f, "c x 0")
            };
        }
        write!(f, "x")?;
        for (i, v) in self.vars.iter().enumerate() {
            if i == 0 && !self.parity {
                write!(f, " -{v}")?;
            } else {
                write!(f, " {v}")?;
            }
        }
        write!(f, " 0")
    }
}

impl FromStr for XorConstraint {
    type Err = Error;

    /// Accepts `x` lines as written by `Display`, and more generally any
    /// signed literals: each negation flips the parity.
    fn from_str(s: &str) -> Result<XorConstraint> {
        let line = s.trim();
        if line == "c x 0" {
            return Ok(XorConstraint::new([], false));
        }
        let body = line
            .strip_prefix('x')
            .ok_or_else(|| Error::parse(1, "xor line must start with `x`"))?;
        let mut parity = true;
        let mut vars = Vec::new();
        let mut terminated = false;
        for tok in body.split_whitespace() {
            let l: i32 = tok
                .parse()
                .map_err(|_| Error::parse(1, format!("invalid literal `{tok}`")))?;
            if terminated {
                return Err(Error::parse(1, "tokens after terminating 0"));
            }
            if l == 0 {
                terminated = true;
                continue;
            }
            if l < 0 {
                parity = !parity;
            }
            vars.push(Var::new(l.unsigned_abs()));
        }
        if !terminated {
            return Err(Error::parse(1, "xor line not terminated by 0"));
        }
        Ok(XorConstraint::new(vars, parity))
    }
}
