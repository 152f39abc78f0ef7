//! Formula builders and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use unigen::formula::{CnfFormula, SamplingSet};

/// Incremental CNF builder with Tseitin gates.
#[derive(Debug, Clone, Default)]
pub struct Builder {
    pub num_vars: u32,
    pub clauses: Vec<Vec<i32>>,
}

impl Builder {
    pub fn with_inputs(n: u32) -> Builder {
        Builder {
            num_vars: n,
            clauses: Vec::new(),
        }
    }

    pub fn fresh(&mut self) -> i32 {
        self.num_vars += 1;
        self.num_vars as i32
    }

    pub fn clause(&mut self, lits: &[i32]) {
        self.clauses.push(lits.to_vec());
    }

    pub fn and(&mut self, a: i32, b: i32) -> i32 {
        let g = self.fresh();
        self.clause(&[-g, a]);
        self.clause(&[-g, b]);
        self.clause(&[g, -a, -b]);
        g
    }

    pub fn or(&mut self, a: i32, b: i32) -> i32 {
        let g = self.fresh();
        self.clause(&[g, -a]);
        self.clause(&[g, -b]);
        self.clause(&[-g, a, b]);
        g
    }

    pub fn xor(&mut self, a: i32, b: i32) -> i32 {
        let g = self.fresh();
        self.xor_constraint(&[g, a, b], false);
        g
    }

    /// `⊕ vars = parity` by direct expansion (variables, not literals).
    pub fn xor_constraint(&mut self, vars: &[i32], parity: bool) {
        let k = vars.len();
        for bits in 0u32..1 << k {
            if (bits.count_ones() % 2 == 1) != parity {
                let c: Vec<i32> = vars
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| if bits >> i & 1 == 1 { -v } else { v })
                    .collect();
                self.clause(&c);
            }
        }
    }

    pub fn build(&self) -> CnfFormula {
        CnfFormula::from_dimacs_clauses(self.num_vars, &self.clauses).unwrap()
    }
}

pub fn set(vars: &[u32], n: u32) -> SamplingSet {
    SamplingSet::from_indices(vars, n).unwrap()
}

pub fn range(k: u32) -> Vec<u32> {
    (1..=k).collect()
}

/// `k` sampling inputs of which `k - extra` are free; `extra` XOR/clause
/// constraints each halve the space. A layer of AND/OR/XOR gates depends on
/// the inputs, so the inputs are an independent support of the result.
/// Exactly `2^{k - extra}` projections on the inputs.
pub fn gated(k: u32, extra: u32, gates: u32) -> (CnfFormula, SamplingSet) {
    let mut b = Builder::with_inputs(k);
    for j in 0..extra {
        if j % 2 == 0 {
            let a = (3 * j) % k + 1;
            let c = (3 * j + 1) % k + 1;
            let d = (3 * j + 2) % k + 1;
            b.xor_constraint(&[a as i32, c as i32, d as i32], j % 4 == 0);
        } else {
            // x ≡ ¬y
            let x = (5 * j + 3) % k + 1;
            let y = (5 * j + 4) % k + 1;
            b.clause(&[x as i32, y as i32]);
            b.clause(&[-(x as i32), -(y as i32)]);
        }
    }
    let mut prev = 1i32;
    for g in 0..gates {
        let a = (g * 7 + 2) % k + 1;
        prev = match g % 3 {
            0 => b.and(prev, a as i32),
            1 => b.or(prev, -(a as i32)),
            _ => b.xor(prev, a as i32),
        };
    }
    (b.build(), set(&range(k), b.num_vars))
}

/// `k` free sampling inputs with `deps` XOR-defined dependents (affine in the
/// inputs), then pinned by `extra` XOR constraints over the inputs.
pub fn affine(k: u32, extra: u32, deps: u32) -> (CnfFormula, SamplingSet) {
    let mut b = Builder::with_inputs(k);
    for j in 0..extra {
        let vars: Vec<i32> = (0..3).map(|t| ((j * 3 + t) % k + 1) as i32).collect();
        b.xor_constraint(&vars, j % 2 == 0);
    }
    for d in 0..deps {
        let a = (d % k + 1) as i32;
        let c = ((d + 1 + d / k) % k + 1) as i32;
        if a != c {
            b.xor(a, c);
        } else {
            b.xor(a, (a % k as i32) + 1);
        }
    }
    (b.build(), set(&range(k), b.num_vars))
}

/// Every total assignment (as bit masks over `1..=n`) satisfying `clauses`.
pub fn brute_force(n: u32, clauses: &[Vec<i32>]) -> Vec<u32> {
    (0u32..1 << n)
        .filter(|&bits| {
            clauses.iter().all(|c| {
                c.iter().any(|&l| {
                    let v = (bits >> (l.unsigned_abs() - 1)) & 1 == 1;
                    v == (l > 0)
                })
            })
        })
        .collect()
}

/// `k` sampling inputs, `majorities` disjoint triples each forced to have
/// at least two true members (halving the space without being affine), and
/// `gates` dependent gate variables. Exactly `2^{k - majorities}` projections.
pub fn majority(k: u32, majorities: u32, gates: u32) -> (CnfFormula, SamplingSet) {
    assert!(3 * majorities <= k);
    let mut b = Builder::with_inputs(k);
    for t in 0..majorities as i32 {
        let (x, y, z) = (3 * t + 1, 3 * t + 2, 3 * t + 3);
        b.clause(&[x, y]);
        b.clause(&[x, z]);
        b.clause(&[y, z]);
    }
    let mut prev = k as i32;
    for g in 0..gates {
        let a = ((g * 7 + 2) % k + 1) as i32;
        prev = match g % 3 {
            0 => b.and(prev, a),
            1 => b.or(prev, -a),
            _ => b.xor(prev, a),
        };
    }
    (b.build(), set(&range(k), b.num_vars))
}

/// `k` sampling inputs restricted by `clauses` over them, plus `gates`
/// dependent gate variables.
pub fn constrained(k: u32, clauses: &[Vec<i32>], gates: u32) -> (CnfFormula, SamplingSet) {
    let mut b = Builder::with_inputs(k);
    for c in clauses {
        b.clause(c);
    }
    let mut prev = 1i32;
    for g in 0..gates {
        let a = ((g * 5 + 3) % k + 1) as i32;
        prev = match g % 3 {
            0 => b.or(prev, a),
            1 => b.xor(prev, -a),
            _ => b.and(-prev, a),
        };
    }
    (b.build(), set(&range(k), b.num_vars))
}
