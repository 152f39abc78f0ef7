//! XOR constraints on a plain CNF solver.
//!
//! A batch of constraints is first brought to reduced row echelon form over
//! GF(2), which exposes inconsistent systems immediately and leaves each
//! pivot variable in exactly one row. Rows of width at most `max_width` are
//! then expanded directly into the `2^{w-1}` clauses forbidding the wrong
//! parity; wider rows are cut into pieces chained through fresh auxiliary
//! variables.

use super::solver::{SLit, Solver};
use crate::formula::Var;
use crate::hashing::XorConstraint;

/// Gauss-Jordan elimination. Returns `None` if the system has no solution;
/// otherwise an equivalent system with no empty rows.
pub(crate) fn reduce(xors: &[XorConstraint]) -> Option<Vec<XorConstraint>> {
    let mut cols: Vec<Var> = xors.iter().flat_map(|x| x.vars().iter().copied()).collect();
    cols.sort();
    cols.dedup();
    let words = cols.len().div_ceil(64).max(1);
    let mut rows: Vec<(Vec<u64>, bool)> = xors
        .iter()
        .map(|x| {
            let mut bits = vec![0u64; words];
            for v in x.vars() {
                let c = cols.binary_search(v).unwrap();
                bits[c / 64] ^= 1 << (c % 64);
            }
            (bits, x.parity())
        })
        .collect();

    let mut rank = 0;
    for c in 0..cols.len() {
        let (w, mask) = (c / 64, 1u64 << (c % 64));
        let Some(p) = (rank..rows.len()).find(|&r| rows[r].0[w] & mask != 0) else {
            continue;
        };
        rows.swap(rank, p);
        let (pivot_bits, pivot_parity) = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row.0[w] & mask != 0 {
                for (a, b) in row.0.iter_mut().zip(&pivot_bits) {
                    *a ^= b;
                }
                row.1 ^= pivot_parity;
            }
        }
        rank += 1;
    }
    if rows[rank..].iter().any(|(_, parity)| *parity) {
        return None;
    }
    Some(
        rows[..rank]
            .iter()
            .map(|(bits, parity)| {
                let vars = (0..cols.len())
                    .filter(|&c| bits[c / 64] >> (c % 64) & 1 == 1)
                    .map(|c| cols[c]);
                XorConstraint::new(vars, *parity)
            })
            .collect(),
    )
}

/// Adds clauses for `⊕ lits = parity` on solver variables, allocating
/// auxiliary variables for rows wider than `max_width`.
pub(crate) fn encode(solver: &mut Solver, vars: &[usize], parity: bool, max_width: usize) {
    let max_width = max_width.max(3);
    if vars.is_empty() {
        if parity {
            solver.set_unsat();
        }
        return;
    }
    let mut rest: &[usize] = vars;
    let mut carry: Option<usize> = None;
    loop {
        let room = max_width - usize::from(carry.is_some());
        if rest.len() <= room {
            let mut piece: Vec<usize> = carry.into_iter().collect();
            piece.extend_from_slice(rest);
            expand(solver, &piece, parity);
            return;
        }
        // piece ⊕ aux = 0, so aux carries the parity of the piece.
        let take = room - 1;
        let aux = solver.new_var();
        let mut piece: Vec<usize> = carry.into_iter().collect();
        piece.extend_from_slice(&rest[..take]);
        piece.push(aux);
        expand(solver, &piece, false);
        carry = Some(aux);
        rest = &rest[take..];
    }
}

/// Direct expansion: one clause per assignment of odd distance from `parity`.
fn expand(solver: &mut Solver, vars: &[usize], parity: bool) {
    let k = vars.len();
    for bits in 0u32..1 << k {
        if (bits.count_ones() % 2 == 1) == parity {
            continue;
        }
        let clause: Vec<SLit> = vars
            .iter()
            .enumerate()
            .map(|(i, &v)| SLit::new(v, (bits >> i) & 1 == 1))
            .collect();
        solver.add_clause(&clause);
    }
}
