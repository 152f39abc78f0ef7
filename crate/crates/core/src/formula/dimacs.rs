//! DIMACS CNF reading and writing.
//!
//! The sampling set travels in comment lines `c ind v1 v2 ... 0`, which may
//! be repeated; the set is the union of all such lines in order of first
//! appearance.

use std::fmt::Write as _;

use super::{Clause, CnfFormula, Lit, SamplingSet, Var};
use crate::{Error, Result};

/// Parsed contents of a DIMACS file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dimacs {
    pub formula: CnfFormula,
    pub sampling_set: Option<SamplingSet>,
}

struct Header {
    num_vars: u32,
    num_clauses: usize,
}

pub fn parse_dimacs(text: &str) -> Result<Dimacs> {
    let mut header: Option<Header> = None;
    let mut clauses: Vec<Clause> = Vec::new();
    let mut pending: Vec<Lit> = Vec::new();
    let mut pending_line = 0;
    let mut ind: Vec<(Var, usize)> = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('c') {
            let mut tokens = line.split_whitespace();
            if tokens.next() == Some("c") && tokens.next() == Some("ind") {
                parse_ind_line(tokens, line_no, &mut ind)?;
            }
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(Error::parse(line_no, "duplicate problem line"));
            }
            header = Some(parse_header(line, line_no)?);
            continue;
        }
        let Some(h) = &header else {
            return Err(Error::parse(line_no, "clause data before the problem line"));
        };
        for tok in line.split_whitespace() {
            let value: i32 = tok
                .parse()
                .map_err(|_| Error::parse(line_no, format!("invalid literal `{tok}`")))?;
            if value == 0 {
                if pending.is_empty() {
                    return Err(Error::parse(line_no, "empty clause"));
                }
                if clauses.len() == h.num_clauses {
                    return Err(Error::parse(
                        line_no,
                        format!("more than the declared {} clauses", h.num_clauses),
                    ));
                }
                let clause = Clause::new(pending.drain(..))
                    .map_err(|e| Error::parse(line_no, contract_message(e)))?;
                clauses.push(clause);
                continue;
            }
            if value.unsigned_abs() > h.num_vars {
                return Err(Error::parse(
                    line_no,
                    format!("literal {value} out of range for {} variables", h.num_vars),
                ));
            }
            if pending.is_empty() {
                pending_line = line_no;
            }
            pending.push(Lit::from_dimacs(value));
        }
    }

    let Some(h) = header else {
        return Err(Error::parse(
            last_line.max(1),
            "missing problem line `p cnf <vars> <clauses>`",
        ));
    };
    if !pending.is_empty() {
        return Err(Error::parse(pending_line, "clause not terminated by 0"));
    }
    if clauses.len() != h.num_clauses {
        return Err(Error::parse(
            last_line,
            format!(
                "problem line declares {} clauses but {} were found",
                h.num_clauses,
                clauses.len()
            ),
        ));
    }
    if let Some((v, line)) = ind.iter().find(|(v, _)| v.index() > h.num_vars) {
        return Err(Error::parse(
            *line,
            format!(
                "sampling variable {v} out of range for {} variables",
                h.num_vars
            ),
        ));
    }

    let sampling_set = if ind.is_empty() {
        None
    } else {
        let vars = ind.into_iter().map(|(v, _)| v).collect();
        Some(SamplingSet::new(vars, h.num_vars)?)
    };
    let formula = CnfFormula::new(h.num_vars, clauses)?;
    Ok(Dimacs {
        formula,
        sampling_set,
    })
}

fn contract_message(e: Error) -> String {
    match e {
        Error::Contract(m) => m,
        other => other.to_string(),
    }
}

fn parse_header(line: &str, line_no: usize) -> Result<Header> {
    let tokens: Vec<&str> = line.split_whitespace().collect();
    let bad = || Error::parse(line_no, format!("malformed problem line `{line}`"));
    if tokens.len() != 4 || tokens[0] != "p" || tokens[1] != "cnf" {
        return Err(bad());
    }
    let num_vars: u32 = tokens[2].parse().map_err(|_| bad())?;
    let num_clauses: usize = tokens[3].parse().map_err(|_| bad())?;
    if num_vars == 0 || num_vars > i32::MAX as u32 {
        return Err(bad());
    }
    Ok(Header {
        num_vars,
        num_clauses,
    })
}

fn parse_ind_line<'a>(
    tokens: impl Iterator<Item = &'a str>,
    line_no: usize,
    ind: &mut Vec<(Var, usize)>,
) -> Result<()> {
    let mut terminated = false;
    for tok in tokens {
        if terminated {
            return Err(Error::parse(
                line_no,
                "tokens after the terminating 0 of a `c ind` line",
            ));
        }
        let value: u32 = tok
            .parse()
            .map_err(|_| Error::parse(line_no, format!("invalid sampling variable `{tok}`")))?;
        if value == 0 {
            terminated = true;
            continue;
        }
        let v = Var::new(value);
        if ind.iter().any(|(w, _)| *w == v) {
            return Err(Error::parse(
                line_no,
                format!("duplicate sampling variable {v}"),
            ));
        }
        ind.push((v, line_no));
    }
    Ok(())
}

/// Writes `f` (and `s`, as `c ind` lines ahead of the problem line) in DIMACS.
pub fn emit_dimacs(f: &CnfFormula, s: Option<&SamplingSet>) -> String {
    let mut out = String::new();
    if let Some(s) = s {
        for chunk in s.vars().chunks(10) {
            out.push_str("c ind");
            for v in chunk {
                let _ = write!(out, " {v}");
            }
            out.push_str(" 0\n");
        }
    }
    let _ = writeln!(out, "p cnf {} {}", f.num_vars(), f.clauses().len());
    for c in f.clauses() {
        for l in c.lits() {
            let _ = write!(out, "{l} ");
        }
        out.push_str("0\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn line_of(e: Error) -> usize {
        match e {
            Error::Parse { line, .. } => line,
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn parses_plain_formula() {
        let d = parse_dimacs("p cnf 2 1\n1 2 0\n").unwrap();
        assert_eq!(d.formula.num_vars(), 2);
        assert_eq!(d.formula.clauses().len(), 1);
        assert_eq!(
            d.formula.clauses()[0].lits(),
            &[Lit::from_dimacs(1), Lit::from_dimacs(2)]
        );
        assert!(d.sampling_set.is_none());
    }

    #[test]
    fn parses_sampling_set() {
        let d = parse_dimacs("c ind 1 2 0\np cnf 3 2\n1 2 0\n-1 3 0\n").unwrap();
        assert_eq!(d.formula.num_vars(), 3);
        let s = d.sampling_set.unwrap();
        assert_eq!(s.vars(), &[Var::new(1), Var::new(2)]);
    }

    #[test]
    fn sampling_set_is_union_in_first_appearance_order() {
        let text = "c ind 3 0\nc some other comment\np cnf 4 1\nc ind 1\nc ind 4 0\n1 0\n";
        let s = parse_dimacs(text).unwrap().sampling_set.unwrap();
        assert_eq!(s.vars(), &[Var::new(3), Var::new(1), Var::new(4)]);
    }

    #[test]
    fn clauses_may_span_lines() {
        let d = parse_dimacs("p cnf 3 2\n1 2\n3 0 -1\n0\n").unwrap();
        assert_eq!(d.formula.clauses().len(), 2);
    }

    #[test]
    fn errors_name_the_line() {
        assert_eq!(line_of(parse_dimacs("p cnf x 1\n1 0\n").unwrap_err()), 1);
        assert_eq!(
            line_of(parse_dimacs("p cnf 2 1\n\n1 3 0\n").unwrap_err()),
            3
        );
        assert_eq!(line_of(parse_dimacs("p cnf 2 2\n1 0\n").unwrap_err()), 2);
        assert_eq!(
            line_of(parse_dimacs("p cnf 2 1\n1 0\n2 0\n").unwrap_err()),
            3
        );
        assert_eq!(
            line_of(parse_dimacs("c ind 1 0\nc ind 2 1 0\np cnf 2 0\n").unwrap_err()),
            2
        );
        assert_eq!(
            line_of(parse_dimacs("c ind 5 0\np cnf 2 0\n").unwrap_err()),
            1
        );
        assert_eq!(line_of(parse_dimacs("p cnf 2 1\n1 -1 0\n").unwrap_err()), 2);
        assert_eq!(line_of(parse_dimacs("1 2 0\np cnf 2 1\n").unwrap_err()), 1);
        assert_eq!(line_of(parse_dimacs("p cnf 2 1\n1 2\n").unwrap_err()), 2);
        assert!(parse_dimacs("c only a comment\n").is_err());
    }

    #[test]
    fn emit_without_sampling_set_has_no_ind_lines() {
        let d = parse_dimacs("p cnf 2 1\n2 1 0\n").unwrap();
        let text = emit_dimacs(&d.formula, None);
        assert_eq!(text, "p cnf 2 1\n1 2 0\n");
    }

    #[test]
    fn emit_puts_ind_lines_first() {
        let d = parse_dimacs("p cnf 3 1\nc ind 2 0\n-3 1 0\n").unwrap();
        let text = emit_dimacs(&d.formula, d.sampling_set.as_ref());
        assert_eq!(text, "c ind 2 0\np cnf 3 1\n1 -3 0\n");
        assert_eq!(parse_dimacs(&text).unwrap(), d);
    }

    fn arb_dimacs() -> impl Strategy<Value = (CnfFormula, Option<SamplingSet>)> {
        (1u32..=30).prop_flat_map(|n| {
            let lit = (1..=n as i32, any::<bool>()).prop_map(|(v, neg)| if neg { -v } else { v });
            let clause = prop::collection::vec(lit, 1..6);
            let clauses = prop::collection::vec(clause, 0..25);
            let ind = prop::option::of(
                prop::sample::subsequence((1..=n).collect::<Vec<u32>>(), 1..=n as usize)
                    .prop_shuffle(),
            );
            (clauses, ind).prop_map(move |(clauses, ind)| {
                let clauses: Vec<Clause> = clauses
                    .into_iter()
                    .filter_map(|c| Clause::new(c.into_iter().map(Lit::from_dimacs)).ok())
                    .collect();
                let f = CnfFormula::new(n, clauses).unwrap();
                let s = ind.map(|v| SamplingSet::from_indices(&v, n).unwrap());
                (f, s)
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]
        #[test]
        fn emit_parse_round_trip((f, s) in arb_dimacs()) {
            let text = emit_dimacs(&f, s.as_ref());
            let d = parse_dimacs(&text).unwrap();
            prop_assert_eq!(&d.formula, &f);
            prop_assert_eq!(&d.sampling_set, &s);
            prop_assert_eq!(emit_dimacs(&d.formula, d.sampling_set.as_ref()), text);
        }
    }
}
