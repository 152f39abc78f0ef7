//! Text persistence of a presample state.
//!
//! ```text
//! unigen-presample 1
//! formula-sha256 <hex of the canonical DIMACS text>
//! sampling-set 1 2 3
//! epsilon 6
//! mode hash
//! q 6
//! count 9 7 0.8 0.8
//! ```
//!
//! or, on the easy path, `mode easy` followed by `witnesses <k>` and `k`
//! lines `w <signed literals> 0`. The compiled engine is not stored; loading
//! recompiles it from the formula the caller supplies.

use std::fmt::Write as _;
use std::sync::Arc;

use sha2::{Digest, Sha256};

use super::{KappaPivot, Mode, PresampleState, SamplerConfig};
use crate::counting::CountEstimate;
use crate::engine::Engine;
use crate::formula::{emit_dimacs, Assignment, CnfFormula, SamplingSet};
use crate::{Error, Result};

pub const STATE_VERSION: u32 = 1;

const MAGIC: &str = "unigen-presample";

fn formula_digest(f: &CnfFormula) -> String {
    let digest = Sha256::digest(emit_dimacs(f, None).as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

impl PresampleState {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{MAGIC} {STATE_VERSION}").unwrap();
        writeln!(out, "formula-sha256 {}", formula_digest(self.formula())).unwrap();
        let vars: Vec<String> = self
            .sampling_set
            .vars()
            .iter()
            .map(|v| v.index().to_string())
            .collect();
        writeln!(out, "sampling-set {}", vars.join(" ")).unwrap();
        writeln!(out, "epsilon {}", self.params.epsilon).unwrap();
        match &self.mode {
            Mode::Easy(list) => {
                writeln!(out, "mode easy").unwrap();
                writeln!(out, "witnesses {}", list.len()).unwrap();
                for w in list {
                    writeln!(out, "w {w}").unwrap();
                }
            }
            Mode::Hash { q } => {
                writeln!(out, "mode hash").unwrap();
                writeln!(out, "q {q}").unwrap();
                if let Some(c) = &self.count {
                    writeln!(
                        out,
                        "count {} {} {} {}",
                        c.cells(),
                        c.exponent(),
                        c.tolerance(),
                        c.confidence()
                    )
                    .unwrap();
                }
            }
        }
        out
    }

    /// Restores a state written by [`PresampleState::to_text`] for the same
    /// formula and sampling set.
    pub fn from_text(
        text: &str,
        formula: Arc<CnfFormula>,
        s: &SamplingSet,
        config: SamplerConfig,
    ) -> Result<PresampleState> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let mut next = |key: &str| -> Result<String> {
            let line = lines
                .next()
                .ok_or_else(|| Error::State(format!("missing `{key}` line")))?;
            let rest = line
                .strip_prefix(key)
                .filter(|r| r.is_empty() || r.starts_with(' '))
                .ok_or_else(|| Error::State(format!("expected `{key}`, found `{line}`")))?;
            Ok(rest.trim().to_string())
        };

        let version = next(MAGIC)?;
        if version != STATE_VERSION.to_string() {
            return Err(Error::State(format!("unsupported state version {version}")));
        }
        if next("formula-sha256")? != formula_digest(&formula) {
            return Err(Error::State(
                "state was computed for a different formula".into(),
            ));
        }
        let vars = parse_list::<u32>(&next("sampling-set")?)?;
        let stored: Vec<u32> = s.vars().iter().map(|v| v.index()).collect();
        if vars != stored {
            return Err(Error::State(
                "state was computed for a different sampling set".into(),
            ));
        }
        let epsilon: f64 = parse_one(&next("epsilon")?)?;
        let params = KappaPivot::new(epsilon)?;

        let (mode, count) = match next("mode")?.as_str() {
            "easy" => {
                let k: usize = parse_one(&next("witnesses")?)?;
                let mut list = Vec::with_capacity(k);
                for _ in 0..k {
                    let lits = parse_list::<i32>(&next("w")?)?;
                    match lits.split_last() {
                        Some((0, body)) => list.push(Assignment::from_dimacs(body)?),
                        _ => return Err(Error::State("witness line must end in 0".into())),
                    }
                }
                (Mode::Easy(list), None)
            }
            "hash" => {
                let q: i64 = parse_one(&next("q")?)?;
                let count = match next("count") {
                    Ok(rest) => {
                        let f = parse_list::<f64>(&rest)?;
                        if f.len() != 4 {
                            return Err(Error::State("count needs four fields".into()));
                        }
                        let cells: u64 = parse_one(rest.split(' ').next().unwrap())?;
                        Some(CountEstimate::from_cell(cells, f[1] as u32, f[2], f[3]))
                    }
                    Err(_) => None,
                };
                (Mode::Hash { q }, count)
            }
            other => return Err(Error::State(format!("unknown mode `{other}`"))),
        };

        Ok(PresampleState {
            engine: Engine::with_config(formula, Some(s), config.engine),
            sampling_set: s.clone(),
            params,
            mode,
            count,
            config,
        })
    }
}

fn parse_one<T: std::str::FromStr>(s: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::State(format!("malformed value `{s}`")))
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>> {
    s.split_whitespace().map(parse_one).collect()
}
