//! Satisfiability of CNF plus XOR constraints, and bounded enumeration of
//! witnesses that are distinct on a blocking set (BSAT).
//!
//! An [`Engine`] compiles a formula once. Each enumeration works on a private
//! copy of the compiled solver, so blocking clauses and hash constraints from
//! one call never leak into the next, and several sessions can run at once
//! over the same engine.

mod solver;
mod xor;

use std::sync::Arc;
use std::time::{Duration, Instant};

use log::trace;

use crate::formula::{Assignment, CnfFormula, SamplingSet, Var};
use crate::hashing::XorConstraint;
use crate::{Error, Result};

use solver::{SLit, Solver, Status};

/// Per-call BSAT budget used when nothing else is configured.
pub const DEFAULT_BSAT_BUDGET: Duration = Duration::from_secs(2500);

/// Widest XOR row expanded directly into clauses.
pub const DEFAULT_XOR_WIDTH: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineConfig {
    /// Rows wider than this are split with auxiliary chaining variables.
    pub xor_width: usize,
    /// Run Gauss-Jordan elimination over each batch of XOR constraints before
    /// encoding them.
    pub gauss_jordan: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            xor_width: DEFAULT_XOR_WIDTH,
            gauss_jordan: true,
        }
    }
}

/// A formula compiled for repeated solving.
#[derive(Debug, Clone)]
pub struct Engine {
    formula: Arc<CnfFormula>,
    support: Arc<[Var]>,
    base: Solver,
    config: EngineConfig,
}

impl Engine {
    pub fn new(formula: Arc<CnfFormula>) -> Engine {
        Engine::with_config(formula, None, EngineConfig::default())
    }

    /// `priority` variables are branched on first, which lets the rest of an
    /// independent support's dependents follow by propagation.
    pub fn with_config(
        formula: Arc<CnfFormula>,
        priority: Option<&SamplingSet>,
        config: EngineConfig,
    ) -> Engine {
        let mut base = Solver::new(formula.num_vars() as usize);
        for c in formula.clauses() {
            let lits: Vec<SLit> = c.lits().iter().map(|&l| to_slit(l)).collect();
            base.add_clause(&lits);
        }
        if let Some(p) = priority {
            for v in p.vars() {
                base.boost(v.zero_based(), 1.0);
            }
        }
        let support: Arc<[Var]> = formula.vars().collect();
        Engine {
            formula,
            support,
            base,
            config,
        }
    }

    pub fn formula(&self) -> &CnfFormula {
        &self.formula
    }

    pub fn shared_formula(&self) -> &Arc<CnfFormula> {
        &self.formula
    }

    /// Opens a session over `formula ∧ xors`, blocking on `blocking`. The
    /// budget covers the whole lifetime of the session.
    pub fn session(
        &self,
        xors: &[XorConstraint],
        blocking: &SamplingSet,
        budget: Option<Duration>,
    ) -> Result<SolverSession> {
        let n = self.formula.num_vars();
        if let Some(v) = blocking.vars().iter().find(|v| v.index() > n) {
            return Err(Error::contract(format!(
                "blocking variable {v} out of range"
            )));
        }
        for c in xors {
            if let Some(v) = c.vars().iter().find(|&&v| !blocking.contains(v)) {
                return Err(Error::contract(format!(
                    "xor constraint mentions {v}, which is outside the blocking set"
                )));
            }
        }
        let mut solver = self.base.clone();
        let rows = if self.config.gauss_jordan {
            xor::reduce(xors)
        } else {
            Some(xors.to_vec())
        };
        match rows {
            None => solver.set_unsat(),
            Some(rows) => {
                for r in &rows {
                    let vars: Vec<usize> = r.vars().iter().map(|v| v.zero_based()).collect();
                    xor::encode(&mut solver, &vars, r.parity(), self.config.xor_width);
                }
            }
        }
        solver.reserve(64, 64 * blocking.len());
        trace!(
            "session: {} xor rows, {} aux vars",
            xors.len(),
            solver.num_vars() - n as usize
        );
        Ok(SolverSession {
            solver,
            xors: xors.to_vec(),
            blocking: blocking.clone(),
            blocking_clauses: Vec::new(),
            deadline: budget.map(|b| Instant::now() + b),
            support: self.support.clone(),
            scratch: Vec::new(),
        })
    }

    /// Bounded enumeration: up to `bound` witnesses of `formula ∧ xors`,
    /// pairwise distinct on `s`.
    pub fn bsat(
        &self,
        xors: &[XorConstraint],
        s: &SamplingSet,
        bound: usize,
        budget: Option<Duration>,
    ) -> Result<WitnessList> {
        if bound == 0 {
            return Err(Error::contract("BSAT bound must be at least 1"));
        }
        let mut session = self.session(xors, s, budget)?;
        let mut out = WitnessList {
            witnesses: Vec::new(),
            exhausted: false,
            timed_out: false,
        };
        while out.witnesses.len() < bound {
            match session.solve_one() {
                Ok(Some(w)) => {
                    session.block(&w)?;
                    out.witnesses.push(w);
                }
                Ok(None) => {
                    out.exhausted = true;
                    break;
                }
                Err(Error::Timeout) => {
                    out.timed_out = true;
                    break;
                }
                Err(e) => return Err(e),
            }
        }

        trace!(
            "bsat: {} witnesses, retracting {} blocking clauses",
            out.witnesses.len(),
            session.blocking_clauses.len()
        );
        Ok(out)
    }

    /// Every witness, one per distinct projection on `s`, found by splitting
    /// on the variables of `s` under assumptions. Fails with
    /// [`Error::Timeout`] if the budget runs out.
    pub fn enumerate_all(
        &self,
        s: &SamplingSet,
        budget: Option<Duration>,
    ) -> Result<Vec<Assignment>> {
        let mut solver = self.base.clone();
        let deadline = budget.map(|b| Instant::now() + b);
        let vars: Vec<usize> = s.vars().iter().map(|v| v.zero_based()).collect();
        let mut out = Vec::new();
        let mut prefix = Vec::with_capacity(vars.len());
        let n = self.formula.num_vars() as usize;
        match solver.solve(&[], deadline) {
            Status::Unsat => return Ok(out),
            Status::Timeout => return Err(Error::Timeout),
            Status::Sat => {}
        }
        let model = solver.model()[..n].to_vec();
        split(&mut solver, &vars, &mut prefix, model, deadline, &mut |m| {
            out.push(Assignment::from_parts(self.support.clone(), m));
        })?;
        Ok(out)
    }
}

/// Depth-first split on `vars`; `model` is a known solution extending
/// `prefix`, so the branch agreeing with it needs no solver call.
fn split(
    solver: &mut Solver,
    vars: &[usize],
    prefix: &mut Vec<SLit>,
    model: Vec<bool>,
    deadline: Option<Instant>,
    emit: &mut dyn FnMut(Vec<bool>),
) -> Result<()> {
    let depth = prefix.len();
    if depth == vars.len() {
        emit(model);
        return Ok(());
    }
    let v = vars[depth];
    let seen = model[v];
    let n = model.len();
    prefix.push(SLit::new(v, !seen));
    split(solver, vars, prefix, model, deadline, emit)?;
    prefix.pop();

    prefix.push(SLit::new(v, seen));
    let result = match solver.solve(prefix, deadline) {
        Status::Sat => {
            let other = solver.model()[..n].to_vec();
            split(solver, vars, prefix, other, deadline, emit)
        }
        Status::Unsat => Ok(()),
        Status::Timeout => Err(Error::Timeout),
    };
    prefix.pop();
    result
}

fn to_slit(l: crate::formula::Lit) -> SLit {
    SLit::new(l.var().zero_based(), l.is_negated())
}

/// `formula ∧ xors ∧ blocking clauses`, solved incrementally.
#[derive(Debug)]
pub struct SolverSession {
    solver: Solver,
    xors: Vec<XorConstraint>,
    blocking: SamplingSet,
    blocking_clauses: Vec<Vec<crate::formula::Lit>>,
    deadline: Option<Instant>,
    support: Arc<[Var]>,
    scratch: Vec<SLit>,
}

impl SolverSession {
    /// One more solution, `None` if none is left, [`Error::Timeout`] if the
    /// session budget ran out first.
    pub fn solve_one(&mut self) -> Result<Option<Assignment>> {
        match self.solver.solve(&[], self.deadline) {
            Status::Sat => {
                let n = self.support.len();
                let values = self.solver.model()[..n].to_vec();
                Ok(Some(Assignment::from_parts(self.support.clone(), values)))
            }
            Status::Unsat => Ok(None),
            Status::Timeout => Err(Error::Timeout),
        }
    }

    /// Excludes every future solution agreeing with `w` on the blocking set.
    pub fn block(&mut self, w: &Assignment) -> Result<()> {
        let mut lits = Vec::with_capacity(self.blocking.len());
        self.scratch.clear();
        for &v in self.blocking.vars() {
            let b = w
                .value(v)
                .ok_or_else(|| Error::contract(format!("witness does not assign {v}")))?;
            let l = crate::formula::Lit::new(v, b);
            lits.push(l);
            self.scratch.push(to_slit(l));
        }
        self.solver.add_blocking_clause(&self.scratch);
        trace!("session: +blocking clause over {} vars", lits.len());
        self.blocking_clauses.push(lits);
        Ok(())
    }

    pub fn xors(&self) -> &[XorConstraint] {
        &self.xors
    }

    pub fn blocking_set(&self) -> &SamplingSet {
        &self.blocking
    }

    /// Blocking clauses added so far, as DIMACS literals over the blocking set.
    pub fn blocking_clauses(&self) -> &[Vec<crate::formula::Lit>] {
        &self.blocking_clauses
    }
}

/// Result of a bounded enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessList {
    /// Full witnesses over the formula's variables, distinct on the blocking set.
    pub witnesses: Vec<Assignment>,
    /// The enumeration proved that no further witness exists.
    pub exhausted: bool,
    /// The budget ran out before the enumeration finished.
    pub timed_out: bool,
}

impl WitnessList {
    pub fn len(&self) -> usize {
        self.witnesses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.witnesses.is_empty()
    }
}

/// One-shot BSAT without keeping a compiled engine around.
pub fn bsat(
    f: &CnfFormula,
    xors: &[XorConstraint],
    s: &SamplingSet,
    bound: usize,
    budget: Option<Duration>,
) -> Result<WitnessList> {
    Engine::with_config(Arc::new(f.clone()), Some(s), EngineConfig::default())
        .bsat(xors, s, bound, budget)
}

/// Single satisfiability query over `f ∧ xors` (no blocking).
pub fn solve_one(
    f: &CnfFormula,
    xors: &[XorConstraint],
    budget: Option<Duration>,
) -> Result<Option<Assignment>> {
    let engine = Engine::new(Arc::new(f.clone()));
    engine.session(xors, &f.support(), budget)?.solve_one()
}
