//! Almost-uniform witness generation.
//!
//! [`presample`] runs once per formula: either the whole solution space fits
//! under `hiThresh` (the easy path, where later draws pick from the stored
//! list), or an approximate count fixes the hash width `q`. Each [`draw`] then
//! tries widths `q-3..=q`, enumerating one random cell per width until a cell
//! lands in `[loThresh, hiThresh]`, and returns a uniform member of it.

mod params;
mod state;

use std::sync::Arc;
use std::time::Duration;

use log::debug;
use rand::Rng;

use crate::counting::{ApproxCounter, CountEstimate, ModelCounter};
use crate::engine::{Engine, EngineConfig, DEFAULT_BSAT_BUDGET};
use crate::exec::Execution;
use crate::formula::{Assignment, CnfFormula, SamplingSet};
use crate::hashing::{sample_hash, CellId};
use crate::rng::SeedStreams;
use crate::{Error, Result};

pub use params::{epsilon_of, KappaPivot, MIN_EPSILON};
pub use state::STATE_VERSION;

/// Tolerance passed to the model counter during presampling.
pub const COUNTER_TOLERANCE: f64 = 0.8;
/// Confidence passed to the model counter during presampling.
pub const COUNTER_CONFIDENCE: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerConfig {
    /// Budget for each BSAT call (`None`: unlimited).
    pub bsat_budget: Option<Duration>,
    /// Extra attempts at the same width after a BSAT timeout.
    pub timeout_retries: u32,
    pub engine: EngineConfig,
    /// Execution of the counter's trials.
    pub exec: Execution,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            bsat_budget: Some(DEFAULT_BSAT_BUDGET),
            timeout_retries: 3,
            engine: EngineConfig::default(),
            exec: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Mode {
    /// The full solution space, one witness per projection on `S`.
    Easy(Vec<Assignment>),
    /// Hash width anchor.
    Hash { q: i64 },
}

/// Everything a draw needs; computed once per (formula, ε, S).
#[derive(Debug, Clone)]
pub struct PresampleState {
    engine: Engine,
    sampling_set: SamplingSet,
    params: KappaPivot,
    mode: Mode,
    count: Option<CountEstimate>,
    config: SamplerConfig,
}

impl PresampleState {
    pub fn formula(&self) -> &CnfFormula {
        self.engine.formula()
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    pub fn sampling_set(&self) -> &SamplingSet {
        &self.sampling_set
    }

    pub fn params(&self) -> &KappaPivot {
        &self.params
    }

    pub fn epsilon(&self) -> f64 {
        self.params.epsilon
    }

    pub fn mode(&self) -> &Mode {
        &self.mode
    }

    /// The counter's estimate, on the hash path.
    pub fn count(&self) -> Option<&CountEstimate> {
        self.count.as_ref()
    }

    pub fn q(&self) -> Option<i64> {
        match self.mode {
            Mode::Hash { q } => Some(q),
            Mode::Easy(_) => None,
        }
    }

    pub fn config(&self) -> &SamplerConfig {
        &self.config
    }

    pub fn set_config(&mut self, config: SamplerConfig) {
        self.config = config;
    }
}

/// Why a draw produced no witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Failure {
    /// The formula has no solutions.
    Unsatisfiable,
    /// No width in `q-3..=q` produced a cell inside the window.
    NoCellInWindow,
    /// BSAT kept running out of budget at one width.
    Timeout,
}

/// One attempt and its diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct DrawOutcome {
    pub witness: Result<Assignment, Failure>,
    /// Hash widths tried, in order (empty on the easy path).
    pub tried_widths: Vec<i64>,
    /// Size of the last enumerated cell, if one was enumerated.
    pub cell_size: Option<usize>,
}

impl DrawOutcome {
    pub fn is_success(&self) -> bool {
        self.witness.is_ok()
    }

    pub fn witness(&self) -> Option<&Assignment> {
        self.witness.as_ref().ok()
    }
}

/// `q = ⌈log₂C + log₂1.8 - log₂pivot⌉`.
pub fn hash_width(count: &CountEstimate, pivot: u64) -> i64 {
    (count.log2() + 1.8f64.log2() - (pivot as f64).log2()).ceil() as i64
}

pub fn presample<R: Rng + ?Sized>(
    f: &CnfFormula,
    epsilon: f64,
    s: &SamplingSet,
    rng: &mut R,
) -> Result<PresampleState> {
    presample_with(
        Arc::new(f.clone()),
        epsilon,
        s,
        rng,
        SamplerConfig::default(),
        &ApproxCounter::default(),
    )
}

/// [`presample`] with explicit configuration and model counter.
pub fn presample_with<R: Rng + ?Sized>(
    f: Arc<CnfFormula>,
    epsilon: f64,
    s: &SamplingSet,
    rng: &mut R,
    config: SamplerConfig,
    counter: &dyn ModelCounter,
) -> Result<PresampleState> {
    let params = KappaPivot::new(epsilon)?;
    check_sampling_set(&f, s)?;
    let engine = Engine::with_config(f, Some(s), config.engine);
    let all = engine.bsat(&[], s, params.bsat_bound(), config.bsat_budget)?;
    if all.timed_out {
        return Err(Error::Timeout);
    }
    let (mode, count) = if all.exhausted && all.len() as f64 <= params.hi_thresh {
        debug!("presample: easy path with {} witnesses", all.len());
        (Mode::Easy(all.witnesses), None)
    } else {
        let c = counter.count(
            &engine,
            s,
            COUNTER_TOLERANCE,
            COUNTER_CONFIDENCE,
            SeedStreams::from_rng(rng),
        )?;
        if c.is_zero() {
            return Err(Error::CountingFailed(
                "counter reported no solutions for a satisfiable formula".into(),
            ));
        }
        let q = hash_width(&c, params.pivot);
        debug!("presample: count {c}, q = {q}");
        (Mode::Hash { q }, Some(c))
    };
    Ok(PresampleState {
        engine,
        sampling_set: s.clone(),
        params,
        mode,
        count,
        config,
    })
}

fn check_sampling_set(f: &CnfFormula, s: &SamplingSet) -> Result<()> {
    if let Some(v) = s.vars().iter().find(|v| v.index() > f.num_vars()) {
        return Err(Error::contract(format!(
            "sampling variable {} exceeds the formula's {} variables",
            v.index(),
            f.num_vars()
        )));
    }
    Ok(())
}

/// One draw. Errors only on contract violations; running out of cells or of
/// budget is reported through [`DrawOutcome::witness`].
pub fn draw<R: Rng + ?Sized>(state: &PresampleState, rng: &mut R) -> Result<DrawOutcome> {
    match &state.mode {
        Mode::Easy(list) => {
            if list.is_empty() {
                return Ok(DrawOutcome {
                    witness: Err(Failure::Unsatisfiable),
                    tried_widths: Vec::new(),
                    cell_size: Some(0),
                });
            }
            let j = rng.random_range(0..list.len());
            Ok(DrawOutcome {
                witness: Ok(list[j].clone()),
                tried_widths: Vec::new(),
                cell_size: Some(list.len()),
            })
        }
        Mode::Hash { q } => draw_hashed(state, *q, rng),
    }
}

fn draw_hashed<R: Rng + ?Sized>(
    state: &PresampleState,
    q: i64,
    rng: &mut R,
) -> Result<DrawOutcome> {
    let s = &state.sampling_set;
    let p = &state.params;
    let mut tried = Vec::with_capacity(4);
    let mut cell_size = None;
    for i in q - 3..=q {
        tried.push(i);
        if i <= 0 {
            // No constraints: the cell is the whole space, which presampling
            // already found to exceed hiThresh.
            cell_size = None;
            continue;
        }
        let m = i as usize;
        let mut retries = 0;
        let cell = loop {
            let h = sample_hash(rng, s.len(), m)?;
            let alpha = CellId::random(rng, m);
            let xors = h.to_constraints(&alpha, s)?;
            let cell = state
                .engine
                .bsat(&xors, s, p.bsat_bound(), state.config.bsat_budget)?;
            if !cell.timed_out {
                break cell;
            }
            retries += 1;
            if retries > state.config.timeout_retries {
                return Ok(DrawOutcome {
                    witness: Err(Failure::Timeout),
                    tried_widths: tried,
                    cell_size: None,
                });
            }
        };
        cell_size = Some(cell.len());
        if p.accepts(cell.len()) {
            let j = rng.random_range(0..cell.len());
            let mut witnesses = cell.witnesses;
            return Ok(DrawOutcome {
                witness: Ok(witnesses.swap_remove(j)),
                tried_widths: tried,
                cell_size,
            });
        }
    }
    Ok(DrawOutcome {
        witness: Err(Failure::NoCellInWindow),
        tried_widths: tried,
        cell_size,
    })
}

/// Repeats [`draw`] until it succeeds or `max_attempts` draws have failed;
/// returns the last outcome.
pub fn draw_until_success<R: Rng + ?Sized>(
    state: &PresampleState,
    rng: &mut R,
    max_attempts: usize,
) -> Result<DrawOutcome> {
    let mut last = None;
    for _ in 0..max_attempts.max(1) {
        let out = draw(state, rng)?;
        if out.is_success() || out.witness == Err(Failure::Unsatisfiable) {
            return Ok(out);
        }
        last = Some(out);
    }
    Ok(last.expect("at least one attempt"))
}

/// Presample and draw once from the same generator.
pub fn unigen<R: Rng + ?Sized>(
    f: &CnfFormula,
    epsilon: f64,
    s: &SamplingSet,
    rng: &mut R,
) -> Result<DrawOutcome> {
    let state = presample(f, epsilon, s, rng)?;
    draw(&state, rng)
}

/// `n` independent draws; draw `k` uses stream `k` of `streams`, so the
/// outcome is the same for every execution strategy.
pub fn draw_many(
    state: &PresampleState,
    n: u64,
    streams: &SeedStreams,
    exec: Execution,
) -> Result<Vec<DrawOutcome>> {
    exec.map(n, |k| draw(state, &mut streams.stream(k)))
        .into_iter()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::{ExactCounter, ModelCounter};
    use crate::formula::Var;
    use crate::rng::seeded;

    /// Counter returning a fixed value, to pin `q`.
    struct Fixed(u64);

    impl ModelCounter for Fixed {
        fn count(
            &self,
            _: &Engine,
            _: &SamplingSet,
            tol: f64,
            _: f64,
            _: SeedStreams,
        ) -> Result<CountEstimate> {
            Ok(CountEstimate::exact(self.0, tol))
        }
    }

    fn free(n: u32) -> CnfFormula {
        // x1 ∨ ¬x1 is rejected as a tautology, so pin an extra variable.
        CnfFormula::from_dimacs_clauses(n + 1, &[vec![n as i32 + 1]]).unwrap()
    }

    fn first(n: u32, k: u32) -> SamplingSet {
        SamplingSet::from_indices(&(1..=k).collect::<Vec<_>>(), n).unwrap()
    }

    #[test]
    fn hash_width_examples() {
        assert_eq!(hash_width(&CountEstimate::exact(1000, 0.8), 40), 6);
        assert_eq!(
            hash_width(&CountEstimate::from_cell(1, 20, 0.8, 0.8), 40),
            16
        );
    }

    #[test]
    fn easy_path_small_space() {
        let f = CnfFormula::from_dimacs_clauses(2, &[vec![1, 2]]).unwrap();
        let st = presample(&f, 6.0, &f.support(), &mut seeded(1)).unwrap();
        match st.mode() {
            Mode::Easy(list) => assert_eq!(list.len(), 3),
            m => panic!("{m:?}"),
        }
        let mut rng = seeded(2);
        for _ in 0..50 {
            let out = draw(&st, &mut rng).unwrap();
            let w = out.witness().unwrap();
            assert!(f.evaluate(w).unwrap());
        }
    }

    #[test]
    fn unsat_draws_fail() {
        let f = CnfFormula::from_dimacs_clauses(2, &[vec![1], vec![-1]]).unwrap();
        let st = presample(&f, 6.0, &f.support(), &mut seeded(1)).unwrap();
        assert_eq!(st.mode(), &Mode::Easy(vec![]));
        let out = draw(&st, &mut seeded(1)).unwrap();
        assert_eq!(out.witness, Err(Failure::Unsatisfiable));
    }

    #[test]
    fn rejects_small_epsilon() {
        let f = free(3);
        assert!(matches!(
            presample(&f, 1.5, &f.support(), &mut seeded(1)),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn hash_path_draws_are_witnesses_in_window() {
        let f = free(12);
        let s = first(13, 12);
        let st = presample_with(
            Arc::new(f.clone()),
            6.0,
            &s,
            &mut seeded(3),
            SamplerConfig::default(),
            &ExactCounter::default(),
        )
        .unwrap();
        // ⌈log₂4096 + log₂1.8 - log₂40⌉ = ⌈7.527⌉
        assert_eq!(st.q(), Some(8));
        let mut rng = seeded(4);
        let mut successes = 0;
        for _ in 0..200 {
            let out = draw(&st, &mut rng).unwrap();
            assert!(out.tried_widths.len() <= 4);
            assert_eq!(out.tried_widths[0], 5);
            if let Some(w) = out.witness() {
                assert!(f.evaluate(w).unwrap());
                assert!(st.params().accepts(out.cell_size.unwrap()));
                successes += 1;
            }
        }
        assert!(successes > 100, "{successes}");
    }

    #[test]
    fn nonpositive_widths_are_skipped() {
        let f = free(7);
        let s = first(8, 7);
        let st = presample_with(
            Arc::new(f),
            6.0,
            &s,
            &mut seeded(3),
            SamplerConfig::default(),
            &Fixed(20),
        )
        .unwrap();
        // ⌈log₂20 + log₂1.8 - log₂40⌉ = ⌈-0.152⌉ = 0
        assert_eq!(st.q(), Some(0));
        let out = draw(&st, &mut seeded(5)).unwrap();
        assert_eq!(out.tried_widths, vec![-3, -2, -1, 0]);
        assert_eq!(out.witness, Err(Failure::NoCellInWindow));
    }

    #[test]
    fn zero_budget_times_out() {
        let f = free(12);
        let s = first(13, 12);
        let mut st = presample_with(
            Arc::new(f),
            6.0,
            &s,
            &mut seeded(3),
            SamplerConfig::default(),
            &ExactCounter::default(),
        )
        .unwrap();
        st.set_config(SamplerConfig {
            bsat_budget: Some(Duration::ZERO),
            ..SamplerConfig::default()
        });
        let out = draw(&st, &mut seeded(1)).unwrap();
        assert_eq!(out.witness, Err(Failure::Timeout));
        assert_eq!(out.tried_widths, vec![5]);
    }

    #[test]
    fn draw_many_is_schedule_independent() {
        let f = free(10);
        let s = first(11, 10);
        let st = presample(&f, 6.0, &s, &mut seeded(9)).unwrap();
        let streams = SeedStreams::new(77);
        let a = draw_many(&st, 40, &streams, Execution::Sequential).unwrap();
        let b = draw_many(&st, 40, &streams, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        let c = draw_many(&st, 40, &SeedStreams::new(78), Execution::Sequential).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn draws_project_consistently() {
        let f = free(10);
        let s = first(11, 10);
        let st = presample(&f, 6.0, &s, &mut seeded(9)).unwrap();
        let out = draw_until_success(&st, &mut seeded(10), 20).unwrap();
        let w = out.witness().unwrap();
        assert_eq!(w.value(Var::new(11)), Some(true));
    }

    #[test]
    fn unigen_is_seed_deterministic() {
        let f = free(9);
        let s = first(10, 9);
        let a = unigen(&f, 6.0, &s, &mut seeded(42)).unwrap();
        let b = unigen(&f, 6.0, &s, &mut seeded(42)).unwrap();
        assert_eq!(a, b);
    }
}
