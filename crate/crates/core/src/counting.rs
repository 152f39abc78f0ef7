//! Model counting over a sampling set.
//!
//! [`exact_count`] enumerates every projection and refuses wide sampling sets.
//! [`approx_count`] is a hashing counter: each trial adds random XOR rows one
//! at a time until a cell holds between 1 and `T` witnesses, then scales the
//! cell size by `2^m`; the median over an odd number of trials amplifies the
//! per-trial success probability to the requested confidence.

use std::cmp::Ordering;
use std::sync::Arc;
use std::time::Duration;

use rand::Rng;

use crate::engine::{Engine, EngineConfig, DEFAULT_BSAT_BUDGET};
use crate::exec::Execution;
use crate::formula::{CnfFormula, SamplingSet};
use crate::hashing::{sample_hash, CellId};
use crate::rng::SeedStreams;
use crate::{Error, Result};

/// Widest sampling set [`exact_count`] will enumerate by default.
pub const EXACT_GUARD: usize = 24;

/// Lower bound on the success probability of a single counting trial used to
/// size the median amplification (`1 - e^{-3/2}` rounded down).
pub const TRIAL_SUCCESS: f64 = 0.77;

/// An estimate `C = cells · 2^exponent` with its (tolerance, confidence)
/// contract: `Pr[|R|/(1+tol) ≤ C ≤ (1+tol)|R|] ≥ confidence`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountEstimate {
    cells: u64,
    exponent: u32,
    tolerance: f64,
    confidence: f64,
}

impl CountEstimate {
    /// An exact count, carrying full confidence.
    pub fn exact(value: u64, tolerance: f64) -> CountEstimate {
        CountEstimate {
            cells: value,
            exponent: 0,
            tolerance,
            confidence: 1.0,
        }
    }

    pub fn from_cell(cells: u64, exponent: u32, tolerance: f64, confidence: f64) -> CountEstimate {
        CountEstimate {
            cells,
            exponent,
            tolerance,
            confidence,
        }
    }

    /// `cells · 2^exponent`, or `None` if it does not fit in a `u128`.
    pub fn value(&self) -> Option<u128> {
        if self.cells == 0 {
            return Some(0);
        }
        let lead = 64 - self.cells.leading_zeros();
        if lead + self.exponent > 128 {
            return None;
        }
        Some((self.cells as u128) << self.exponent)
    }

    /// Base-2 logarithm of the estimate (`-inf` for zero).
    pub fn log2(&self) -> f64 {
        (self.cells as f64).log2() + self.exponent as f64
    }

    pub fn is_zero(&self) -> bool {
        self.cells == 0
    }

    pub fn cells(&self) -> u64 {
        self.cells
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn confidence(&self) -> f64 {
        self.confidence
    }

    /// Exact comparison of the represented integers.
    fn cmp_value(&self, other: &CountEstimate) -> Ordering {
        fn scaled(c: u64, shift: u32) -> Option<u128> {
            if shift >= 64 {
                return if c == 0 { Some(0) } else { None };
            }
            (c as u128).checked_shl(shift)
        }
        let e = self.exponent.min(other.exponent);
        let a = scaled(self.cells, self.exponent - e);
        let b = scaled(other.cells, other.exponent - e);
        match (a, b) {
            (Some(a), Some(b)) => a.cmp(&b),
            (None, Some(_)) => Ordering::Greater,
            (Some(_), None) => Ordering::Less,
            (None, None) => self.log2().total_cmp(&other.log2()),
        }
    }
}

impl std::fmt::Display for CountEstimate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.value() {
            Some(v) => write!(f, "{v}"),
            None => write!(f, "{}*2^{}", self.cells, self.exponent),
        }
    }
}

/// Cell-size threshold `T = 2·⌈e^{1/2}(1 + 1/tol)²⌉`.
pub fn cell_threshold(tolerance: f64) -> usize {
    let t = (0.5f64.exp() * (1.0 + 1.0 / tolerance).powi(2)).ceil();
    2 * t as usize
}

/// Smallest odd number of trials whose majority succeeds with probability at
/// least `confidence`, each trial succeeding with [`TRIAL_SUCCESS`].
pub fn trial_count(confidence: f64) -> usize {
    let p = TRIAL_SUCCESS;
    let mut t = 1usize;
    loop {
        // Pr[Binomial(t, p) > t/2]
        let mut term = (1.0 - p).powi(t as i32);
        let mut majority = 0.0;
        for k in 0..=t {
            if k > 0 {
                term *= (t - k + 1) as f64 / k as f64 * p / (1.0 - p);
            }
            if 2 * k > t {
                majority += term;
            }
        }
        if majority >= confidence || t > 100_001 {
            return t;
        }
        t += 2;
    }
}

/// Exact number of distinct projections of solutions on `s`.
pub fn exact_count(f: &CnfFormula, s: &SamplingSet) -> Result<u64> {
    let engine = Engine::with_config(Arc::new(f.clone()), Some(s), EngineConfig::default());
    exact_count_with(&engine, s, EXACT_GUARD)
}

pub fn exact_count_with(engine: &Engine, s: &SamplingSet, guard: usize) -> Result<u64> {
    if s.len() > guard {
        return Err(Error::GuardExceeded {
            width: s.len(),
            limit: guard,
        });
    }
    Ok(engine.enumerate_all(s, None)?.len() as u64)
}

fn check_contract(tolerance: f64, confidence: f64) -> Result<()> {
    if !(tolerance > 0.0 && tolerance.is_finite()) {
        return Err(Error::contract(format!(
            "tolerance must be positive, got {tolerance}"
        )));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::contract(format!(
            "confidence must lie in (0, 1), got {confidence}"
        )));
    }
    Ok(())
}

/// Anything that can estimate the number of projections of a formula's
/// solutions on a sampling set under an (ε, 1-δ) contract.
pub trait ModelCounter: Send + Sync {
    fn count(
        &self,
        engine: &Engine,
        s: &SamplingSet,
        tolerance: f64,
        confidence: f64,
        seeds: SeedStreams,
    ) -> Result<CountEstimate>;
}

/// The hashing-based approximate counter.
#[derive(Debug, Clone, Copy)]
pub struct ApproxCounter {
    pub budget: Option<Duration>,
    pub exec: Execution,
}

impl Default for ApproxCounter {
    fn default() -> Self {
        ApproxCounter {
            budget: Some(DEFAULT_BSAT_BUDGET),
            exec: Execution::default(),
        }
    }
}

/// Enumerates exactly; satisfies every contract trivially.
#[derive(Debug, Clone, Copy)]
pub struct ExactCounter {
    pub guard: usize,
}

impl Default for ExactCounter {
    fn default() -> Self {
        ExactCounter { guard: EXACT_GUARD }
    }
}

impl ModelCounter for ExactCounter {
    fn count(
        &self,
        engine: &Engine,
        s: &SamplingSet,
        tolerance: f64,
        _confidence: f64,
        _seeds: SeedStreams,
    ) -> Result<CountEstimate> {
        let n = exact_count_with(engine, s, self.guard)?;
        Ok(CountEstimate::exact(n, tolerance))
    }
}

impl ModelCounter for ApproxCounter {
    fn count(
        &self,
        engine: &Engine,
        s: &SamplingSet,
        tolerance: f64,
        confidence: f64,
        seeds: SeedStreams,
    ) -> Result<CountEstimate> {
        check_contract(tolerance, confidence)?;
        let threshold = cell_threshold(tolerance);

        let small = engine.bsat(&[], s, threshold + 1, self.budget)?;
        if small.timed_out {
            return Err(Error::CountingFailed("enumeration budget exhausted".into()));
        }
        if small.exhausted {
            return Ok(CountEstimate::exact(small.len() as u64, tolerance));
        }

        let trials = trial_count(confidence);
        let results = self.exec.map(trials as u64, |k| {
            let mut rng = seeds.stream(k);
            counting_trial(engine, s, threshold, self.budget, &mut rng)
        });
        let mut estimates = Vec::with_capacity(trials);
        for r in results {
            match r {
                Ok(Some((cells, m))) => estimates.push(CountEstimate::from_cell(
                    cells as u64,
                    m as u32,
                    tolerance,
                    confidence,
                )),
                Ok(None) => {}
                Err(Error::Timeout) => {
                    return Err(Error::CountingFailed("enumeration budget exhausted".into()))
                }
                Err(e) => return Err(e),
            }
        }
        if estimates.is_empty() {
            return Err(Error::CountingFailed(format!(
                "all {trials} trials ran out of hash widths"
            )));
        }
        estimates.sort_by(|a, b| a.cmp_value(b));
        Ok(estimates[(estimates.len() - 1) / 2])
    }
}

/// One trial: the first `m` whose random cell holds `1..=threshold`
/// witnesses, with that cell size.
fn counting_trial<R: Rng + ?Sized>(
    engine: &Engine,
    s: &SamplingSet,
    threshold: usize,
    budget: Option<Duration>,
    rng: &mut R,
) -> Result<Option<(usize, usize)>> {
    for m in 1..=s.len() {
        let h = sample_hash(rng, s.len(), m)?;
        let alpha = CellId::random(rng, m);
        let xors = h.to_constraints(&alpha, s)?;
        let cell = engine.bsat(&xors, s, threshold + 1, budget)?;
        if cell.timed_out {
            return Err(Error::Timeout);
        }
        if (1..=threshold).contains(&cell.len()) {
            return Ok(Some((cell.len(), m)));
        }
    }
    Ok(None)
}

/// Approximate count of the projections of `f`'s solutions on `s`.
pub fn approx_count<R: Rng + ?Sized>(
    f: &CnfFormula,
    s: &SamplingSet,
    tolerance: f64,
    confidence: f64,
    rng: &mut R,
) -> Result<CountEstimate> {
    check_contract(tolerance, confidence)?;
    let engine = Engine::with_config(Arc::new(f.clone()), Some(s), EngineConfig::default());
    ApproxCounter::default().count(
        &engine,
        s,
        tolerance,
        confidence,
        SeedStreams::from_rng(rng),
    )
}
