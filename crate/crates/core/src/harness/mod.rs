//! Uniformity evaluation.
//!
//! [`run_comparison`] draws `n` witnesses with the sampler and `n` with an
//! exactly uniform sampler over the enumerated solution space, and summarises
//! both in a [`UniformityReport`]: per-witness probability bounds with binomial
//! slack, and a χ² statistic against the uniform distribution for each side.

mod report;

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rand::Rng;

use crate::counting::{ApproxCounter, EXACT_GUARD};
use crate::engine::Engine;
use crate::exec::Execution;
use crate::formula::{Assignment, CnfFormula, SamplingSet, Var};
use crate::rng::SeedStreams;
use crate::sampler::{self, DrawOutcome, PresampleState, SamplerConfig};
use crate::{Error, Result};

pub use report::{emit_report, fof_csv, histogram_csv, summary_text, ReportFiles};

/// Binomial standard deviations allowed around the per-witness bounds.
pub const SLACK_SIGMAS: f64 = 4.0;

/// Draw counts per witness projection, in ascending variable order of `S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    vars: Arc<[Var]>,
    counts: HashMap<Vec<bool>, u64>,
    total: u64,
    failures: u64,
}

impl Histogram {
    pub fn new(s: &SamplingSet) -> Histogram {
        Histogram {
            vars: s.sorted().into(),
            counts: HashMap::new(),
            total: 0,
            failures: 0,
        }
    }

    fn key(&self, w: &Assignment) -> Result<Vec<bool>> {
        self.vars
            .iter()
            .map(|&v| {
                w.value(v).ok_or_else(|| {
                    Error::contract(format!("witness does not assign variable {}", v.index()))
                })
            })
            .collect()
    }

    pub fn record_witness(&mut self, w: &Assignment) -> Result<()> {
        let key = self.key(w)?;
        *self.counts.entry(key).or_insert(0) += 1;
        self.total += 1;
        Ok(())
    }

    pub fn record_failure(&mut self) {
        self.failures += 1;
        self.total += 1;
    }

    pub fn record(&mut self, outcome: &DrawOutcome) -> Result<()> {
        match outcome.witness() {
            Some(w) => self.record_witness(w),
            None => {
                self.record_failure();
                Ok(())
            }
        }
    }

    /// Sums two histograms over the same variables.
    pub fn merge(mut self, other: Histogram) -> Histogram {
        assert_eq!(self.vars, other.vars, "histograms over different variables");
        for (k, c) in other.counts {
            *self.counts.entry(k).or_insert(0) += c;
        }
        self.total += other.total;
        self.failures += other.failures;
        self
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn failures(&self) -> u64 {
        self.failures
    }

    pub fn successes(&self) -> u64 {
        self.total - self.failures
    }

    /// Number of distinct projections seen.
    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn count_of(&self, w: &Assignment) -> Result<u64> {
        Ok(self.counts.get(&self.key(w)?).copied().unwrap_or(0))
    }

    /// Seen projections and their counts, sorted by projection.
    pub fn entries(&self) -> Vec<(Assignment, u64)> {
        let mut keys: Vec<&Vec<bool>> = self.counts.keys().collect();
        keys.sort();
        keys.into_iter()
            .map(|k| {
                (
                    Assignment::from_parts(self.vars.clone(), k.clone()),
                    self.counts[k],
                )
            })
            .collect()
    }

    /// Counts for each member of `universe`, unseen ones as 0.
    fn counts_over(&self, universe: &Universe) -> Vec<u64> {
        universe
            .keys
            .iter()
            .map(|k| self.counts.get(k).copied().unwrap_or(0))
            .collect()
    }

    /// Frequency of frequencies; with a universe, unseen witnesses appear
    /// under count 0.
    pub fn frequency_of_frequency(&self, universe: Option<&Universe>) -> FrequencyOfFrequency {
        let mut map = BTreeMap::new();
        for &c in self.counts.values() {
            *map.entry(c).or_insert(0) += 1;
        }
        if let Some(u) = universe {
            let unseen = u
                .keys
                .iter()
                .filter(|k| !self.counts.contains_key(*k))
                .count();
            if unseen > 0 {
                map.insert(0, unseen as u64);
            }
        }
        FrequencyOfFrequency { map }
    }
}

/// Occurrence count → number of distinct witnesses with that count.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FrequencyOfFrequency {
    map: BTreeMap<u64, u64>,
}

impl FrequencyOfFrequency {
    pub fn get(&self, count: u64) -> u64 {
        self.map.get(&count).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.map.iter().map(|(&c, &m)| (c, m))
    }

    /// `Σ count · multiplicity`, the number of successful draws.
    pub fn draws(&self) -> u64 {
        self.iter().map(|(c, m)| c * m).sum()
    }

    pub fn witnesses(&self) -> u64 {
        self.map.values().sum()
    }
}

/// Every projection of the solution space on `S`.
#[derive(Debug, Clone)]
pub struct Universe {
    vars: Arc<[Var]>,
    keys: Vec<Vec<bool>>,
}

impl Universe {
    /// Exact enumeration, refusing sampling sets wider than the counting guard.
    pub fn enumerate(engine: &Engine, s: &SamplingSet) -> Result<Universe> {
        if s.len() > EXACT_GUARD {
            return Err(Error::GuardExceeded {
                width: s.len(),
                limit: EXACT_GUARD,
            });
        }
        let vars: Arc<[Var]> = s.sorted().into();
        let mut keys: Vec<Vec<bool>> = engine
            .enumerate_all(s, None)?
            .iter()
            .map(|w| vars.iter().map(|&v| w.value(v).unwrap()).collect())
            .collect();
        keys.sort();
        Ok(Universe { vars, keys })
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn witness(&self, i: usize) -> Assignment {
        Assignment::from_parts(self.vars.clone(), self.keys[i].clone())
    }
}

/// `n` exactly uniform draws over the solution space of `f` projected on `s`.
pub fn ideal_sampler<R: Rng + ?Sized>(
    f: &CnfFormula,
    s: &SamplingSet,
    n: u64,
    rng: &mut R,
) -> Result<Histogram> {
    let engine = Engine::new(Arc::new(f.clone()));
    let universe = Universe::enumerate(&engine, s)?;
    Ok(ideal_from(&universe, s, n, rng))
}

fn ideal_from<R: Rng + ?Sized>(
    universe: &Universe,
    s: &SamplingSet,
    n: u64,
    rng: &mut R,
) -> Histogram {
    let mut h = Histogram::new(s);
    if universe.is_empty() {
        h.failures = n;
        h.total = n;
        return h;
    }
    let mut counts = vec![0u64; universe.len()];
    for _ in 0..n {
        counts[rng.random_range(0..universe.len())] += 1;
    }
    for (k, c) in universe.keys.iter().zip(counts) {
        if c > 0 {
            h.counts.insert(k.clone(), c);
        }
    }
    h.total = n;
    h
}

/// χ² statistic of `counts` against the uniform distribution over them.
pub fn chi_square(counts: &[u64]) -> f64 {
    if counts.len() < 2 {
        return 0.0;
    }
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let expected = total as f64 / counts.len() as f64;
    counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum()
}

/// Per-witness probability interval `[1/((1+ε)(K-1)), (1+ε)/(K-1)]`; the
/// trivial interval when `K ≤ 1`.
pub fn theorem_bounds(epsilon: f64, witnesses: usize) -> (f64, f64) {
    if witnesses <= 1 {
        return (0.0, 1.0);
    }
    let k = (witnesses - 1) as f64;
    (1.0 / ((1.0 + epsilon) * k), ((1.0 + epsilon) / k).min(1.0))
}

/// The bounds widened by [`SLACK_SIGMAS`] binomial standard deviations for
/// `n` draws.
pub fn slack_bounds(lower: f64, upper: f64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let sd = |p: f64| (p * (1.0 - p) / n as f64).sqrt();
    (
        (lower - SLACK_SIGMAS * sd(lower)).max(0.0),
        (upper + SLACK_SIGMAS * sd(upper)).min(1.0),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniformityReport {
    pub epsilon: f64,
    /// Size of the enumerated solution space.
    pub witnesses: usize,
    pub draws: u64,
    pub successes: u64,
    pub success_rate: f64,
    pub min_probability: f64,
    pub max_probability: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub lower_limit: f64,
    pub upper_limit: f64,
    pub within_bounds: bool,
    pub chi_square_sampler: f64,
    pub chi_square_ideal: f64,
}

impl UniformityReport {
    pub fn new(
        epsilon: f64,
        universe: &Universe,
        sampled: &Histogram,
        ideal: &Histogram,
    ) -> UniformityReport {
        let n = sampled.total();
        let counts = sampled.counts_over(universe);
        let prob = |c: u64| if n == 0 { 0.0 } else { c as f64 / n as f64 };
        let min_probability = counts.iter().copied().min().map_or(0.0, prob);
        let max_probability = counts.iter().copied().max().map_or(0.0, prob);
        let (lower_bound, upper_bound) = theorem_bounds(epsilon, universe.len());
        let (lower_limit, upper_limit) = slack_bounds(lower_bound, upper_bound, n);
        let within_bounds = counts
            .iter()
            .all(|&c| (lower_limit..=upper_limit).contains(&prob(c)));
        UniformityReport {
            epsilon,
            witnesses: universe.len(),
            draws: n,
            successes: sampled.successes(),
            success_rate: if n == 0 {
                0.0
            } else {
                sampled.successes() as f64 / n as f64
            },
            min_probability,
            max_probability,
            lower_bound,
            upper_bound,
            lower_limit,
            upper_limit,
            within_bounds,
            chi_square_sampler: chi_square(&counts),
            chi_square_ideal: chi_square(&ideal.counts_over(universe)),
        }
    }

    /// `χ²(sampler) / χ²(ideal)`.
    pub fn chi_square_ratio(&self) -> f64 {
        self.chi_square_sampler / self.chi_square_ideal
    }
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub universe: Universe,
    pub sampled: Histogram,
    pub ideal: Histogram,
    pub report: UniformityReport,
    pub q: Option<i64>,
}

impl Comparison {
    pub fn sampled_fof(&self) -> FrequencyOfFrequency {
        self.sampled.frequency_of_frequency(Some(&self.universe))
    }

    pub fn ideal_fof(&self) -> FrequencyOfFrequency {
        self.ideal.frequency_of_frequency(Some(&self.universe))
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ComparisonOptions {
    pub exec: Execution,
    pub sampler: SamplerConfig,
}

/// Histogram of `n` draws from `state`; draw `k` uses stream `k`.
pub fn sample_histogram(
    state: &PresampleState,
    n: u64,
    streams: &SeedStreams,
    exec: Execution,
) -> Result<Histogram> {
    let s = state.sampling_set();
    exec.fold_chunks(
        n,
        1024,
        |range| {
            let mut h = Histogram::new(s);
            for k in range {
                h.record(&sampler::draw(state, &mut streams.stream(k))?)?;
            }
            Ok(h)
        },
        |a: Result<Histogram>, b| Ok(a?.merge(b?)),
    )
    .unwrap_or_else(|| Ok(Histogram::new(s)))
}

pub fn run_comparison(
    f: &CnfFormula,
    s: &SamplingSet,
    epsilon: f64,
    n: u64,
    seed: u64,
) -> Result<Comparison> {
    run_comparison_with(
        Arc::new(f.clone()),
        s,
        epsilon,
        n,
        seed,
        ComparisonOptions::default(),
    )
}

/// Stream layout under `seed`: stream 0 presamples, family 1 holds one
/// stream per sampler draw, stream 2 drives the ideal sampler.
pub fn run_comparison_with(
    f: Arc<CnfFormula>,
    s: &SamplingSet,
    epsilon: f64,
    n: u64,
    seed: u64,
    opts: ComparisonOptions,
) -> Result<Comparison> {
    let streams = SeedStreams::new(seed);
    let state = sampler::presample_with(
        f,
        epsilon,
        s,
        &mut streams.stream(0),
        opts.sampler,
        &ApproxCounter {
            budget: opts.sampler.bsat_budget,
            exec: opts.exec,
        },
    )?;
    let universe = Universe::enumerate(state.engine(), s)?;
    let sampled = sample_histogram(&state, n, &streams.fork(1), opts.exec)?;
    let ideal = ideal_from(&universe, s, n, &mut streams.stream(2));
    let report = UniformityReport::new(epsilon, &universe, &sampled, &ideal);
    Ok(Comparison {
        universe,
        sampled,
        ideal,
        report,
        q: state.q(),
    })
}
