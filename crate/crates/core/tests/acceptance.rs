//! Acceptance suite. Runs every criterion and prints one PASS/FAIL line each;
//! exits non-zero if any fails. Positional arguments select criteria by
//! number (`cargo test --test acceptance -- 5 6`). Set `UNIGEN_FULL_SCALE=1`
//! to run the uniformity comparison at 2^14 witnesses and 4·10^6 draws.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::sync::{Arc, OnceLock};
use std::time::{Duration, Instant};

use rand::Rng;

use unigen::counting::{approx_count, exact_count};
use unigen::engine::Engine;
use unigen::formula::{CnfFormula, SamplingSet, Var};
use unigen::harness::{emit_report, run_comparison, Comparison};
use unigen::hashing::{sample_hash, CellId, HashFunction};
use unigen::rng::seeded;
use unigen::sampler::{self, KappaPivot};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

type Criterion = (u32, &'static str, fn() -> Outcome);

const CRITERIA: &[Criterion] = &[
    (1, "per-witness probability bounds", bounds),
    (2, "success probability", success),
    (3, "uniformity against an ideal sampler", uniformity),
    (4, "hash width brackets the log count", q_brackets),
    (5, "3-wise independence of the hash family", three_wise),
    (6, "bounded enumeration matches brute force", bsat_oracle),
    (7, "approximate counter contract", counter_contract),
    (
        8,
        "sampling-set hashing equals full hashing",
        sampling_set_hashing,
    ),
    (9, "average XOR width", xor_width),
    (10, "scalability smoke", scalability),
];

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.iter().any(|a| a == "--list") {
        for (n, name, _) in CRITERIA {
            println!("criterion {n}: {name}: test");
        }
        return;
    }
    let selected: BTreeSet<u32> = args.iter().filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (n, name, run) in CRITERIA {
        if !selected.is_empty() && !selected.contains(n) {
            continue;
        }
        let start = Instant::now();
        let o = run();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {n:>2} {verdict} ({name}, {:.1}s): {}",
            start.elapsed().as_secs_f64(),
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

/// Binomial 3σ slack below a proportion `p` over `n` trials.
fn three_sigma_floor(p: f64, n: usize) -> f64 {
    p - 3.0 * (p * (1.0 - p) / n as f64).sqrt()
}

// 1 and 2 share one run: |S| = 10, 256 projections, ε = 6, 10^6 draws.
fn bounds_run() -> &'static (Comparison, Duration) {
    static RUN: OnceLock<(Comparison, Duration)> = OnceLock::new();
    RUN.get_or_init(|| {
        let (f, s) = common::majority(10, 2, 24);
        let start = Instant::now();
        let c = run_comparison(&f, &s, 6.0, 1_000_000, 20_140_601).unwrap();
        (c, start.elapsed())
    })
}

fn bounds() -> Outcome {
    let (c, took) = bounds_run();
    let r = &c.report;
    let pass = r.witnesses == 256 && r.within_bounds && *took <= Duration::from_secs(30 * 60);
    outcome(
        pass,
        format!(
            "K={} p in [{:.6e}, {:.6e}], allowed [{:.6e}, {:.6e}] (theorem [{:.6e}, {:.6e}]), {:.0}s",
            r.witnesses,
            r.min_probability,
            r.max_probability,
            r.lower_limit,
            r.upper_limit,
            r.lower_bound,
            r.upper_bound,
            took.as_secs_f64()
        ),
    )
}

fn success() -> Outcome {
    let (c, _) = bounds_run();
    let rate = c.report.success_rate;
    let (proven, observed) = (rate >= 0.62, rate >= 0.95);
    outcome(
        proven && observed,
        format!(
            "{} of {} draws succeeded, rate {rate:.6} (>= 0.62: {proven}, >= 0.95: {observed})",
            c.report.successes, c.report.draws
        ),
    )
}

fn uniformity() -> Outcome {
    let full = std::env::var_os("UNIGEN_FULL_SCALE").is_some();
    let (k, n) = if full {
        (15, 4_000_000)
    } else {
        (11, 1_000_000)
    };
    let (f, s) = common::majority(k, 1, 24);
    let start = Instant::now();
    let c = run_comparison(&f, &s, 6.0, n, 110).unwrap();
    let took = start.elapsed();
    let r = &c.report;

    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("uniformity");
    let files = emit_report(&dir, &c).unwrap();
    let replot = |path: &PathBuf| -> u64 {
        std::fs::read_to_string(path)
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| {
                let (c, m) = l.split_once(',').unwrap();
                c.parse::<u64>().unwrap() * m.parse::<u64>().unwrap()
            })
            .sum()
    };
    let csv_ok = replot(&files.sampler_fof) == c.sampled.successes()
        && replot(&files.ideal_fof) == c.ideal.successes();

    let ratio = r.chi_square_ratio();
    outcome(
        r.witnesses == 1 << (k - 1)
            && ratio <= 1.5
            && csv_ok
            && took <= Duration::from_secs(4 * 3600),
        format!(
            "K={} n={n} chi2 sampler {:.1} ideal {:.1} ratio {ratio:.4}; CSVs in {} ({}), {:.0}s",
            r.witnesses,
            r.chi_square_sampler,
            r.chi_square_ideal,
            dir.display(),
            if csv_ok {
                "totals reproduce"
            } else {
                "totals differ"
            },
            took.as_secs_f64()
        ),
    )
}

fn q_brackets() -> Outcome {
    let (f, s) = common::majority(13, 1, 24);
    let known = 4096u64;
    let exact = exact_count(&f, &s).unwrap();
    let pivot = KappaPivot::new(6.0).unwrap().pivot as f64;
    let m = ((known - 1) as f64).log2() - pivot.log2();
    let runs = 200;
    let mut hits = 0;
    let mut qs = BTreeMap::new();
    for seed in 0..runs {
        let st = sampler::presample(&f, 6.0, &s, &mut seeded(seed)).unwrap();
        let q = st.q().unwrap() as f64;
        *qs.entry(q as i64).or_insert(0) += 1;
        if q - 3.0 <= m && m <= q {
            hits += 1;
        }
    }
    let frac = hits as f64 / runs as f64;
    let floor = three_sigma_floor(0.8, runs as usize);
    outcome(
        exact == known && frac >= floor,
        format!("m={m:.4}, {hits}/{runs} = {frac:.3} (need {floor:.3}), q histogram {qs:?}"),
    )
}

fn three_wise() -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;
    for (n, m) in [(3usize, 1usize), (3, 2), (4, 2)] {
        let bits = m * (n + 1);
        let functions: Vec<HashFunction> = (0u64..1 << bits)
            .map(|code| {
                let rows: Vec<(bool, Vec<bool>)> = (0..m)
                    .map(|i| {
                        let base = i * (n + 1);
                        let bit = |j: usize| code >> (base + j) & 1 == 1;
                        (bit(0), (1..=n).map(bit).collect())
                    })
                    .collect();
                HashFunction::from_rows(n, &rows).unwrap()
            })
            .collect();
        let points: Vec<Vec<bool>> = (0u32..1 << n)
            .map(|y| (0..n).map(|k| y >> k & 1 == 1).collect())
            .collect();
        let cells: Vec<Vec<usize>> = functions
            .iter()
            .map(|h| {
                points
                    .iter()
                    .map(|y| {
                        let c = h.apply_bits(y).unwrap();
                        c.bits()
                            .iter()
                            .enumerate()
                            .map(|(i, &b)| (b as usize) << i)
                            .sum()
                    })
                    .collect()
            })
            .collect();
        // Every ordered triple of distinct points, every triple of cells.
        let want = functions.len() >> (3 * m);
        let mut ok = true;
        let mut triples = 0;
        for a in 0..points.len() {
            for b in 0..points.len() {
                for c in 0..points.len() {
                    if a == b || b == c || a == c {
                        continue;
                    }
                    triples += 1;
                    let mut counts = vec![0usize; 1 << (3 * m)];
                    for h in &cells {
                        counts[h[a] | h[b] << m | h[c] << (2 * m)] += 1;
                    }
                    ok &= counts.iter().all(|&x| x == want);
                }
            }
        }
        pass &= ok;
        details.push(format!(
            "(n={n}, m={m}): {} functions, {triples} triples {}",
            functions.len(),
            if ok { "exact" } else { "MISMATCH" }
        ));
    }
    outcome(pass, details.join("; "))
}

fn satisfies(clauses: &[Vec<i32>], bits: u32) -> bool {
    clauses.iter().all(|c| {
        c.iter()
            .any(|&l| ((bits >> (l.unsigned_abs() - 1)) & 1 == 1) == (l > 0))
    })
}

fn bsat_oracle() -> Outcome {
    let mut rng = seeded(6);
    let mut mismatches = 0;
    let mut total_witnesses = 0;
    for _ in 0..500 {
        let n: u32 = rng.random_range(1..=12);
        let clause_count = rng.random_range(0..=3 * n as usize);
        let clauses: Vec<Vec<i32>> = (0..clause_count)
            .map(|_| {
                let width = rng.random_range(1..=3.min(n));
                let mut vars: Vec<i32> = (1..=n as i32).collect();
                for i in 0..width as usize {
                    let j = rng.random_range(i..vars.len());
                    vars.swap(i, j);
                }
                vars[..width as usize]
                    .iter()
                    .map(|&v| if rng.random() { v } else { -v })
                    .collect()
            })
            .collect();
        let mut s_vars: Vec<u32> = (1..=n).filter(|_| rng.random_bool(0.6)).collect();
        if s_vars.is_empty() {
            s_vars.push(rng.random_range(1..=n));
        }
        let f = CnfFormula::from_dimacs_clauses(n, &clauses).unwrap();
        let s = SamplingSet::from_indices(&s_vars, n).unwrap();
        let m = rng.random_range(0..=s_vars.len() + 1);
        let (h, alpha) = if m == 0 {
            (None, CellId::zeros(0))
        } else {
            (
                Some(sample_hash(&mut rng, s_vars.len(), m).unwrap()),
                CellId::random(&mut rng, m),
            )
        };
        let xors = match &h {
            Some(h) => h.to_constraints(&alpha, &s).unwrap(),
            None => Vec::new(),
        };

        // Brute force: projections on S of every model of F with h(y_S) = α.
        let project =
            |bits: u32| -> Vec<bool> { s_vars.iter().map(|&v| bits >> (v - 1) & 1 == 1).collect() };
        let in_cell = |y: &[bool]| match &h {
            None => true,
            Some(h) => (0..h.m()).all(|i| {
                let v = (0..h.n()).fold(h.constant(i), |acc, k| acc ^ (h.coeff(i, k) & y[k]));
                v == alpha.bits()[i]
            }),
        };
        let expected: BTreeSet<Vec<bool>> = common::brute_force(n, &clauses)
            .into_iter()
            .map(project)
            .filter(|y| in_cell(y))
            .collect();

        let engine = Engine::new(Arc::new(f.clone()));
        let got = engine.bsat(&xors, &s, (1 << n) + 1, None).unwrap();
        let mut seen = BTreeSet::new();
        let mut ok = got.exhausted && !got.timed_out;
        for w in &got.witnesses {
            let bits: u32 = (1..=n)
                .filter(|&v| w.value(Var::new(v)).unwrap())
                .map(|v| 1 << (v - 1))
                .sum();
            ok &= satisfies(&clauses, bits);
            ok &= seen.insert(project(bits));
        }
        ok &= seen == expected;
        total_witnesses += got.len();
        mismatches += usize::from(!ok);
    }
    outcome(
        mismatches == 0,
        format!("500 formulas, {total_witnesses} witnesses, {mismatches} mismatches"),
    )
}

fn counter_contract() -> Outcome {
    let cases: Vec<(&str, (CnfFormula, SamplingSet), u64)> = vec![
        (
            "6 vars, x1|x2",
            common::constrained(6, &[vec![1, 2]], 12),
            48,
        ),
        ("8 vars, majority", common::majority(8, 1, 12), 128),
        (
            "10 vars, x1|x2|x3",
            common::constrained(10, &[vec![1, 2, 3]], 16),
            896,
        ),
        (
            "12 vars, majority and x4|x5",
            {
                let mut b = common::Builder::with_inputs(12);
                for c in [[1, 2], [1, 3], [2, 3], [4, 5]] {
                    b.clause(&c);
                }
                let g = b.and(6, 7);
                b.or(g, 8);
                (b.build(), common::set(&common::range(12), b.num_vars))
            },
            1536,
        ),
        (
            "14 vars, x1|x2",
            common::constrained(14, &[vec![1, 2]], 20),
            12288,
        ),
    ];
    let trials = 100;
    let floor = three_sigma_floor(0.8, trials);
    let mut pass = true;
    let mut details = Vec::new();
    for (idx, (name, (f, s), known)) in cases.iter().enumerate() {
        let exact = exact_count(f, s).unwrap();
        let mut within = 0;
        for t in 0..trials {
            let c =
                approx_count(f, s, 0.8, 0.8, &mut seeded(1000 * idx as u64 + t as u64)).unwrap();
            let v = c.value().unwrap() as f64;
            let truth = *known as f64;
            if truth / 1.8 <= v && v <= truth * 1.8 {
                within += 1;
            }
        }
        let frac = within as f64 / trials as f64;
        pass &= exact == *known && frac >= floor;
        details.push(format!("{name}: {within}/{trials}"));
    }
    outcome(
        pass,
        format!("{} (need {floor:.2} each)", details.join(", ")),
    )
}

/// Cell-size statistics over every (h, α) at width `m` for hashing on `on`.
fn cell_distributions(
    engine: &Engine,
    on: &SamplingSet,
    m: usize,
) -> (BTreeMap<usize, u64>, BTreeMap<Vec<usize>, u64>, u64) {
    let n = on.len();
    let mut per_cell = BTreeMap::new();
    let mut per_function = BTreeMap::new();
    let functions = 1u64 << (m * (n + 1));
    for code in 0..functions {
        let rows: Vec<(bool, Vec<bool>)> = (0..m)
            .map(|i| {
                let base = i * (n + 1);
                let bit = |j: usize| code >> (base + j) & 1 == 1;
                (bit(0), (1..=n).map(bit).collect())
            })
            .collect();
        let h = HashFunction::from_rows(n, &rows).unwrap();
        let mut sizes = Vec::new();
        for a in 0u32..1 << m {
            let alpha = CellId::new((0..m).map(|i| a >> i & 1 == 1).collect());
            let xors = h.to_constraints(&alpha, on).unwrap();
            let size = engine.bsat(&xors, on, 64, None).unwrap().len();
            *per_cell.entry(size).or_insert(0) += 1;
            sizes.push(size);
        }
        sizes.sort();
        *per_function.entry(sizes).or_insert(0) += 1;
    }
    (per_cell, per_function, functions)
}

fn same_distribution<K: Ord>(a: &BTreeMap<K, u64>, na: u64, b: &BTreeMap<K, u64>, nb: u64) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b)
            .all(|((ka, ca), (kb, cb))| ka == kb && ca * nb == cb * na)
}

fn sampling_set_hashing() -> Outcome {
    // S = {1, 2, 3}; x4 = x1 ⊕ x2 and x5 = x2 ⊕ x3; at least one of S true.
    let mut b = common::Builder::with_inputs(5);
    b.xor_constraint(&[4, 1, 2], false);
    b.xor_constraint(&[5, 2, 3], false);
    b.clause(&[1, 2, 3]);
    let f = b.build();
    let s = common::set(&[1, 2, 3], 5);
    let x = f.support();
    let engine = Engine::new(Arc::new(f.clone()));
    let models = exact_count(&f, &x).unwrap();
    let projections = exact_count(&f, &s).unwrap();

    let (cells_s, fns_s, n_s) = cell_distributions(&engine, &s, 1);
    let (cells_x, fns_x, n_x) = cell_distributions(&engine, &x, 1);
    let pass = models == projections
        && same_distribution(&cells_s, 2 * n_s, &cells_x, 2 * n_x)
        && same_distribution(&fns_s, n_s, &fns_x, n_x);
    outcome(
        pass,
        format!(
            "|R_F|={models}, S-hash {n_s} functions {fns_s:?}, X-hash {n_x} functions {fns_x:?}"
        ),
    )
}

fn xor_width() -> Outcome {
    let rows = 10_000;
    let h = sample_hash(&mut seeded(72), 72, rows).unwrap();
    let mean = (0..rows).map(|i| h.row_weight(i) as f64).sum::<f64>() / rows as f64;
    let sigma = (72.0f64 * 0.25 / rows as f64).sqrt();
    outcome(
        (mean - 36.0).abs() <= 3.0 * sigma,
        format!("mean width {mean:.4}, 3 sigma = {:.4}", 3.0 * sigma),
    )
}

/// A random circuit of `gates` gates over `inputs` inputs, with random
/// 3-clauses over the inputs and over gate outputs.
fn circuit(inputs: u32, gates: u32, seed: u64) -> (CnfFormula, SamplingSet) {
    let mut rng = seeded(seed);
    let mut b = common::Builder::with_inputs(inputs);
    let mut outs: Vec<i32> = Vec::new();
    for _ in 0..gates {
        let pick = |rng: &mut rand_chacha::ChaCha8Rng| -> i32 {
            let v = if outs.is_empty() || rng.random_bool(0.4) {
                rng.random_range(1..=inputs as i32)
            } else {
                let lo = outs.len().saturating_sub(64);
                outs[rng.random_range(lo..outs.len())]
            };
            if rng.random() {
                v
            } else {
                -v
            }
        };
        let (x, y) = (pick(&mut rng), pick(&mut rng));
        if x.abs() == y.abs() {
            continue;
        }
        let g = match rng.random_range(0..3) {
            0 => b.and(x, y),
            1 => b.or(x, y),
            _ => b.xor(x.abs(), y.abs()),
        };
        outs.push(g);
    }
    for _ in 0..20 {
        let mut vars: Vec<i32> = (1..=inputs as i32).collect();
        for i in 0..3 {
            let j = rng.random_range(i..vars.len());
            vars.swap(i, j);
        }
        let c: Vec<i32> = vars[..3]
            .iter()
            .map(|&v| if rng.random() { v } else { -v })
            .collect();
        b.clause(&c);
    }
    for _ in 0..5 {
        let c: Vec<i32> = (0..3)
            .map(|_| outs[rng.random_range(0..outs.len())])
            .collect();
        let mut c = c;
        c.sort();
        c.dedup();
        b.clause(&c);
    }
    (b.build(), common::set(&common::range(inputs), b.num_vars))
}

fn scalability() -> Outcome {
    let (f, s) = circuit(40, 10_200, 10);
    let start = Instant::now();
    let st = sampler::presample(&f, 6.0, &s, &mut seeded(10)).unwrap();
    let presampled = start.elapsed();
    let mut rng = seeded(11);
    let mut ok = 0;
    let mut valid = true;
    for _ in 0..100 {
        let out = sampler::draw(&st, &mut rng).unwrap();
        if let Some(w) = out.witness() {
            ok += 1;
            valid &= f.evaluate(w).unwrap();
        }
    }
    let took = start.elapsed();
    outcome(
        f.num_vars() >= 10_000 && s.len() <= 40 && valid && took <= Duration::from_secs(600),
        format!(
            "{} vars, {} clauses, |S|={}, q={:?}, presample {:.1}s, {ok}/100 draws succeeded, all valid: {valid}, total {:.1}s",
            f.num_vars(),
            f.clauses().len(),
            s.len(),
            st.q(),
            presampled.as_secs_f64(),
            took.as_secs_f64()
        ),
    )
}
