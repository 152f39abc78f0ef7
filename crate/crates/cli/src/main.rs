use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use unigen::counting::{approx_count, exact_count};
use unigen::exec::Execution;
use unigen::formula::{parse_dimacs, CnfFormula, SamplingSet};
use unigen::harness::{emit_report, run_comparison_with, summary_text, ComparisonOptions};
use unigen::rng::SeedStreams;
use unigen::sampler::{self, PresampleState, SamplerConfig};
use unigen::Error;

/// Almost-uniform witness sampling for CNF formulas.
#[derive(Debug, Parser)]
#[command(name = "unigen", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw witnesses, printed as their sampling-set literals; failed draws print `FAIL`.
    Sample(SampleArgs),
    /// Count the projections of the solutions on the sampling set.
    Count(CountArgs),
    /// Compare the sampler with an exactly uniform sampler and write a report.
    Evaluate(EvaluateArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// DIMACS CNF file; `c ind` lines give the sampling set.
    file: PathBuf,
    /// Overrides the sampling set, e.g. `1,2,5`.
    #[arg(long, value_delimiter = ',')]
    sampling_set: Option<Vec<u32>>,
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    epsilon: f64,
    #[arg(long)]
    samples: u64,
    #[arg(long, env = "UNIGEN_SEED")]
    seed: u64,
    /// Per-enumeration budget in seconds.
    #[arg(long, default_value_t = 2500.0)]
    bsat_timeout: f64,
    /// Presample state file: reused if present, written otherwise.
    #[arg(long)]
    state: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CountArgs {
    #[command(flatten)]
    common: Common,
    /// Enumerate instead of estimating.
    #[arg(long)]
    exact: bool,
    #[arg(long, default_value_t = 0.8)]
    tolerance: f64,
    #[arg(long, default_value_t = 0.8)]
    confidence: f64,
    #[arg(long, env = "UNIGEN_SEED")]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    epsilon: f64,
    #[arg(long)]
    samples: u64,
    #[arg(long, env = "UNIGEN_SEED")]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Core(Error::Io(e))
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Timeout | Error::CountingFailed(_) => 2,
        Error::Contract(_) | Error::GuardExceeded { .. } => 3,
        Error::Parse { .. } | Error::State(_) | Error::Io(_) => 1,
    }
}

fn load(c: &Common) -> Result<(CnfFormula, SamplingSet), Failure> {
    let text = fs::read_to_string(&c.file)
        .map_err(|e| Failure::Usage(format!("{}: {e}", c.file.display())))?;
    let d = parse_dimacs(&text).map_err(|e| match e {
        Error::Parse { .. } => Failure::Usage(format!("{}: {e}", c.file.display())),
        e => Failure::Core(e),
    })?;
    let s = match &c.sampling_set {
        Some(vars) => SamplingSet::from_indices(vars, d.formula.num_vars())?,
        None => d.sampling_set.unwrap_or_else(|| d.formula.support()),
    };
    Ok((d.formula, s))
}

fn budget(secs: f64) -> Result<Duration, Failure> {
    Duration::try_from_secs_f64(secs)
        .map_err(|_| Failure::Usage(format!("invalid --bsat-timeout {secs}")))
}

fn presample_state(
    f: Arc<CnfFormula>,
    s: &SamplingSet,
    a: &SampleArgs,
    config: SamplerConfig,
    streams: &SeedStreams,
) -> Result<PresampleState, Failure> {
    if let Some(path) = a.state.as_deref().filter(|p| p.exists()) {
        let text = fs::read_to_string(path)?;
        let state = PresampleState::from_text(&text, f, s, config)?;
        if state.epsilon() != a.epsilon {
            return Err(Error::State(format!(
                "state was computed for epsilon {}, not {}",
                state.epsilon(),
                a.epsilon
            ))
            .into());
        }
        return Ok(state);
    }
    let state = sampler::presample_with(
        f,
        a.epsilon,
        s,
        &mut streams.stream(0),
        config,
        &unigen::counting::ApproxCounter {
            budget: config.bsat_budget,
            exec: config.exec,
        },
    )?;
    if let Some(path) = &a.state {
        fs::write(path, state.to_text())?;
    }
    Ok(state)
}

fn sample(a: &SampleArgs) -> Result<(), Failure> {
    let (f, s) = load(&a.common)?;
    let config = SamplerConfig {
        bsat_budget: Some(budget(a.bsat_timeout)?),
        ..SamplerConfig::default()
    };
    let streams = SeedStreams::new(a.seed);
    let state = presample_state(Arc::new(f), &s, a, config, &streams)?;
    let outcomes = sampler::draw_many(&state, a.samples, &streams.fork(1), Execution::default())?;
    let mut vars = s.vars().to_vec();
    vars.sort();
    let mut out = BufWriter::new(io::stdout().lock());
    for o in &outcomes {
        let Some(w) = o.witness() else {
            writeln!(out, "FAIL")?;
            continue;
        };
        for &v in &vars {
            let sign = if w.value(v).unwrap_or(false) { "" } else { "-" };
            write!(out, "{sign}{} ", v.index())?;
        }
        writeln!(out, "0")?;
    }
    out.flush()?;
    Ok(())
}

fn count(a: &CountArgs) -> Result<(), Failure> {
    let (f, s) = load(&a.common)?;
    if a.exact {
        println!("{}", exact_count(&f, &s)?);
        return Ok(());
    }
    let seed = a
        .seed
        .ok_or_else(|| Failure::Usage("--seed (or UNIGEN_SEED) is required".into()))?;
    let c = approx_count(
        &f,
        &s,
        a.tolerance,
        a.confidence,
        &mut SeedStreams::new(seed).stream(0),
    )?;
    println!("{c}");
    Ok(())
}

fn evaluate(a: &EvaluateArgs) -> Result<(), Failure> {
    let (f, s) = load(&a.common)?;
    let c = run_comparison_with(
        Arc::new(f),
        &s,
        a.epsilon,
        a.samples,
        a.seed,
        ComparisonOptions::default(),
    )?;
    emit_report(Path::new(&a.out), &c)?;
    print!("{}", summary_text(&c.report, c.q));
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Sample(a) => sample(a),
        Command::Count(a) => count(a),
        Command::Evaluate(a) => evaluate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
