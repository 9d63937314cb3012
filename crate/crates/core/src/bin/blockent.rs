use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use blockent::gibbs::{gibbs_from_matrix, gibbs_verify};
use blockent::report::{digest, RunInputs, RunReport};
use blockent::selftest::{run_all, CheckResult};
use blockent::spec_file::{parse_observable, parse_spec_str};
use blockent::stability::{quantum_sharpness_family, sharpness_family, verify_stability, QuantumSharpnessReport, SharpnessReport};
use blockent::{minimize_entropy, BlockConvexSet, Error, ProbabilityVector};

/// Entropy minimization and quadratic stability checks for block-diagonal states.
///
/// Members of a constraint set are sampled by drawing Dirichlet weights over
/// the marginal vertices and hull generators; this covers the set but is not
/// uniform over it.
#[derive(Parser, Debug)]
#[command(name = "blockent", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(clap::Args, Debug)]
struct Output {
    /// Report destination.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format; `csv` is only available for `sharpness`.
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(clap::Args, Debug)]
struct Sampling {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact minimum entropy and its minimizing marginals.
    Minimize {
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Monte-Carlo check of `S − S_min ≥ C·dist²`.
    Verify {
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        sampling: Sampling,
        #[command(flatten)]
        output: Output,
    },
    /// Gap and distance along `p_ε = q + εv`, with a fitted exponent.
    ///
    /// With `--format json` a sibling `.csv` of (distance, gap) is written next to `--out`.
    Sharpness {
        #[arg(long)]
        spec: PathBuf,
        /// Base marginal, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        q: Vec<f64>,
        /// Direction, comma separated; must sum to zero.
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        v: Vec<f64>,
        /// Step ladder, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "1e-2,3e-3,1e-3,3e-4,1e-4,3e-5,1e-5")]
        eps: Vec<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Fixed populations over the eigenspaces of an observable.
    Gibbs {
        /// Observable matrix file: `[[[re, im], ...], ...]` or `{"matrix": ...}`.
        #[arg(long, alias = "spec")]
        observable: PathBuf,
        /// Eigenvalues closer than this share a block.
        #[arg(long, default_value_t = 1e-9)]
        tol_cluster: f64,
        /// Block populations in ascending energy order; uniform when omitted.
        #[arg(long, value_delimiter = ',')]
        q: Option<Vec<f64>>,
        #[command(flatten)]
        sampling: Sampling,
        #[command(flatten)]
        output: Output,
    },
    /// Runs the invariant suite on the shipped fixtures.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[command(flatten)]
        output: Output,
    },
}

enum Failure {
    Usage(String),
    Lib(Error),
    Invariant(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Lib(e) => e.exit_code() as u8,
            Failure::Invariant(_) => 4,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) | Failure::Invariant(m) => m.clone(),
            Failure::Lib(e) => e.to_string(),
        }
    }
}

type CliResult = std::result::Result<String, Failure>;

fn io_err(path: &Path, e: std::io::Error) -> Failure {
    Failure::Lib(Error::Parse {
        path: path.display().to_string(),
        msg: e.to_string(),
    })
}

fn read_spec(path: &Path) -> std::result::Result<(BlockConvexSet, String), Failure> {
    let bytes = std::fs::read(path).map_err(|e| io_err(path, e))?;
    let text = String::from_utf8(bytes.clone()).map_err(|e| Failure::Lib(Error::Parse {
        path: path.display().to_string(),
        msg: e.to_string(),
    }))?;
    let c = parse_spec_str(&text, &path.display().to_string())?;
    Ok((c, digest(&bytes)))
}

fn write_file(path: &Path, contents: &str) -> std::result::Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| Failure::Lib(Error::Io(e)))
}

fn json_only(output: &Output, command: &str) -> std::result::Result<(), Failure> {
    if output.format == Format::Csv {
        return Err(Failure::Usage(format!("--format csv is not available for {command}")));
    }
    Ok(())
}

fn emit<P: Serialize>(output: &Output, command: &str, inputs: RunInputs, payload: P, start: Instant) -> std::result::Result<(), Failure> {
    if let Some(path) = &output.out {
        let report = RunReport::new(command, inputs, payload, start.elapsed().as_secs_f64());
        write_file(path, &(report.to_json() + "\n"))?;
    }
    Ok(())
}

fn extra(pairs: Vec<(&str, Value)>) -> Map<String, Value> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn probability(v: &[f64], field: &str) -> std::result::Result<ProbabilityVector, Failure> {
    ProbabilityVector::new(v.to_vec()).map_err(|e| Failure::Lib(Error::Validation {
        field: field.into(),
        msg: e.to_string(),
    }))
}

fn cmd_minimize(spec: &Path, output: &Output) -> CliResult {
    json_only(output, "minimize")?;
    let start = Instant::now();
    let (c, spec_digest) = read_spec(spec)?;
    let md = minimize_entropy(&c);
    let line = format!(
        "s_min={:.12} minimizing_vertices={}",
        md.s_min,
        md.minimizing_marginals.len()
    );
    let inputs = RunInputs {
        spec_digest: Some(spec_digest),
        seed: None,
        samples: None,
        extra: Map::new(),
    };
    emit(output, "minimize", inputs, md.summary(), start)?;
    Ok(line)
}

fn cmd_verify(spec: &Path, sampling: &Sampling, output: &Output) -> CliResult {
    json_only(output, "verify")?;
    let start = Instant::now();
    let (c, spec_digest) = read_spec(spec)?;
    let rep = verify_stability(&c, sampling.samples, sampling.seed)?;
    let inputs = RunInputs {
        spec_digest: Some(spec_digest),
        seed: Some(sampling.seed),
        samples: Some(sampling.samples),
        extra: Map::new(),
    };
    let line = rep.summary_line();
    let violations = rep.violations + rep.minimality_violations;
    emit(output, "verify", inputs, &rep, start)?;
    if violations > 0 {
        return Err(Failure::Invariant(format!("{line}\n{violations} violating samples")));
    }
    Ok(line)
}

#[derive(Serialize)]
struct SharpnessPayload {
    classical: SharpnessReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    block_lift: Option<QuantumSharpnessReport>,
}

fn csv_sibling(path: &Path) -> PathBuf {
    path.with_extension("csv")
}

fn cmd_sharpness(spec: &Path, q: &[f64], v: &[f64], eps: &[f64], output: &Output) -> CliResult {
    let start = Instant::now();
    let (c, spec_digest) = read_spec(spec)?;
    let q_vec = probability(q, "q")?;
    let classical = sharpness_family(c.marginal(), &q_vec, v, eps)?;
    let block_lift = if c.all_full() {
        Some(quantum_sharpness_family(&c, &minimize_entropy(&c), &q_vec, v, eps)?)
    } else {
        None
    };
    let line = format!(
        "exponent={:.6} class={} derivative={} points={}",
        classical.fitted_exponent,
        serde_json::to_value(classical.exponent_class).unwrap().as_str().unwrap_or(""),
        classical.directional_derivative,
        classical.gaps.len()
    );
    let csv = classical.to_csv();
    match output.format {
        Format::Csv => {
            if let Some(path) = &output.out {
                write_file(path, &csv)?;
            }
        }
        Format::Json => {
            let inputs = RunInputs {
                spec_digest: Some(spec_digest),
                seed: None,
                samples: None,
                extra: extra(vec![("q", json!(q)), ("v", json!(v)), ("eps", json!(eps))]),
            };
            emit(output, "sharpness", inputs, SharpnessPayload { classical, block_lift }, start)?;
            if let Some(path) = &output.out {
                write_file(&csv_sibling(path), &csv)?;
            }
        }
    }
    Ok(line)
}

#[derive(Serialize)]
struct GibbsPayload {
    blocks: Vec<usize>,
    energies: Vec<f64>,
    q: Vec<f64>,
    stability: blockent::StabilityReport,
}

fn cmd_gibbs(observable: &Path, tol_cluster: f64, q: Option<&[f64]>, sampling: &Sampling, output: &Output) -> CliResult {
    json_only(output, "gibbs")?;
    if !(tol_cluster.is_finite() && tol_cluster >= 0.0) {
        return Err(Failure::Usage("--tol-cluster must be a finite non-negative number".into()));
    }
    let start = Instant::now();
    let bytes = std::fs::read(observable).map_err(|e| io_err(observable, e))?;
    let h0 = parse_observable(observable)?;
    let blocks = gibbs_from_matrix(h0, tol_cluster)?;
    let r = blocks.decomposition.num_blocks();
    let q_vec = match q {
        Some(q) => probability(q, "q")?,
        None => ProbabilityVector::uniform(r),
    };
    let rep = gibbs_verify(&blocks.decomposition, &q_vec, sampling.samples, sampling.seed)?;
    let line = format!("blocks={:?} {}", blocks.decomposition.dims(), rep.summary_line());
    let failures = rep.violations + rep.minimality_violations + rep.sqrt_bound_violations.unwrap_or(0);
    let inputs = RunInputs {
        spec_digest: Some(digest(&bytes)),
        seed: Some(sampling.seed),
        samples: Some(sampling.samples),
        extra: extra(vec![("tol_cluster", json!(tol_cluster))]),
    };
    let payload = GibbsPayload {
        blocks: blocks.decomposition.dims().to_vec(),
        energies: blocks.energies.clone(),
        q: q_vec.as_slice().to_vec(),
        stability: rep,
    };
    emit(output, "gibbs", inputs, payload, start)?;
    if failures > 0 {
        return Err(Failure::Invariant(format!("{line}\n{failures} violating samples")));
    }
    Ok(line)
}

fn cmd_selftest(seed: u64, samples: usize, output: &Output) -> CliResult {
    json_only(output, "selftest")?;
    if samples == 0 {
        return Err(Failure::Usage("--samples must be ≥ 1".into()));
    }
    let start = Instant::now();
    let results: Vec<CheckResult> = run_all(seed, samples);
    for r in &results {
        eprintln!("{} {} {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    let line = format!("checks={} failed={failed}", results.len());
    let inputs = RunInputs {
        spec_digest: None,
        seed: Some(seed),
        samples: Some(samples),
        extra: Map::new(),
    };
    emit(output, "selftest", inputs, &results, start)?;
    if failed > 0 {
        return Err(Failure::Invariant(line));
    }
    Ok(line)
}

fn run(cli: Cli) -> CliResult {
    match &cli.command {
        Command::Minimize { spec, output } => cmd_minimize(spec, output),
        Command::Verify { spec, sampling, output } => cmd_verify(spec, sampling, output),
        Command::Sharpness { spec, q, v, eps, output } => cmd_sharpness(spec, q, v, eps, output),
        Command::Gibbs {
            observable,
            tol_cluster,
            q,
            sampling,
            output,
        } => cmd_gibbs(observable, *tol_cluster, q.as_deref(), sampling, output),
        Command::Selftest { seed, samples, output } => cmd_selftest(*seed, *samples, output),
    }
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
    match run(cli) {
        Ok(line) => {
            println!("{line}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
