//! cbelab: Monte Carlo experiments on circular β-ensembles from the
//! command line.
//!
//! Every run produces self-describing JSONL records (one experiment per
//! line) or a flat CSV projection. Estimates are deterministic in
//! (seed, replicas) and independent of --threads.

mod params;
mod run;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use std::io::Write;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "cbelab",
    version,
    about = "Circular beta-ensemble Monte Carlo laboratory",
    propagate_version = true
)]
struct Cli {
    /// Worker threads (defaults to CBELAB_THREADS or all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Output path; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format.
    #[arg(long, global = true, default_value = "jsonl")]
    format: Format,

    /// JSON file with experiment parameters, overriding the flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Format {
    Jsonl,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Exact constants: 𝒴, F, 𝔠, Z and Morris moments as JSON.
    Constants(params::ConstantsArgs),
    /// Brute-force torus quadrature of a CβE joint moment (N ≤ 4).
    Oracle(params::OracleArgs),
    /// Direct Monte Carlo of the moments of moments M_N(k;s).
    MomDirect(params::MomDirectArgs),
    /// Growth-exponent fit of M_N(k;s) over a ladder of sizes.
    MomScaling(params::MomScalingArgs),
    /// Normalized M_N(k;s) against the limit formula at finite N.
    MomLimit(params::MomLimitArgs),
    /// Point-process correlations: binned SDE route vs constant × proxy.
    CorrCompare(params::CorrCompareArgs),
    /// Joint-moment bound: estimate/shape ratios over an (N, x) grid.
    BoundVerify(params::BoundVerifyArgs),
    /// Pair-correlation comparison identity at one x.
    QuValko(params::QuValkoArgs),
    /// Simulate Sine_β / HP point configurations and bin correlations.
    SineSim(params::SineSimArgs),
    /// Evaluate the principal-value product on simulated configurations.
    ZetaEval(params::ZetaEvalArgs),
    /// Re-run a stored experiment record (first JSONL line of the file).
    Replay(params::ReplayArgs),
}

fn main() {
    let cli = Cli::parse();
    std::process::exit(match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            let reason = serde_json::json!({ "error": format!("{e:#}") });
            eprintln!("{reason}");
            2
        }
    });
}

fn thread_pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    let n = threads
        .or_else(|| std::env::var("CBELAB_THREADS").ok().and_then(|v| v.parse().ok()))
        .unwrap_or_else(num_threads_default);
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .context("building thread pool")
}

fn num_threads_default() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn dispatch(cli: Cli) -> Result<i32> {
    let pool = thread_pool(cli.threads)?;
    let config_json: Option<serde_json::Value> = match &cli.config {
        Some(path) => Some(
            serde_json::from_str(
                &std::fs::read_to_string(path)
                    .with_context(|| format!("reading config {path:?}"))?,
            )
            .context("parsing config JSON")?,
        ),
        None => None,
    };

    let (name, params) = match &cli.command {
        Command::Constants(a) => ("constants", a.to_params(&config_json)?),
        Command::Oracle(a) => ("oracle", a.to_params(&config_json)?),
        Command::MomDirect(a) => ("mom-direct", a.to_params(&config_json)?),
        Command::MomScaling(a) => ("mom-scaling", a.to_params(&config_json)?),
        Command::MomLimit(a) => ("mom-limit", a.to_params(&config_json)?),
        Command::CorrCompare(a) => ("corr-compare", a.to_params(&config_json)?),
        Command::BoundVerify(a) => ("bound-verify", a.to_params(&config_json)?),
        Command::QuValko(a) => ("qu-valko", a.to_params(&config_json)?),
        Command::SineSim(a) => ("sine-sim", a.to_params(&config_json)?),
        Command::ZetaEval(a) => ("zeta-eval", a.to_params(&config_json)?),
        Command::Replay(a) => {
            let text = std::fs::read_to_string(&a.record)
                .with_context(|| format!("reading record {:?}", a.record))?;
            let first = text.lines().next().context("empty record file")?;
            let rec: cbelab::experiments::ExperimentRecord =
                serde_json::from_str(first).context("parsing record")?;
            let name: &'static str = run::intern_name(&rec.experiment)?;
            let record = pool.install(|| run::run_named(name, rec.params.clone()))?;
            return emit(&cli, record);
        }
    };

    let record = pool.install(|| run::run_named(name, params))?;
    emit(&cli, record)
}

fn emit(cli: &Cli, record: cbelab::experiments::ExperimentRecord) -> Result<i32> {
    let gate_failure = run::gate_failure(&record);
    let body = match cli.format {
        Format::Jsonl => {
            let mut s = serde_json::to_string(&record)?;
            s.push('\n');
            s
        }
        Format::Csv => run::to_csv(&record),
    };
    match &cli.out {
        Some(path) => {
            let mut f = std::fs::File::create(path)
                .with_context(|| format!("creating output {path:?}"))?;
            f.write_all(body.as_bytes())?;
        }
        None => {
            print!("{body}");
        }
    }
    if let Some(reason) = gate_failure {
        let msg = serde_json::json!({ "gate_failure": reason, "experiment": record.experiment });
        eprintln!("{msg}");
        return Ok(3);
    }
    Ok(0)
}
