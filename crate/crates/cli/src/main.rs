//! `harvest`: solve, tabulate and simulate transmit-energy allocation for
//! energy-harvesting links.

mod verify;

use std::fmt;
use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use harvest_core::dp_causal::{solve_model, PolicyTable};
use harvest_core::fullsi::{
    closed_form_k2, dp_full_finite_bmax, staircase_waterfill, Mode, DEFAULT_EPS,
};
use harvest_core::si_models::{Scenario, SystemModel};
use harvest_core::sim::{
    run_paired, sweep, with_mean_snr_db, Scheme, SchemeKind, SimReport, DEFAULT_GRID_STEP,
};

#[derive(Parser)]
#[command(
    name = "harvest",
    version,
    about = "Transmit-energy allocation for energy-harvesting links"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal allocation of a scenario with full side information.
    SolveFull(SolveFull),
    /// Closed-form optimum of a two-slot scenario.
    SolveK2(SolveK2),
    /// Solve the causal dynamic program and store its policy table.
    BuildPolicy(BuildPolicy),
    /// Monte Carlo throughput of one or more schemes on common realizations.
    Simulate(Simulate),
    /// One experiment per (K, mean SNR) pair.
    Sweep(SweepArgs),
    /// Cross-check the solvers against the brute-force references.
    Verify(verify::VerifyArgs),
}

#[derive(Args)]
struct SolveFull {
    #[arg(long)]
    scenario: PathBuf,
    /// Water-filling tolerance on the allocated energy.
    #[arg(long, default_value_t = DEFAULT_EPS)]
    eps: f64,
    /// Battery grid step, required when the capacity is finite.
    #[arg(long)]
    grid_step: Option<f64>,
    /// Result file; JSON goes to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveK2 {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BuildPolicy {
    #[arg(long)]
    model: PathBuf,
    #[arg(long = "K")]
    horizon: usize,
    #[arg(long, default_value_t = DEFAULT_GRID_STEP)]
    grid_step: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct Simulate {
    #[arg(long)]
    model: PathBuf,
    #[arg(long = "K")]
    horizon: usize,
    #[arg(long)]
    runs: usize,
    #[arg(long)]
    seed: u64,
    /// Schemes to run; all of them when omitted.
    #[arg(long = "scheme", value_parser = parse_scheme)]
    schemes: Vec<SchemeKind>,
    /// Replace the mean SNR of an AWGN or Rayleigh model (dB).
    #[arg(long)]
    snr_db: Option<f64>,
    /// Precomputed causal-dp table; solved on the fly when omitted.
    #[arg(long)]
    policy: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_GRID_STEP)]
    grid_step: f64,
    /// CSV file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Optional JSON copy of the table.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, value_parser = parse_scheme)]
    scheme: SchemeKind,
    #[arg(long = "K", value_delimiter = ',', required = true)]
    horizons: Vec<usize>,
    #[arg(
        long,
        value_delimiter = ',',
        required = true,
        allow_negative_numbers = true
    )]
    snr_db: Vec<f64>,
    #[arg(long)]
    runs: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_GRID_STEP)]
    grid_step: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: Option<PathBuf>,
}

fn parse_scheme(s: &str) -> std::result::Result<SchemeKind, String> {
    s.parse().map_err(|e: harvest_core::Error| e.to_string())
}

/// Bad input that is not a library error: missing files, bad flags.
#[derive(Debug)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

/// A verification found results outside tolerance.
#[derive(Debug)]
pub struct ToleranceError(pub usize);

impl fmt::Display for ToleranceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} checks outside tolerance", self.0)
    }
}

impl std::error::Error for ToleranceError {}

fn input_error(msg: impl Into<String>) -> anyhow::Error {
    InputError(msg.into()).into()
}

pub fn check_input(path: &Path) -> Result<()> {
    if !path.is_file() {
        return Err(input_error(format!(
            "input file {} not found",
            path.display()
        )));
    }
    Ok(())
}

pub fn check_output(path: &Path) -> Result<()> {
    if path.is_dir() {
        return Err(input_error(format!(
            "output path {} is a directory",
            path.display()
        )));
    }
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() && !dir.is_dir() => Err(input_error(format!(
            "output directory {} does not exist",
            dir.display()
        ))),
        _ => Ok(()),
    }
}

fn load_scenario(path: &Path) -> Result<Scenario> {
    Scenario::load(path).with_context(|| format!("reading scenario {}", path.display()))
}

fn load_model(path: &Path) -> Result<SystemModel> {
    SystemModel::load(path).with_context(|| format!("reading model {}", path.display()))
}

fn write_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(path) => std::fs::write(path, text + "\n")
            .with_context(|| format!("writing {}", path.display()))?,
        None => println!("{text}"),
    }
    Ok(())
}

fn write_csv(rows: &[SimReport], out: Option<&Path>) -> Result<()> {
    let sink: Box<dyn Write> = match out {
        Some(path) => {
            Box::new(File::create(path).with_context(|| format!("writing {}", path.display()))?)
        }
        None => Box::new(io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(sink);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct FiniteSolution {
    allocation: Vec<f64>,
    throughput_bits: f64,
}

fn solve_full(a: SolveFull) -> Result<()> {
    check_input(&a.scenario)?;
    if let Some(out) = &a.out {
        check_output(out)?;
    }
    let sc = load_scenario(&a.scenario)?;
    let bits = if sc.capacity.is_infinite() {
        let r = staircase_waterfill(&sc, a.eps)?;
        write_json(&r, a.out.as_deref())?;
        r.throughput_bits
    } else {
        let step = a
            .grid_step
            .ok_or_else(|| input_error("a finite battery needs --grid-step"))?;
        let allocation = dp_full_finite_bmax(&sc, step)?;
        sc.replay(&allocation)?;
        let throughput_bits = sc.throughput(&allocation);
        write_json(
            &FiniteSolution {
                allocation,
                throughput_bits,
            },
            a.out.as_deref(),
        )?;
        throughput_bits
    };
    if a.out.is_some() {
        println!("throughput_bits {bits}");
    }
    Ok(())
}

#[derive(Serialize)]
struct K2Output {
    t1: f64,
    mode: Mode,
    allocation: Vec<f64>,
    throughput_bits: f64,
}

fn solve_k2(a: SolveK2) -> Result<()> {
    check_input(&a.scenario)?;
    if let Some(out) = &a.out {
        check_output(out)?;
    }
    let sc = load_scenario(&a.scenario)?;
    let s = closed_form_k2(&sc)?;
    let (allocation, throughput_bits) = s.allocation(&sc);
    write_json(
        &K2Output {
            t1: s.t1,
            mode: s.mode,
            allocation,
            throughput_bits,
        },
        a.out.as_deref(),
    )?;
    if a.out.is_some() {
        println!("throughput_bits {throughput_bits}");
    }
    Ok(())
}

fn build_policy(a: BuildPolicy) -> Result<()> {
    check_input(&a.model)?;
    check_output(&a.out)?;
    let model = load_model(&a.model)?;
    let (_, table) = solve_model(&model.processes, &model.battery, a.horizon, a.grid_step)?;
    table
        .save(&a.out)
        .with_context(|| format!("writing {}", a.out.display()))?;
    println!(
        "K={} battery points={} states={} written to {}",
        a.horizon,
        table.grid.battery.len(),
        table.grid.total_states(),
        a.out.display()
    );
    Ok(())
}

fn simulate(a: Simulate) -> Result<()> {
    check_input(&a.model)?;
    if let Some(p) = &a.policy {
        check_input(p)?;
    }
    for out in [&a.out, &a.json].into_iter().flatten() {
        check_output(out)?;
    }
    let mut system = load_model(&a.model)?;
    if let Some(db) = a.snr_db {
        system = with_mean_snr_db(&system, db)?;
    }
    let kinds = if a.schemes.is_empty() {
        SchemeKind::ALL.to_vec()
    } else {
        a.schemes.clone()
    };
    let mut schemes = Vec::with_capacity(kinds.len());
    for kind in kinds {
        let scheme = match (&a.policy, kind) {
            (Some(path), SchemeKind::CausalDp) => Scheme::CausalDp(Box::new(
                PolicyTable::load(path)
                    .with_context(|| format!("reading policy {}", path.display()))?,
            )),
            _ => Scheme::prepare(kind, &system, a.horizon, a.grid_step)?,
        };
        schemes.push(scheme);
    }
    let rows = run_paired(&system, &schemes, a.horizon, a.runs, a.seed)?.reports();
    write_csv(&rows, a.out.as_deref())?;
    if let Some(path) = &a.json {
        write_json(&rows, Some(path))?;
    }
    Ok(())
}

fn run_sweep(a: SweepArgs) -> Result<()> {
    check_input(&a.model)?;
    for out in [&a.out, &a.json].into_iter().flatten() {
        check_output(out)?;
    }
    let system = load_model(&a.model)?;
    let rows = sweep(
        &system,
        a.scheme,
        &a.horizons,
        &a.snr_db,
        a.runs,
        a.seed,
        a.grid_step,
    )?;
    write_csv(&rows, a.out.as_deref())?;
    if let Some(path) = &a.json {
        write_json(&rows, Some(path))?;
    }
    Ok(())
}

/// 1 for numerical failures, 2 for invalid input.
fn exit_code(err: &anyhow::Error) -> u8 {
    use harvest_core::Error as E;
    if err.downcast_ref::<ToleranceError>().is_some() {
        return 1;
    }
    if err.downcast_ref::<InputError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<E>() {
        Some(E::Infeasible { .. }) => 1,
        Some(_) => 2,
        None => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::SolveFull(a) => solve_full(a),
        Command::SolveK2(a) => solve_k2(a),
        Command::BuildPolicy(a) => build_policy(a),
        Command::Simulate(a) => simulate(a),
        Command::Sweep(a) => run_sweep(a),
        Command::Verify(a) => verify::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
