mod commands;
mod config;
mod error;
mod output;
mod selftest;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Command, RunConfig};
use error::CliError;
use output::Sink;

/// Gauge-consistent USC cavity and circuit QED datasets as CSV.
#[derive(Parser, Debug)]
#[command(name = "gaugeqed", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Coupling grid `start:step:end`, or a single value.
    #[arg(long, global = true)]
    eta: Option<String>,
    /// Qubit frequency in units of the cavity frequency.
    #[arg(long, global = true)]
    omega0: Option<String>,
    /// Flux-qubit mixing angle (rad).
    #[arg(long, global = true)]
    theta: Option<String>,
    /// coulomb | dipole | flux | charge | both
    #[arg(long, global = true)]
    gauge: Option<String>,
    /// Fixed Fock cutoff instead of convergence by doubling.
    #[arg(long, global = true)]
    cutoff: Option<String>,
    /// Output CSV path (stdout if absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Ramp duration per switch, in units of 1/ω_c.
    #[arg(long, global = true)]
    ramp: Option<String>,
    /// linear | cosine
    #[arg(long, global = true)]
    shape: Option<String>,
    /// Flat `key = value` file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Extra `key=value` setting (repeatable), e.g. `--set omega_b=0.4`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Cmd {
    /// Lowest energy gaps per gauge.
    Spectrum,
    /// Photodetection rates W and W′ of the first doublet.
    Photodetect,
    /// Ground-state excitation probabilities and dispersive shift.
    Readout,
    /// Ground-state photon number per gauge.
    Vacuum,
    /// Qubit–field entanglement entropy per gauge.
    Entropy,
    /// Inductor and capacitor voltage rates of the flux-qubit circuit.
    Circuit,
    /// Switch dynamics and emitted signal.
    Switch,
    /// Runs the invariant checks.
    Selftest,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Spectrum => Command::Spectrum,
            Cmd::Photodetect => Command::Photodetect,
            Cmd::Readout => Command::Readout,
            Cmd::Vacuum => Command::Vacuum,
            Cmd::Entropy => Command::Entropy,
            Cmd::Circuit => Command::Circuit,
            Cmd::Switch => Command::Switch,
            Cmd::Selftest => Command::Selftest,
        }
    }
}

fn settings(cli: &Cli) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = match &cli.config {
        Some(p) => config::read_file(p)?,
        None => BTreeMap::new(),
    };
    for s in &cli.set {
        let (k, v) = config::parse_pair(s)?;
        map.insert(k, v);
    }
    let flags = [
        ("eta", &cli.eta),
        ("omega0", &cli.omega0),
        ("theta", &cli.theta),
        ("gauge", &cli.gauge),
        ("cutoff", &cli.cutoff),
        ("ramp", &cli.ramp),
        ("shape", &cli.shape),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            map.insert(k.to_string(), v.clone());
        }
    }
    if let Some(out) = &cli.out {
        map.insert("out".into(), out.display().to_string());
    }
    Ok(map)
}

fn init_pool() -> Result<(), CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("GAUGEQED_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Config(format!("GAUGEQED_THREADS = {v:?} is not a positive integer")))?;
        builder = builder.num_threads(n);
    }
    builder
        .build_global()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    init_pool()?;
    gaugeqed::linalg::use_sequential_kernels();
    let command = Command::from(cli.command);
    if command == Command::Selftest {
        return match selftest::run() {
            0 => Ok(()),
            n => Err(CliError::Selftest(n)),
        };
    }
    let cfg = RunConfig::from_map(command, &settings(&cli)?)?;
    let sink = Sink::open(cfg.out.as_deref())?;
    let table = match command {
        Command::Spectrum => commands::spectrum_table(&cfg)?,
        Command::Photodetect => commands::photodetect_table(&cfg)?,
        Command::Readout => commands::readout_table(&cfg)?,
        Command::Vacuum => commands::vacuum_table(&cfg)?,
        Command::Entropy => commands::entropy_table(&cfg)?,
        Command::Circuit => commands::circuit_table(&cfg)?,
        Command::Switch => commands::switch_table(&cfg)?,
        Command::Selftest => unreachable!("handled above"),
    };
    sink.write(&table)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gaugeqed: {e}");
            e.exit_code()
        }
    }
}
