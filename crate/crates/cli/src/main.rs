//! `qfm`: build mapped Hamiltonians, transpile and emulate Trotter circuits,
//! compute Green's functions and resource estimates.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use qfm_core::resources::Schedule;

use crate::config::{parse_pairs, Observable, RunConfig};
use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(name = "qfm", version, about = "Qudit fermionic mapping toolkit for the Fermi-Hubbard model")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Build the mapped Hamiltonian and check its spectrum
    Map,
    /// Synthesize the hopping terms and emit a Trotter circuit
    Transpile,
    /// Trotterized populations against the exact reference
    Evolve,
    /// Lesser/retarded Green's functions and spectral functions
    Greens,
    /// Gate counts and step-duration estimates
    Resources,
    /// Run the invariant suite
    Validate,
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
enum ScheduleArg {
    #[default]
    Sequential,
    Parallel,
}

#[derive(Args, Debug, Default)]
struct Flags {
    /// chain:L or ladder:2xN
    #[arg(long, global = true)]
    geometry: Option<String>,
    #[arg(long = "J", global = true, allow_negative_numbers = true)]
    j: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    v: Option<f64>,
    /// Comma-separated site tokens from {0, u, d, ud}
    #[arg(long, global = true)]
    init: Option<String>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    tau_start: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    tau_stop: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    tau_step: Option<f64>,
    /// Trotter steps n
    #[arg(long, global = true)]
    steps: Option<usize>,
    /// "i,j,spin;…"
    #[arg(long, global = true)]
    pairs: Option<String>,
    #[arg(long, global = true, value_enum, value_delimiter = ',')]
    observables: Option<Vec<ObservableArg>>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    eta: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    tmax: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    dt: Option<f64>,
    /// Inverse temperature of the retarded Green's function (inf allowed)
    #[arg(long, global = true)]
    beta: Option<f64>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// JSON run configuration; flags override its fields
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Include the qubit zig-zag baseline in resource reports
    #[arg(long, global = true)]
    baseline: bool,
    #[arg(long, global = true, value_enum, default_value = "sequential")]
    schedule: ScheduleArg,
    /// Two-qudit gate duration in ns for the duration estimate
    #[arg(long, global = true, default_value_t = 0.0)]
    two_qudit_ns: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
enum ObservableArg {
    Populations,
    LesserGf,
    RetardedGf,
    Spectral,
}

impl From<ObservableArg> for Observable {
    fn from(o: ObservableArg) -> Self {
        match o {
            ObservableArg::Populations => Observable::Populations,
            ObservableArg::LesserGf => Observable::LesserGf,
            ObservableArg::RetardedGf => Observable::RetardedGf,
            ObservableArg::Spectral => Observable::Spectral,
        }
    }
}

fn build_config(flags: &Flags) -> Result<RunConfig, CliError> {
    let mut cfg = match &flags.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(g) = &flags.geometry {
        cfg.geometry = g.clone();
    }
    if let Some(j) = flags.j {
        cfg.j = j;
    }
    if let Some(v) = flags.v {
        cfg.v = v;
    }
    if let Some(init) = &flags.init {
        cfg.init = Some(init.clone());
    }
    if let Some(x) = flags.tau_start {
        cfg.tau_grid.start = x;
    }
    if let Some(x) = flags.tau_stop {
        cfg.tau_grid.stop = x;
    }
    if let Some(x) = flags.tau_step {
        cfg.tau_grid.step = x;
    }
    if let Some(n) = flags.steps {
        cfg.trotter_steps = n;
    }
    if let Some(p) = &flags.pairs {
        cfg.gf_pairs = Some(parse_pairs(p)?);
    }
    if let Some(obs) = &flags.observables {
        cfg.observables = obs.iter().map(|&o| o.into()).collect();
    }
    if let Some(x) = flags.eta {
        cfg.fourier.eta = x;
    }
    if let Some(x) = flags.tmax {
        cfg.fourier.t_max = x;
    }
    if let Some(x) = flags.dt {
        cfg.fourier.dt = x;
    }
    if let Some(b) = flags.beta {
        cfg.beta = b;
    }
    if let Some(out) = &flags.out {
        cfg.output_dir = out.clone();
    }
    if let Some(seed) = flags.seed {
        cfg.seed = seed;
    }
    cfg.baseline |= flags.baseline;
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = build_config(&cli.flags)?;
    match cli.command {
        Command::Map => commands::cmd_map(&cfg),
        Command::Transpile => commands::cmd_transpile(&cfg),
        Command::Evolve => commands::cmd_evolve(&cfg),
        Command::Greens => commands::cmd_greens(&cfg),
        Command::Resources => {
            let schedule = match cli.flags.schedule {
                ScheduleArg::Sequential => Schedule::Sequential,
                ScheduleArg::Parallel => Schedule::Parallel,
            };
            commands::cmd_resources(&cfg, schedule, cli.flags.two_qudit_ns)
        }
        Command::Validate => commands::cmd_validate(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
