use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rotorlab_cli::{load_config, run, write_output, CliError, Command, Overrides};

#[derive(Parser)]
#[command(
    name = "rotorlab",
    version,
    about = "Fidelity experiments on the quantum kicked rotor"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Fidelity of one quasimomentum versus kick number.
    SingleBeta(Common),
    /// Saturation curve and finite-N ensemble fidelity versus kick difference.
    Fig2Main(Common),
    /// Ensemble fidelity versus kick number, resonant and detuned.
    Fig2Inset(Common),
    /// Ramsey fringe and the fidelity read off its visibility.
    Ramsey(Common),
    /// Mean kinetic energy versus kick number.
    Energy(Common),
}

#[derive(Args)]
struct Common {
    /// Experiment manifest (TOML); omitted fields take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<String>,
    /// Worker threads (0: one per core).
    #[arg(long)]
    threads: Option<usize>,
    /// Seed for pseudorandom ensembles.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    n_kicks: Option<u64>,
    #[arg(long)]
    dk: Option<f64>,
    #[arg(long)]
    k1: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    epsilon: Option<f64>,
    #[arg(long)]
    ell: Option<u32>,
    #[arg(long)]
    count: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    n0: Option<i64>,
    #[arg(long)]
    phases: Option<usize>,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            out: self.out.clone(),
            threads: self.threads,
            seed: self.seed,
            n_kicks: self.n_kicks,
            dk: self.dk,
            k1: self.k1,
            beta: self.beta,
            epsilon: self.epsilon,
            ell: self.ell,
            count: self.count,
            n0: self.n0,
            phases: self.phases,
        }
    }
}

fn main_inner(cli: Cli) -> Result<(), CliError> {
    let (command, common) = match &cli.command {
        Sub::SingleBeta(c) => (Command::SingleBeta, c),
        Sub::Fig2Main(c) => (Command::Fig2Main, c),
        Sub::Fig2Inset(c) => (Command::Fig2Inset, c),
        Sub::Ramsey(c) => (Command::Ramsey, c),
        Sub::Energy(c) => (Command::Energy, c),
    };
    let config = load_config(common.config.as_deref(), &common.overrides(), command)?;
    let table = run(&config)?;
    write_output(&config, &table)
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("rotorlab: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
