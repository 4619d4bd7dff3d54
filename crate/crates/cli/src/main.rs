//! Command-line driver: classical reference runs, collision-circuit
//! verification, invariant counting, phase-estimation spectra, the
//! sublinear streaming demo and the encoding no-go certificate.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error.

mod commands;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "qlgca", version, about = "Quantum lattice-gas cellular automata toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Runs a classical reference simulation, writing the per-step
    /// lattice trajectory and the conserved-quantity time series.
    SimulateClassical {
        /// Model: d1q3, fhp or d1q2.
        #[arg(long)]
        model: String,
        /// Initial lattice file (text format); defaults to a built-in
        /// initial condition per model.
        #[arg(long)]
        lattice_file: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Sites for a random/default 1D lattice.
        #[arg(long, default_value_t = 64)]
        sites: usize,
        /// Dimensions for a random FHP lattice.
        #[arg(long, default_value_t = 32)]
        width: usize,
        #[arg(long, default_value_t = 32)]
        height: usize,
        /// Occupation probability per bit for random initial lattices.
        #[arg(long, default_value_t = 0.3)]
        fill: f64,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutputFormat,
    },
    /// Verifies a collision circuit against its rule over every basis
    /// input and writes the probability matrix.
    VerifyCircuit {
        /// Circuit name: d1q3-qpe or fhp-b234.
        #[arg(long)]
        circuit: String,
        /// Optional circuit text file overriding the built-in gates
        /// (verified against the named rule).
        #[arg(long)]
        circuit_file: Option<PathBuf>,
        /// Writes the named built-in circuit in text form and exits.
        #[arg(long)]
        export_circuit: Option<PathBuf>,
        /// Output CSV path for the probability matrix.
        #[arg(long)]
        out: PathBuf,
    },
    /// Counts conserved observables of a collision unitary.
    Invariants {
        /// Model: d1q3 or fhp.
        #[arg(long)]
        model: String,
        /// FHP collision families, comma separated (b2,b3,b4).
        #[arg(long, default_value = "b2,b3,b4")]
        collisions: String,
        /// FHP operator variant: the stochastic unitary collision or the
        /// deterministic rotation permutation.
        #[arg(long, default_value = "stochastic")]
        operator: String,
        /// Output JSON path.
        #[arg(long)]
        out: PathBuf,
        /// Optional CSV dump of the full conjugation table.
        #[arg(long)]
        evolution_table: Option<PathBuf>,
    },
    /// Phase-estimation spectra for a classical quantity.
    Qpe {
        #[arg(long)]
        model: String,
        /// Quantity: mass, px or py.
        #[arg(long, default_value = "mass")]
        quantity: String,
        #[arg(long, default_value_t = 3)]
        ancillas: usize,
        /// Phase convention: direct or dyadic.
        #[arg(long, default_value = "direct")]
        convention: String,
        /// Output CSV path for the per-state spectra; the aggregated
        /// histogram lands next to it with a `_hist.csv` suffix.
        #[arg(long)]
        out: PathBuf,
    },
    /// Infeasibility certificate for orthogonal cell encodings under
    /// walk streaming.
    Nogo {
        #[arg(long, default_value_t = 1000)]
        restarts: usize,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        /// Output JSON path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Sublinear-space D1Q2 streaming: per-step density profiles from
    /// the walk circuit, cross-checked against the classical reference.
    D1q2 {
        /// Space qubits (lattice has 2^n cells).
        #[arg(long, default_value_t = 6)]
        n_space: usize,
        #[arg(long, default_value_t = 24)]
        steps: usize,
        /// Shots per step for the sampled column (0 = exact only).
        #[arg(long, default_value_t = 0)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Initial lattice file (d1q2 text format); defaults to a delta.
        #[arg(long)]
        lattice_file: Option<PathBuf>,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
}

pub enum CliError {
    Input(String),
    Verification(String),
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError::Input(message.into())
    }
}

impl<E: std::error::Error> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::Input(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::SimulateClassical {
            model,
            lattice_file,
            steps,
            seed,
            sites,
            width,
            height,
            fill,
            out,
            format,
        } => commands::simulate_classical(
            &model,
            lattice_file.as_deref(),
            steps,
            seed,
            sites,
            (width, height),
            fill,
            &out,
            format,
        ),
        Command::VerifyCircuit {
            circuit,
            circuit_file,
            export_circuit,
            out,
        } => commands::verify_circuit(
            &circuit,
            circuit_file.as_deref(),
            export_circuit.as_deref(),
            &out,
        ),
        Command::Invariants {
            model,
            collisions,
            operator,
            out,
            evolution_table,
        } => commands::invariants(
            &model,
            &collisions,
            &operator,
            &out,
            evolution_table.as_deref(),
        ),
        Command::Qpe {
            model,
            quantity,
            ancillas,
            convention,
            out,
        } => commands::qpe(&model, &quantity, ancillas, &convention, &out),
        Command::Nogo { restarts, seed, out } => commands::nogo(restarts, seed, &out),
        Command::D1q2 {
            n_space,
            steps,
            shots,
            seed,
            lattice_file,
            out,
        } => commands::d1q2(n_space, steps, shots, seed, lattice_file.as_deref(), &out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Verification(message)) => {
            eprintln!("verification failed: {message}");
            ExitCode::from(1)
        }
        Err(CliError::Input(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
