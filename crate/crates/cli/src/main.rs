//! `adigate` — run adiabatic gate evolutions, runtime sweeps, ancilla Bloch
//! trajectories, and whole circuits from the command line, emitting
//! deterministic JSON/CSV artifacts.
//!
//! Exit codes: 0 success, 2 parse error (flags or malformed JSON), 3
//! validation error (schema/field/range problems, reported with a field
//! path), 4 runtime error (the evolution itself failed or an artifact could
//! not be written).

mod circuit_file;
mod commands;

use clap::{Args, Parser, Subcommand};

/// Parse → validate → run error taxonomy; each variant carries the process
/// exit code mandated for it.
#[derive(Debug)]
pub enum CliError {
    Parse(String),
    Validation(String),
    Runtime(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Runtime(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Parse(m) | CliError::Validation(m) | CliError::Runtime(m) => m,
        }
    }
}

impl From<adigate::Error> for CliError {
    fn from(e: adigate::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "adigate",
    version,
    about = "Adiabatic gate simulator: controlled evolutions that realize quantum gates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one adiabatic gate and write a JSON report
    Gate(GateCmd),
    /// Sweep the runtime and write a CSV of diabatic errors and fidelities
    Sweep(SweepCmd),
    /// Export the instantaneous ancilla Bloch path of both gate branches as CSV
    Trajectory(TrajectoryCmd),
    /// Execute a circuit file as a chain of adiabatic gates
    Circuit(CircuitCmd),
}

/// Evolution parameters shared by every subcommand.
#[derive(Args)]
struct RunArgs {
    /// Total evolution time per gate
    #[arg(long, default_value_t = 500.0)]
    runtime: f64,
    /// Propagator slices (default: 200 per unit time)
    #[arg(long)]
    steps: Option<usize>,
    /// Write the artifact here instead of stdout
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

/// Description of a single gate, shared by `gate`, `sweep` and `trajectory`.
#[derive(Args)]
struct GateArgs {
    /// Gate name: NOT, X, H, CNOT, CPHASE, RZ, or RN
    #[arg(default_value = "NOT")]
    name: String,
    /// Rotation axis for RN: "x", "y", "z", or "fx,fy,fz"
    #[arg(long)]
    axis: Option<String>,
    /// Rotation phase (radians) for CPHASE/RZ/RN
    #[arg(long)]
    phi: Option<f64>,
    /// Final ramp angle in [0, pi] (default: pi)
    #[arg(long)]
    theta_f: Option<f64>,
}

#[derive(Args)]
struct GateCmd {
    #[command(flatten)]
    gate: GateArgs,
    #[command(flatten)]
    run: RunArgs,
    /// RNG seed for the dephasing demo
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Dephasing kick strength; enables the noise section of the report
    #[arg(long)]
    noise_strength: Option<f64>,
    /// Dephasing trials to average
    #[arg(long, default_value_t = 200)]
    trials: usize,
}

#[derive(Args)]
struct SweepCmd {
    #[command(flatten)]
    gate: GateArgs,
    /// Comma-separated runtimes, e.g. "50,100,200,400"
    #[arg(long, default_value = "50,100,200,400")]
    sweep: String,
    /// Propagator slices per run (default: 200 per unit time of each row)
    #[arg(long)]
    steps: Option<usize>,
    /// Record wall-clock milliseconds per row (off by default so repeated
    /// runs stay byte-identical)
    #[arg(long)]
    timing: bool,
    /// Write the artifact here instead of stdout
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct TrajectoryCmd {
    #[command(flatten)]
    gate: GateArgs,
    #[command(flatten)]
    run: RunArgs,
    /// Sample points per branch
    #[arg(long, default_value_t = 201)]
    samples: usize,
}

#[derive(Args)]
struct CircuitCmd {
    /// Circuit file (JSON)
    path: std::path::PathBuf,
    #[command(flatten)]
    run: RunArgs,
}

fn main() {
    // Clap itself exits 2 on malformed flags, matching the parse-error code.
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gate(cmd) => commands::cmd_gate(cmd),
        Command::Sweep(cmd) => commands::cmd_sweep(cmd),
        Command::Trajectory(cmd) => commands::cmd_trajectory(cmd),
        Command::Circuit(cmd) => commands::cmd_circuit(cmd),
    };
    if let Err(e) = result {
        eprintln!("error: {}", e.message());
        std::process::exit(e.exit_code());
    }
}
