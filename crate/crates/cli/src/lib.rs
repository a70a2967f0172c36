//! Command-line front end for `weyl-core`: JSON matrix and circuit
//! documents, canonical analysis, synthesis, mirror rewriting, region
//! queries and verification sweeps.

pub mod angle;
mod commands;
pub mod doc;

use std::fmt;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

pub use commands::run;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_NON_UNITARY: i32 = 3;
pub const EXIT_RESIDUAL: i32 = 4;
pub const EXIT_REGION: i32 = 5;
pub const EXIT_INDEX: i32 = 6;

/// Default pass/fail threshold on synthesis and verification residuals.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Unitarity tolerance applied when reading documents.
pub const UNITARITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    pub fn parse(message: impl Into<String>) -> Self {
        Self::new(EXIT_PARSE, message)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<weyl_core::Error> for CliError {
    fn from(e: weyl_core::Error) -> Self {
        use weyl_core::Error as E;
        let code = match e {
            E::NonUnitaryInput { .. } => EXIT_NON_UNITARY,
            E::NonFinite | E::MalformedCircuit(_) | E::DomainError(_) => EXIT_PARSE,
            E::Infeasible(_) | E::OutOfRegion { .. } | E::UnsupportedBase(_) => EXIT_REGION,
            E::IndexOutOfRange { .. } => EXIT_INDEX,
            E::ConstructionMismatch(_) => EXIT_RESIDUAL,
        };
        Self::new(code, e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "weyl", version, about = "Canonical forms and simulation circuits for two-qubit gates")]
pub struct Cli {
    /// Skip the unitarity check when reading matrix documents.
    #[arg(long, global = true)]
    pub allow_nonunitary: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    /// Matrix distance up to a global phase.
    Exact,
    /// Distance between canonical coordinates.
    Local,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Necessity,
    Roundtrip,
    Crossmethod,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Canonical coordinates, local factors and invariant of a 4×4 gate.
    Canon {
        file: PathBuf,
        /// Print a JSON document instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Build a circuit over a base gate that implements a target gate.
    Synth {
        /// Target matrix document.
        #[arg(long, conflicts_with = "coords", required_unless_present = "coords")]
        target: Option<PathBuf>,
        /// Target canonical coordinates `c1,c2,c3` (radians or multiples of pi).
        #[arg(long, allow_hyphen_values = true)]
        coords: Option<String>,
        /// `controlled:γ`, `supercontrolled:α2`, `mirrored:γ` or `cnot`. Decimals
        /// within 5e-5 of a multiple of pi/16 are read as that multiple.
        #[arg(long)]
        base: String,
        /// Number of base-gate applications; defaults to the universal budget.
        #[arg(long)]
        n: Option<usize>,
        /// Write the circuit here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mirror a gate, or rewrite one application of a circuit as its mirror.
    Mirror {
        #[arg(long, requires = "index", conflicts_with = "gate", required_unless_present = "gate")]
        circuit: Option<PathBuf>,
        #[arg(long)]
        index: Option<usize>,
        #[arg(long)]
        gate: Option<PathBuf>,
    },
    /// Compare a circuit with a target matrix.
    Verify {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long, value_enum, default_value = "exact")]
        mode: ModeArg,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        json: bool,
    },
    /// Describe the region reachable with `n` controlled gates.
    Reach {
        #[arg(long)]
        base: String,
        #[arg(long)]
        n: usize,
        /// Doubled coordinates `h1,h2,h3` of a target `U_d(h/2)`.
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
    },
    /// Run a seeded verification suite and write its report.
    Sweep {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses arguments, runs the command and returns the exit code.
pub fn main_with(args: impl IntoIterator<Item = String>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli, out, err),
        Err(e) if e.use_stderr() => {
            let _ = write!(err, "{e}");
            EXIT_PARSE
        }
        // --help and --version
        Err(e) => {
            let _ = write!(out, "{e}");
            EXIT_OK
        }
    }
}
