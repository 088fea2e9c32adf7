//! `pstar-gns`: command-line driver for the partial *-algebra toolkit.
//!
//! Every subcommand loads a JSON algebra document, runs one part of the
//! pipeline and prints a report, as text or (with `--json`) as JSON.
//! Exit codes: 0 when every asserted invariant holds, 1 when a mathematical
//! check fails, 2 on unreadable or malformed input, 3 when the algebra fails
//! validation.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pstar_gns::regularity::{DEFAULT_SAMPLES, DEFAULT_SEED};

mod commands;
mod report;

#[derive(Parser, Debug)]
#[command(name = "pstar-gns", version, about = "GNS construction and form decomposition for finite-dimensional partial *-algebras")]
struct Cli {
    /// Numerical tolerance for every comparison (overrides the document).
    #[arg(long, global = true, env = "PSTAR_TOL")]
    tol: Option<f64>,
    /// Print the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the partial *-algebra axioms.
    Validate {
        /// Algebra document (JSON).
        file: PathBuf,
    },
    /// Left/right multipliers of a basis element, or the universal multipliers.
    Multipliers {
        /// Algebra document (JSON).
        file: PathBuf,
        /// Basis element name, e.g. E12.
        #[arg(long, conflicts_with = "universal")]
        elem: Option<String>,
        /// Report RA and LA instead of one element's multipliers.
        #[arg(long)]
        universal: bool,
    },
    /// Representability of a functional on a subspace and its GNS representation.
    Gns {
        /// Algebra document (JSON).
        file: PathBuf,
        /// Functional name from the document.
        #[arg(long)]
        functional: String,
        /// Subspace name from the document, or one of all, RA, LA.
        #[arg(long)]
        subspace: String,
    },
    /// Split a positive form into its ips part and singular part.
    Decompose {
        /// Algebra document (JSON).
        file: PathBuf,
        /// Form name from the document.
        #[arg(long)]
        form: String,
        /// Pre-core subspace name, or one of all, RA, LA.
        #[arg(long)]
        precore: String,
    },
    /// Pre-core conditions and the core test for a form and subspace.
    CheckCore {
        /// Algebra document (JSON).
        file: PathBuf,
        /// Form name from the document.
        #[arg(long)]
        form: String,
        /// Subspace name from the document, or one of all, RA, LA.
        #[arg(long)]
        subspace: String,
    },
    /// Quasi-regularity of the representation of an ips form, cross-checked
    /// against cores of the compressed forms.
    Regularity(RegularityArgs),
    /// Write the shipped example documents.
    Fixtures {
        /// Output directory.
        #[arg(long)]
        emit: PathBuf,
    },
}

#[derive(Args, Debug)]
struct RegularityArgs {
    /// Algebra document (JSON).
    file: PathBuf,
    /// Form name from the document.
    #[arg(long)]
    form: String,
    /// Pre-core subspace name, or one of all, RA, LA.
    #[arg(long)]
    precore: String,
    /// Random vectors tried when no certificate is found.
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let args: Vec<String> = std::env::args().skip(1).collect();
    let ctx = commands::Context { tol: cli.tol, seed: cli.seed, args };
    let report = match &cli.command {
        Command::Validate { file } => commands::validate(&ctx, file),
        Command::Multipliers { file, elem, universal: _ } => commands::multipliers(&ctx, file, elem.as_deref()),
        Command::Gns { file, functional, subspace } => commands::gns(&ctx, file, functional, subspace),
        Command::Decompose { file, form, precore } => commands::decompose(&ctx, file, form, precore),
        Command::CheckCore { file, form, subspace } => commands::check_core(&ctx, file, form, subspace),
        Command::Regularity(r) => commands::regularity(&ctx, &r.file, &r.form, &r.precore, r.samples),
        Command::Fixtures { emit } => commands::fixtures(&ctx, emit),
    };
    if cli.json {
        print!("{}", report.to_json());
    } else {
        print!("{}", report.to_text());
    }
    if let Some(err) = &report.error {
        eprintln!("error: {err}");
    }
    ExitCode::from(report.status.exit_code())
}
