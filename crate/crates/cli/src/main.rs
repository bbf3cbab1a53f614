//! `kcollapse` command-line front end.
//!
//! Exit codes: 0 success or condition holds, 1 condition fails (witness printed),
//! 2 usage, parse or precondition error, 3 internal invariant breach.

mod commands;
mod params;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "kcollapse", version, about = "Verify, bound and construct k-collapsing families")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check a condition on a family read from JSON.
    Verify {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_enum, default_value_t = ConditionArg::KCollapsing)]
        condition: ConditionArg,
        #[command(flatten)]
        scan: ScanArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Known bounds on the largest k-collapsing family in dimension d.
    Bound {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        d: usize,
        /// Hadamard exponent; the best one is chosen when absent.
        #[arg(long)]
        p: Option<u32>,
        /// Every bound, applicable or not.
        #[arg(long, conflicts_with = "best")]
        all: bool,
        /// Aggregated best bounds (the default).
        #[arg(long)]
        best: bool,
        /// `dsq=D^2` (Banach-Mazur distance squared), `lambdasq=lambda^2`.
        #[arg(long)]
        params: Option<String>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Reproduces the table of gamma_k and the bound bases.
    Table1 {
        #[arg(long, default_value_t = 9)]
        kmax: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Builds one of the explicit families.
    Construct {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        params: Option<String>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Gram matrix and rank certificate of a family, or a family realising a matrix.
    Gram {
        #[arg(long, conflicts_with = "matrix", required_unless_present = "matrix")]
        family: Option<PathBuf>,
        #[arg(long)]
        matrix: Option<PathBuf>,
        /// Target dimension when realising a matrix.
        #[arg(long, requires = "matrix")]
        d: Option<usize>,
        /// Also check that every row is k-collapsing.
        #[arg(long)]
        k: Option<usize>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Vertex oracle for the scalar optimisation, one instance or a grid.
    Oracle {
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        p: Option<u32>,
        /// `m=M,balanced=true` for one instance; `mmin=4,mmax=12` for a grid.
        #[arg(long)]
        params: Option<String>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Runs the colouring argument on a family, or equitably colours a graph.
    Pipeline {
        #[arg(long, conflicts_with = "graph", required_unless_present = "graph")]
        family: Option<PathBuf>,
        /// Graph JSON `{"n": N, "edges": [[a, b], ...]}`.
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        scan: ScanArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Largest k-collapsing subfamily of a candidate set, by branch and bound.
    Search {
        #[arg(long)]
        k: usize,
        /// Sign vectors `{-1,0,1}^d \ {0}` in `l_inf^d` when no family is given.
        #[arg(long, required_unless_present = "family")]
        d: Option<usize>,
        #[arg(long, conflicts_with = "d")]
        family: Option<PathBuf>,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Args, Debug, Clone)]
pub struct ScanArgs {
    /// Sampling seed used once exhaustive enumeration exceeds the budget.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    /// Largest number of subsets enumerated exhaustively.
    #[arg(long, default_value_t = 20_000_000)]
    pub budget: u64,
}

#[derive(Args, Debug, Clone)]
pub struct OutArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the result here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConditionArg {
    KCollapsing,
    Collapsing,
    Strong,
    Weak,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum KindArg {
    Cross,
    Pk,
    Lift,
    Greedy,
    Poly,
    #[value(name = "fixtureX")]
    FixtureX,
    #[value(name = "fixtureY")]
    FixtureY,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match commands::run(cli.command) {
        Ok(status) => ExitCode::from(status),
        Err(e) => {
            eprintln!("error: {e:#}");
            let breach = matches!(e.downcast_ref::<kcollapse::Error>(), Some(kcollapse::Error::InvariantBreach(_)));
            ExitCode::from(if breach { 3 } else { 2 })
        }
    }
}
