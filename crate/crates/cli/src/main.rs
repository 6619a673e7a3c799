//! `vexp`: precompute node tables, evaluate powers, run the property suite,
//! benchmark against square-and-multiply, and print the special forms.
//!
//! Exit codes: 0 success, 1 verification failure or oracle mismatch,
//! 2 usage or precondition error.

mod bench;
mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use vexp_core::FieldDescriptor;

#[derive(Parser, Debug)]
#[command(
    name = "vexp",
    version,
    about = "Exponentiation from precomputed node sums"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a node table and write it to a file.
    Precompute(PrecomputeArgs),
    /// Evaluate base^exp from a stored table.
    Eval(EvalArgs),
    /// Run the seeded property suite.
    Verify(VerifyArgs),
    /// Time the node-sum method against square-and-multiply; CSV on stdout.
    Bench(BenchArgs),
    /// Evaluate one of the special node choices against its oracle.
    #[command(subcommand)]
    Forms(FormsCommand),
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("node_source").required(true))]
pub struct PrecomputeArgs {
    /// `prime:<p>`, `rational`, `complex` or `complex:<tolerance>`.
    #[arg(long)]
    pub field: FieldDescriptor,
    /// Comma-separated canonical values; use `;` between complex values.
    #[arg(long, group = "node_source")]
    pub nodes: Option<String>,
    /// Inclusive integer range, e.g. `1..4`.
    #[arg(long, group = "node_source")]
    pub nodes_range: Option<String>,
    /// `m` for the m-th roots of unity, `m+<value>` to append an extra node.
    #[arg(long, group = "node_source")]
    pub nodes_roots: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[arg(long)]
    pub table: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub base: String,
    #[arg(long)]
    pub exp: usize,
    /// Print summands, reduced sums and reduction depth.
    #[arg(long)]
    pub trace: bool,
    /// Compare against square-and-multiply.
    #[arg(long)]
    pub check: bool,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 2)]
    pub kmin: usize,
    #[arg(long, default_value_t = 32)]
    pub kmax: usize,
    /// Comma-separated subset of `prime,rational,complex`.
    #[arg(long, default_value = "prime,rational,complex")]
    pub backends: String,
    /// Corrupt tables before checking; only `coeff` is supported.
    #[arg(long)]
    pub inject_fault: Option<String>,
    /// Emit only `CHECK <name> <ran> <failed>` lines.
    #[arg(long)]
    pub lines: bool,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Must be `prime:<p>`.
    #[arg(long)]
    pub field: FieldDescriptor,
    /// Comma-separated node counts; each row uses n = k - 1.
    #[arg(long, value_delimiter = ',', required = true)]
    pub k: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Subcommand, Debug)]
pub enum FormsCommand {
    /// Nodes 1..k with binomial weights; computes base^(k-1).
    Binomial {
        #[arg(long)]
        k: usize,
        #[arg(long, allow_hyphen_values = true)]
        base: String,
        #[arg(long, default_value = "rational")]
        field: FieldDescriptor,
    },
    /// Roots of unity plus the node 0; computes base^m - 1.
    Roots {
        #[arg(long)]
        m: usize,
        #[arg(long, allow_hyphen_values = true)]
        base: String,
        #[arg(long, default_value = "complex")]
        field: FieldDescriptor,
    },
    /// Partial fractions over the roots of unity; computes 1 / (base^m - 1).
    Pfrac {
        #[arg(long)]
        m: usize,
        #[arg(long, allow_hyphen_values = true)]
        base: String,
        #[arg(long, default_value = "complex")]
        field: FieldDescriptor,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Precompute(args) => commands::precompute(&args),
        Command::Eval(args) => commands::eval(&args),
        Command::Verify(args) => commands::verify(&args),
        Command::Bench(args) => bench::run(&args),
        Command::Forms(cmd) => commands::forms(&cmd),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
