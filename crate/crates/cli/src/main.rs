mod commands;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand};
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(
    name = "sdym",
    version,
    about = "Lie point symmetries of the self-dual Yang-Mills equations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Extract the determining system and cross-check it against the reference equation sets
    Derive(Common),
    /// Substitute a generator spec into the determining system
    Verify(Common),
    /// Solve the polynomial ansatz and compare with the closed-form family
    Solve(Common),
    /// Instanton residual floor and ε-scaling of flows along generators
    Numeric(Common),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Gauge algebra file (JSON structure constants)
    #[arg(long)]
    pub algebra: Option<PathBuf>,
    /// Maximal x-degree of H in the ansatz
    #[arg(long, default_value_t = 2)]
    pub h_degree: usize,
    /// Maximal x-degree of the gauge function χ in the ansatz
    #[arg(long, default_value_t = 0)]
    pub chi_degree: usize,
    /// Comma-separated, strictly decreasing ε values in (1e-6, 1)
    #[arg(long, value_delimiter = ',', default_values_t = [1e-1, 1e-2, 1e-3])]
    pub eps: Vec<f64>,
    /// Number of sample points
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    /// Offset of the sample sequence and seed of the random control
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write the report to this path
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Generator: a name (all, random, translation0, dilatation, gauge0_1000, ...) or a spec file
    #[arg(long)]
    pub generator: Option<String>,
}

/// Report status; `Fail` means a check did not hold.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

pub struct Outcome {
    pub status: Status,
    pub data: Value,
}

fn render(command: &str, status: &str, data: Value) -> String {
    let report = json!({ "command": command, "status": status, "data": data });
    serde_json::to_string_pretty(&report).expect("reports serialize") + "\n"
}

/// Reports a usage error the way clap does and exits with status 2.
fn usage(subcommand: &str, msg: &str) -> ! {
    let mut cmd = Cli::command();
    let sub = cmd.find_subcommand_mut(subcommand).expect("known subcommand").clone();
    sub.bin_name(format!("sdym {subcommand}"))
        .error(clap::error::ErrorKind::MissingRequiredArgument, msg)
        .exit()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, common) = match &cli.command {
        Command::Derive(c) => ("derive", c),
        Command::Verify(c) => ("verify", c),
        Command::Solve(c) => ("solve", c),
        Command::Numeric(c) => ("numeric", c),
    };
    let algebra = || {
        common.algebra.as_deref().unwrap_or_else(|| {
            usage(
                name,
                "the following required argument was not provided: --algebra <ALGEBRA>",
            )
        })
    };
    let result = match cli.command {
        Command::Derive(_) => commands::derive(algebra()),
        Command::Verify(_) => {
            let spec = common.generator.as_deref().unwrap_or_else(|| {
                usage(
                    name,
                    "the following required argument was not provided: --generator <GENERATOR>",
                )
            });
            commands::verify(algebra(), Path::new(spec))
        }
        Command::Solve(_) => commands::solve(common, algebra()),
        Command::Numeric(_) => commands::numeric(common),
    };
    let (text, code) = match result {
        Ok(o) => {
            let (status, code) = match o.status {
                Status::Pass => ("pass", 0),
                Status::Fail => ("fail", 1),
            };
            (render(name, status, o.data), code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            (render(name, "error", json!({ "error": e.to_string() })), 2)
        }
    };
    print!("{text}");
    if let Some(path) = &common.out {
        if let Err(e) = std::fs::write(path, &text) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    ExitCode::from(code)
}
