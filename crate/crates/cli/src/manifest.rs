use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, ValueEnum};

use crate::error::{CliError, CliResult};

/// Schema tag written into every machine-readable artifact.
pub const SCHEMA: &str = "graphpass/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Validate,
    Audit,
    Solve,
    Verify,
    Report,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolveMethod {
    /// Deflated Newton from random starts only.
    Newton,
    /// A single mountain-pass run.
    Mp,
    /// Mountain pass first, then deflated Newton.
    Both,
}

impl SolveMethod {
    pub fn key(self) -> &'static str {
        match self {
            SolveMethod::Newton => "newton",
            SolveMethod::Mp => "mp",
            SolveMethod::Both => "both",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "graphpass", version, about = "Multiple solutions of biharmonic-Kirchhoff systems on weighted graphs")]
struct Flags {
    command: Command,
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long)]
    model: Option<PathBuf>,
    /// Exported solutions to verify or summarize.
    #[arg(long)]
    solutions: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Number of energy levels to find.
    #[arg(short = 'K', default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Residual sup-norm tolerance.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = SolveMethod::Both)]
    method: SolveMethod,
}

/// A fully resolved invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub command: Command,
    pub graph: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub solutions: Option<PathBuf>,
    pub out: PathBuf,
    pub tol: f64,
    pub seed: u64,
    pub k: usize,
    pub method: SolveMethod,
    pub version: &'static str,
}

/// Outcome of argument parsing: a manifest, or text to print (help, version).
#[derive(Debug)]
pub enum Parsed {
    Run(RunManifest),
    Print(String),
}

pub fn parse_manifest<I, T>(argv: I) -> CliResult<Parsed>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let flags = match Flags::try_parse_from(argv) {
        Ok(f) => f,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Ok(Parsed::Print(e.to_string())),
                ErrorKind::UnknownArgument | ErrorKind::InvalidSubcommand => {
                    Err(CliError::UnknownFlag(first_line(&e.to_string())))
                }
                ErrorKind::MissingRequiredArgument | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    Err(CliError::MissingInput(first_line(&e.to_string())))
                }
                _ => Err(CliError::InvalidFlagValue(first_line(&e.to_string()))),
            };
        }
    };
    if !(flags.tol > 0.0 && flags.tol.is_finite()) {
        return Err(CliError::InvalidFlagValue(format!("--tol {} must be positive", flags.tol)));
    }
    if flags.k == 0 {
        return Err(CliError::InvalidFlagValue("-K must be positive".into()));
    }

    let (graph, model, solutions) = match flags.command {
        Command::Validate => (true, false, false),
        Command::Audit | Command::Solve => (true, true, false),
        Command::Verify => (true, true, true),
        Command::Report => (false, false, false),
    };
    require(graph, "--graph", &flags.graph)?;
    require(model, "--model", &flags.model)?;
    require(solutions, "--solutions", &flags.solutions)?;
    for p in [&flags.graph, &flags.model, &flags.solutions].into_iter().flatten() {
        if !p.exists() {
            return Err(CliError::MissingInput(format!("{} does not exist", p.display())));
        }
    }
    if flags.command == Command::Report && flags.solutions.is_none() && flags.out.is_none() {
        return Err(CliError::MissingInput("report needs --solutions or --out".into()));
    }

    Ok(Parsed::Run(RunManifest {
        command: flags.command,
        graph: flags.graph,
        model: flags.model,
        solutions: flags.solutions,
        out: flags.out.unwrap_or_else(|| PathBuf::from("graphpass-out")),
        tol: flags.tol,
        seed: flags.seed,
        k: flags.k,
        method: flags.method,
        version: SCHEMA,
    }))
}

fn require(needed: bool, flag: &str, value: &Option<PathBuf>) -> CliResult<()> {
    if needed && value.is_none() {
        return Err(CliError::MissingInput(format!("{flag} is required")));
    }
    Ok(())
}

fn first_line(s: &str) -> String {
    s.lines().next().unwrap_or("").trim_start_matches("error: ").to_string()
}
