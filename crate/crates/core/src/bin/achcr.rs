use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{error::ErrorKind, Parser, Subcommand};

use achcr::report::{self, Outcome, SolveFlags};
use achcr::sphere;
use achcr::Error;

#[derive(Parser)]
#[command(name = "achcr", version, about = "Formal ACH-Einstein expansions and CR obstruction tensors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct InputArgs {
    /// `builtin:<name>` or a path to an algebra document.
    #[arg(value_name = "INPUT")]
    positional: Option<String>,
    #[arg(long, value_name = "INPUT", conflicts_with = "positional")]
    input: Option<String>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

impl InputArgs {
    fn source(&self) -> Result<&str, Error> {
        self.input
            .as_deref()
            .or(self.positional.as_deref())
            .ok_or_else(|| Error::BadParameter("no input given".into()))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check the structure constants of an algebra.
    Validate {
        #[command(flatten)]
        io: InputArgs,
    },
    /// Run the construction and extract the obstruction.
    Solve {
        #[command(flatten)]
        io: InputArgs,
        #[arg(long)]
        truncation: Option<usize>,
        /// Add wall time to the report (makes it run-dependent).
        #[arg(long)]
        timing: bool,
    },
    /// Run identity checks.
    Verify {
        #[command(flatten)]
        io: InputArgs,
        /// Comma-separated subset of seed, bianchi, divergence, scaling, table1,
        /// second-obstruction, identities, or `all`.
        #[arg(long, default_value = "all")]
        checks: String,
        /// Rescale factor for the scaling check.
        #[arg(long, default_value = "4")]
        lambda: String,
        #[arg(long)]
        truncation: Option<usize>,
    },
    /// Leading first-variation coefficients at the sphere.
    SphereCoeff {
        #[arg(long)]
        n: usize,
    },
}

fn emit(out: &Outcome, path: Option<&PathBuf>) -> Result<(), Error> {
    let text = report::render(&out.report);
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::BadParameter(format!("{}: {e}", p.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| Error::BadParameter(e.to_string())),
    }
}

fn run(cli: Cli) -> Result<i32, Error> {
    match cli.command {
        Command::Validate { io } => {
            let input = report::load_input(io.source()?)?;
            let out = report::validate(&input);
            emit(&out, io.output.as_ref())?;
            Ok(out.exit_code)
        }
        Command::Solve { io, truncation, timing } => {
            let input = report::load_input(io.source()?)?;
            let out = report::solve(&input, &SolveFlags { truncation, timing });
            emit(&out, io.output.as_ref())?;
            Ok(out.exit_code)
        }
        Command::Verify { io, checks, lambda, truncation } => {
            let input = report::load_input(io.source()?)?;
            let checks = report::parse_checks(&checks)?;
            let lambda = report::parse_lambda(&lambda)?;
            let out = report::verify(&input, &checks, &lambda, truncation.or(input.options.truncation));
            emit(&out, io.output.as_ref())?;
            Ok(out.exit_code)
        }
        Command::SphereCoeff { n } => {
            if !(1..=8).contains(&n) {
                return Err(Error::BadParameter(format!("n must be between 1 and 8, got {n}")));
            }
            let v = sphere::leading_recursion(n)?;
            for (l, c) in v.c.iter().enumerate() {
                println!("c_{} = {}", l + 1, c);
            }
            let check = sphere::closed_form_check(n)?;
            let verdict = if check.holds { "OK" } else { "MISMATCH" };
            println!("a_{} = {}  {}", n + 1, v.a, verdict);
            Ok(if check.holds { 0 } else { 3 })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 4,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
