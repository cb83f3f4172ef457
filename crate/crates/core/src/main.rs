use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use twonorm::cli::{self, AxiomsArgs, CliError, ExtendArgs, Suite, VerifyArgs};
use twonorm::hahn_banach::AlphaRule;
use twonorm::report::Report;
use twonorm::tolerance::Tolerances;

/// Numerical checks for finite-dimensional linear 2-normed spaces.
#[derive(Parser)]
#[command(name = "twonorm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override a tolerance, e.g. `--tol axiom=1e-8` (repeatable).
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    tol: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the 2-norm axioms on a space.
    Axioms {
        space: PathBuf,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Extend a b-linear functional to the whole space, preserving its norm.
    Extend {
        space: PathBuf,
        functional: PathBuf,
        #[arg(long, default_value = "midpoint")]
        alpha_rule: AlphaRule,
        #[command(flatten)]
        common: Common,
    },
    /// Run a property suite on a spec file.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        spec: PathBuf,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Random instances per spec entry.
        #[arg(long, default_value_t = 20)]
        cases: usize,
        #[command(flatten)]
        common: Common,
    },
}

fn tolerances(overrides: &[String]) -> Result<Tolerances, CliError> {
    let mut tol = Tolerances::default();
    for o in overrides {
        tol.set(o).map_err(CliError::Input)?;
    }
    Ok(tol)
}

fn run(command: Command) -> Result<(Report, Option<PathBuf>), CliError> {
    Ok(match command {
        Command::Axioms {
            space,
            samples,
            seed,
            common,
        } => {
            let args = AxiomsArgs {
                space,
                samples,
                seed,
                tol: tolerances(&common.tol)?,
            };
            (cli::cmd_axioms(&args)?, common.out)
        }
        Command::Extend {
            space,
            functional,
            alpha_rule,
            common,
        } => {
            let args = ExtendArgs {
                space,
                functional,
                alpha_rule,
                tol: tolerances(&common.tol)?,
            };
            (cli::cmd_extend(&args)?, common.out)
        }
        Command::Verify {
            suite,
            spec,
            seed,
            cases,
            common,
        } => {
            let args = VerifyArgs {
                suite,
                spec,
                seed,
                cases,
                tol: tolerances(&common.tol)?,
            };
            (cli::cmd_verify(&args)?, common.out)
        }
    })
}

fn main() -> ExitCode {
    let parsed = Cli::parse();
    match run(parsed.command) {
        Ok((report, out)) => {
            if let Err(e) = report.write(out.as_deref()) {
                eprintln!("twonorm: cannot write report: {e}");
                return ExitCode::from(2);
            }
            if !report.passed {
                for p in report.properties.iter().filter(|p| !p.passed) {
                    eprintln!(
                        "twonorm: {} failed (max residual {:.3e}, tolerance {:.1e})",
                        p.id, p.max_residual, p.tolerance
                    );
                }
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("twonorm: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
