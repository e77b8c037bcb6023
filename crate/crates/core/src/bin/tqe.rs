use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tqe::cli::{self, CliError};

#[derive(Parser)]
#[command(name = "tqe", version, about = "Temporal quantum eraser scenarios and oracle checks")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario config and write CSV tables plus manifest.json.
    Run {
        config: PathBuf,
        #[arg(long, env = "TQE_OUT_DIR", default_value = "out")]
        out: PathBuf,
    },
    /// Cross-validate the analytic engines against the Fock oracle.
    Verify,
    /// Dump oracle conditioned states for a spdc-tqe or lambda-tqe config.
    Golden {
        config: PathBuf,
        #[arg(long, env = "TQE_OUT_DIR", default_value = "out")]
        out: PathBuf,
    },
}

fn dispatch(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Run { config, out } => {
            for p in cli::run(&config, &out)? {
                println!("{}", p.display());
            }
        }
        Command::Verify => {
            let (report, ok) = cli::verify_report()?;
            print!("{report}");
            if !ok {
                return Err(CliError::Internal("oracle cross-validation failed".into()));
            }
        }
        Command::Golden { config, out } => {
            for p in cli::golden(&config, &out)? {
                println!("{}", p.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match dispatch(args.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tqe: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
