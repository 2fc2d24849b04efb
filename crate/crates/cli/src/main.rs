use std::path::PathBuf;
use std::process::ExitCode;

use chimhd::check::run_check;
use chimhd::{parse_config, run, sweep_epsilon, CliError};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "chimhd", version, about = "Two-phase Cahn-Hilliard MHD solver")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one simulation described by a `key = value` config file.
    Run { config: PathBuf },
    /// Run the config at several interface widths against a reference width.
    Sweep {
        config: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.05, 0.025, 0.0125])]
        eps: Vec<f64>,
        #[arg(long, default_value_t = 0.01)]
        eps_ref: f64,
    },
    /// Operator identities and a short run with all invariants enforced.
    Check,
}

fn execute(cmd: Cmd) -> Result<(), CliError> {
    match cmd {
        Cmd::Run { config } => {
            let cfg = parse_config(&config)?;
            let s = run(&cfg)?;
            println!(
                "{} steps, E(0) = {:e}, E(T) = {:e}, output in {}",
                s.steps,
                s.e0,
                s.energy.last().copied().unwrap_or(s.e0),
                s.output_dir.display()
            );
        }
        Cmd::Sweep { config, eps, eps_ref } => {
            let cfg = parse_config(&config)?;
            let r = sweep_epsilon(&cfg, &eps, eps_ref)?;
            print!("{}", r.table());
        }
        Cmd::Check => print!("{}", run_check()?),
    }
    Ok(())
}

fn main() -> ExitCode {
    // usage errors are configuration errors; clap's own code 2 means solver failure here
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
