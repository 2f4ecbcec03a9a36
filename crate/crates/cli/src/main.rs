//! `xychern`: phase-diagram scans and oracle checks for the rotated XY chain.
//!
//! Exit status: 0 success, 1 verification failure, 2 configuration error,
//! 3 numerical non-convergence (the partial output is still written).

mod args;
mod commands;
mod table;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, OutputArgs};
use commands::{Exit, Report};

/// Environment variable overriding the worker-pool size.
const WORKERS_VAR: &str = "XYCHERN_WORKERS";

fn config_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(Exit::ConfigError as u8)
}

fn run(cli: Cli) -> Result<(Report, OutputArgs), String> {
    Ok(match cli.command {
        Command::ScanChern(a) => {
            let cfg = a.validate(1.0, 1024)?;
            commands::validate_discrete(&cfg)?;
            (commands::scan_chern(&cfg), a.output)
        }
        Command::GapMap(a) => (commands::gap_map(&a.validate(2.0, 1024)?), a.output),
        Command::MetricScan(a) => (commands::metric_scan(&a.validate(1.0, 2048)?), a.output),
        Command::OracleVerify(a) => {
            commands::validate_verify(&a)?;
            (commands::oracle_verify(&a), a.output)
        }
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(Exit::ConfigError as u8) } else { ExitCode::SUCCESS };
        }
    };
    match args::worker_override(std::env::var(WORKERS_VAR).ok()) {
        Ok(Some(n)) => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                return config_error(e);
            }
        }
        Ok(None) => {}
        Err(e) => return config_error(e),
    }

    let (report, output) = match run(cli) {
        Ok(r) => r,
        Err(e) => return config_error(e),
    };
    if let Err(e) = report.table.write(output.format, output.out.as_deref(), report.config, report.summary.clone()) {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(Exit::ConfigError as u8);
    }
    eprintln!("summary: {}", report.summary);
    ExitCode::from(report.exit as u8)
}
