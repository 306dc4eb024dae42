use std::process::ExitCode;

use clap::Parser;
use cyclic_ainf::cli::{run, Cli};

fn main() -> anyhow::Result<ExitCode> {
    let cli = Cli::parse();
    let report = run(&cli)?;
    print!("{}", report.text());
    if let Some(path) = &cli.common.report {
        std::fs::write(path, report.json())?;
    }
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}
