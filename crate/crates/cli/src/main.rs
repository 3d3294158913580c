mod args;
mod commands;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, Format, OutputArgs};
use commands::{CliError, Report};

fn render(report: &Report, format: Format) -> Result<String, CliError> {
    if report.csv_only {
        return Ok(report.csv.clone().expect("csv artifact"));
    }
    Ok(match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report.json).expect("serializable");
            s.push('\n');
            s
        }
        Format::Text => report.text.clone(),
        Format::Csv => report
            .csv
            .clone()
            .ok_or_else(|| CliError::Validation("this command has no CSV output".into()))?,
    })
}

fn emit(output: &OutputArgs, body: &str) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Numerical(e.into());
    match &output.out {
        Some(path) => std::fs::write(path, body).map_err(io),
        None => std::io::stdout().write_all(body.as_bytes()).map_err(io),
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let (report, output) = match &cli.command {
        Command::Case(a) => (commands::case(a)?, &a.output),
        Command::Spectrum(a) => (commands::spectrum(a)?, &a.output),
        Command::Resonance(a) => (commands::resonance(a)?, &a.output),
        Command::Rpm(a) => (commands::rpm(a)?, &a.output),
        Command::Transform(a) => (commands::transform(a)?, &a.output),
        Command::Symmetry(a) => (commands::symmetry(a)?, &a.output),
    };
    let body = render(&report, output.format)?;
    emit(output, &body)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}\n\nFor more information, try '--help'.");
            ExitCode::from(2)
        }
        Err(CliError::Numerical(e)) => {
            let payload = serde_json::json!({ "error": e.name(), "message": e.to_string() });
            eprintln!("{payload}");
            ExitCode::from(3)
        }
    }
}
