mod args;
mod commands;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;
use serde_json::Value;

use args::{Args, Format};
use commands::{execute, CliError, Outcome, PRNG};

const VERSION: &str = env!("DSNTT_VERSION");

fn render(args: &Args, outcome: Outcome, out: &mut dyn Write) -> Result<(), CliError> {
    match args.format {
        Format::Json => {
            let mut report = outcome.report;
            if let Value::Object(map) = &mut report {
                map.insert("mode".into(), args.mode.as_str().into());
                map.insert("passed".into(), outcome.passed.into());
                map.insert("prng".into(), PRNG.into());
                map.insert("seed".into(), args.seed.into());
                map.insert("version".into(), VERSION.into());
            }
            serde_json::to_writer_pretty(&mut *out, &report)
                .map_err(|e| CliError(e.to_string()))?;
            writeln!(out)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            let to_err = |e: csv::Error| CliError(e.to_string());
            w.write_record(&outcome.table.header).map_err(to_err)?;
            for row in &outcome.table.rows {
                w.write_record(row).map_err(to_err)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    let outcome = match execute(&args) {
        Ok(o) => o,
        Err(CliError(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let passed = outcome.passed;
    let written = match &args.out {
        Some(path) => File::create(path)
            .map_err(|e| CliError(format!("{}: {e}", path.display())))
            .and_then(|f| {
                let mut w = BufWriter::new(f);
                render(&args, outcome, &mut w)?;
                w.flush().map_err(CliError::from)
            }),
        None => render(&args, outcome, &mut io::stdout().lock()),
    };
    if let Err(CliError(msg)) = written {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    if passed {
        ExitCode::SUCCESS
    } else {
        eprintln!("verification failed");
        ExitCode::from(1)
    }
}
