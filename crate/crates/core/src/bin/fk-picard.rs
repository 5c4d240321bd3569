use std::process::ExitCode;

use clap::Parser;
use fk_picard::cli::{configure_threads, run, write_outputs, Format, RunConfig};

fn main() -> ExitCode {
    let config = match RunConfig::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("{e}");
        return ExitCode::from(e.exit_code() as u8);
    }
    let report = match run(&config) {
        Ok(r) => r,
        Err(e) => {
            let body = serde_json::json!({ "error": e.to_string(), "exit_code": e.exit_code() });
            println!("{body}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match config.format {
        Format::Json => println!("{}", report.canonical_json()),
        Format::Text => print!("{}", report.text()),
    }
    if let Err(e) = write_outputs(&config, &report) {
        eprintln!("cannot write output: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(report.exit_code() as u8)
}
