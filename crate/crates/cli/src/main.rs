mod args;
mod commands;
mod output;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use serde_json::Value;

use args::{Cli, GlobalArgs};
use output::{write_report, Envelope, ErrorBody, ErrorReport, Timing};

const VERSION: &str = env!("CARGO_PKG_VERSION");

const EXIT_FAIL: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: cannot start {threads} worker threads: {e}");
            return ExitCode::from(EXIT_INPUT);
        }
    }
    let name = commands::name(&cli.command);
    let started = Instant::now();
    match commands::run(&cli.command, &cli.global) {
        Ok(outcome) => {
            let envelope = Envelope {
                version: VERSION,
                command: name,
                config: config_echo(&cli),
                result: outcome.result,
                pass: outcome.pass,
                timing: Timing { elapsed_ms: started.elapsed().as_secs_f64() * 1e3 },
            };
            let mut stdout = std::io::stdout().lock();
            if let Err(e) = write_report(&mut stdout, &envelope, cli.global.format).and_then(|_| stdout.flush()) {
                eprintln!("error: cannot write report: {e}");
                return ExitCode::from(EXIT_NUMERICAL);
            }
            match outcome.pass {
                Some(false) => {
                    eprintln!("{}: FAIL", envelope.command);
                    ExitCode::from(EXIT_FAIL)
                }
                _ => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            let code = if e.is_input_error() { EXIT_INPUT } else { EXIT_NUMERICAL };
            eprintln!("error: {e}");
            if cli.global.json_errors {
                let report = ErrorReport {
                    version: VERSION,
                    command: name,
                    error: ErrorBody { kind: e.kind().into(), message: e.to_string(), exit_code: code.into() },
                };
                let _ = write_report(&mut std::io::stdout().lock(), &report, args::Format::Json);
            }
            ExitCode::from(code)
        }
    }
}

/// Global flags that can change the output, plus the command's own flags.
fn config_echo(cli: &Cli) -> Value {
    let mut config = serde_json::to_value(&cli.command).unwrap_or(Value::Null);
    let global: &GlobalArgs = &cli.global;
    if let (Value::Object(map), Ok(Value::Object(g))) = (&mut config, serde_json::to_value(global)) {
        map.extend(g);
    }
    config
}
