mod args;
mod commands;
mod report;

use std::fs;
use std::process::ExitCode;

use clap::Parser;
use serde_json::Value;

use crate::args::Cli;
use crate::commands::Inputs;
use crate::report::{digest, Metrics, RunReport, Status};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = &cli.command;
    let common = command.common();
    let mut metrics = Metrics::default();

    let inputs = Inputs::read(&common.inputs);
    let input_digest = match &inputs {
        Ok(i) => digest(&i.bytes),
        Err(_) => String::new(),
    };
    let outcome = inputs.and_then(|i| commands::run(command, &i, &mut metrics));

    let (status, result, message) = match outcome {
        Ok(o) => (o.status, o.result, o.message),
        Err(f) => (f.status, Value::Null, Some(f.message)),
    };

    if let Some(path) = &common.output {
        let text = serde_json::to_string_pretty(&result).expect("json values serialize") + "\n";
        if let Err(e) = fs::write(path, text) {
            eprintln!("nashfold: cannot write {}: {e}", path.display());
            return ExitCode::from(Status::InputError.exit_code());
        }
    }

    let failed = status != Status::Ok;
    let report = RunReport {
        command: command.name(),
        input_digest,
        status,
        timings_ms: metrics.timings_ms,
        counters: metrics.counters,
        error: if failed { message.clone() } else { None },
        result,
    };
    if !common.quiet {
        println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("report serializes")
        );
    }
    if failed {
        let msg = message.unwrap_or_default();
        eprintln!("nashfold {}: {}", command.name(), msg.replace('\n', " "));
    }
    ExitCode::from(status.exit_code())
}
