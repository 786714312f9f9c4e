use std::fs;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;
use structrand::{Error, Result};

use crate::commands;
use crate::{Command, Format};

pub const SCHEMA: &str = "structrand-report/1";

#[derive(Serialize)]
struct Versions {
    structrand: &'static str,
    cli: &'static str,
}

#[derive(Serialize)]
struct RunReport<'a> {
    schema: &'static str,
    command: &'static str,
    config: &'a Command,
    seed: u64,
    versions: Versions,
    status: &'static str,
    input: &'a Value,
    certificate: &'a Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    timing_ms: Option<f64>,
}

fn emit(command: &Command, text: &str) -> Result<()> {
    match &command.common().out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

/// Runs the command and writes its report. A run whose guarantee is not
/// met still writes its report (with `status: "unmet"`) before failing.
pub fn run(command: &Command) -> Result<()> {
    let started = Instant::now();
    let result = commands::dispatch(command);
    let elapsed = started.elapsed().as_secs_f64() * 1e3;
    let common = command.common();

    let outcome = result?;
    let error = outcome.unmet.clone().map(|reason| Error::Unmet {
        reason,
        diagnostics: Box::new(Value::Null),
    });

    if common.format == Format::Csv && error.is_none() {
        emit(command, &outcome.csv)?;
    } else {
        let report = RunReport {
            schema: SCHEMA,
            command: command.name(),
            config: command,
            seed: common.seed,
            versions: Versions {
                structrand: env!("CARGO_PKG_VERSION"),
                cli: env!("CARGO_PKG_VERSION"),
            },
            status: if error.is_some() { "unmet" } else { "ok" },
            input: &outcome.input,
            certificate: &outcome.certificate,
            error: error.as_ref().map(|e| e.to_string()),
            timing_ms: common.timing.then_some(elapsed),
        };
        let mut text = serde_json::to_string_pretty(&report)?;
        text.push('\n');
        emit(command, &text)?;
    }
    match error {
        Some(e) => Err(e),
        None => Ok(()),
    }
}
