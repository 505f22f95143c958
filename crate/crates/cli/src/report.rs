use std::collections::BTreeMap;
use std::time::Instant;

use nashfold_core::Error;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Infeasible,
    No,
    Rejected,
    InputError,
    ResourceCap,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Infeasible | Status::No | Status::Rejected => 1,
            Status::InputError => 2,
            Status::ResourceCap => 3,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: &'static str,
    pub input_digest: String,
    pub status: Status,
    pub timings_ms: BTreeMap<String, f64>,
    pub counters: BTreeMap<String, u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub result: Value,
}

/// What a command produced, before it is wrapped into a report.
#[derive(Debug)]
pub struct Outcome {
    pub status: Status,
    pub result: Value,
    /// Set for non-ok outcomes; becomes the standard error line.
    pub message: Option<String>,
}

impl Outcome {
    pub fn ok(result: Value) -> Self {
        Outcome {
            status: Status::Ok,
            result,
            message: None,
        }
    }

    pub fn with_status(status: Status, result: Value, message: impl Into<String>) -> Self {
        Outcome {
            status,
            result,
            message: Some(message.into()),
        }
    }
}

/// Failure that aborts a command.
#[derive(Debug)]
pub struct Failure {
    pub status: Status,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Failure {
            status: Status::InputError,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::ResourceCap { .. } => Status::ResourceCap,
            Error::Infeasible(_) => Status::Infeasible,
            _ => Status::InputError,
        };
        Failure {
            status,
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Default)]
pub struct Metrics {
    pub timings_ms: BTreeMap<String, f64>,
    pub counters: BTreeMap<String, u64>,
}

impl Metrics {
    pub fn time<T>(&mut self, phase: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        let ms = start.elapsed().as_secs_f64() * 1000.0;
        *self.timings_ms.entry(phase.to_string()).or_default() += ms;
        out
    }

    pub fn count(&mut self, name: &str, value: usize) {
        self.counters.insert(name.to_string(), value as u64);
    }
}

/// SHA-256 over the inputs in order, each prefixed by its length.
pub fn digest(inputs: &[Vec<u8>]) -> String {
    let mut h = Sha256::new();
    for bytes in inputs {
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(bytes);
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}
