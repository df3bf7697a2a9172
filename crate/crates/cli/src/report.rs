//! Versioned JSON reports with explicit pass/fail rows.
//!
//! Everything except the `timestamp` field is deterministic for a fixed
//! config and seed, so downstream tooling can diff reports byte-wise.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub value: f64,
    pub tolerance: f64,
}

/// Volatile part of the provenance block: the one field determinism
/// tests are allowed to strip.
#[derive(Debug, Serialize)]
pub struct Timestamp {
    pub written_at_unix_ms: u128,
    pub runtime_ms: u128,
}

#[derive(Debug, Serialize)]
pub struct Provenance {
    pub grid: String,
    pub tolerances: BTreeMap<String, f64>,
    pub seed: u64,
    pub threads: usize,
    pub timestamp: Timestamp,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema: u32,
    pub experiment: String,
    pub inputs: BTreeMap<String, serde_json::Value>,
    pub results: BTreeMap<String, serde_json::Value>,
    pub checks: Vec<Check>,
    pub provenance: Provenance,
}

impl Report {
    pub fn new(experiment: &str) -> Report {
        Report {
            schema: SCHEMA_VERSION,
            experiment: experiment.to_string(),
            inputs: BTreeMap::new(),
            results: BTreeMap::new(),
            checks: Vec::new(),
            provenance: Provenance {
                grid: String::new(),
                tolerances: BTreeMap::new(),
                seed: 0,
                threads: 0,
                timestamp: Timestamp {
                    written_at_unix_ms: 0,
                    runtime_ms: 0,
                },
            },
        }
    }

    pub fn input(&mut self, key: &str, value: impl Serialize) {
        self.inputs
            .insert(key.to_string(), serde_json::to_value(value).unwrap());
    }

    pub fn result(&mut self, key: &str, value: impl Serialize) {
        self.results
            .insert(key.to_string(), serde_json::to_value(value).unwrap());
    }

    /// Records a check that passes when |value| ≤ tolerance.
    pub fn check_abs(&mut self, name: &str, value: f64, tolerance: f64) {
        self.checks.push(Check {
            name: name.to_string(),
            pass: value.abs() <= tolerance,
            value,
            tolerance,
        });
    }

    /// Records a check with an explicit verdict.
    pub fn check_bool(&mut self, name: &str, pass: bool, value: f64, tolerance: f64) {
        self.checks.push(Check {
            name: name.to_string(),
            pass,
            value,
            tolerance,
        });
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn finalize(&mut self, started: Instant) {
        self.provenance.timestamp = Timestamp {
            written_at_unix_ms: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_millis())
                .unwrap_or(0),
            runtime_ms: started.elapsed().as_millis(),
        };
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }

    /// One line per check, for terminal output.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!(
                "[{}] {:40} value {:+.6e}  tol {:.1e}\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.value,
                c.tolerance
            ));
        }
        out
    }
}

/// A CSV artifact produced alongside the report.
pub struct CsvFile {
    pub name: String,
    pub content: String,
}

pub fn csv(name: &str, header: &str, rows: impl IntoIterator<Item = Vec<f64>>) -> CsvFile {
    let mut content = String::from(header);
    content.push('\n');
    for row in rows {
        let line: Vec<String> = row.iter().map(|v| format!("{v:.12e}")).collect();
        content.push_str(&line.join(","));
        content.push('\n');
    }
    CsvFile {
        name: name.to_string(),
        content,
    }
}
