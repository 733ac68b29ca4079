//! Report model and serialization (JSON and CSV).
//!
//! Output is byte-stable for fixed inputs, seed, precision and version;
//! `elapsed_ms` is the single field that varies between runs.

use serde::Serialize;

/// One sample inside a check (a t-point, a moment order, a draw, ...).
#[derive(Debug, Clone, Serialize)]
pub struct SampleRow {
    /// What the sample is, e.g. `t=3/2` or `k=4`.
    pub sample: String,
    pub residual: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// One named check with its worst residual and verdict.
#[derive(Debug, Clone, Serialize)]
pub struct CheckRow {
    pub name: String,
    /// Stable identifier tying the check to the module implementing it.
    pub anchor: String,
    pub residual: String,
    pub tol: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub samples: Vec<SampleRow>,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub version: String,
    pub family: String,
    pub mode: String,
    pub precision: usize,
    pub seed: u64,
    pub checks: Vec<CheckRow>,
    pub elapsed_ms: u128,
}

impl Report {
    pub fn new(family: String, mode: &str, precision: usize, seed: u64) -> Self {
        Report {
            version: env!("CARGO_PKG_VERSION").to_string(),
            family,
            mode: mode.to_string(),
            precision,
            seed,
            checks: Vec::new(),
            elapsed_ms: 0,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One row per (check, sample); checks without samples emit one row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("check,anchor,sample,residual,tol,pass\n");
        for c in &self.checks {
            if c.samples.is_empty() {
                out.push_str(&format!(
                    "{},{},-,{},{},{}\n",
                    c.name, c.anchor, c.residual, c.tol, c.pass
                ));
            } else {
                for s in &c.samples {
                    out.push_str(&format!(
                        "{},{},{},{},{},{}\n",
                        c.name, c.anchor, s.sample, s.residual, c.tol, c.pass
                    ));
                }
            }
        }
        out
    }
}
