use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{ConfigError, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub equation: String,
    pub samples: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Witnessed value for checks asserting a nonzero quantity.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvatureRecord {
    pub point: Vec<f64>,
    pub ricci_scalar: f64,
    /// Components of `R(eᵢ∧eⱼ)` on the bivector basis, `i < j` row-major.
    pub riemann: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gauge_ricci_scalar: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Environment {
    pub seed: u64,
    pub dd_mode: String,
    pub fd_step: f64,
    pub samples: usize,
    pub bianchi_pattern: String,
    pub wedge_pair_convention: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointError {
    pub point: Vec<f64>,
    pub check: String,
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub scenario: String,
    pub pass: bool,
    pub checks: Vec<CheckRecord>,
    pub curvature: Vec<CurvatureRecord>,
    pub environment: Environment,
    pub point_errors: Vec<PointError>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// Write the report to `path`, or to stdout when `path` is `None`.
pub fn emit_report(report: &Report, path: Option<&Path>) -> Result<()> {
    let text = report.to_json();
    let io = |source, p: &Path| ConfigError::Io {
        path: p.display().to_string(),
        source,
    };
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| io(e, p)),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| io(e, Path::new("<stdout>"))),
    }
}
