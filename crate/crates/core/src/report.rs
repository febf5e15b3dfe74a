//! Named verification checks with max residuals.

use serde::Serialize;

/// Outcome of a single named check.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    /// Largest matrix-entry residual observed.
    pub residual: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, residual: f64, tol: f64) -> Self {
        Check {
            name: name.into(),
            residual,
            pass: residual <= tol,
        }
    }
}

/// A bundle of checks evaluated at a common tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tolerance: f64,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(tol: f64) -> Self {
        Report {
            tolerance: tol,
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, name: impl Into<String>, residual: f64) {
        self.checks.push(Check::new(name, residual, self.tolerance));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.residual).fold(0.0, f64::max)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}
