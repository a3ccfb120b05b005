//! Problem files: a JSON object naming the system, its starting point and
//! optional solver defaults.
//!
//! ```json
//! {
//!   "name": "quadratic",
//!   "n": 1,
//!   "equations": ["x^2 - 2"],
//!   "x0": [1.5],
//!   "defaults": { "tol": 1e-6, "method": "newton" }
//! }
//! ```

use std::fmt;
use std::path::Path;

use fracroot_core::expr::{parse_equations, SystemF};
use fracroot_core::Complex64;
use serde::Deserialize;

/// Optional overrides; command-line flags take precedence over these.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Defaults {
    pub method: Option<String>,
    pub deriv: Option<String>,
    pub neg_power_rule: Option<String>,
    pub alpha: Option<f64>,
    pub alpha_step: Option<f64>,
    pub alpha_excl: Option<f64>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub delta: Option<f64>,
    pub div_bound: Option<f64>,
    pub eps_shift: Option<f64>,
    pub eps_dedup: Option<f64>,
    pub chord_slope: Option<f64>,
    pub n_trunc: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub name: String,
    pub n: usize,
    pub equations: Vec<String>,
    pub x0: Vec<f64>,
    #[serde(default)]
    pub defaults: Defaults,
}

#[derive(Debug)]
pub struct Problem {
    pub name: String,
    pub system: SystemF,
    pub x0: Vec<Complex64>,
    pub defaults: Defaults,
}

#[derive(Debug)]
pub struct ProblemError(pub String);

impl fmt::Display for ProblemError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ProblemError {}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<ProblemFile, ProblemError> {
        serde_json::from_str(text).map_err(|e| ProblemError(format!("invalid problem file: {e}")))
    }

    pub fn into_problem(self) -> Result<Problem, ProblemError> {
        if self.n == 0 {
            return Err(ProblemError("n must be at least 1".into()));
        }
        if self.equations.len() != self.n {
            return Err(ProblemError(format!(
                "n = {} but {} equations given",
                self.n,
                self.equations.len()
            )));
        }
        if self.x0.len() != self.n {
            return Err(ProblemError(format!(
                "n = {} but x0 has {} components",
                self.n,
                self.x0.len()
            )));
        }
        if let Some(v) = self.x0.iter().find(|v| !v.is_finite()) {
            return Err(ProblemError(format!("x0 component {v} is not finite")));
        }
        let system = parse_equations(&self.equations, self.n)
            .map_err(|e| ProblemError(format!("equations: {e}")))?;
        Ok(Problem {
            name: self.name,
            system,
            x0: self.x0.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
            defaults: self.defaults,
        })
    }
}

pub fn load(path: &Path) -> Result<Problem, ProblemError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ProblemError(format!("cannot read {}: {e}", path.display())))?;
    ProblemFile::from_json(&text)?.into_problem()
}
