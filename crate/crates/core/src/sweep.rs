//! Scan over a grid of orders `α`, one run per order, with converged roots
//! collected into a deduplicating registry.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expr::SystemF;
use crate::linalg::{norm2, sub_vec};
use crate::solvers::{admissible_alpha, run, Outcome, RunRecord, SolverConfig, SolverKind};

pub const DEFAULT_ALPHA_STEP: f64 = 1e-4;
pub const DEFAULT_ALPHA_EXCL: f64 = 5e-5;
pub const DEFAULT_EPS_DEDUP: f64 = 1e-2;

/// Strictly increasing orders in (−2, 2), none of them −1, 0 or 1.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaGrid {
    values: Vec<f64>,
}

impl AlphaGrid {
    /// `−2 + k·step` for `k = 1, 2, …` below 2, dropping points within
    /// `r_excl` of −1, 0 and 1.
    pub fn uniform(step: f64, r_excl: f64) -> Result<AlphaGrid> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::Precondition(format!("alpha step must be positive, got {step}")));
        }
        if !(r_excl > 0.0 && r_excl.is_finite()) {
            return Err(Error::Precondition(format!(
                "exclusion radius must be positive, got {r_excl}"
            )));
        }
        // guard the last point against 2 − tiny rounding
        let slack = step * 1e-9;
        let values: Vec<f64> = (1..)
            .map(|k| -2.0 + k as f64 * step)
            .take_while(|&v| v < 2.0 - slack)
            .filter(|&v| [(v + 1.0).abs(), v.abs(), (v - 1.0).abs()].iter().all(|&d| d >= r_excl))
            .collect();
        if values.is_empty() {
            return Err(Error::EmptyGrid);
        }
        Ok(AlphaGrid { values })
    }

    /// Explicit orders; they are sorted and must all be admissible.
    pub fn from_values(mut values: Vec<f64>) -> Result<AlphaGrid> {
        if values.is_empty() {
            return Err(Error::EmptyGrid);
        }
        if let Some(v) = values.iter().find(|v| !admissible_alpha(**v)) {
            return Err(Error::Precondition(format!(
                "order {v} is outside (-2, 2) minus {{-1, 0, 1}}"
            )));
        }
        values.sort_by(f64::total_cmp);
        values.dedup();
        Ok(AlphaGrid { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn make_grid(step: f64, r_excl: f64) -> Result<AlphaGrid> {
    AlphaGrid::uniform(step, r_excl)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootEntry {
    pub root: Vec<Complex64>,
    pub residual: f64,
    pub iterations: usize,
    pub alpha: f64,
    pub step_norm: f64,
}

impl RootEntry {
    fn from_record(rec: &RunRecord) -> RootEntry {
        RootEntry {
            root: rec.final_x.clone(),
            residual: rec.residual,
            iterations: rec.iterations,
            alpha: rec.alpha,
            step_norm: rec.step_norm,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Offer {
    /// Not a converged run.
    Ignored,
    Appended,
    /// Took the place of the entry at this index (same root, fewer
    /// iterations, or as many with no larger residual).
    Replaced(usize),
    /// Matched an existing root and was dropped.
    Merged,
}

/// Roots kept pairwise apart: `‖a − b‖₂ > ε · max(‖a‖₂, ‖b‖₂)`, or
/// `‖a − b‖₂ > ε` when both are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct RootRegistry {
    entries: Vec<RootEntry>,
    eps: f64,
}

impl RootRegistry {
    pub fn new(eps: f64) -> RootRegistry {
        RootRegistry {
            entries: Vec::new(),
            eps,
        }
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn entries(&self) -> &[RootEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_close(&self, a: &[Complex64], b: &[Complex64]) -> bool {
        let d = norm2(&sub_vec(a, b));
        let scale = norm2(a).max(norm2(b));
        if scale == 0.0 {
            d <= self.eps
        } else {
            d <= self.eps * scale
        }
    }

    /// Fewer iterations wins; among equally fast runs the smaller residual.
    fn improves(rec: &RunRecord, e: &RootEntry) -> bool {
        rec.iterations < e.iterations
            || (rec.iterations == e.iterations && rec.residual <= e.residual)
    }

    pub fn offer(&mut self, rec: &RunRecord) -> Offer {
        if rec.outcome != Outcome::Converged {
            return Offer::Ignored;
        }
        let close: Vec<usize> = (0..self.entries.len())
            .filter(|&i| self.is_close(&self.entries[i].root, &rec.final_x))
            .collect();
        match close.as_slice() {
            [] => {
                self.entries.push(RootEntry::from_record(rec));
                Offer::Appended
            }
            // with two or more matches a swap could bring those entries
            // within ε of each other
            [i] if Self::improves(rec, &self.entries[*i]) => {
                self.entries[*i] = RootEntry::from_record(rec);
                Offer::Replaced(*i)
            }
            _ => Offer::Merged,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub registry: RootRegistry,
    /// One record per grid point, in grid order.
    pub records: Vec<RunRecord>,
}

/// Run `kind` from `x0` at every order of `grid` on `jobs` worker threads
/// (0 means one per core), then fold the converged runs into a registry in
/// ascending `α`. The result does not depend on `jobs`.
pub fn sweep(
    f: &SystemF,
    kind: SolverKind,
    grid: &AlphaGrid,
    x0: &[Complex64],
    cfg: &SolverConfig,
    eps_dedup: f64,
    jobs: usize,
) -> Result<SweepResult> {
    if !(eps_dedup > 0.0 && eps_dedup.is_finite()) {
        return Err(Error::Precondition(format!(
            "dedup tolerance must be positive, got {eps_dedup}"
        )));
    }
    let one = |alpha: &f64| run(f, kind, *alpha, x0, cfg);
    let records: Vec<RunRecord> = if jobs == 1 {
        grid.values().iter().map(one).collect::<Result<_>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::Precondition(format!("cannot start worker pool: {e}")))?;
        pool.install(|| grid.values().par_iter().map(one).collect::<Result<_>>())?
    };
    let mut registry = RootRegistry::new(eps_dedup);
    for rec in &records {
        registry.offer(rec);
    }
    Ok(SweepResult { registry, records })
}
