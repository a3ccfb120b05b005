//! Newton-type iterations and the run loop that classifies each run as
//! converged, diverged or exhausted.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::expr::SystemF;
use crate::fracderiv::{frac_jacobian, DerivKind, FracOperator, NegativePowerRule, DEFAULT_N_TRUNC};
use crate::linalg::{norm2, solve, sub_vec, CMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolverKind {
    ClassicNewton,
    /// Fractional Jacobian at the raw order `α` on every step.
    FracNewtonRaphson,
    /// As above, but the order falls back to 1 near a root (`‖f‖ < δ`) or at
    /// the origin.
    FracNewton,
    FracQuasiNewton,
    FracPseudoNewton,
    ParallelChord,
}

impl SolverKind {
    pub fn is_fractional(self) -> bool {
        !matches!(self, SolverKind::ClassicNewton | SolverKind::ParallelChord)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub tol: f64,
    pub max_iter: usize,
    pub delta: f64,
    pub div_bound: f64,
    pub eps_shift: f64,
    /// Fixed chord slope; `None` uses the diagonal of the classic Jacobian
    /// at `x0`.
    pub chord_slope: Option<f64>,
    pub deriv_kind: DerivKind,
    pub negative_power_rule: NegativePowerRule,
    pub n_trunc: usize,
    pub record_trace: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: 1e-4,
            max_iter: 40,
            delta: 0.5,
            div_bound: 1e6,
            eps_shift: 1e-3,
            chord_slope: None,
            deriv_kind: DerivKind::RiemannLiouville,
            negative_power_rule: NegativePowerRule::default(),
            n_trunc: DEFAULT_N_TRUNC,
            record_trace: false,
        }
    }
}

impl SolverConfig {
    pub fn operator(&self) -> FracOperator {
        FracOperator::new(self.deriv_kind).with_rule(self.negative_power_rule)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Precondition(msg));
        if !(self.tol > 0.0 && self.tol < self.delta && self.delta < 1.0) {
            return fail(format!(
                "need 0 < tol < delta < 1 (tol = {}, delta = {})",
                self.tol, self.delta
            ));
        }
        if self.max_iter < 2 {
            return fail(format!("max_iter must exceed 1 (got {})", self.max_iter));
        }
        if !(self.div_bound > 1.0_f64.max(1.0 / self.tol)) {
            return fail(format!(
                "div_bound {} must exceed max(1, 1/tol)",
                self.div_bound
            ));
        }
        if !(self.eps_shift > 0.0 && self.eps_shift.is_finite()) {
            return fail(format!("eps_shift must be positive (got {})", self.eps_shift));
        }
        if let Some(m) = self.chord_slope {
            if m == 0.0 || !m.is_finite() {
                return fail(format!("chord slope must be finite and nonzero (got {m})"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Converged,
    Diverged,
    Exhausted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    /// Order used to produce this iterate (the nominal order for row 0).
    pub alpha_eff: f64,
    pub x: Vec<Complex64>,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub alpha: f64,
    pub outcome: Outcome,
    pub iterations: usize,
    pub final_x: Vec<Complex64>,
    /// `‖f(final_x)‖₂`
    pub residual: f64,
    /// `‖x_R − x_{R−1}‖₂` for the last step taken (0 when no step was taken).
    pub step_norm: f64,
    /// The error that ended a diverged run, if any.
    pub failure: Option<Error>,
    pub trace: Option<Vec<TraceRow>>,
}

/// Order for the fractional Newton step: `α` away from roots, 1 once
/// `‖f(x)‖ < δ` or at `x = 0`.
pub fn alpha_switch(alpha: f64, x: &[Complex64], fx_norm: f64, delta: f64) -> f64 {
    if fx_norm >= delta && norm2(x) != 0.0 {
        alpha
    } else {
        1.0
    }
}

/// Per-component order: `α` unless the component is exactly zero.
pub fn beta_switch(alpha: f64, xj: Complex64) -> f64 {
    if xj.re != 0.0 || xj.im != 0.0 {
        alpha
    } else {
        1.0
    }
}

fn newton_update(x: &[Complex64], jac: &CMatrix, fx: &[Complex64]) -> Result<Vec<Complex64>> {
    Ok(sub_vec(x, &solve(jac, fx)?))
}

/// `x − J_α(x)⁻¹ f(x)`; order 1 is the classic Newton step.
pub fn step_frac_newton(f: &SystemF, x: &[Complex64], alpha_eff: f64, cfg: &SolverConfig) -> Result<Vec<Complex64>> {
    let fx = f.eval(x)?;
    frac_newton_with(f, x, &fx, alpha_eff, cfg)
}

fn frac_newton_with(
    f: &SystemF,
    x: &[Complex64],
    fx: &[Complex64],
    alpha_eff: f64,
    cfg: &SolverConfig,
) -> Result<Vec<Complex64>> {
    let jac = frac_jacobian(f, alpha_eff, x, cfg.operator(), cfg.n_trunc)?;
    newton_update(x, &jac, fx)
}

/// Linearisation `g(x) = f(x0) + J(x0)·x` frozen at the start of a
/// quasi-Newton run.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiModel {
    pub x0: Vec<Complex64>,
    pub j0: CMatrix,
    pub f0: Vec<Complex64>,
}

impl QuasiModel {
    pub fn new(f: &SystemF, x0: &[Complex64]) -> Result<QuasiModel> {
        Ok(QuasiModel {
            x0: x0.to_vec(),
            j0: f.classic_jacobian(x0)?,
            f0: f.eval(x0)?,
        })
    }

    /// Fractional Jacobian of the linear model at `x`. For variable `j`
    /// everything not involving `x_j` (including the other variables at
    /// their current values) is the constant part.
    pub fn matrix(&self, x: &[Complex64], alpha: f64, op: FracOperator) -> Result<CMatrix> {
        let n = x.len();
        let one = Complex64::new(1.0, 0.0);
        let mut q = CMatrix::zeros(n);
        for j in 0..n {
            let beta = beta_switch(alpha, x[j]);
            let (d_const, d_linear) = if beta == 1.0 {
                (Complex64::new(0.0, 0.0), one)
            } else {
                (op.term(one, 0.0, beta, x[j])?, op.term(one, 1.0, beta, x[j])?)
            };
            for k in 0..n {
                let others: Complex64 = (0..n)
                    .filter(|&l| l != j)
                    .map(|l| self.j0[(k, l)] * x[l])
                    .sum();
                let c = self.f0[k] + others;
                q[(k, j)] = c * d_const + self.j0[(k, j)] * d_linear;
            }
        }
        Ok(q)
    }
}

pub fn step_quasi(
    f: &SystemF,
    x: &[Complex64],
    model: &QuasiModel,
    alpha: f64,
    cfg: &SolverConfig,
) -> Result<Vec<Complex64>> {
    let fx = f.eval(x)?;
    newton_update(x, &model.matrix(x, alpha, cfg.operator())?, &fx)
}

/// Diagonal of the pseudo-Newton scaling: the order-`β_j` derivative of the
/// constant 1 at `x_j`, shifted by `ε`.
pub fn pseudo_scaling(x: &[Complex64], alpha: f64, eps_shift: f64, op: FracOperator) -> Result<Vec<Complex64>> {
    x.iter()
        .map(|&xj| {
            let beta = beta_switch(alpha, xj);
            let d = if beta == 1.0 {
                Complex64::new(0.0, 0.0)
            } else {
                op.term(Complex64::new(1.0, 0.0), 0.0, beta, xj)?
            };
            Ok(d + eps_shift)
        })
        .collect()
}

/// `x − P·f(x)` with `P` diagonal; nothing is inverted.
pub fn step_pseudo(f: &SystemF, x: &[Complex64], alpha: f64, cfg: &SolverConfig) -> Result<Vec<Complex64>> {
    let fx = f.eval(x)?;
    pseudo_with(x, &fx, alpha, cfg)
}

fn pseudo_with(x: &[Complex64], fx: &[Complex64], alpha: f64, cfg: &SolverConfig) -> Result<Vec<Complex64>> {
    let p = pseudo_scaling(x, alpha, cfg.eps_shift, cfg.operator())?;
    Ok(x.iter().zip(&p).zip(fx).map(|((xj, pj), fj)| xj - pj * fj).collect())
}

/// `x − f(x)/m` componentwise.
pub fn step_chord(f: &SystemF, x: &[Complex64], slopes: &[Complex64]) -> Result<Vec<Complex64>> {
    let fx = f.eval(x)?;
    Ok(chord_with(x, &fx, slopes))
}

fn chord_with(x: &[Complex64], fx: &[Complex64], slopes: &[Complex64]) -> Vec<Complex64> {
    x.iter().zip(fx).zip(slopes).map(|((xj, fj), m)| xj - fj / m).collect()
}

/// Chord slopes: the configured constant, or the diagonal of the classic
/// Jacobian at `x0`.
pub fn chord_slopes(f: &SystemF, x0: &[Complex64], cfg: &SolverConfig) -> Result<Vec<Complex64>> {
    let slopes: Vec<Complex64> = match cfg.chord_slope {
        Some(m) => vec![Complex64::new(m, 0.0); x0.len()],
        None => {
            let j = f.classic_jacobian(x0)?;
            (0..x0.len()).map(|i| j[(i, i)]).collect()
        }
    };
    if let Some(i) = slopes.iter().position(|m| m.norm() == 0.0 || !m.norm().is_finite()) {
        return Err(Error::Precondition(format!(
            "chord slope for component {} is {}",
            i + 1,
            slopes[i]
        )));
    }
    Ok(slopes)
}

/// Orders in (−2, 2) other than −1, 0, 1.
pub fn admissible_alpha(alpha: f64) -> bool {
    alpha > -2.0 && alpha < 2.0 && alpha != -1.0 && alpha != 0.0 && alpha != 1.0
}

enum Prepared {
    None,
    Quasi(QuasiModel),
    Chord(Vec<Complex64>),
}

fn is_finite_vec(v: &[Complex64]) -> bool {
    v.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Iterate `kind` from `x0` at order `alpha` (ignored by the classic
/// methods) until the residual drops to `tol`, reaches `div_bound`, a step
/// fails, or `max_iter` steps have been taken.
///
/// Only precondition violations are returned as errors; numerical failures
/// end the run as [`Outcome::Diverged`].
pub fn run(f: &SystemF, kind: SolverKind, alpha: f64, x0: &[Complex64], cfg: &SolverConfig) -> Result<RunRecord> {
    cfg.validate()?;
    f.check_dim(x0)?;
    if !is_finite_vec(x0) {
        return Err(Error::Precondition("x0 must be finite".into()));
    }
    if kind.is_fractional() {
        if norm2(x0) == 0.0 {
            return Err(Error::Precondition(
                "fractional methods need a nonzero initial point".into(),
            ));
        }
        if !admissible_alpha(alpha) {
            return Err(Error::Precondition(format!(
                "order {alpha} is outside (-2, 2) minus {{-1, 0, 1}}"
            )));
        }
    }
    let nominal = if kind.is_fractional() { alpha } else { 1.0 };

    let mut record = RunRecord {
        alpha,
        outcome: Outcome::Diverged,
        iterations: 0,
        final_x: x0.to_vec(),
        residual: f64::INFINITY,
        step_norm: 0.0,
        failure: None,
        trace: cfg.record_trace.then(Vec::new),
    };

    let mut fx = match f.eval(x0) {
        Ok(v) => v,
        Err(e) => {
            record.failure = Some(e);
            return Ok(record);
        }
    };
    record.residual = norm2(&fx);
    if let Some(t) = record.trace.as_mut() {
        t.push(TraceRow {
            iteration: 0,
            alpha_eff: nominal,
            x: x0.to_vec(),
            residual: record.residual,
        });
    }
    if record.residual <= cfg.tol {
        record.outcome = Outcome::Converged;
        return Ok(record);
    }
    if !(record.residual < cfg.div_bound) {
        return Ok(record);
    }

    let prepared = match kind {
        SolverKind::FracQuasiNewton => QuasiModel::new(f, x0).map(Prepared::Quasi),
        SolverKind::ParallelChord => chord_slopes(f, x0, cfg).map(Prepared::Chord),
        _ => Ok(Prepared::None),
    };
    let prepared = match prepared {
        Ok(p) => p,
        Err(e @ Error::Precondition(_)) => return Err(e),
        Err(e) => {
            record.failure = Some(e);
            return Ok(record);
        }
    };

    let mut x = x0.to_vec();
    for i in 1..=cfg.max_iter {
        let alpha_eff = match kind {
            SolverKind::ClassicNewton | SolverKind::ParallelChord => 1.0,
            SolverKind::FracNewton => alpha_switch(alpha, &x, record.residual, cfg.delta),
            _ => alpha,
        };
        let stepped = match (&prepared, kind) {
            (Prepared::Quasi(model), _) => model
                .matrix(&x, alpha, cfg.operator())
                .and_then(|q| newton_update(&x, &q, &fx)),
            (Prepared::Chord(slopes), _) => Ok(chord_with(&x, &fx, slopes)),
            (Prepared::None, SolverKind::FracPseudoNewton) => pseudo_with(&x, &fx, alpha, cfg),
            (Prepared::None, _) => frac_newton_with(f, &x, &fx, alpha_eff, cfg),
        };
        record.iterations = i;
        let next = match stepped {
            Ok(v) if is_finite_vec(&v) => v,
            Ok(_) => {
                record.failure = Some(Error::Overflow(format!("non-finite iterate at step {i}")));
                return Ok(record);
            }
            Err(e) => {
                record.failure = Some(e);
                return Ok(record);
            }
        };
        fx = match f.eval(&next) {
            Ok(v) => v,
            Err(e) => {
                record.failure = Some(e);
                return Ok(record);
            }
        };
        record.step_norm = norm2(&sub_vec(&next, &x));
        record.residual = norm2(&fx);
        x = next;
        record.final_x.clone_from(&x);
        if let Some(t) = record.trace.as_mut() {
            t.push(TraceRow {
                iteration: i,
                alpha_eff,
                x: x.clone(),
                residual: record.residual,
            });
        }
        if record.residual <= cfg.tol {
            record.outcome = Outcome::Converged;
            return Ok(record);
        }
        if !(record.residual < cfg.div_bound) {
            return Ok(record);
        }
    }
    record.outcome = Outcome::Exhausted;
    Ok(record)
}
