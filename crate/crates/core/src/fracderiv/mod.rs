//! Riemann–Liouville and Caputo operators with lower limit 0, applied
//! termwise to fractional power series, and the fractional Jacobian built
//! from them.
//!
//! On a single power the Riemann–Liouville operator of order `α` is
//!
//! ```text
//! D^α x^μ = Γ(μ+1)/Γ(μ−α+1) · x^{μ−α}          μ > −1
//! D^α x^μ = (−1)^α Γ(α−μ)/Γ(−μ) · x^{μ−α}       μ ≤ −1
//! ```
//!
//! Negative `α` gives the fractional integral of order `−α`. A pole of the
//! gamma function in a denominator makes the term vanish, which is how the
//! order-1 derivative annihilates constants.

mod series;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::expr::SystemF;
use crate::linalg::CMatrix;
use crate::specfun::{gamma_ratio, neg_one_pow, principal_pow};

pub use series::{expand, FracSeries, Term, SERIES_ACCURACY_RADIUS};

/// Default number of nonzero non-constant Taylor terms kept by [`expand`].
pub const DEFAULT_N_TRUNC: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum DerivKind {
    #[default]
    RiemannLiouville,
    Caputo,
}

/// Coefficient rule for powers `x^μ` with `μ ≤ −1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum NegativePowerRule {
    /// `(−1)^α Γ(α−μ)/Γ(−μ)`: continuous in `α`, equals `μ x^{μ−1}` at
    /// `α = 1`.
    #[default]
    GammaAlphaMinusMu,
    /// `(−1)^α Γ(−(μ+α))/Γ(−μ)`: has a pole at `α = −μ`, so for `μ = −1` it
    /// blows up as `α → 1`.
    GammaNegMuMinusAlpha,
}

/// The operator family plus the branch choice for negative powers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct FracOperator {
    pub kind: DerivKind,
    pub negative_power_rule: NegativePowerRule,
}

impl FracOperator {
    pub fn new(kind: DerivKind) -> FracOperator {
        FracOperator {
            kind,
            negative_power_rule: NegativePowerRule::default(),
        }
    }

    pub fn with_rule(self, negative_power_rule: NegativePowerRule) -> FracOperator {
        FracOperator {
            negative_power_rule,
            ..self
        }
    }

    /// Multiplier `m` with `D^α x^μ = m · x^{μ−α}`.
    pub fn coefficient(&self, mu: f64, alpha: f64) -> Result<Complex64> {
        match self.kind {
            DerivKind::RiemannLiouville => rl_coefficient(mu, alpha, self.negative_power_rule),
            DerivKind::Caputo => caputo_coefficient(mu, alpha, self.negative_power_rule),
        }
    }

    /// Image of the term `coeff · x^μ` as a new `(coeff, exponent)` pair.
    pub fn transform(&self, coeff: Complex64, mu: f64, alpha: f64) -> Result<(Complex64, f64)> {
        Ok((coeff * self.coefficient(mu, alpha)?, mu - alpha))
    }

    /// `D^α (coeff · x^μ)` evaluated at `x`.
    pub fn term(&self, coeff: Complex64, mu: f64, alpha: f64, x: Complex64) -> Result<Complex64> {
        if x.re == 0.0 && x.im == 0.0 {
            return Err(Error::Domain(
                "fractional operator evaluated at x = 0".into(),
            ));
        }
        let m = self.coefficient(mu, alpha)?;
        if m.re == 0.0 && m.im == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        Ok(coeff * m * principal_pow(x, mu - alpha)?)
    }

    /// Sum of [`FracOperator::term`] over the series; errors name the
    /// offending term.
    pub fn apply(&self, s: &FracSeries, alpha: f64, x: Complex64) -> Result<Complex64> {
        s.terms()
            .iter()
            .enumerate()
            .try_fold(Complex64::new(0.0, 0.0), |acc, (i, t)| {
                Ok(acc + self.term(t.coeff, t.exponent, alpha, x).map_err(|e| e.in_term(i))?)
            })
    }

    /// The transformed series `D^α s`.
    pub fn derivative(&self, s: &FracSeries, alpha: f64) -> Result<FracSeries> {
        let terms = s
            .terms()
            .iter()
            .enumerate()
            .map(|(i, t)| {
                self.transform(t.coeff, t.exponent, alpha)
                    .map_err(|e| e.in_term(i))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FracSeries::new(terms))
    }
}

fn rl_coefficient(mu: f64, alpha: f64, rule: NegativePowerRule) -> Result<Complex64> {
    if mu > -1.0 {
        return Ok(Complex64::new(gamma_ratio(mu + 1.0, mu - alpha + 1.0)?, 0.0));
    }
    let numerator = match rule {
        NegativePowerRule::GammaAlphaMinusMu => alpha - mu,
        NegativePowerRule::GammaNegMuMinusAlpha => -(mu + alpha),
    };
    let ratio = gamma_ratio(numerator, -mu)?;
    if ratio == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(neg_one_pow(alpha) * ratio)
}

fn caputo_coefficient(mu: f64, alpha: f64, rule: NegativePowerRule) -> Result<Complex64> {
    if alpha <= 0.0 {
        return rl_coefficient(mu, alpha, rule);
    }
    let n = alpha.ceil();
    if mu <= n - 1.0 {
        if mu >= 0.0 && mu.fract() == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        return Err(Error::UnsupportedExponent {
            exponent: mu,
            alpha,
        });
    }
    Ok(Complex64::new(gamma_ratio(mu + 1.0, mu - alpha + 1.0)?, 0.0))
}

/// Riemann–Liouville `D^α (coeff · x^μ)` at `x`, default negative-power rule.
pub fn rl_term(coeff: Complex64, mu: f64, alpha: f64, x: Complex64) -> Result<Complex64> {
    FracOperator::new(DerivKind::RiemannLiouville).term(coeff, mu, alpha, x)
}

/// Caputo `D^α (coeff · x^μ)` at `x`. For `α < 0` this is the
/// Riemann–Liouville integral.
pub fn caputo_term(coeff: Complex64, mu: f64, alpha: f64, x: Complex64) -> Result<Complex64> {
    FracOperator::new(DerivKind::Caputo).term(coeff, mu, alpha, x)
}

pub fn frac_deriv_series(s: &FracSeries, alpha: f64, x: Complex64, kind: DerivKind) -> Result<Complex64> {
    FracOperator::new(kind).apply(s, alpha, x)
}

/// Matrix of fractional partials `∂_j^α f_k` at `x`. Order 1 is the classic
/// Jacobian exactly.
pub fn frac_jacobian(
    f: &SystemF,
    alpha: f64,
    x: &[Complex64],
    op: FracOperator,
    n_trunc: usize,
) -> Result<CMatrix> {
    if alpha == 1.0 {
        return f.classic_jacobian(x);
    }
    f.check_dim(x)?;
    if let Some(j) = x.iter().position(|z| z.re == 0.0 && z.im == 0.0) {
        return Err(Error::SingularPoint(j));
    }
    let n = f.dim();
    let mut m = CMatrix::zeros(n);
    for (k, fk) in f.components().iter().enumerate() {
        for j in 0..n {
            let s = expand(fk, j, x, n_trunc)?;
            m[(k, j)] = op.apply(&s, alpha, x[j])?;
        }
    }
    Ok(m)
}
