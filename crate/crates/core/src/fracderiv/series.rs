use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::expr::{complex_div, Expr, Func};
use crate::specfun::principal_pow;

/// Exponents closer than this (relative) are merged into one term.
const EXPONENT_MERGE_TOL: f64 = 1e-12;

/// Beyond this modulus the truncated Taylor expansions lose accuracy.
pub const SERIES_ACCURACY_RADIUS: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub coeff: Complex64,
    pub exponent: f64,
}

/// Finite sum `Σ c_k · x^{μ_k}` with lower limit 0, exponents strictly
/// increasing and no zero coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FracSeries {
    terms: Vec<Term>,
}

impl FracSeries {
    pub fn zero() -> FracSeries {
        FracSeries::default()
    }

    pub fn new(terms: impl IntoIterator<Item = (Complex64, f64)>) -> FracSeries {
        let mut raw: Vec<Term> = terms
            .into_iter()
            .map(|(coeff, exponent)| Term { coeff, exponent })
            .collect();
        raw.sort_by(|a, b| a.exponent.total_cmp(&b.exponent));
        let mut merged: Vec<Term> = Vec::with_capacity(raw.len());
        for t in raw {
            match merged.last_mut() {
                Some(last)
                    if (last.exponent - t.exponent).abs()
                        <= EXPONENT_MERGE_TOL * last.exponent.abs().max(1.0) =>
                {
                    last.coeff += t.coeff;
                }
                _ => merged.push(t),
            }
        }
        merged.retain(|t| t.coeff.re != 0.0 || t.coeff.im != 0.0);
        FracSeries { terms: merged }
    }

    pub fn constant(c: Complex64) -> FracSeries {
        FracSeries::new([(c, 0.0)])
    }

    pub fn monomial(coeff: Complex64, exponent: f64) -> FracSeries {
        FracSeries::new([(coeff, exponent)])
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_monomial(&self) -> Option<Term> {
        match self.terms.as_slice() {
            [t] => Some(*t),
            _ => None,
        }
    }

    pub fn add(&self, other: &FracSeries) -> FracSeries {
        FracSeries::new(
            self.pairs().chain(other.pairs()),
        )
    }

    pub fn neg(&self) -> FracSeries {
        self.scale(Complex64::new(-1.0, 0.0))
    }

    pub fn scale(&self, c: Complex64) -> FracSeries {
        FracSeries::new(self.terms.iter().map(|t| (t.coeff * c, t.exponent)))
    }

    pub fn mul(&self, other: &FracSeries) -> FracSeries {
        FracSeries::new(self.terms.iter().flat_map(|a| {
            other
                .terms
                .iter()
                .map(move |b| (a.coeff * b.coeff, a.exponent + b.exponent))
        }))
    }

    fn pairs(&self) -> impl Iterator<Item = (Complex64, f64)> + '_ {
        self.terms.iter().map(|t| (t.coeff, t.exponent))
    }

    /// `(a, b)` when the series is `a + b·x`.
    fn as_affine(&self) -> Option<(Complex64, Complex64)> {
        let mut a = Complex64::new(0.0, 0.0);
        let mut b = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            if t.exponent == 0.0 {
                a = t.coeff;
            } else if t.exponent == 1.0 {
                b = t.coeff;
            } else {
                return None;
            }
        }
        Some((a, b))
    }

    /// Evaluate at `x` on the principal branch.
    pub fn eval(&self, x: Complex64) -> Result<Complex64> {
        self.terms.iter().try_fold(Complex64::new(0.0, 0.0), |acc, t| {
            Ok(acc + t.coeff * principal_pow(x, t.exponent)?)
        })
    }
}

/// Taylor coefficients `f^{(p)}(a)` cycle with this period.
fn derivative_at(f: Func, a: Complex64, p: usize) -> Complex64 {
    match f {
        Func::Sin => match p % 4 {
            0 => a.sin(),
            1 => a.cos(),
            2 => -a.sin(),
            _ => -a.cos(),
        },
        Func::Cos => match p % 4 {
            0 => a.cos(),
            1 => -a.sin(),
            2 => -a.cos(),
            _ => a.sin(),
        },
        Func::Exp => a.exp(),
        Func::Sinh => {
            if p.is_multiple_of(2) {
                a.sinh()
            } else {
                a.cosh()
            }
        }
        Func::Cosh => {
            if p.is_multiple_of(2) {
                a.cosh()
            } else {
                a.sinh()
            }
        }
    }
}

/// `f(a + b·x)` expanded about `x = 0`: the constant term plus the first
/// `n_trunc` nonzero non-constant terms.
fn taylor(f: Func, a: Complex64, b: Complex64, n_trunc: usize) -> FracSeries {
    let mut terms = vec![(derivative_at(f, a, 0), 0.0)];
    if b.re == 0.0 && b.im == 0.0 {
        return FracSeries::new(terms);
    }
    let mut factor = Complex64::new(1.0, 0.0);
    let mut kept = 0;
    let mut p = 0;
    // every other derivative can vanish (sin/cos at 0), never more
    while kept < n_trunc && p < 2 * n_trunc + 2 {
        p += 1;
        factor = factor * b / p as f64;
        let c = derivative_at(f, a, p) * factor;
        if c.re != 0.0 || c.im != 0.0 {
            terms.push((c, p as f64));
            kept += 1;
        }
    }
    FracSeries::new(terms)
}

/// Expand `e` as a fractional power series in variable `var` (0-based), with
/// every other variable frozen at its value in `at`.
///
/// Polynomials (any real exponents on monomials) expand exactly. The five
/// elementary functions must have an affine argument `a + b·x` and are
/// truncated after `n_trunc` nonzero non-constant Taylor terms. Division is
/// only allowed by a monomial.
pub fn expand(e: &Expr, var: usize, at: &[Complex64], n_trunc: usize) -> Result<FracSeries> {
    if !e.depends_on(var) {
        return Ok(FracSeries::constant(e.eval(at, 0)?));
    }
    Ok(match e {
        Expr::Const(c) => FracSeries::constant(*c),
        Expr::Var(_) => FracSeries::monomial(Complex64::new(1.0, 0.0), 1.0),
        Expr::Neg(a) => expand(a, var, at, n_trunc)?.neg(),
        Expr::Add(a, b) => expand(a, var, at, n_trunc)?.add(&expand(b, var, at, n_trunc)?),
        Expr::Sub(a, b) => expand(a, var, at, n_trunc)?.add(&expand(b, var, at, n_trunc)?.neg()),
        Expr::Mul(a, b) => expand(a, var, at, n_trunc)?.mul(&expand(b, var, at, n_trunc)?),
        Expr::Div(a, b) => {
            let num = expand(a, var, at, n_trunc)?;
            let den = expand(b, var, at, n_trunc)?;
            let Some(t) = den.as_monomial() else {
                return Err(Error::UnsupportedExpr(format!(
                    "division by non-monomial '{b}' in x{}",
                    var + 1
                )));
            };
            let inv = complex_div(Complex64::new(1.0, 0.0), t.coeff)
                .ok_or(Error::DivByZero { component: 0 })?;
            num.mul(&FracSeries::monomial(inv, -t.exponent))
        }
        Expr::Pow(a, p) => {
            let base = expand(a, var, at, n_trunc)?;
            if let Some(t) = base.as_monomial() {
                FracSeries::monomial(principal_pow(t.coeff, *p)?, t.exponent * p)
            } else if base.is_empty() {
                FracSeries::constant(principal_pow(Complex64::new(0.0, 0.0), *p)?)
            } else if p.fract() == 0.0 && *p >= 0.0 {
                (0..*p as usize).fold(FracSeries::constant(Complex64::new(1.0, 0.0)), |acc, _| {
                    acc.mul(&base)
                })
            } else {
                return Err(Error::UnsupportedExpr(format!(
                    "non-integer power {p} of a sum '{a}'"
                )));
            }
        }
        Expr::Call(f, a) => {
            let arg = expand(a, var, at, n_trunc)?;
            let Some((a0, b)) = arg.as_affine() else {
                return Err(Error::UnsupportedExpr(format!(
                    "{}() of a non-affine argument '{a}' in x{}",
                    f.name(),
                    var + 1
                )));
            };
            if at.get(var).is_some_and(|x| (b * x).norm() > SERIES_ACCURACY_RADIUS) {
                log::warn!(
                    "truncated {}() series evaluated far from the origin (|b·x| > {SERIES_ACCURACY_RADIUS})",
                    f.name()
                );
            }
            taylor(*f, a0, b, n_trunc)
        }
    })
}
