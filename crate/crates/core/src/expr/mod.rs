//! Expression trees over complex variables `x1..xn`.
//!
//! The textual grammar (used by problem files) is a plain infix language:
//!
//! ```text
//! system  := expr ((';' | newline) expr)*
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := primary ('^' unary)?          -- exponent must be a real constant
//! primary := number | 'pi' | 'e' | var | func '(' expr ')' | '(' expr ')'
//! var     := 'x' digits                    -- 'x' alone when n = 1
//! func    := 'sin' | 'cos' | 'exp' | 'sinh' | 'cosh'
//! ```
//!
//! `^` binds tighter than unary minus and is right associative, so `-x^2`
//! is `-(x^2)` and `x^2^3` is `x^8`.

mod diff;
mod parse;

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::specfun::principal_pow;

pub use parse::{parse, parse_equations, parse_expr};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sinh,
    Cosh,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            _ => return None,
        })
    }

    pub fn apply(self, z: Complex64) -> Complex64 {
        match self {
            Func::Sin => z.sin(),
            Func::Cos => z.cos(),
            Func::Exp => z.exp(),
            Func::Sinh => z.sinh(),
            Func::Cosh => z.cosh(),
        }
    }
}

/// Expression node. Variables are stored 0-based (`Var(0)` prints as `x1`).
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(Complex64),
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, f64),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn real(value: f64) -> Expr {
        Expr::Const(Complex64::new(value, 0.0))
    }

    pub fn as_const(&self) -> Option<Complex64> {
        match self {
            Expr::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn depends_on(&self, var: usize) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Var(v) => *v == var,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.depends_on(var),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.depends_on(var) || b.depends_on(var)
            }
        }
    }

    /// Largest variable index used, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Const(_) => None,
            Expr::Var(v) => Some(*v),
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.max_var(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.max_var().max(b.max_var())
            }
        }
    }

    /// Evaluate at `x`. Division by an exact zero is reported against
    /// `component`.
    pub fn eval(&self, x: &[Complex64], component: usize) -> Result<Complex64> {
        Ok(match self {
            Expr::Const(c) => *c,
            Expr::Var(v) => x[*v],
            Expr::Neg(a) => -a.eval(x, component)?,
            Expr::Add(a, b) => a.eval(x, component)? + b.eval(x, component)?,
            Expr::Sub(a, b) => a.eval(x, component)? - b.eval(x, component)?,
            Expr::Mul(a, b) => a.eval(x, component)? * b.eval(x, component)?,
            Expr::Div(a, b) => {
                let num = a.eval(x, component)?;
                let den = b.eval(x, component)?;
                complex_div(num, den).ok_or(Error::DivByZero { component })?
            }
            Expr::Pow(a, p) => pow_real_exponent(a.eval(x, component)?, *p)
                .ok_or(Error::DivByZero { component })??,
            Expr::Call(f, a) => f.apply(a.eval(x, component)?),
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Const(c) if c.im != 0.0 || c.re.is_sign_negative() => 3,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }
}

/// `num / den`, exact for real denominators; `None` on a zero denominator.
pub(crate) fn complex_div(num: Complex64, den: Complex64) -> Option<Complex64> {
    if den.re == 0.0 && den.im == 0.0 {
        return None;
    }
    if den.im == 0.0 {
        return Some(Complex64::new(num.re / den.re, num.im / den.re));
    }
    Some(num / den)
}

/// Integer exponents use repeated multiplication so real inputs stay exactly
/// real; other exponents go through the principal branch. `None` means a
/// zero base with a negative exponent.
pub(crate) fn pow_real_exponent(base: Complex64, p: f64) -> Option<Result<Complex64>> {
    if p.fract() == 0.0 && p.abs() <= i32::MAX as f64 {
        let k = p as i32;
        if k >= 0 {
            return Some(Ok(base.powi(k)));
        }
        let positive = base.powi(-k);
        return complex_div(Complex64::new(1.0, 0.0), positive).map(Ok);
    }
    if base.re == 0.0 && base.im == 0.0 && p < 0.0 {
        return None;
    }
    Some(principal_pow(base, p))
}

fn fmt_number(f: &mut fmt::Formatter<'_>, v: f64) -> fmt::Result {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        write!(f, "{}", v as i64)
    } else {
        write!(f, "{v}")
    }
}

fn fmt_child(f: &mut fmt::Formatter<'_>, child: &Expr, min_prec: u8) -> fmt::Result {
    if child.precedence() < min_prec {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) if c.im == 0.0 => fmt_number(f, c.re),
            Expr::Const(c) => write!(f, "({} + {}*i)", c.re, c.im),
            Expr::Var(v) => write!(f, "x{}", v + 1),
            Expr::Neg(a) => {
                write!(f, "-")?;
                fmt_child(f, a, 3)
            }
            Expr::Add(a, b) => {
                fmt_child(f, a, 1)?;
                match b.as_const() {
                    Some(c) if c.im == 0.0 && c.re.is_sign_negative() => {
                        write!(f, " - ")?;
                        fmt_number(f, -c.re)
                    }
                    _ => {
                        write!(f, " + ")?;
                        fmt_child(f, b, 2)
                    }
                }
            }
            Expr::Sub(a, b) => {
                fmt_child(f, a, 1)?;
                write!(f, " - ")?;
                fmt_child(f, b, 2)
            }
            Expr::Mul(a, b) => {
                fmt_child(f, a, 2)?;
                write!(f, " * ")?;
                fmt_child(f, b, 3)
            }
            Expr::Div(a, b) => {
                fmt_child(f, a, 2)?;
                write!(f, " / ")?;
                fmt_child(f, b, 3)
            }
            Expr::Pow(a, p) => {
                fmt_child(f, a, 5)?;
                write!(f, "^")?;
                fmt_number(f, *p)
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

/// A square system `f: C^n -> C^n` with its symbolic partial derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemF {
    n: usize,
    components: Vec<Expr>,
    partials: Vec<Vec<Expr>>,
}

impl SystemF {
    pub fn new(components: Vec<Expr>) -> Result<SystemF> {
        let n = components.len();
        if n == 0 {
            return Err(Error::Arity("a system needs at least one equation".into()));
        }
        for (k, e) in components.iter().enumerate() {
            if let Some(v) = e.max_var() {
                if v >= n {
                    return Err(Error::Arity(format!(
                        "equation {} uses x{} but the system has dimension {n}",
                        k + 1,
                        v + 1
                    )));
                }
            }
        }
        let partials = components
            .iter()
            .map(|e| (0..n).map(|j| e.derivative(j)).collect())
            .collect();
        Ok(SystemF {
            n,
            components,
            partials,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    /// Symbolic `∂f_k/∂x_j`.
    pub fn partial(&self, k: usize, j: usize) -> &Expr {
        &self.partials[k][j]
    }

    pub(crate) fn check_dim(&self, x: &[Complex64]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: x.len(),
            });
        }
        Ok(())
    }

    pub fn eval(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_dim(x)?;
        self.components
            .iter()
            .enumerate()
            .map(|(k, e)| e.eval(x, k))
            .collect()
    }

    /// Jacobian `∂f_k/∂x_j` at `x` from the symbolic partials.
    pub fn classic_jacobian(&self, x: &[Complex64]) -> Result<CMatrix> {
        self.check_dim(x)?;
        let mut m = CMatrix::zeros(self.n);
        for k in 0..self.n {
            for j in 0..self.n {
                m[(k, j)] = self.partials[k][j].eval(x, k)?;
            }
        }
        Ok(m)
    }
}

impl fmt::Display for SystemF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, e) in self.components.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}
