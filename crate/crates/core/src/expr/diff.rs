use num_complex::Complex64;

use super::{Expr, Func};

fn is_zero(e: &Expr) -> bool {
    matches!(e, Expr::Const(c) if c.re == 0.0 && c.im == 0.0)
}

fn is_one(e: &Expr) -> bool {
    matches!(e, Expr::Const(c) if c.re == 1.0 && c.im == 0.0)
}

fn zero() -> Expr {
    Expr::real(0.0)
}

fn add(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (a, b) if is_zero(&b) => a,
        (a, b) if is_zero(&a) => b,
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x + y),
        (a, b) => Expr::Add(Box::new(a), Box::new(b)),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (a, b) if is_zero(&b) => a,
        (a, b) if is_zero(&a) => neg(b),
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x - y),
        (a, b) => Expr::Sub(Box::new(a), Box::new(b)),
    }
}

fn neg(a: Expr) -> Expr {
    match a {
        Expr::Const(c) => Expr::Const(-c),
        Expr::Neg(inner) => *inner,
        a => Expr::Neg(Box::new(a)),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    if is_zero(&a) || is_zero(&b) {
        return zero();
    }
    match (a, b) {
        (a, b) if is_one(&a) => b,
        (a, b) if is_one(&b) => a,
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x * y),
        (a, b) => Expr::Mul(Box::new(a), Box::new(b)),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    if is_zero(&a) {
        return zero();
    }
    if is_one(&b) {
        return a;
    }
    Expr::Div(Box::new(a), Box::new(b))
}

fn pow(a: Expr, p: f64) -> Expr {
    if p == 0.0 {
        return Expr::real(1.0);
    }
    if p == 1.0 {
        return a;
    }
    Expr::Pow(Box::new(a), p)
}

fn call(f: Func, a: &Expr) -> Expr {
    Expr::Call(f, Box::new(a.clone()))
}

impl Expr {
    /// Symbolic partial derivative with respect to variable `var` (0-based),
    /// with light folding of zeros and ones.
    pub fn derivative(&self, var: usize) -> Expr {
        if !self.depends_on(var) {
            return zero();
        }
        match self {
            Expr::Const(_) => zero(),
            Expr::Var(v) => Expr::real(if *v == var { 1.0 } else { 0.0 }),
            Expr::Neg(a) => neg(a.derivative(var)),
            Expr::Add(a, b) => add(a.derivative(var), b.derivative(var)),
            Expr::Sub(a, b) => sub(a.derivative(var), b.derivative(var)),
            Expr::Mul(a, b) => add(
                mul(a.derivative(var), (**b).clone()),
                mul((**a).clone(), b.derivative(var)),
            ),
            Expr::Div(a, b) => {
                // a'/b - a b'/b^2
                let first = div(a.derivative(var), (**b).clone());
                let second = div(
                    mul((**a).clone(), b.derivative(var)),
                    pow((**b).clone(), 2.0),
                );
                sub(first, second)
            }
            Expr::Pow(a, p) => mul(
                mul(Expr::Const(Complex64::new(*p, 0.0)), pow((**a).clone(), p - 1.0)),
                a.derivative(var),
            ),
            Expr::Call(f, a) => {
                let outer = match f {
                    Func::Sin => call(Func::Cos, a),
                    Func::Cos => neg(call(Func::Sin, a)),
                    Func::Exp => call(Func::Exp, a),
                    Func::Sinh => call(Func::Cosh, a),
                    Func::Cosh => call(Func::Sinh, a),
                };
                mul(outer, a.derivative(var))
            }
        }
    }
}
