//! Gamma function and principal-branch powers.
//!
//! Gamma uses the g = 7, n = 9 Lanczos approximation for `Re z >= 0.5` and
//! the reflection formula `Γ(z)Γ(1−z) = π / sin(πz)` below that. Only real
//! orders and exponents reach the fractional operators, so the real-argument
//! entry points ([`gamma_real`], [`rgamma`], [`gamma_ratio`]) are the hot
//! path; [`gamma`] handles the general complex case.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Distance from a non-positive integer below which an argument is a pole.
const POLE_RADIUS: f64 = 1e-12;

/// ln(2π)/2
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

fn near_pole(re: f64, im: f64) -> bool {
    if im.abs() > POLE_RADIUS || re > 0.5 {
        return false;
    }
    (re - re.round()).abs() < POLE_RADIUS
}

/// `sin(πx)` with exact zeros at the integers.
pub fn sin_pi(x: f64) -> f64 {
    let mut r = x % 2.0;
    if r > 1.0 {
        r -= 2.0;
    } else if r < -1.0 {
        r += 2.0;
    }
    if r == 0.0 || r.abs() == 1.0 {
        return 0.0;
    }
    if r.abs() == 0.5 {
        return r.signum();
    }
    (PI * r).sin()
}

/// `cos(πx)` with exact zeros at the half-integers.
pub fn cos_pi(x: f64) -> f64 {
    let mut r = x.abs() % 2.0;
    if r > 1.0 {
        r = 2.0 - r;
    }
    if r == 0.5 {
        return 0.0;
    }
    if r == 0.0 {
        return 1.0;
    }
    if r == 1.0 {
        return -1.0;
    }
    (PI * r).cos()
}

fn lanczos_series_real(z: f64) -> f64 {
    LANCZOS_COEF[1..]
        .iter()
        .enumerate()
        .fold(LANCZOS_COEF[0], |acc, (i, c)| acc + c / (z + (i + 1) as f64))
}

fn lanczos_series(z: Complex64) -> Complex64 {
    LANCZOS_COEF[1..]
        .iter()
        .enumerate()
        .fold(Complex64::new(LANCZOS_COEF[0], 0.0), |acc, (i, c)| {
            acc + c / (z + (i + 1) as f64)
        })
}

/// Γ(x) for real `x`.
pub fn gamma_real(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("gamma of non-finite {x}")));
    }
    if near_pole(x, 0.0) {
        return Err(Error::Pole(x));
    }
    let value = if x < 0.5 {
        let reflected = gamma_real(1.0 - x)?;
        PI / (sin_pi(x) * reflected)
    } else {
        let z = x - 1.0;
        let t = z + LANCZOS_G + 0.5;
        // split the power so t^(z+1/2) does not overflow before e^-t damps it
        let half = t.powf(0.5 * (z + 0.5));
        (2.0 * PI).sqrt() * half * (-t).exp() * half * lanczos_series_real(z)
    };
    if !value.is_finite() {
        return Err(Error::Overflow(format!("gamma({x})")));
    }
    Ok(value)
}

/// Γ(z) for complex `z`.
pub fn gamma(z: Complex64) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain(format!("gamma of non-finite {z}")));
    }
    if z.im == 0.0 {
        return gamma_real(z.re).map(|v| Complex64::new(v, 0.0));
    }
    let value = if z.re < 0.5 {
        let reflected = gamma(Complex64::new(1.0, 0.0) - z)?;
        Complex64::new(PI, 0.0) / (complex_sin_pi(z) * reflected)
    } else {
        let z = z - 1.0;
        let t = z + LANCZOS_G + 0.5;
        let log = HALF_LN_2PI + (z + 0.5) * t.ln() - t;
        log.exp() * lanczos_series(z)
    };
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(Error::Overflow(format!("gamma({z})")));
    }
    Ok(value)
}

fn complex_sin_pi(z: Complex64) -> Complex64 {
    let y = PI * z.im;
    Complex64::new(sin_pi(z.re) * y.cosh(), cos_pi(z.re) * y.sinh())
}

/// ln Γ(x) for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("ln_gamma needs a positive argument, got {x}")));
    }
    if x < 0.5 {
        // Γ(x) = Γ(x+1)/x
        return Ok(ln_gamma(x + 1.0)? - x.ln());
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    Ok(HALF_LN_2PI + (z + 0.5) * t.ln() - t + lanczos_series_real(z).ln())
}

/// 1/Γ(x), which is entire: the poles of Γ map to exact zeros.
pub fn rgamma(x: f64) -> f64 {
    if near_pole(x, 0.0) {
        return 0.0;
    }
    match gamma_real(x) {
        Ok(v) => 1.0 / v,
        // |Γ| beyond f64 range means 1/Γ underflows
        Err(_) => 0.0,
    }
}

/// Γ(a)/Γ(b). A pole in the denominator gives 0; a pole in the numerator
/// is an error.
pub fn gamma_ratio(a: f64, b: f64) -> Result<f64> {
    if near_pole(a, 0.0) {
        return Err(Error::Pole(a));
    }
    if near_pole(b, 0.0) {
        return Ok(0.0);
    }
    const DIRECT_LIMIT: f64 = 170.0;
    if a.abs() <= DIRECT_LIMIT && b.abs() <= DIRECT_LIMIT {
        return Ok(gamma_real(a)? * rgamma(b));
    }
    if a > 0.0 && b > 0.0 {
        let value = (ln_gamma(a)? - ln_gamma(b)?).exp();
        if !value.is_finite() {
            return Err(Error::Overflow(format!("gamma({a})/gamma({b})")));
        }
        return Ok(value);
    }
    Err(Error::Overflow(format!("gamma({a})/gamma({b})")))
}

/// `base^exponent` on the principal branch, `exp(exponent · Log base)` with
/// `arg ∈ (−π, π]`. Positive real bases return real results; negative real
/// bases use exact multiples of π for the phase.
pub fn principal_pow(base: Complex64, exponent: f64) -> Result<Complex64> {
    if !base.re.is_finite() || !base.im.is_finite() || !exponent.is_finite() {
        return Err(Error::Domain(format!("non-finite power {base}^{exponent}")));
    }
    if base.re == 0.0 && base.im == 0.0 {
        return if exponent > 0.0 {
            Ok(Complex64::new(0.0, 0.0))
        } else if exponent == 0.0 {
            Ok(Complex64::new(1.0, 0.0))
        } else {
            Err(Error::Domain(format!("0 raised to negative power {exponent}")))
        };
    }
    if base.im == 0.0 {
        let modulus = base.re.abs().powf(exponent);
        return Ok(if base.re > 0.0 {
            Complex64::new(modulus, 0.0)
        } else {
            // -0.0 imaginary parts are treated as +0, i.e. arg = π
            Complex64::new(modulus * cos_pi(exponent), modulus * sin_pi(exponent))
        });
    }
    let (r, theta) = base.to_polar();
    Ok(Complex64::from_polar(r.powf(exponent), theta * exponent))
}

/// (−1)^α on the principal branch, `e^{iπα}`.
pub fn neg_one_pow(alpha: f64) -> Complex64 {
    Complex64::new(cos_pi(alpha), sin_pi(alpha))
}
