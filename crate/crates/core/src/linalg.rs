//! Small dense complex linear algebra: Gaussian elimination with partial
//! pivoting and the norms used by the solvers.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Pivots smaller than this fraction of the largest entry are singular.
pub const PIVOT_THRESHOLD: f64 = 1e-14;

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> CMatrix {
        CMatrix {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> CMatrix {
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diag(diag: &[Complex64]) -> CMatrix {
        let mut m = CMatrix::zeros(diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
    }

    /// Build from rows; every row must have `rows.len()` entries.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<CMatrix> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(CMatrix { n, data })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<CMatrix> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| Complex64::new(v, 0.0)).collect())
            .collect();
        CMatrix::from_rows(&rows)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        CMatrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

impl fmt::Display for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            let row: Vec<String> = self.row(i).iter().map(|z| z.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Solve `a · y = b` by Gaussian elimination with partial pivoting on the
/// largest modulus.
pub fn solve(a: &CMatrix, b: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = a.dim();
    if b.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: b.len(),
        });
    }
    let scale = a.data.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut m = a.clone();
    let mut y = b.to_vec();

    for col in 0..n {
        let (pivot_row, pivot_mod) = (col..n)
            .map(|r| (r, m[(r, col)].norm()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if !(pivot_mod > PIVOT_THRESHOLD * scale) {
            return Err(Error::SingularMatrix {
                column: col,
                pivot: pivot_mod,
            });
        }
        if pivot_row != col {
            for j in 0..n {
                m.data.swap(col * n + j, pivot_row * n + j);
            }
            y.swap(col, pivot_row);
        }
        let pivot = m[(col, col)];
        for r in col + 1..n {
            let factor = m[(r, col)] / pivot;
            if factor.re == 0.0 && factor.im == 0.0 {
                continue;
            }
            m[(r, col)] = Complex64::new(0.0, 0.0);
            for j in col + 1..n {
                let v = m[(col, j)];
                m[(r, j)] -= factor * v;
            }
            let yc = y[col];
            y[r] -= factor * yc;
        }
    }

    for col in (0..n).rev() {
        let tail: Complex64 = (col + 1..n).map(|j| m[(col, j)] * y[j]).sum();
        y[col] = (y[col] - tail) / m[(col, col)];
    }
    Ok(y)
}

/// Euclidean norm `sqrt(Σ|v_j|²)`, scaled to avoid overflow. Any NaN or
/// infinite component gives `+∞`.
pub fn norm2(v: &[Complex64]) -> f64 {
    if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return f64::INFINITY;
    }
    let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    scale * v.iter().map(|z| (z / scale).norm_sqr()).sum::<f64>().sqrt()
}

pub fn sub_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}
