//! Small exact linear algebra over the rationals and over `Q[x]`.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::rational::{self, Rational};

pub type QMatrix = Vec<Vec<Rational>>;

pub fn identity(n: usize) -> QMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { rational::one() } else { rational::zero() }).collect())
        .collect()
}

pub fn matmul(a: &QMatrix, b: &QMatrix) -> QMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut s = rational::zero();
                    for k in 0..inner {
                        if !row[k].is_zero() && !b[k][j].is_zero() {
                            s += &row[k] * &b[k][j];
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

/// Determinant by Gaussian elimination with exact pivots.
pub fn det_q(m: &QMatrix) -> Rational {
    let n = m.len();
    let mut a = m.clone();
    let mut det = rational::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return rational::zero();
        };
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        let piv = a[col][col].clone();
        det *= &piv;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &piv;
            for c in col..n {
                let v = &f * &a[col][c];
                a[r][c] -= v;
            }
        }
    }
    det
}

/// Some solution of `A y = b` (free unknowns set to zero), or `None` when inconsistent.
pub fn solve_consistent(a: &QMatrix, b: &[Rational]) -> Option<Vec<Rational>> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut m: QMatrix = a.iter().zip(b).map(|(r, v)| {
        let mut r = r.clone();
        r.push(v.clone());
        r
    }).collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row == rows {
            break;
        }
        let Some(p) = (row..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(p, row);
        let inv = m[row][col].recip();
        for c in col..=cols {
            m[row][c] *= &inv;
        }
        for r in 0..rows {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..=cols {
                    let v = &f * &m[row][c];
                    m[r][c] -= v;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    if m[row..].iter().any(|r| !r[cols].is_zero()) {
        return None;
    }
    let mut y = vec![rational::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        y[c] = m[i][cols].clone();
    }
    Some(y)
}

/// Unique solution of a square system.
pub fn solve_q(a: &QMatrix, b: &[Rational]) -> Result<Vec<Rational>> {
    if det_q(a).is_zero() {
        return Err(Error::SingularSystem(format!("{0}x{0} matrix is singular", a.len())));
    }
    solve_consistent(a, b).ok_or_else(|| Error::SingularSystem("inconsistent".into()))
}

/// Fraction-free (Bareiss) determinant over `Q[x]`.
pub fn det_poly(m: &[Vec<Poly>]) -> Poly {
    let n = m.len();
    if n == 0 {
        return Poly::one();
    }
    let mut a: Vec<Vec<Poly>> = m.to_vec();
    let mut sign = false;
    let mut prev = Poly::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else {
                return Poly::zero();
            };
            a.swap(p, k);
            sign = !sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                let (q, r) = num.div_rem(&prev);
                debug_assert!(r.is_zero(), "Bareiss division must be exact");
                a[i][j] = q;
            }
        }
        prev = a[k][k].clone();
        for i in k + 1..n {
            a[i][k] = Poly::zero();
        }
    }
    let d = a[n - 1][n - 1].clone();
    if sign {
        -d
    } else {
        d
    }
}
