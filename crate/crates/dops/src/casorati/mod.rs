//! Casorati determinants of d-OPS and co-polynomial entries.
//!
//! Column notation: `col(s, m)` is `(P^{(s)}_m, …, P^{(s)}_{m+d})`.
//! Δ^{(r)}_n has entry (i, j) = `P^{(r+j)}_{n+i-j}` for 0 ≤ i, j ≤ d.

mod cd;
mod nabla;
mod transfer;

pub use cd::{verify_cd, CdKind, CdParams, CdReport};
pub use nabla::{verify_nabla, NablaParams, Selector};
pub use transfer::{transfer_tp, TransferReport};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::det_poly;
use crate::poly::Poly;
use crate::rational::{self, Rational};
use crate::seq::{AssocTable, RecCoeffs};

/// Square matrix of polynomial entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix(pub Vec<Vec<Poly>>);

impl PolyMatrix {
    pub fn from_columns(cols: Vec<Vec<Poly>>) -> Self {
        let n = cols.len();
        PolyMatrix((0..n).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect())
    }

    pub fn det(&self) -> Poly {
        det(self)
    }
}

pub fn det(m: &PolyMatrix) -> Poly {
    det_poly(&m.0)
}

/// Residual report shared by the determinant checks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Residual {
    pub lhs: Poly,
    pub rhs: Poly,
    pub residual: Poly,
}

impl Residual {
    pub fn new(lhs: Poly, rhs: Poly) -> Self {
        let residual = &lhs - &rhs;
        Residual { lhs, rhs, residual }
    }

    pub fn is_zero(&self) -> bool {
        self.residual.is_zero()
    }
}

/// Closed value `(-1)^{(d+1)n} Π_{i=1}^n γ^0_{i+r}`.
pub fn delta_value(c: &RecCoeffs, n: usize, r: usize) -> Result<Rational> {
    Ok(rational::sign(((c.d + 1) * n) as i64) * c.gamma0_product(n, r)?)
}

pub(crate) fn column(t: &AssocTable, d: usize, s: usize, m: i64) -> Result<Vec<Poly>> {
    (0..=d as i64).map(|i| t.p(s, m + i).cloned()).collect()
}

pub(crate) fn delta_det(t: &AssocTable, d: usize, n: usize, r: usize) -> Result<Poly> {
    let m = (0..=d)
        .map(|i| (0..=d).map(|j| t.p(r + j, n as i64 + i as i64 - j as i64).cloned()).collect())
        .collect::<Result<Vec<Vec<Poly>>>>()?;
    Ok(det_poly(&m))
}

/// Horizon needed for determinants touching `P^{(s)}_m` with s + m ≤ `reach`.
pub(crate) fn table(c: &RecCoeffs, rmax: usize, nmax: usize) -> Result<AssocTable> {
    AssocTable::new(c, rmax, nmax)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeltaCheck {
    pub direct: Poly,
    pub companion: Poly,
    #[serde(with = "rational::serde_rat")]
    pub expected: Rational,
    /// `direct - expected`.
    pub residual: Poly,
}

impl DeltaCheck {
    pub fn is_exact(&self) -> bool {
        self.residual.is_zero() && self.companion == self.direct
    }
}

/// Transfer matrix advancing `(y_{m-d}, …, y_m)` one step in the r-associated recurrence.
pub fn companion(c: &RecCoeffs, m: usize, r: usize) -> Result<PolyMatrix> {
    let d = c.d;
    let mut rows = vec![vec![Poly::zero(); d + 1]; d + 1];
    for (i, row) in rows.iter_mut().enumerate().take(d) {
        row[i + 1] = Poly::one();
    }
    for k in 0..d {
        let j = (r + m + k + 1) as i64 - d as i64;
        if j >= 1 {
            rows[d][k] = Poly::constant(-c.gamma(k, j as usize)?.clone());
        }
    }
    rows[d][d] = Poly::linear(c.beta(r + m)?);
    Ok(PolyMatrix(rows))
}

/// Δ^{(r)}_n by direct determinant and by the product of companion determinants.
pub fn verify_delta(c: &RecCoeffs, n: usize, r: usize) -> Result<DeltaCheck> {
    let d = c.d;
    let t = table(c, r + d, n + d)?;
    let direct = delta_det(&t, d, n, r)?;
    // Casorati of the fundamental solutions y^j_m = P^{(r+j)}_{m-j}:
    // W(m+1) = det C_{m+d} · W(m), W(0) = 1.
    let mut companion_route = delta_det(&t, d, 0, r)?;
    for m in 0..n {
        companion_route = &companion_route * &det(&companion(c, m + d, r)?);
    }
    let expected = delta_value(c, n, r)?;
    let residual = &direct - &Poly::constant(expected.clone());
    Ok(DeltaCheck { direct, companion: companion_route, expected, residual })
}

/// B^{(r)}_n: the d×d analogue of Δ.
pub fn b_det(t: &AssocTable, d: usize, n: usize, r: usize) -> Result<Poly> {
    let m = (0..d)
        .map(|i| (0..d).map(|j| t.p(r + j, n as i64 + i as i64 - j as i64).cloned()).collect())
        .collect::<Result<Vec<Vec<Poly>>>>()?;
    Ok(det_poly(&m))
}

/// Linear recurrence of B^{(r)}_n in n (needs n ≥ d+1).
pub fn verify_b_recurrence(c: &RecCoeffs, n: usize, r: usize) -> Result<Residual> {
    let d = c.d;
    if n < d + 1 {
        return Err(Error::IndexOutOfRange(format!("need n >= {}", d + 1)));
    }
    let t = table(c, r + 2 * d + 2, n + d)?;
    let lhs = b_det(&t, d, n, r)?;
    let mut rhs = Poly::zero();
    for j in 1..d {
        let coef = -rational::sign((j * (d - 1)) as i64) * c.gamma0_product(j - 1, r)? * c.gamma(j, r + j)?;
        rhs += b_det(&t, d, n - j, r + j)?.scale(&coef);
    }
    let coef = rational::sign((d * (d - 1)) as i64) * c.gamma0_product(d - 1, r)?;
    rhs += (&Poly::linear(c.beta(r + d - 1)?) * &b_det(&t, d, n - d, r + d)?).scale(&coef);
    let coef = rational::sign((d * d) as i64) * c.gamma0_product(d, r)?;
    rhs += b_det(&t, d, n - d - 1, r + d + 1)?.scale(&coef);
    Ok(Residual::new(lhs, rhs))
}

fn row_f(t: &AssocTable, d: usize, r: usize, m: usize) -> Result<Vec<Poly>> {
    (0..=d).map(|j| t.p(r + j, m as i64 - j as i64).cloned()).collect()
}

/// F^{(r)}_n with rows for degrees n, m_1..m_d, against Δ^{(r)}_n times the shifted d×d determinant.
pub fn verify_f(c: &RecCoeffs, n: usize, r: usize, ms: &[usize]) -> Result<Residual> {
    let d = c.d;
    if ms.len() != d {
        return Err(Error::BadOffsets(format!("expected {d} offsets, got {}", ms.len())));
    }
    if let Some(m) = ms.iter().find(|&&m| m <= n) {
        return Err(Error::BadOffsets(format!("offset {m} must exceed n = {n}")));
    }
    let top = *ms.iter().max().unwrap();
    let t = table(c, r + n + 1 + d, top + 1)?;
    let rows = std::iter::once(n)
        .chain(ms.iter().copied())
        .map(|m| row_f(&t, d, r, m))
        .collect::<Result<Vec<_>>>()?;
    let lhs = det_poly(&rows);
    let shifted = ms
        .iter()
        .map(|&m| {
            (0..d)
                .map(|j| t.p(r + n + 1 + j, m as i64 - n as i64 - 1 - j as i64).cloned())
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let rhs = det_poly(&shifted).scale(&delta_value(c, n, r)?);
    Ok(Residual::new(lhs, rhs))
}

/// `det[col(i, n-i), col(r, n-r), …, col(r+d-1, n-r-d+1)] = Δ^{(r-1)}_{n-r+1} P^{(i)}_{r-i-1}`
/// for 0 ≤ i ≤ r-1 and n ≥ r-1.
pub fn verify_shifted_column(c: &RecCoeffs, n: usize, r: usize, i: usize) -> Result<Residual> {
    let d = c.d;
    if r == 0 || i >= r || n + 1 < r {
        return Err(Error::IndexOutOfRange(format!("need 0 <= i < r <= n+1 (i={i}, r={r}, n={n})")));
    }
    let t = table(c, r + d, n + d + 1)?;
    let mut cols = vec![column(&t, d, i, n as i64 - i as i64)?];
    for j in 0..d {
        cols.push(column(&t, d, r + j, n as i64 - (r + j) as i64)?);
    }
    let lhs = PolyMatrix::from_columns(cols).det();
    let rhs = t.p(i, r as i64 - i as i64 - 1)?.scale(&delta_value(c, n + 1 - r, r - 1)?);
    Ok(Residual::new(lhs, rhs))
}

/// (d+2)×(d+2) Casorati of the solutions `P^{(r+j)}_{m-j}`, j = 0..d+1; vanishes for m ≥ 1.
pub fn extended_casorati(c: &RecCoeffs, m: usize, r: usize) -> Result<Poly> {
    let d = c.d;
    let t = table(c, r + d + 1, m + d + 2)?;
    let rows = (0..=d + 1)
        .map(|i| (0..=d + 1).map(|j| t.p(r + j, (m + i) as i64 - j as i64).cloned()).collect())
        .collect::<Result<Vec<Vec<Poly>>>>()?;
    Ok(det_poly(&rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cheb() -> RecCoeffs {
        RecCoeffs::constant(1, &int(0), &[int(1)], 30)
    }

    #[test]
    fn delta_hand_case() {
        let chk = verify_delta(&cheb(), 1, 0).unwrap();
        assert_eq!(chk.direct, Poly::one());
        assert!(chk.is_exact());
        let chk = verify_delta(&cheb(), 0, 2).unwrap();
        assert_eq!(chk.direct, Poly::one());
    }

    #[test]
    fn delta_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for d in 1..=3 {
            let c = RecCoeffs::random(d, 30, &mut rng, false);
            for r in 0..3 {
                for n in 0..6 {
                    let chk = verify_delta(&c, n, r).unwrap();
                    assert!(chk.is_exact(), "d={d} r={r} n={n}");
                    assert!(!chk.direct.is_zero());
                }
            }
        }
    }

    #[test]
    fn b_recurrence_and_f() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for d in 1..=3 {
            let c = RecCoeffs::random(d, 40, &mut rng, false);
            for r in 0..3 {
                for n in d + 1..d + 4 {
                    assert!(verify_b_recurrence(&c, n, r).unwrap().is_zero(), "BB d={d} r={r} n={n}");
                }
                for n in 0..3 {
                    let ms: Vec<usize> = (1..=d).map(|i| n + 2 * i).collect();
                    assert!(verify_f(&c, n, r, &ms).unwrap().is_zero(), "F d={d}");
                    let consecutive: Vec<usize> = (1..=d).map(|i| n + i).collect();
                    let f = verify_f(&c, n, r, &consecutive).unwrap();
                    assert_eq!(f.lhs, delta_det(&table(&c, r + d, n + d).unwrap(), d, n, r).unwrap());
                }
            }
        }
        let c = RecCoeffs::random(2, 20, &mut rng, false);
        assert!(matches!(verify_f(&c, 2, 0, &[3, 2]), Err(Error::BadOffsets(_))));
    }

    #[test]
    fn shifted_column_and_independence() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for d in 1..=3 {
            let c = RecCoeffs::random(d, 40, &mut rng, false);
            for r in 1..4 {
                for i in 0..r {
                    for n in r - 1..r + 3 {
                        assert!(verify_shifted_column(&c, n, r, i).unwrap().is_zero(), "d={d} r={r} i={i} n={n}");
                    }
                }
            }
            for m in 1..5 {
                assert!(extended_casorati(&c, m, 1).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn det_examples() {
        let x = Poly::x();
        let m = PolyMatrix(vec![vec![x.clone(), Poly::one()], vec![Poly::from_ints(&[-1, 0, 1]), x]]);
        assert_eq!(det(&m), Poly::one());
    }
}
