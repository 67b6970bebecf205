//! Casorati determinants whose first column or row carries a perturbed sequence.
//!
//! With S one of Q (co-recursive at level k), P̃ (γ^0_{k+1} dilated by λ) or
//! Č (both), the column determinant is
//! `∇ = det[col(S, n), col(r, n-r), …, col(r+d-1, n-r-d+1)]`.
//! Closed values:
//!
//! * Q, r ≥ k+1: `Q_{r-1} Δ^{(r-1)}_{n-r+1}`; r = k = 0: `(-1)^{d+1} A_d Δ_n`.
//! * P̃ and Č, r ≥ k+2: `S_{r-1} Δ^{(r-1)}_{n-r+1}`; r = k+1: `λ P_k Δ^{(k)}_{n-k}`;
//!   r = k = 0: `(-1)^{d+1} (A_d + λ̄ γ^1_1) Δ_n` with A ≡ 0 for P̃ and, when d = 1,
//!   `-(x - β_0)` in place of γ^1_1.
//!
//! The row version R uses rows `(S_m, P^{(r)}_{m-r}, …, P^{(r+d-1)}_{m-r-d+1})`
//! for m in {n, m_1..m_d} and follows the same table with Δ replaced by
//! `F^{(r-1)}` over the same rows.

use serde::{Deserialize, Serialize};

use super::{column, delta_value, table, PolyMatrix, Residual};
use crate::copoly::{closed_form_a, co_dilated, co_modified_coeffs, co_recursive, Perturbation};
use crate::error::{Error, Result};
use crate::linalg::det_poly;
use crate::poly::Poly;
use crate::rational;
use crate::seq::{generate, AssocTable, PolySeq, RecCoeffs};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selector {
    /// Column determinant with the co-recursive Q.
    Nabla,
    /// Column determinant with the co-dilated P̃.
    NablaTilde,
    /// Column determinant with the co-modified Č.
    NablaCheck,
    /// Row determinant with Q.
    R,
    /// Row determinant with P̃.
    RTilde,
    /// Row determinant with Č.
    RCheck,
    /// `det[col(s_j, n - s_j)]` against its value at n-1.
    G,
}

impl std::str::FromStr for Selector {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "nabla" => Selector::Nabla,
            "nabla_tilde" => Selector::NablaTilde,
            "nabla_check" => Selector::NablaCheck,
            "r" => Selector::R,
            "r_tilde" => Selector::RTilde,
            "r_check" => Selector::RCheck,
            "g" => Selector::G,
            _ => return Err(Error::BadSelector(s.to_string())),
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NablaParams {
    pub n: usize,
    pub r: usize,
    /// Row degrees m_1..m_d for the R variants.
    #[serde(default)]
    pub ms: Vec<usize>,
    /// Association shifts s_0..s_d for G.
    #[serde(default)]
    pub shifts: Vec<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Q,
    Tilde,
    Check,
}

struct Ctx {
    d: usize,
    t: AssocTable,
    s: PolySeq,
    a: Vec<Poly>,
}

fn context(c: &RecCoeffs, p: &Perturbation, kind: Kind, r: usize, nmax: usize) -> Result<Ctx> {
    let d = c.d;
    let t = table(c, (r + d).max(p.k + d + 1), nmax)?;
    let (s, a) = match kind {
        Kind::Q => (generate(&co_recursive(c, p)?, nmax)?, closed_form_a(c, p, &t)?),
        Kind::Tilde => (generate(&co_dilated(c, p.k + 1, &p.lambda)?, nmax)?, vec![Poly::zero(); d]),
        Kind::Check => (generate(&co_modified_coeffs(c, p)?, nmax)?, closed_form_a(c, p, &t)?),
    };
    Ok(Ctx { d, t, s, a })
}

fn invalid(r: usize, k: usize) -> Error {
    Error::IndexOutOfRange(format!("no closed value for r = {r} at level k = {k}"))
}

/// The factor multiplying Δ (or F) in the closed value.
fn closed_factor(c: &RecCoeffs, p: &Perturbation, kind: Kind, ctx: &Ctx, r: usize) -> Result<(Poly, usize)> {
    let d = c.d;
    let k = p.k;
    match kind {
        Kind::Q => {
            if r >= k + 1 {
                Ok((ctx.s.at(r as i64 - 1), r - 1))
            } else if r == 0 && k == 0 {
                Ok((ctx.a[d - 1].scale(&rational::sign(d as i64 + 1)), 0))
            } else {
                Err(invalid(r, k))
            }
        }
        Kind::Tilde | Kind::Check => {
            if r >= k + 2 {
                Ok((ctx.s.at(r as i64 - 1), r - 1))
            } else if r == k + 1 {
                Ok((ctx.t.p(0, k as i64)?.scale(&p.lambda), k))
            } else if r == 0 && k == 0 {
                let lb = p.lambda_bar();
                let extra = if d >= 2 {
                    Poly::constant(c.gamma(1, 1)? * &lb)
                } else {
                    -Poly::linear(c.beta(0)?).scale(&lb)
                };
                Ok(((&ctx.a[d - 1] + &extra).scale(&rational::sign(d as i64 + 1)), 0))
            } else {
                Err(invalid(r, k))
            }
        }
    }
}

fn nabla_det(ctx: &Ctx, n: usize, r: usize) -> Result<Poly> {
    let d = ctx.d;
    let first: Vec<Poly> = (0..=d).map(|i| ctx.s.at((n + i) as i64)).collect();
    let mut cols = vec![first];
    for j in 0..d {
        cols.push(column(&ctx.t, d, r + j, n as i64 - (r + j) as i64)?);
    }
    Ok(PolyMatrix::from_columns(cols).det())
}

fn r_det(ctx: &Ctx, rows: &[usize], r: usize) -> Result<Poly> {
    let d = ctx.d;
    let m = rows
        .iter()
        .map(|&m| {
            let mut row = vec![ctx.s.at(m as i64)];
            for j in 0..d {
                row.push(ctx.t.p(r + j, m as i64 - (r + j) as i64)?.clone());
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(det_poly(&m))
}

/// F^{(s)} over row degrees `rows`: entries `P^{(s+j)}_{m-s-j}`.
fn f_det(t: &AssocTable, d: usize, rows: &[usize], s: usize) -> Result<Poly> {
    let m = rows
        .iter()
        .map(|&m| (0..=d).map(|j| t.p(s + j, m as i64 - (s + j) as i64).cloned()).collect())
        .collect::<Result<Vec<Vec<Poly>>>>()?;
    Ok(det_poly(&m))
}

fn g_det(t: &AssocTable, d: usize, shifts: &[usize], n: usize) -> Result<Poly> {
    let cols = shifts
        .iter()
        .map(|&s| column(t, d, s, n as i64 - s as i64))
        .collect::<Result<Vec<_>>>()?;
    Ok(PolyMatrix::from_columns(cols).det())
}

pub fn verify_nabla(c: &RecCoeffs, p: &Perturbation, which: Selector, params: &NablaParams) -> Result<Residual> {
    let d = c.d;
    let (n, r) = (params.n, params.r);
    if which == Selector::G {
        let s = &params.shifts;
        if s.len() != d + 1 {
            return Err(Error::BadOffsets(format!("G needs {} shifts", d + 1)));
        }
        let mut sorted = s.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != s.len() {
            return Err(Error::BadOffsets("G shifts must be distinct".into()));
        }
        let top = *sorted.last().unwrap();
        if n < top + 1 {
            return Err(Error::BadOffsets(format!("G needs n > {top}")));
        }
        let t = table(c, top, n + d)?;
        let lhs = g_det(&t, d, s, n)?;
        let coef = rational::sign(d as i64 + 1) * c.gamma(0, n)?;
        let rhs = g_det(&t, d, s, n - 1)?.scale(&coef);
        return Ok(Residual::new(lhs, rhs));
    }
    let kind = match which {
        Selector::Nabla | Selector::R => Kind::Q,
        Selector::NablaTilde | Selector::RTilde => Kind::Tilde,
        _ => Kind::Check,
    };
    match which {
        Selector::Nabla | Selector::NablaTilde | Selector::NablaCheck => {
            if n < r.max(1) {
                return Err(Error::BadOffsets(format!("need n >= max(r, 1) (n={n}, r={r})")));
            }
            let ctx = context(c, p, kind, r, n + d + 1)?;
            let lhs = nabla_det(&ctx, n, r)?;
            let (factor, s) = closed_factor(c, p, kind, &ctx, r)?;
            let rhs = factor.scale(&delta_value(c, n - s, s)?);
            Ok(Residual::new(lhs, rhs))
        }
        _ => {
            if r == 0 || n < r {
                return Err(Error::BadOffsets(format!("need 1 <= r <= n (n={n}, r={r})")));
            }
            if params.ms.len() != d || params.ms.iter().any(|&m| m <= n) {
                return Err(Error::BadOffsets(format!("need {d} row degrees above n = {n}")));
            }
            let top = *params.ms.iter().max().unwrap();
            let ctx = context(c, p, kind, r, top + 1)?;
            let rows: Vec<usize> = std::iter::once(n).chain(params.ms.iter().copied()).collect();
            let lhs = r_det(&ctx, &rows, r)?;
            let (factor, _) = closed_factor(c, p, kind, &ctx, r)?;
            if r == 0 {
                return Err(invalid(r, p.k));
            }
            let rhs = &factor * &f_det(&ctx.t, d, &rows, r - 1)?;
            Ok(Residual::new(lhs, rhs))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn trivial_perturbation_r1() {
        let c = RecCoeffs::random(2, 40, &mut ChaCha8Rng::seed_from_u64(31), false);
        let p = Perturbation::trivial(2, 0);
        let res = verify_nabla(&c, &p, Selector::Nabla, &NablaParams { n: 3, r: 1, ..Default::default() }).unwrap();
        assert!(res.is_zero());
        assert_eq!(res.lhs, Poly::constant(delta_value(&c, 3, 0).unwrap()));
    }

    #[test]
    fn tables_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for d in 1..=3 {
            for k in 0..=2 {
                let c = RecCoeffs::random(d, 60, &mut rng, false);
                let p = Perturbation::random(d, k, &mut rng);
                for r in 0..d + 4 {
                    for n in r.max(1)..r + 3 {
                        for sel in [Selector::Nabla, Selector::NablaTilde, Selector::NablaCheck] {
                            let prm = NablaParams { n, r, ..Default::default() };
                            match verify_nabla(&c, &p, sel, &prm) {
                                Ok(res) => assert!(res.is_zero(), "{sel:?} d={d} k={k} r={r} n={n}"),
                                Err(Error::IndexOutOfRange(_)) => assert!(r <= k),
                                Err(e) => panic!("{e}"),
                            }
                        }
                    }
                    if r >= 1 {
                        let n = r + 1;
                        let ms: Vec<usize> = (1..=d).map(|i| n + i + 1).collect();
                        for sel in [Selector::R, Selector::RTilde, Selector::RCheck] {
                            let prm = NablaParams { n, r, ms: ms.clone(), ..Default::default() };
                            match verify_nabla(&c, &p, sel, &prm) {
                                Ok(res) => assert!(res.is_zero(), "{sel:?} d={d} k={k} r={r}"),
                                Err(Error::IndexOutOfRange(_)) => assert!(r <= k),
                                Err(e) => panic!("{e}"),
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn g_ratio() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for d in 1..=3 {
            let c = RecCoeffs::random(d, 40, &mut rng, false);
            let shifts: Vec<usize> = (0..=d).map(|i| 2 * i).collect();
            let top = 2 * d;
            for n in top + 1..top + 4 {
                let prm = NablaParams { n, r: 0, shifts: shifts.clone(), ..Default::default() };
                assert!(verify_nabla(&c, &Perturbation::trivial(d, 0), Selector::G, &prm).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn co_modified_r1_is_lambda_delta() {
        let c = RecCoeffs::random(2, 40, &mut ChaCha8Rng::seed_from_u64(34), false);
        let mut p = Perturbation::random(2, 0, &mut ChaCha8Rng::seed_from_u64(35));
        p.lambda = int(3);
        let res = verify_nabla(&c, &p, Selector::NablaCheck, &NablaParams { n: 4, r: 1, ..Default::default() }).unwrap();
        assert_eq!(res.lhs, Poly::constant(delta_value(&c, 4, 0).unwrap() * int(3)));
    }
}
