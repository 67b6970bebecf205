//! Transfer polynomials: any solution of the recurrence satisfies
//! `f_{n+p} = Σ_{i=1}^{d+1} T^{(i)}_p f_{n+1-i}` for a base n ≥ d.

use serde::Serialize;

use super::{delta_value, table};
use crate::error::{Error, Result};
use crate::linalg::det_poly;
use crate::poly::Poly;
use crate::seq::RecCoeffs;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TransferReport {
    pub n: usize,
    pub p: usize,
    /// `t[q] = [T^{(1)}_q, …, T^{(d+1)}_q]` for q = 0..=p.
    pub t: Vec<Vec<Poly>>,
    /// One residual per fundamental solution `P^{(j)}_{m-j}`, j = 0..=d.
    pub expansion_residuals: Vec<Poly>,
    /// `det[T^{(d+2-i)}_{p+a}]`, a = 0..=d.
    pub det: Poly,
    /// `det · Δ_{n-d} - Δ_{n+p}`.
    pub det_residual: Poly,
}

impl TransferReport {
    pub fn is_exact(&self) -> bool {
        self.det_residual.is_zero() && self.expansion_residuals.iter().all(Poly::is_zero)
    }
}

/// `T_q` for q = -d..=top, stored at offset d.
fn transfer_table(c: &RecCoeffs, n: usize, top: usize) -> Result<Vec<Vec<Poly>>> {
    let d = c.d;
    let mut t: Vec<Vec<Poly>> = (0..=d)
        .map(|s| {
            // q = s - d; seed e_{1-q}
            let hot = d - s;
            (0..=d).map(|i| if i == hot { Poly::one() } else { Poly::zero() }).collect()
        })
        .collect();
    for p in 1..=top {
        let step = Poly::linear(c.beta(n + p - 1)?);
        let prev = p + d - 1;
        let mut next: Vec<Poly> = t[prev].iter().map(|e| &step * e).collect();
        for k in 0..d {
            let g = c.gamma(k, n + p + k - d)?;
            let src = p - 1 + k;
            for i in 0..=d {
                next[i] -= t[src][i].scale(g);
            }
        }
        t.push(next);
    }
    Ok(t)
}

pub fn transfer_tp(c: &RecCoeffs, n: usize, p: usize) -> Result<TransferReport> {
    let d = c.d;
    if n < d {
        return Err(Error::IndexOutOfRange(format!("transfer base n = {n} must be at least d = {d}")));
    }
    let table_t = transfer_table(c, n, p + d)?;
    let at = |q: usize| &table_t[q + d];
    let assoc = table(c, d, n + p + d)?;
    let mut expansion_residuals = Vec::with_capacity(d + 1);
    for j in 0..=d {
        let f = |m: i64| assoc.p(j, m - j as i64).cloned();
        let mut res = f((n + p) as i64)?;
        for i in 1..=d + 1 {
            res -= &at(p)[i - 1] * &f(n as i64 + 1 - i as i64)?;
        }
        expansion_residuals.push(res);
    }
    let m: Vec<Vec<Poly>> = (0..=d)
        .map(|a| (1..=d + 1).map(|i| at(p + a)[d + 1 - i].clone()).collect())
        .collect();
    let det = det_poly(&m);
    let lhs = det.scale(&delta_value(c, n - d, 0)?);
    let det_residual = &lhs - &Poly::constant(delta_value(c, n + p, 0)?);
    let t = (0..=p).map(|q| at(q).clone()).collect();
    Ok(TransferReport { n, p, t, expansion_residuals, det, det_residual })
}
