//! Finite perturbations of the recurrence: co-recursive, co-dilated and
//! co-modified sequences at a level k, plus their closed forms.
//!
//! At level k the co-recursive rows are m = k+1..k+d. Row m computes P_m
//! with `β_{m-1} + μ_{m-1-k}` and, for s ≥ 1, `γ^s_j + η^s_j` where
//! j = m-d+s ≥ 1. The `eta[s-1]` list starts at j = max(1, k+1-d+s).

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::rational::{self, Rational};
use crate::seq::{generate, AssocTable, RecCoeffs};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Perturbation {
    pub k: usize,
    #[serde(with = "rational::serde_vec")]
    pub mu: Vec<Rational>,
    #[serde(with = "rational::serde_vec2", default)]
    pub eta: Vec<Vec<Rational>>,
    #[serde(with = "rational::serde_rat", default = "rational::one")]
    pub lambda: Rational,
}

impl Perturbation {
    pub fn trivial(d: usize, k: usize) -> Self {
        Perturbation { k, mu: vec![rational::zero(); d], eta: Vec::new(), lambda: rational::one() }
    }

    /// Seeded random perturbation with every window slot filled and λ ≠ 0.
    pub fn random<R: rand::Rng + ?Sized>(d: usize, k: usize, rng: &mut R) -> Self {
        let mu = (0..d).map(|_| rational::random(rng, false, false)).collect();
        let eta = (1..d)
            .map(|s| {
                let lo = eta_base(d, k, s);
                (lo..=k + s).map(|_| rational::random(rng, false, false)).collect()
            })
            .collect();
        Perturbation { k, mu, eta, lambda: rational::random(rng, true, false) }
    }

    /// μ_{k+i}, zero when not supplied.
    pub fn mu(&self, i: usize) -> Rational {
        self.mu.get(i).cloned().unwrap_or_else(rational::zero)
    }

    /// η^s_j, zero outside the supplied window.
    pub fn eta(&self, d: usize, s: usize, j: usize) -> Rational {
        if s == 0 || s >= d {
            return rational::zero();
        }
        let lo = eta_base(d, self.k, s);
        if j < lo || j > self.k + s {
            return rational::zero();
        }
        self.eta
            .get(s - 1)
            .and_then(|row| row.get(j - lo))
            .cloned()
            .unwrap_or_else(rational::zero)
    }

    /// `λ̄ = 1 - λ`.
    pub fn lambda_bar(&self) -> Rational {
        rational::one() - &self.lambda
    }

    fn validate(&self, d: usize) -> Result<()> {
        if self.mu.len() > d {
            return Err(Error::BadParameter(format!("mu has {} entries, expected at most {d}", self.mu.len())));
        }
        if self.eta.len() > d.saturating_sub(1) {
            return Err(Error::BadParameter(format!("eta has {} rows, expected at most {}", self.eta.len(), d - 1)));
        }
        for (i, row) in self.eta.iter().enumerate() {
            let s = i + 1;
            let width = self.k + s + 1 - eta_base(d, self.k, s);
            if row.len() > width {
                return Err(Error::BadParameter(format!("eta row {s} exceeds its window of {width}")));
            }
        }
        Ok(())
    }
}

fn eta_base(d: usize, k: usize, s: usize) -> usize {
    (k + 1 + s).saturating_sub(d).max(1)
}

/// Descriptor generating the co-recursive sequence `{Q_n}` of level `p.k`.
pub fn co_recursive(c: &RecCoeffs, p: &Perturbation) -> Result<RecCoeffs> {
    let d = c.d;
    p.validate(d)?;
    let mut out = c.clone();
    for i in 0..d {
        let n = p.k + i;
        let b = c.beta(n)?.clone();
        out.beta[n] = b + p.mu(i);
    }
    for s in 1..d {
        for j in eta_base(d, p.k, s)..=p.k + s {
            let e = p.eta(d, s, j);
            if !e.is_zero() {
                let g = c.gamma(s, j)?.clone();
                out.gamma[s][j - 1] = g + e;
            }
        }
    }
    Ok(out)
}

/// Descriptor with `γ^0_k ↦ λ γ^0_k` (k ≥ 1).
pub fn co_dilated(c: &RecCoeffs, k: usize, lambda: &Rational) -> Result<RecCoeffs> {
    if lambda.is_zero() {
        return Err(Error::ZeroLambda);
    }
    if k == 0 {
        return Err(Error::IndexOutOfRange("dilation level must be at least 1".into()));
    }
    let mut out = c.clone();
    let g = c.gamma(0, k)?.clone();
    if g.is_zero() {
        return Err(Error::RegularityViolation { index: k as i64 });
    }
    out.gamma[0][k - 1] = g * lambda;
    Ok(out)
}

/// Co-recursive window at level k combined with dilation of `γ^0_{k+1}`.
pub fn co_modified_coeffs(c: &RecCoeffs, p: &Perturbation) -> Result<RecCoeffs> {
    co_dilated(&co_recursive(c, p)?, p.k + 1, &p.lambda)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosedForm {
    pub a: Vec<Poly>,
    /// One residual per degree n = 0..=N.
    pub residuals: Vec<Poly>,
}

impl ClosedForm {
    pub fn is_exact(&self) -> bool {
        self.residuals.iter().all(Poly::is_zero)
    }
}

/// `A_1..A_d` with `Q_n = P_n - Σ_i A_i P^{(k+i)}_{n-k-i}`.
///
/// Each `A_i` is read off row k+i of the perturbed recurrence, using the
/// closed form already known for lower degrees.
pub fn closed_form_a(c: &RecCoeffs, p: &Perturbation, t: &AssocTable) -> Result<Vec<Poly>> {
    let d = c.d;
    let k = p.k;
    let mut a: Vec<Poly> = Vec::with_capacity(d);
    let pc = |a: &[Poly], j: i64| -> Result<Poly> {
        if j < 0 {
            return Ok(Poly::zero());
        }
        let mut v = t.p(0, j)?.clone();
        for (l, al) in a.iter().enumerate() {
            let l = l + 1;
            v -= al * t.p(k + l, j - (k + l) as i64)?;
        }
        Ok(v)
    };
    for i in 1..=d {
        let m = k + i;
        let mut ai = pc(&a, m as i64 - 1)?.scale(&p.mu(i - 1));
        for s in 1..d {
            let j = m as i64 - d as i64 + s as i64;
            if j >= 1 {
                let e = p.eta(d, s, j as usize);
                if !e.is_zero() {
                    ai += pc(&a, j - 1)?.scale(&e);
                }
            }
        }
        a.push(ai);
    }
    Ok(a)
}

/// Residuals `Q_n - (P_n - Σ A_i P^{(k+i)}_{n-k-i})` for n ≤ N.
pub fn co_recursive_closed_form(c: &RecCoeffs, p: &Perturbation, n_max: usize) -> Result<ClosedForm> {
    let d = c.d;
    let k = p.k;
    let t = AssocTable::new(c, k + d, n_max)?;
    let a = closed_form_a(c, p, &t)?;
    let q = generate(&co_recursive(c, p)?, n_max)?;
    let mut residuals = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let mut rhs = t.p(0, n as i64)?.clone();
        for (i, ai) in a.iter().enumerate() {
            let i = i + 1;
            rhs -= ai * t.p(k + i, n as i64 - (k + i) as i64)?;
        }
        residuals.push(&q[n] - &rhs);
    }
    Ok(ClosedForm { a, residuals })
}

/// Residuals `P̃_n - (P_n + γ^0_k λ̄ P_{k-1} P^{(d+k)}_{n-d-k})`.
pub fn co_dilated_closed_form(c: &RecCoeffs, k: usize, lambda: &Rational, n_max: usize) -> Result<Vec<Poly>> {
    let d = c.d;
    let pt = generate(&co_dilated(c, k, lambda)?, n_max)?;
    let t = AssocTable::new(c, d + k, n_max)?;
    let f = c.gamma(0, k)? * (rational::one() - lambda);
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let extra = t.p(0, k as i64 - 1)? * t.p(d + k, n as i64 - (d + k) as i64)?;
        out.push(&pt[n] - &(t.p(0, n as i64)? + extra.scale(&f)));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoModified {
    pub coeffs: RecCoeffs,
    /// Combined closed form residuals, n ≤ N.
    pub residuals: Vec<Poly>,
    /// Residuals of `Č_n - (Q_n + P̃_n - P_n)`, n ≤ N.
    pub sum_residuals: Vec<Poly>,
}

impl CoModified {
    pub fn is_exact(&self) -> bool {
        self.residuals.iter().chain(&self.sum_residuals).all(Poly::is_zero)
    }
}

pub fn co_modified(c: &RecCoeffs, p: &Perturbation, n_max: usize) -> Result<CoModified> {
    let d = c.d;
    let k = p.k;
    let coeffs = co_modified_coeffs(c, p)?;
    let cm = generate(&coeffs, n_max)?;
    let q = generate(&co_recursive(c, p)?, n_max)?;
    let pt = generate(&co_dilated(c, k + 1, &p.lambda)?, n_max)?;
    let t = AssocTable::new(c, d + k + 1, n_max)?;
    let a = closed_form_a(c, p, &t)?;
    let f = c.gamma(0, k + 1)? * p.lambda_bar();
    let mut residuals = Vec::with_capacity(n_max + 1);
    let mut sum_residuals = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let ni = n as i64;
        let mut rhs = t.p(0, ni)?.clone();
        for (i, ai) in a.iter().enumerate() {
            let i = i + 1;
            rhs -= ai * t.p(k + i, ni - (k + i) as i64)?;
        }
        rhs += (t.p(0, k as i64)? * t.p(d + k + 1, ni - (d + k + 1) as i64)?).scale(&f);
        residuals.push(&cm[n] - &rhs);
        sum_residuals.push(&cm[n] - &(&(&q[n] + &pt[n]) - t.p(0, ni)?));
    }
    Ok(CoModified { coeffs, residuals, sum_residuals })
}
