//! Recurrence data, generation of the monic d-OPS and its associated
//! sequences, basis expansion and recurrence extraction.
//!
//! Index map (the main trap):
//!
//! * `beta[n]` is β_n.
//! * `gamma[ν][j-1]` is γ^ν_j, so `gamma[ν][n]` is γ^ν_{n+1}.
//! * The recurrence is
//!   `P_{n+1} = (x - β_n) P_n - Σ_{k=0}^{d-1} γ^k_{n-d+1+k} P_{n-d+k}`
//!   with `P_m = 0` for `m < 0`, which also covers the short initial rows.
//! * The Jacobi matrix (0-based) has `J[i][i+1] = 1`, `J[i][i] = β_i` and
//!   `J[i+s][i] = γ^{d-s}_{i+1}` for `1 ≤ s ≤ d`.

use std::ops::Deref;

use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{missing, Error, Result};
use crate::poly::Poly;
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecCoeffs {
    pub d: usize,
    #[serde(with = "rational::serde_vec")]
    pub beta: Vec<Rational>,
    #[serde(with = "rational::serde_vec2")]
    pub gamma: Vec<Vec<Rational>>,
}

impl RecCoeffs {
    pub fn new(d: usize, beta: Vec<Rational>, gamma: Vec<Vec<Rational>>) -> Result<Self> {
        if d == 0 {
            return Err(Error::BadParameter("d must be positive".into()));
        }
        if gamma.len() != d {
            return Err(Error::BadParameter(format!("expected {d} gamma rows, got {}", gamma.len())));
        }
        let c = RecCoeffs { d, beta, gamma };
        c.check_regular()?;
        Ok(c)
    }

    /// Constant coefficients `β_n = b`, `γ^ν_n = g[ν]`, stored for `len` indices.
    pub fn constant(d: usize, b: &Rational, g: &[Rational], len: usize) -> Self {
        assert_eq!(g.len(), d);
        RecCoeffs {
            d,
            beta: vec![b.clone(); len],
            gamma: g.iter().map(|v| vec![v.clone(); len]).collect(),
        }
    }

    /// Build from closures `beta(n)` and `gamma(ν, j)` (γ index j ≥ 1).
    pub fn from_fn(
        d: usize,
        len: usize,
        beta: impl Fn(usize) -> Rational,
        gamma: impl Fn(usize, usize) -> Rational,
    ) -> Self {
        RecCoeffs {
            d,
            beta: (0..len).map(&beta).collect(),
            gamma: (0..d).map(|nu| (1..=len).map(|j| gamma(nu, j)).collect()).collect(),
        }
    }

    /// Seeded random instance with p/q, |p| ≤ 20, 1 ≤ q ≤ 5; γ^0 is never zero.
    pub fn random<R: Rng + ?Sized>(d: usize, len: usize, rng: &mut R, positive: bool) -> Self {
        let beta = (0..len).map(|_| rational::random(rng, false, positive)).collect();
        let gamma = (0..d)
            .map(|nu| (0..len).map(|_| rational::random(rng, nu == 0, positive)).collect())
            .collect();
        RecCoeffs { d, beta, gamma }
    }

    pub fn check_regular(&self) -> Result<()> {
        for (n, g) in self.gamma[0].iter().enumerate() {
            if g.is_zero() {
                return Err(Error::RegularityViolation { index: n as i64 + 1 });
            }
        }
        Ok(())
    }

    /// Number of indices for which every coefficient is stored.
    pub fn horizon(&self) -> usize {
        self.gamma.iter().map(Vec::len).chain(std::iter::once(self.beta.len())).min().unwrap_or(0)
    }

    pub fn beta(&self, n: usize) -> Result<&Rational> {
        self.beta.get(n).ok_or_else(|| missing("beta", n as i64))
    }

    /// γ^ν_j with a 1-based lower index.
    pub fn gamma(&self, nu: usize, j: usize) -> Result<&Rational> {
        if j == 0 {
            return Err(missing(&format!("gamma^{nu}"), 0));
        }
        self.gamma[nu].get(j - 1).ok_or_else(|| missing(&format!("gamma^{nu}"), j as i64))
    }

    /// Product `Π_{i=1}^{n} γ^0_{i+r}`.
    pub fn gamma0_product(&self, n: usize, r: usize) -> Result<Rational> {
        let mut v = rational::one();
        for i in 1..=n {
            v *= self.gamma(0, i + r)?;
        }
        Ok(v)
    }

    pub fn truncate(&self, len: usize) -> RecCoeffs {
        RecCoeffs {
            d: self.d,
            beta: self.beta.iter().take(len).cloned().collect(),
            gamma: self.gamma.iter().map(|g| g.iter().take(len).cloned().collect()).collect(),
        }
    }
}

/// Graded monic sequence: `polys[n]` is monic of degree n.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolySeq(Vec<Poly>);

impl PolySeq {
    pub fn new(polys: Vec<Poly>) -> Result<Self> {
        for (n, p) in polys.iter().enumerate() {
            if p.degree() != Some(n) || !p.is_monic() {
                return Err(Error::NotGradedMonic(n));
            }
        }
        Ok(PolySeq(polys))
    }

    /// `P_n`, or the zero polynomial for negative n.
    pub fn at(&self, n: i64) -> Poly {
        if n < 0 {
            Poly::zero()
        } else {
            self.0[n as usize].clone()
        }
    }

    pub fn into_inner(self) -> Vec<Poly> {
        self.0
    }
}

impl Deref for PolySeq {
    type Target = [Poly];
    fn deref(&self) -> &[Poly] {
        &self.0
    }
}

/// `P_0..P_N` from the recurrence.
pub fn generate(c: &RecCoeffs, n_max: usize) -> Result<PolySeq> {
    let d = c.d;
    for j in 1..=n_max.min(c.gamma[0].len()) {
        if c.gamma[0][j - 1].is_zero() {
            return Err(Error::RegularityViolation { index: j as i64 });
        }
    }
    let mut ps: Vec<Poly> = Vec::with_capacity(n_max + 1);
    ps.push(Poly::one());
    for n in 0..n_max {
        let mut p = &Poly::linear(c.beta(n)?) * &ps[n];
        for k in 0..d {
            let idx = n as i64 - d as i64 + k as i64;
            if idx >= 0 {
                let g = c.gamma(k, idx as usize + 1)?;
                if !g.is_zero() {
                    p -= ps[idx as usize].scale(g);
                }
            }
        }
        ps.push(p);
    }
    Ok(PolySeq(ps))
}

/// Descriptor of the associated sequence of order r: `β_n ↦ β_{n+r}`, `γ^ν_n ↦ γ^ν_{n+r}`.
pub fn associated(c: &RecCoeffs, r: usize) -> Result<RecCoeffs> {
    if c.beta.len() < r {
        return Err(missing("beta", r as i64 - 1));
    }
    for (nu, g) in c.gamma.iter().enumerate() {
        if g.len() < r {
            return Err(missing(&format!("gamma^{nu}"), r as i64));
        }
    }
    Ok(RecCoeffs {
        d: c.d,
        beta: c.beta[r..].to_vec(),
        gamma: c.gamma.iter().map(|g| g[r..].to_vec()).collect(),
    })
}

/// One prepended Jacobi row/column: β and the column entries `γ^0 … γ^{d-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrependRow {
    #[serde(with = "rational::serde_rat")]
    pub beta: Rational,
    #[serde(with = "rational::serde_vec")]
    pub gamma: Vec<Rational>,
}

/// Anti-associated descriptor: `rows[0]` becomes the new leading row.
pub fn anti_associated(c: &RecCoeffs, rows: &[PrependRow]) -> Result<RecCoeffs> {
    let mut beta: Vec<Rational> = rows.iter().map(|r| r.beta.clone()).collect();
    beta.extend(c.beta.iter().cloned());
    let mut gamma = vec![Vec::new(); c.d];
    for (i, row) in rows.iter().enumerate() {
        if row.gamma.len() != c.d {
            return Err(Error::BadParameter(format!("prepended row {i} needs {} gamma values", c.d)));
        }
        if row.gamma[0].is_zero() {
            return Err(Error::RegularityViolation { index: i as i64 + 1 - rows.len() as i64 });
        }
        for (nu, g) in row.gamma.iter().enumerate() {
            gamma[nu].push(g.clone());
        }
    }
    for (nu, g) in c.gamma.iter().enumerate() {
        gamma[nu].extend(g.iter().cloned());
    }
    Ok(RecCoeffs { d: c.d, beta, gamma })
}

/// Coefficients of `target` in a graded monic basis.
pub fn expand_in_basis(target: &Poly, basis: &[Poly]) -> Result<Vec<Rational>> {
    let Some(deg) = target.degree() else {
        return Ok(Vec::new());
    };
    if deg >= basis.len() {
        return Err(Error::IndexOutOfRange(format!(
            "degree {deg} exceeds basis of length {}",
            basis.len()
        )));
    }
    let mut t: Vec<Rational> = target.coeffs().to_vec();
    let mut out = vec![rational::zero(); deg + 1];
    for k in (0..=deg).rev() {
        let ck = t[k].clone() / basis[k].lead();
        if !ck.is_zero() {
            for (i, b) in basis[k].coeffs().iter().enumerate() {
                t[i] -= &ck * b;
            }
        }
        out[k] = ck;
    }
    Ok(out)
}

/// Full table `chi[n][v]` with `x P_n = P_{n+1} + Σ_v chi[n][v] P_v`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuasiReport {
    pub d: usize,
    #[serde(with = "rational::serde_vec2")]
    pub chi: Vec<Vec<Rational>>,
    /// First (n, v) found outside the band, if any.
    pub first_violation: Option<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "data")]
pub enum Extraction {
    Rec(RecCoeffs),
    Quasi(QuasiReport),
}

impl Extraction {
    pub fn rec(self) -> Option<RecCoeffs> {
        match self {
            Extraction::Rec(c) => Some(c),
            Extraction::Quasi(_) => None,
        }
    }

    pub fn is_rec(&self) -> bool {
        matches!(self, Extraction::Rec(_))
    }
}

/// Favard direction: read a (d+2)-term recurrence off a graded monic sequence.
///
/// From a sequence of length L the result stores β_0..β_{L-2} and
/// γ^ν_1..γ^ν_{L-1-d}.
pub fn extract_recurrence(seq: &[Poly], d: usize) -> Result<Extraction> {
    for (n, p) in seq.iter().enumerate() {
        if p.degree() != Some(n) || !p.is_monic() {
            return Err(Error::NotGradedMonic(n));
        }
    }
    if d == 0 {
        return Err(Error::BadParameter("d must be positive".into()));
    }
    if seq.len() < d + 3 {
        return Err(Error::BadParameter(format!("need at least {} polynomials", d + 3)));
    }
    let l = seq.len();
    let mut chi = Vec::with_capacity(l - 1);
    let mut violation = None;
    for n in 0..l - 1 {
        let xp = seq[n].mul_x() - &seq[n + 1];
        let co = expand_in_basis(&xp, seq)?;
        let mut row = vec![rational::zero(); n + 1];
        for (v, c) in co.into_iter().enumerate() {
            row[v] = c;
        }
        if violation.is_none() {
            if let Some(v) = (0..(n + 1).saturating_sub(d + 1)).find(|&v| !row[v].is_zero()) {
                violation = Some((n, v));
            } else if n >= d && row[n - d].is_zero() {
                violation = Some((n, n - d));
            }
        }
        chi.push(row);
    }
    if violation.is_some() {
        return Ok(Extraction::Quasi(QuasiReport { d, chi, first_violation: violation }));
    }
    let beta = (0..l - 1).map(|n| chi[n][n].clone()).collect();
    let glen = l - 1 - d;
    let gamma = (0..d)
        .map(|k| {
            (1..=glen)
                .map(|j| {
                    // γ^k_j sits in row n = j + d - 1 - k at column n - d + k = j - 1
                    let n = j + d - 1 - k;
                    chi[n][j - 1].clone()
                })
                .collect()
        })
        .collect();
    Ok(Extraction::Rec(RecCoeffs { d, beta, gamma }))
}

/// Normalized derivative sequence of order m: `P^{[m]}_n = P^{(m)}_{n+m} / ((n+1)_m)`.
pub fn derivative_sequence(seq: &[Poly], m: usize) -> Vec<Poly> {
    if m == 0 {
        return seq.to_vec();
    }
    seq.iter()
        .skip(m)
        .map(|p| {
            let dp = p.deriv_n(m);
            dp.monic()
        })
        .collect()
}

/// Table of `P^{(r)}_n` for `0 ≤ r ≤ rmax`, `0 ≤ n ≤ nmax`.
#[derive(Clone, Debug)]
pub struct AssocTable {
    rows: Vec<PolySeq>,
    zero: Poly,
}

impl AssocTable {
    pub fn new(c: &RecCoeffs, rmax: usize, nmax: usize) -> Result<Self> {
        let rows = (0..=rmax)
            .map(|r| generate(&associated(c, r)?, nmax))
            .collect::<Result<Vec<_>>>()?;
        Ok(AssocTable { rows, zero: Poly::zero() })
    }

    /// `P^{(r)}_n`, zero for negative n.
    pub fn p(&self, r: usize, n: i64) -> Result<&Poly> {
        if n < 0 {
            return Ok(&self.zero);
        }
        self.rows
            .get(r)
            .and_then(|s| s.get(n as usize))
            .ok_or_else(|| Error::IndexOutOfRange(format!("P^({r})_{n} outside table")))
    }

    pub fn seq(&self, r: usize) -> &PolySeq {
        &self.rows[r]
    }

    pub fn rmax(&self) -> usize {
        self.rows.len() - 1
    }
}

/// Which association identity [`association_expansion_check`] evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Expansion {
    /// `P^{(r)}_{n+m}` split through `P^{(r)}_{n-t}` and `P^{(n+r+i)}_{m-i}`.
    Split,
    /// The same split with the roles of n and m exchanged.
    Swapped,
    /// `P^{(r)}_{n+1} = (x - β_r) P^{(r+1)}_n - Σ_i γ^{d-i}_{r+1} P^{(r+1+i)}_{n-i}` (m unused).
    Dual,
    /// `P^{(r)}_{n+m} = P^{(r)}_m P^{(r+m)}_n - Σ_i q_{i,m-1} P^{(r+m+i)}_{n-i}`.
    Iterated,
}

fn split_rhs(c: &RecCoeffs, t: &AssocTable, n: usize, m: usize, r: usize) -> Result<Poly> {
    let d = c.d;
    let mut rhs = t.p(n + r, m as i64)? * t.p(r, n as i64)?;
    for tt in 1..=d.min(n) {
        let mut inner = Poly::zero();
        for i in 1..=d + 1 - tt {
            let g = c.gamma(d + 1 - tt - i, n + r + 1 - tt)?;
            inner += t.p(n + r + i, m as i64 - i as i64)?.scale(g);
        }
        rhs -= &inner * t.p(r, (n - tt) as i64)?;
    }
    Ok(rhs)
}

/// `q_{i,m-1} = Σ_{t=1}^{d+1-i} γ^{d+1-t-i}_{m+r+1-t} P^{(r)}_{m-t}`.
pub fn iterated_q(c: &RecCoeffs, t: &AssocTable, m: usize, r: usize, i: usize) -> Result<Poly> {
    let d = c.d;
    let mut q = Poly::zero();
    for tt in 1..=d + 1 - i {
        if tt > m {
            break;
        }
        let g = c.gamma(d + 1 - tt - i, m + r + 1 - tt)?;
        q += t.p(r, (m - tt) as i64)?.scale(g);
    }
    Ok(q)
}

/// LHS − RHS of the chosen association identity.
pub fn association_expansion_check(c: &RecCoeffs, which: Expansion, n: usize, m: usize, r: usize) -> Result<Poly> {
    let d = c.d;
    let t = AssocTable::new(c, n + m + r + d + 1, n + m + 1)?;
    match which {
        Expansion::Split => Ok(t.p(r, (n + m) as i64)? - split_rhs(c, &t, n, m, r)?),
        Expansion::Swapped => Ok(t.p(r, (n + m) as i64)? - split_rhs(c, &t, m, n, r)?),
        Expansion::Dual => {
            let mut rhs = &Poly::linear(c.beta(r)?) * t.p(r + 1, n as i64)?;
            for i in 1..=d {
                rhs -= t.p(r + 1 + i, n as i64 - i as i64)?.scale(c.gamma(d - i, r + 1)?);
            }
            Ok(t.p(r, n as i64 + 1)? - rhs)
        }
        Expansion::Iterated => {
            let mut rhs = t.p(r, m as i64)? * t.p(r + m, n as i64)?;
            for i in 1..=d {
                let q = iterated_q(c, &t, m, r, i)?;
                rhs -= &q * t.p(r + m + i, n as i64 - i as i64)?;
            }
            Ok(t.p(r, (n + m) as i64)? - rhs)
        }
    }
}
