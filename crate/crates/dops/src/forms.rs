//! Linear forms through their moments: the dual vector of a d-OPS,
//! orthogonality brackets, Stieltjes series, quasi-orthogonality and the
//! Uvarov transform.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::rational::{self, Rational};
use crate::copoly::co_dilated;
use crate::seq::{associated, expand_in_basis, generate, RecCoeffs};

/// `entries[r][n]` is `(u_r)_n = ⟨u_r, x^n⟩` for the dual forms u_0..u_{d-1}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MomentTable {
    pub d: usize,
    #[serde(with = "rational::serde_vec2")]
    pub entries: Vec<Vec<Rational>>,
}

impl MomentTable {
    pub fn get(&self, r: usize, n: usize) -> &Rational {
        &self.entries[r][n]
    }

    pub fn len(&self) -> usize {
        self.entries.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `⟨u_r, p⟩`.
    pub fn apply(&self, r: usize, p: &Poly) -> Result<Rational> {
        if p.degree().is_some_and(|k| k >= self.len()) {
            return Err(Error::IndexOutOfRange(format!("moment {} of u_{r} not tabulated", p.degree().unwrap())));
        }
        Ok(p.coeffs().iter().zip(&self.entries[r]).map(|(a, m)| a * m).sum())
    }
}

/// Moments of the first `forms` dual forms of a graded monic sequence, up to `x^nmax`.
pub fn moments_of(seq: &[Poly], forms: usize, nmax: usize) -> Result<MomentTable> {
    if seq.len() <= nmax {
        return Err(Error::IndexOutOfRange(format!("need P_0..P_{nmax}, have {}", seq.len())));
    }
    let mut entries = vec![Vec::with_capacity(nmax + 1); forms];
    for n in 0..=nmax {
        let co = expand_in_basis(&Poly::monomial(rational::one(), n), seq)?;
        for (r, row) in entries.iter_mut().enumerate() {
            row.push(co.get(r).cloned().unwrap_or_else(rational::zero));
        }
    }
    Ok(MomentTable { d: forms, entries })
}

pub fn moments(c: &RecCoeffs, nmax: usize) -> Result<MomentTable> {
    let seq = generate(c, nmax)?;
    moments_of(&seq, c.d, nmax)
}

pub(crate) fn is_zero_table(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// Exact scalar comparison.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScalarCheck {
    #[serde(with = "rational::serde_rat")]
    pub lhs: Rational,
    #[serde(with = "rational::serde_rat")]
    pub rhs: Rational,
}

impl ScalarCheck {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// Bracket identities; `n`, `r`, `k`, `i`, `l` are used per variant as documented.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Bracket {
    /// `⟨u_r, x^{n+1} P_{(n+1)d+r}⟩ = Π_{ν=0}^{n} γ^0_{νd+r+1}`.
    LeadingProduct { n: usize, r: usize },
    /// `⟨u_{d-1}, x^n P_{(n+1)d-1}⟩ = Π_{ν=1}^{n} γ^0_{νd}`.
    LastFormProduct { n: usize },
    /// `β_ν = ⟨u_ν, x P_ν⟩`, ν < d.
    Beta { nu: usize },
    /// `γ^{ν+r}_ν = ⟨u_{ν-1}, x P_{d-1-r}⟩`, 1 ≤ ν ≤ d-1-r.
    GammaLow { nu: usize, r: usize },
    /// `γ^ν_{n+1+ν} = ⟨u_{n+ν}, x P_{n+d}⟩`.
    GammaHigh { n: usize, nu: usize },
    /// `⟨u_{ν+1}, x P_{ν+2+i}⟩ = γ^{d-1-i}_{ν+2}`, the bracket behind the first-associated dual.
    AssocFirst { nu: usize, i: usize },
    /// `⟨u_{ν+r}, x^r P_{r(d+1)+ν}⟩ = Π_{i=1}^{r} γ^0_{d(i-1)+ν+r+1}`.
    AssocProduct { nu: usize, r: usize },
    /// `⟨u_r, x^k P_{dk+r-l}⟩` through the recurrence, 1 ≤ l ≤ dk+r.
    Lag { k: usize, r: usize, l: usize },
}

fn product(c: &RecCoeffs, idx: impl Iterator<Item = usize>) -> Result<Rational> {
    let mut v = rational::one();
    for j in idx {
        v *= c.gamma(0, j)?;
    }
    Ok(v)
}

fn x_pow_times(p: &Poly, k: usize) -> Poly {
    (0..k).fold(p.clone(), |q, _| q.mul_x())
}

pub fn bracket_check(c: &RecCoeffs, which: Bracket) -> Result<ScalarCheck> {
    let d = c.d;
    let need = |deg: usize, forms: usize| -> Result<(Vec<Poly>, MomentTable)> {
        let seq = generate(c, deg)?.into_inner();
        let m = moments_of(&seq, forms, deg)?;
        Ok((seq, m))
    };
    let bad = |msg: String| Err(Error::IndexOutOfRange(msg));
    match which {
        Bracket::LeadingProduct { n, r } => {
            if r >= d {
                return bad(format!("r = {r} must be below d"));
            }
            let deg = (n + 1) * (d + 1) + r;
            let (p, m) = need(deg, d)?;
            let lhs = m.apply(r, &x_pow_times(&p[(n + 1) * d + r], n + 1))?;
            Ok(ScalarCheck { lhs, rhs: product(c, (0..=n).map(|v| v * d + r + 1))? })
        }
        Bracket::LastFormProduct { n } => {
            let deg = (n + 1) * d - 1 + n;
            let (p, m) = need(deg, d)?;
            let lhs = m.apply(d - 1, &x_pow_times(&p[(n + 1) * d - 1], n))?;
            Ok(ScalarCheck { lhs, rhs: product(c, (1..=n).map(|v| v * d))? })
        }
        Bracket::Beta { nu } => {
            if nu >= d {
                return bad(format!("ν = {nu} must be below d"));
            }
            let (p, m) = need(nu + 1, d)?;
            Ok(ScalarCheck { lhs: m.apply(nu, &p[nu].mul_x())?, rhs: c.beta(nu)?.clone() })
        }
        Bracket::GammaLow { nu, r } => {
            if r + 2 > d || nu == 0 || nu + r + 1 > d {
                return bad(format!("need 1 ≤ ν ≤ d-1-r, got ν = {nu}, r = {r}"));
            }
            let (p, m) = need(d, d)?;
            Ok(ScalarCheck { lhs: m.apply(nu - 1, &p[d - 1 - r].mul_x())?, rhs: c.gamma(nu + r, nu)?.clone() })
        }
        Bracket::GammaHigh { n, nu } => {
            if nu >= d {
                return bad(format!("ν = {nu} must be below d"));
            }
            let (p, m) = need(n + d + 1, n + nu + 1)?;
            Ok(ScalarCheck { lhs: m.apply(n + nu, &p[n + d].mul_x())?, rhs: c.gamma(nu, n + 1 + nu)?.clone() })
        }
        Bracket::AssocFirst { nu, i } => {
            if nu >= d || i >= d {
                return bad(format!("need ν, i < d, got {nu}, {i}"));
            }
            let deg = nu + 2 + i;
            let (p, m) = need(deg + 1, nu + 2)?;
            Ok(ScalarCheck { lhs: m.apply(nu + 1, &p[deg].mul_x())?, rhs: c.gamma(d - 1 - i, nu + 2)?.clone() })
        }
        Bracket::AssocProduct { nu, r } => {
            if nu >= d || r == 0 {
                return bad(format!("need ν < d and r ≥ 1, got {nu}, {r}"));
            }
            let deg = r * (d + 1) + nu;
            let (p, m) = need(deg + r, nu + r + 1)?;
            let lhs = m.apply(nu + r, &x_pow_times(&p[deg], r))?;
            Ok(ScalarCheck { lhs, rhs: product(c, (1..=r).map(|i| d * (i - 1) + nu + r + 1))? })
        }
        Bracket::Lag { k, r, l } => {
            if r >= d || k == 0 || l == 0 || l > d * k + r {
                return bad(format!("need r < d, k ≥ 1, 1 ≤ l ≤ dk+r, got k = {k}, r = {r}, l = {l}"));
            }
            let top = d * k + r - l;
            let (p, m) = need(top + k + 1, d)?;
            let br = |j: i64| -> Result<Rational> {
                if j < 0 {
                    return Ok(rational::zero());
                }
                m.apply(r, &x_pow_times(&p[j as usize], k - 1))
            };
            let lhs = m.apply(r, &x_pow_times(&p[top], k))?;
            let t = top as i64;
            let mut rhs = br(t + 1)? + c.beta(top)? * br(t)?;
            for j in 0..d {
                let idx = t - j as i64;
                if idx <= 0 {
                    continue;
                }
                rhs += c.gamma(d - 1 - j, idx as usize)? * br(idx - 1)?;
            }
            Ok(ScalarCheck { lhs, rhs })
        }
    }
}

/// True iff every stored γ^0 is positive (coefficients are rational, hence real).
pub fn positive_definite(c: &RecCoeffs) -> bool {
    c.gamma[0].iter().all(|g| g > &rational::zero())
}

/// Truncated Laurent series in `w = 1/z`: `coeffs[i]` multiplies `w^{val+i}`,
/// exact for exponents up to `prec`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeriesTrunc {
    pub val: i64,
    #[serde(with = "rational::serde_vec")]
    pub coeffs: Vec<Rational>,
    pub prec: i64,
}

impl SeriesTrunc {
    fn new(val: i64, mut coeffs: Vec<Rational>, prec: i64) -> Self {
        coeffs.truncate((prec - val + 1).max(0) as usize);
        coeffs.resize((prec - val + 1).max(0) as usize, rational::zero());
        SeriesTrunc { val, coeffs, prec }
    }

    /// `S(u)(z) = -Σ (u)_n z^{-n-1}` from moments `(u)_0..(u)_{N-1}`.
    pub fn stieltjes(moments: &[Rational]) -> Self {
        let coeffs = moments.iter().map(|m| -m.clone()).collect();
        SeriesTrunc::new(1, coeffs, moments.len() as i64)
    }

    /// A polynomial in z, exact to any precision.
    pub fn from_poly(p: &Poly, prec: i64) -> Self {
        let deg = p.degree().unwrap_or(0) as i64;
        let coeffs = (0..=deg).rev().map(|k| p.coeff(k as usize)).collect();
        SeriesTrunc::new(-deg, coeffs, prec)
    }

    pub fn coeff(&self, e: i64) -> Rational {
        if e < self.val || e > self.prec {
            return rational::zero();
        }
        self.coeffs[(e - self.val) as usize].clone()
    }

    pub fn add(&self, o: &SeriesTrunc) -> SeriesTrunc {
        let val = self.val.min(o.val);
        let prec = self.prec.min(o.prec);
        SeriesTrunc::new(val, (val..=prec).map(|e| self.coeff(e) + o.coeff(e)).collect(), prec)
    }

    pub fn neg(&self) -> SeriesTrunc {
        SeriesTrunc { val: self.val, coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(), prec: self.prec }
    }

    pub fn sub(&self, o: &SeriesTrunc) -> SeriesTrunc {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &Rational) -> SeriesTrunc {
        SeriesTrunc { val: self.val, coeffs: self.coeffs.iter().map(|v| v * c).collect(), prec: self.prec }
    }

    pub fn mul(&self, o: &SeriesTrunc) -> SeriesTrunc {
        let val = self.val + o.val;
        let prec = (self.val + o.prec).min(o.val + self.prec);
        let coeffs = (val..=prec)
            .map(|e| (self.val..=e - o.val).map(|a| self.coeff(a) * o.coeff(e - a)).sum())
            .collect();
        SeriesTrunc::new(val, coeffs, prec)
    }

    /// First exponent with a nonzero coefficient.
    pub fn order(&self) -> Option<i64> {
        self.coeffs.iter().position(|c| !c.is_zero()).map(|i| self.val + i as i64)
    }

    pub fn recip(&self) -> Result<SeriesTrunc> {
        let v = self.order().ok_or(Error::SeriesDivisionByZero)?;
        if v != self.val {
            return SeriesTrunc::new(v, (v..=self.prec).map(|e| self.coeff(e)).collect(), self.prec).recip();
        }
        let lead_inv = self.coeffs[0].recip();
        let len = (self.prec - v + 1) as usize;
        let mut out: Vec<Rational> = Vec::with_capacity(len);
        for i in 0..len {
            let mut acc = if i == 0 { rational::one() } else { rational::zero() };
            for j in 1..=i {
                acc -= &self.coeffs[j] * &out[i - j];
            }
            out.push(acc * &lead_inv);
        }
        Ok(SeriesTrunc::new(-v, out, self.prec - 2 * v))
    }

    pub fn div(&self, o: &SeriesTrunc) -> Result<SeriesTrunc> {
        Ok(self.mul(&o.recip()?))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum StieltjesRelation {
    /// `S(u_{r-1}) S(u^{(r)}_n) = -S(u_{n+r})`, r ≥ 1.
    Markov { n: usize, r: usize },
    /// Co-dilated dual at level 1 against the quotient formula, for form ν.
    Codilated {
        nu: usize,
        #[serde(with = "rational::serde_rat")]
        lambda: Rational,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeriesCheck {
    /// Coefficients of `w^1..w^N` of lhs - rhs.
    #[serde(with = "rational::serde_vec")]
    pub residual: Vec<Rational>,
}

impl SeriesCheck {
    pub fn is_zero(&self) -> bool {
        is_zero_table(&self.residual)
    }
}

fn series_of(c: &RecCoeffs, forms: usize, len: usize) -> Result<Vec<SeriesTrunc>> {
    let seq = generate(c, len)?;
    let m = moments_of(&seq, forms, len)?;
    Ok(m.entries.iter().map(|row| SeriesTrunc::stieltjes(&row[..len])).collect())
}

pub fn stieltjes_relations(c: &RecCoeffs, which: &StieltjesRelation, nmax: usize) -> Result<SeriesCheck> {
    let d = c.d;
    let len = nmax + 2;
    let (lhs, rhs) = match which {
        StieltjesRelation::Markov { n, r } => {
            if *r == 0 {
                return Err(Error::IndexOutOfRange("Markov relation needs r ≥ 1".into()));
            }
            let s = series_of(c, n + r + 1, len)?;
            let sa = series_of(&associated(c, *r)?, n + 1, len)?;
            (s[r - 1].mul(&sa[*n]), s[n + r].neg())
        }
        StieltjesRelation::Codilated { nu, lambda } => {
            if *nu >= d {
                return Err(Error::IndexOutOfRange(format!("ν = {nu} must be below d")));
            }
            let lb = rational::one() - lambda;
            let s = series_of(c, d, len + 2)?;
            let st = series_of(&co_dilated(c, 1, lambda)?, d, len + 2)?;
            let p1 = SeriesTrunc::from_poly(&Poly::linear(c.beta(0)?), len as i64 + 2);
            let mut den = SeriesTrunc::from_poly(&Poly::constant(lambda.clone()), len as i64 + 2)
                .sub(&p1.mul(&s[0]).scale(&lb));
            for v in 0..d.saturating_sub(1) {
                den = den.add(&s[v + 1].scale(&(c.gamma(d - 1 - v, 1)? * &lb)));
            }
            (st[*nu].clone(), s[*nu].div(&den)?)
        }
    };
    let diff = lhs.sub(&rhs);
    if diff.prec < nmax as i64 {
        return Err(Error::IndexOutOfRange(format!("series precision {} below {nmax}", diff.prec)));
    }
    Ok(SeriesCheck { residual: (1..=nmax as i64).map(|e| diff.coeff(e)).collect() })
}

/// `P_n = Q_n + Σ_{i=1}^{dl} a[n][i-1] Q_{n-i}` for every stored n ≥ dl.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuasiOrder {
    pub l: usize,
    /// `a[n]` for n ≥ dl (earlier rows are empty).
    #[serde(with = "rational::serde_vec2")]
    pub a: Vec<Vec<Rational>>,
}

/// Smallest l for which P is d-quasi-orthogonal of order l with respect to Q.
///
/// Only orders leaving at least d+2 checked indices are tried.
pub fn quasi_detect(p: &[Poly], q: &[Poly], d: usize) -> Result<QuasiOrder> {
    let len = p.len().min(q.len());
    let expansions = (0..len).map(|n| expand_in_basis(&p[n], &q[..len])).collect::<Result<Vec<_>>>()?;
    let lmax = (len.saturating_sub(d + 2)) / d.max(1);
    'search: for l in 0..=lmax {
        let w = d * l;
        for (n, co) in expansions.iter().enumerate().skip(w) {
            if co.len() != n + 1 || co[n] != rational::one() {
                return Err(Error::NotGradedMonic(n));
            }
            if co[..n - w].iter().any(|c| !c.is_zero()) || (w > 0 && co[n - w].is_zero()) {
                continue 'search;
            }
        }
        let a = expansions
            .iter()
            .enumerate()
            .map(|(n, co)| if n < w { Vec::new() } else { (1..=w).map(|i| co[n - i].clone()).collect() })
            .collect();
        return Ok(QuasiOrder { l, a });
    }
    Err(Error::NotQuasi(lmax))
}

/// Reduction of `Q_n = P_n + Σ_{i=1}^{r} a^{(i)}_n P_{n-i}` to d+1 terms with
/// polynomial coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuasiReduction {
    pub n: usize,
    /// `U_0..U_{r-1}`.
    pub u: Vec<Poly>,
    /// Coefficients of `P_{n-r+1}, P_{n-r}, …, P_{n-r-d+1}`.
    pub coefficients: Vec<Poly>,
    pub residual: Poly,
}

/// `a[i-1]` is `a^{(i)}_n` for the given n; needs r > d and n ≥ r + d - 1.
pub fn quasi_reduce(c: &RecCoeffs, a: &[Rational], r: usize, n: usize) -> Result<QuasiReduction> {
    let d = c.d;
    if r <= d {
        return Err(Error::IndexOutOfRange(format!("reduction needs r > d, got r = {r}")));
    }
    if n + 1 < r + d {
        return Err(Error::IndexOutOfRange(format!("n = {n} too small for r = {r}")));
    }
    let aa = |i: usize| -> Rational {
        if i == 0 {
            rational::one()
        } else {
            a.get(i - 1).cloned().unwrap_or_else(rational::zero)
        }
    };
    let mut u: Vec<Poly> = Vec::with_capacity(r);
    let ui = |u: &Vec<Poly>, j: i64| if j < 0 { Poly::zero() } else { u[j as usize].clone() };
    u.push(Poly::one());
    for j in 1..r {
        let mut v = &Poly::linear(c.beta(n - j)?) * &u[j - 1] + Poly::constant(aa(j));
        for k in 0..d {
            v -= ui(&u, j as i64 - 1 - d as i64 + k as i64).scale(c.gamma(k, n - j + 1)?);
        }
        u.push(v);
    }
    let mut coefficients = vec![u[r - 1].clone()];
    for s in 0..d {
        // coefficient of P_{n-r-s}
        let mut v = if s == 0 { Poly::constant(aa(r)) } else { Poly::zero() };
        for k in 0..d - s {
            let idx = r as i64 + s as i64 - 1 - d as i64 + k as i64;
            v -= ui(&u, idx).scale(c.gamma(k, n - r - s + 1)?);
        }
        coefficients.push(v);
    }
    let p = generate(c, n)?;
    let mut q = Poly::zero();
    for i in 0..=r {
        q += p[n - i].scale(&aa(i));
    }
    let mut reduced = Poly::zero();
    for (s, co) in coefficients.iter().enumerate() {
        reduced += co * &p[n + 1 - r - s];
    }
    let residual = &q - &reduced;
    Ok(QuasiReduction { n, u, coefficients, residual })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Uvarov {
    /// `L_{-1}..L_{N-1}` at offset 1.
    pub l: Vec<Poly>,
    pub q: Vec<Poly>,
    /// `Q_m(c)(1 + λ L_{m-1}(c;c)) - P_m(c)` per m.
    #[serde(with = "rational::serde_vec")]
    pub point_residuals: Vec<Rational>,
    /// Brackets `⟨u_r, P_{dj+r} P_j⟩` that disagree with their γ^0 products.
    pub bracket_mismatches: usize,
    /// `⟨v_r, x^k Q_m⟩ ≠ 0` with m ≥ dk+r+1, v_r = u_r + λδ_c (informational).
    pub orthogonality_violations: usize,
}

/// Uvarov transform `v_r = u_r + λ δ_c` through degree `nmax`.
pub fn uvarov(c: &RecCoeffs, point: &Rational, lambda: &Rational, nmax: usize) -> Result<Uvarov> {
    let d = c.d;
    let deg = 2 * nmax + 2;
    let p = generate(c, deg)?.into_inner();
    let m = moments_of(&p, d, deg)?;
    // bracket[dj+r] = ⟨u_r, P_{dj+r} P_j⟩
    let mut brackets = Vec::with_capacity(nmax + 1);
    let mut bracket_mismatches = 0;
    for idx in 0..=nmax {
        let (j, r) = (idx / d, idx % d);
        let b = m.apply(r, &(&p[idx] * &p[j]))?;
        if b != product(c, (1..=j).map(|v| d * (v - 1) + r + 1))? {
            bracket_mismatches += 1;
        }
        if b.is_zero() {
            return Err(Error::SingularSystem(format!("bracket at index {idx} vanishes")));
        }
        brackets.push(b);
    }
    let mut l = vec![Poly::zero()];
    let mut acc = Poly::zero();
    for idx in 0..nmax {
        let j = idx / d;
        acc += p[idx].scale(&(p[j].eval(point) / &brackets[idx]));
        l.push(acc.clone());
    }
    let mut q = Vec::with_capacity(nmax + 1);
    let mut point_residuals = Vec::with_capacity(nmax + 1);
    for mm in 0..=nmax {
        let lprev = &l[mm];
        let den = rational::one() + lambda * lprev.eval(point);
        if den.is_zero() {
            return Err(Error::DenominatorVanishes(mm));
        }
        let pc = p[mm].eval(point);
        let qm = &p[mm] - &lprev.scale(&(lambda * &pc / &den));
        point_residuals.push(qm.eval(point) * &den - pc);
        q.push(qm);
    }
    let mut orthogonality_violations = 0;
    for r in 0..d {
        for (mm, qm) in q.iter().enumerate() {
            for k in 0..=nmax {
                if mm < d * k + r + 1 {
                    break;
                }
                let f = x_pow_times(qm, k);
                let v = m.apply(r, &f)? + lambda * f.eval(point);
                if !v.is_zero() {
                    orthogonality_violations += 1;
                }
            }
        }
    }
    Ok(Uvarov { l, q, point_residuals, bracket_mismatches, orthogonality_violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::darboux::kernel;
    use crate::dsym::{component_coeffs, SymData};
    use crate::rational::{int, q};
    use crate::seq::PolySeq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn moment_examples_and_duality() {
        let c = RecCoeffs::constant(1, &int(0), &[int(1)], 20);
        let m = moments(&c, 6).unwrap();
        assert_eq!(m.get(0, 0), &int(1));
        assert_eq!(m.get(0, 2), &int(1));
        let s = SymData::constant(2, &int(1), 20);
        let m = moments(&s.sym_coeffs(), 6).unwrap();
        assert_eq!(m.get(0, 3), &int(1));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in 1..=3 {
            let c = RecCoeffs::random(d, 30, &mut rng, false);
            let p = generate(&c, 12).unwrap();
            let m = moments_of(&p, d, 12).unwrap();
            for r in 0..d {
                assert_eq!(m.get(r, r), &int(1));
                assert!(m.entries[r][..r].iter().all(Zero::is_zero));
                for (k, pk) in p.iter().enumerate() {
                    let want = if k == r { int(1) } else { int(0) };
                    assert_eq!(m.apply(r, pk).unwrap(), want);
                }
            }
        }
    }

    #[test]
    fn brackets() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for d in 1..=3 {
            let c = RecCoeffs::random(d, 40, &mut rng, false);
            let mut all = Vec::new();
            for n in 0..4 {
                for r in 0..d {
                    all.push(Bracket::LeadingProduct { n, r });
                    all.push(Bracket::GammaHigh { n, nu: r });
                }
                all.push(Bracket::LastFormProduct { n });
            }
            for nu in 0..d {
                all.push(Bracket::Beta { nu });
                for r in 0..d {
                    if nu >= 1 && nu + r + 1 <= d && r + 2 <= d {
                        all.push(Bracket::GammaLow { nu, r });
                    }
                    all.push(Bracket::AssocFirst { nu, i: r });
                }
                for r in 1..4 {
                    all.push(Bracket::AssocProduct { nu, r });
                }
            }
            for k in 1..4 {
                for r in 0..d {
                    for l in 1..=d * k + r {
                        all.push(Bracket::Lag { k, r, l });
                    }
                }
            }
            for b in all {
                let chk = bracket_check(&c, b).unwrap();
                assert!(chk.holds(), "d={d} {b:?}: {} vs {}", chk.lhs, chk.rhs);
            }
        }
    }

    #[test]
    fn positivity() {
        let s = SymData::constant(2, &int(1), 60);
        for i in 0..=2 {
            assert!(positive_definite(&component_coeffs(&s, i, 10).unwrap()));
        }
        assert!(positive_definite(&RecCoeffs::constant(1, &int(0), &[int(1)], 10)));
        let mut c = RecCoeffs::constant(2, &int(1), &[int(1), int(1)], 10);
        c.gamma[0][3] = int(-1);
        assert!(!positive_definite(&c));
    }

    #[test]
    fn series_arithmetic() {
        let one_over = SeriesTrunc::stieltjes(&[int(1)]);
        let inv = one_over.recip().unwrap();
        assert_eq!(inv.val, -1);
        assert_eq!(inv.coeff(-1), int(-1));
        let z = SeriesTrunc::from_poly(&Poly::x(), 10);
        assert!(SeriesTrunc::from_poly(&Poly::zero(), 5).recip().is_err());
        let prod = z.mul(&SeriesTrunc::stieltjes(&vec![int(1); 12]));
        assert_eq!(prod.coeff(0), int(-1));
    }

    #[test]
    fn stieltjes_markov_and_codilated() {
        let c = RecCoeffs::constant(1, &int(0), &[int(1)], 60);
        assert!(stieltjes_relations(&c, &StieltjesRelation::Markov { n: 0, r: 1 }, 20).unwrap().is_zero());
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for d in 1..=2 {
            let c = RecCoeffs::random(d, 60, &mut rng, false);
            for n in 0..3 {
                for r in 1..3 {
                    let chk = stieltjes_relations(&c, &StieltjesRelation::Markov { n, r }, 15).unwrap();
                    assert!(chk.is_zero(), "d={d} n={n} r={r}");
                }
            }
            for nu in 0..d {
                for lambda in [int(1), q(3, 2), int(-2)] {
                    let chk = stieltjes_relations(&c, &StieltjesRelation::Codilated { nu, lambda: lambda.clone() }, 15).unwrap();
                    assert!(chk.is_zero(), "d={d} nu={nu} lambda={lambda}: {:?}", chk.residual);
                }
            }
        }
    }

    #[test]
    fn quasi_detection() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in 1..=3 {
            let c = RecCoeffs::random(d, 60, &mut rng, false);
            let p = generate(&c, 14).unwrap();
            assert_eq!(quasi_detect(&p, &p, d).unwrap().l, 0);
            let k = kernel(&c, 14).unwrap();
            let qo = quasi_detect(&p, &k.k, d).unwrap();
            assert_eq!(qo.l, 1);
            for n in d..=14 {
                for i in 1..=d {
                    assert_eq!(qo.a[n][i - 1], k.factors.lower.get(n, n - i), "d={d} n={n} i={i}");
                }
            }
            let other = generate(&RecCoeffs::random(d, 60, &mut rng, false), 14).unwrap();
            assert!(matches!(quasi_detect(&p, &other, d), Err(Error::NotQuasi(_))));
        }
    }

    #[test]
    fn quasi_reduction() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for (d, r) in [(1, 2), (2, 3), (3, 5)] {
            let c = RecCoeffs::random(d, 40, &mut rng, false);
            for n in r + d - 1..r + d + 4 {
                let a: Vec<Rational> = (0..r).map(|_| rational::random(&mut rng, false, false)).collect();
                let red = quasi_reduce(&c, &a, r, n).unwrap();
                assert!(red.residual.is_zero(), "d={d} r={r} n={n}");
                let zero = quasi_reduce(&c, &vec![int(0); r], r, n).unwrap();
                assert!(zero.residual.is_zero());
            }
        }
    }

    #[test]
    fn uvarov_transform() {
        let c = RecCoeffs::constant(1, &int(0), &[int(1)], 60);
        let u = uvarov(&c, &int(2), &int(1), 10).unwrap();
        assert_eq!(u.l[1], Poly::one());
        assert!(u.point_residuals.iter().all(Zero::is_zero));
        assert_eq!(u.orthogonality_violations, 0);
        assert_eq!(u.bracket_mismatches, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for d in 1..=3 {
            let c = RecCoeffs::random(d, 60, &mut rng, false);
            let z = uvarov(&c, &q(1, 3), &int(0), 10).unwrap();
            assert_eq!(PolySeq::new(z.q.clone()).unwrap()[..], generate(&c, 10).unwrap()[..]);
            let u = uvarov(&c, &q(1, 3), &q(2, 5), 10).unwrap();
            assert_eq!(u.bracket_mismatches, 0, "d={d}");
            assert!(u.point_residuals.iter().all(Zero::is_zero));
        }
    }
}
