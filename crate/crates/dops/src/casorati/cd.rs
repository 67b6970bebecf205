//! Christoffel–Darboux type identities for the determinants
//! `H(n, v, k) = det[P^{(r+j)}_{u-j}]_{u ∈ {n, v, k}, j = 0..d}`.
//!
//! Product and sum forms are stated for d = 2. With s = r+n+1,
//! `A(m) = det[[P^{(s)}_{m-n-1}, P^{(s+1)}_{m-n-2}], [P^{(s)}_{m-n}, P^{(s+1)}_{m-n-1}]]`.
//! The sum form carries a telescoping remainder in `f(v) - f(v+2)`; without
//! it the identity only holds when m = n+1 (`printed` holds that reading).

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{delta_value, table, Residual};
use crate::error::{Error, Result};
use crate::linalg::{det_poly, det_q};
use crate::poly::Poly;
use crate::rational::{self, Rational};
use crate::seq::{AssocTable, RecCoeffs};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CdKind {
    Product,
    Sum,
    Multipoint,
    Confluent,
    ConfluentAssoc,
}

impl std::str::FromStr for CdKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "product" => CdKind::Product,
            "sum" => CdKind::Sum,
            "multipoint" => CdKind::Multipoint,
            "confluent" => CdKind::Confluent,
            "confluent_assoc" => CdKind::ConfluentAssoc,
            _ => return Err(Error::BadSelector(s.to_string())),
        })
    }
}

/// Product and sum use n < m < k; the others use n and r only.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CdParams {
    pub n: usize,
    #[serde(default)]
    pub m: usize,
    #[serde(default)]
    pub k: usize,
    #[serde(default)]
    pub r: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CdReport {
    pub kind: CdKind,
    pub check: Residual,
    /// The identity without its correction term, where one applies.
    pub printed: Option<Residual>,
    /// Multipoint only: residual at the points x_j = j + 1/2.
    #[serde(skip_serializing_if = "Option::is_none", with = "opt_rat")]
    pub pointwise: Option<Rational>,
}

impl CdReport {
    pub fn is_exact(&self) -> bool {
        self.check.is_zero() && self.pointwise.as_ref().map_or(true, Zero::is_zero)
    }
}

mod opt_rat {
    use serde::Serializer;

    pub fn serialize<S: Serializer>(v: &Option<super::Rational>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(r) => s.serialize_str(&crate::rational::fmt(r)),
            None => s.serialize_none(),
        }
    }
}

fn h_det(t: &AssocTable, d: usize, r: usize, rows: [usize; 3]) -> Result<Poly> {
    let m = rows
        .iter()
        .map(|&u| (0..=d).map(|j| t.p(r + j, u as i64 - j as i64).cloned()).collect())
        .collect::<Result<Vec<Vec<Poly>>>>()?;
    Ok(det_poly(&m))
}

fn a_det(t: &AssocTable, r: usize, n: usize, m: usize) -> Result<Poly> {
    let s = r + n + 1;
    let e = |sh: usize, off: i64| t.p(s + sh, m as i64 - n as i64 + off).cloned();
    Ok(det_poly(&[vec![e(0, -1)?, e(1, -2)?], vec![e(0, 0)?, e(1, -1)?]]))
}

/// `c_v = (-1)^v Π_{l=1}^v γ^0_{l+r}`.
fn c_v(c: &RecCoeffs, v: usize, r: usize) -> Result<Rational> {
    Ok(rational::sign(v as i64) * c.gamma0_product(v, r)?)
}

fn product_sum(c: &RecCoeffs, kind: CdKind, prm: &CdParams) -> Result<CdReport> {
    if c.d != 2 {
        return Err(Error::UnsupportedD(c.d));
    }
    let CdParams { n, m, k, r } = *prm;
    if !(n < m && m < k) {
        return Err(Error::BadOffsets(format!("need n < m < k (n={n}, m={m}, k={k})")));
    }
    let d = 2;
    let t = table(c, r + k + 2, k + d)?;
    let dn = delta_value(c, n, r)?;
    let f = |v: usize| t.p(v + r + 1, k as i64 - v as i64 - 1).cloned();
    if kind == CdKind::Product {
        let lhs = h_det(&t, d, r, [n, m, k])?;
        let a_prev = if m > n { a_det(&t, r, n, m - 1)? } else { Poly::zero() };
        let second = (&t.p(m + r + 2, k as i64 - m as i64 - 2)?.clone() * &a_prev).scale(c.gamma(0, m + r)?);
        let rhs = (&(&f(m)? * &a_det(&t, r, n, m)?) + &second).scale(&dn);
        return Ok(CdReport { kind, check: Residual::new(lhs, rhs), printed: None, pointwise: None });
    }
    let mut lhs = Poly::zero();
    for v in n + 1..=m {
        lhs += h_det(&t, d, r, [n, v, k])?.scale(&c_v(c, v, r)?.recip());
    }
    let j = |v: usize| -> Result<Poly> { Ok(a_det(&t, r, n, v)?.scale(&c_v(c, v, r)?.recip())) };
    let head = &f(m)? * &j(m)?;
    let mut tail = Poly::zero();
    for v in n + 1..m {
        tail += &(&f(v)? - &f(v + 2)?) * &j(v)?;
    }
    let rhs = (&head + &tail).scale(&dn);
    let printed = Residual::new(lhs.clone(), head.scale(&dn));
    Ok(CdReport { kind, check: Residual::new(lhs, rhs), printed: Some(printed), pointwise: None })
}

/// `p(a x)`.
fn dilate(p: &Poly, a: &Rational) -> Poly {
    let mut s = rational::one();
    let coeffs = p
        .coeffs()
        .iter()
        .map(|co| {
            let v = co * &s;
            s *= a;
            v
        })
        .collect();
    Poly::new(coeffs)
}

fn n_over_v(c: &RecCoeffs, n: usize, v: usize, r: usize) -> Result<Rational> {
    Ok(delta_value(c, n, r)? / delta_value(c, v, r)?)
}

/// Σ_{v=1}^n (Δ_n/Δ_v) det M_v against det[P^{(r+j)}_{n-j+t}(x_j)] - Δ_n, with
/// `entry(j, s, m)` giving `P^{(s)}_m` at the j-th point and `xj(j)` the point itself.
fn multipoint_generic<E, T>(c: &RecCoeffs, t: &AssocTable, n: usize, r: usize, entry: E, xj: T) -> Result<(E::Out, E::Out)>
where
    E: Entry,
    T: Fn(usize) -> E::Out,
{
    let d = c.d;
    let mut lhs = E::zero();
    for v in 1..=n {
        let cols = (0..=d)
            .map(|j| {
                let s = r + j;
                let mut col = (0..d)
                    .map(|tt| entry.at(t, j, s, v as i64 - j as i64 + tt as i64))
                    .collect::<Result<Vec<_>>>()?;
                col.push(E::mul(&xj(j), &entry.at(t, j, s, v as i64 - j as i64 + d as i64 - 1)?));
                Ok(col)
            })
            .collect::<Result<Vec<_>>>()?;
        lhs = E::add(&lhs, &E::scale(&E::det_cols(cols), &n_over_v(c, n, v, r)?));
    }
    let cols = (0..=d)
        .map(|j| (0..=d).map(|tt| entry.at(t, j, r + j, n as i64 - j as i64 + tt as i64)).collect())
        .collect::<Result<Vec<Vec<_>>>>()?;
    let rhs = E::sub(&E::det_cols(cols), &E::constant(delta_value(c, n, r)?));
    Ok((lhs, rhs))
}

trait Entry {
    type Out: Clone;
    fn at(&self, t: &AssocTable, j: usize, s: usize, m: i64) -> Result<Self::Out>;
    fn zero() -> Self::Out;
    fn constant(v: Rational) -> Self::Out;
    fn add(a: &Self::Out, b: &Self::Out) -> Self::Out;
    fn sub(a: &Self::Out, b: &Self::Out) -> Self::Out;
    fn mul(a: &Self::Out, b: &Self::Out) -> Self::Out;
    fn scale(a: &Self::Out, s: &Rational) -> Self::Out;
    fn det_cols(cols: Vec<Vec<Self::Out>>) -> Self::Out;
}

fn transpose<T: Clone>(cols: Vec<Vec<T>>) -> Vec<Vec<T>> {
    let n = cols.len();
    (0..n).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect()
}

/// Evaluation at fixed rational points.
struct AtPoints(Vec<Rational>);

impl Entry for AtPoints {
    type Out = Rational;
    fn at(&self, t: &AssocTable, j: usize, s: usize, m: i64) -> Result<Rational> {
        Ok(t.p(s, m)?.eval(&self.0[j]))
    }
    fn zero() -> Rational {
        rational::zero()
    }
    fn constant(v: Rational) -> Rational {
        v
    }
    fn add(a: &Rational, b: &Rational) -> Rational {
        a + b
    }
    fn sub(a: &Rational, b: &Rational) -> Rational {
        a - b
    }
    fn mul(a: &Rational, b: &Rational) -> Rational {
        a * b
    }
    fn scale(a: &Rational, s: &Rational) -> Rational {
        a * s
    }
    fn det_cols(cols: Vec<Vec<Rational>>) -> Rational {
        det_q(&transpose(cols))
    }
}

/// Symbolic in one variable x, with the j-th point at (j+1)·x.
struct Dilated;

impl Entry for Dilated {
    type Out = Poly;
    fn at(&self, t: &AssocTable, j: usize, s: usize, m: i64) -> Result<Poly> {
        Ok(dilate(t.p(s, m)?, &rational::int(j as i64 + 1)))
    }
    fn zero() -> Poly {
        Poly::zero()
    }
    fn constant(v: Rational) -> Poly {
        Poly::constant(v)
    }
    fn add(a: &Poly, b: &Poly) -> Poly {
        a + b
    }
    fn sub(a: &Poly, b: &Poly) -> Poly {
        a - b
    }
    fn mul(a: &Poly, b: &Poly) -> Poly {
        a * b
    }
    fn scale(a: &Poly, s: &Rational) -> Poly {
        a.scale(s)
    }
    fn det_cols(cols: Vec<Vec<Poly>>) -> Poly {
        det_poly(&transpose(cols))
    }
}

fn multipoint(c: &RecCoeffs, prm: &CdParams) -> Result<CdReport> {
    let d = c.d;
    let CdParams { n, r, .. } = *prm;
    let t = table(c, r + d, n + d)?;
    let pts: Vec<Rational> = (0..=d).map(|j| rational::q(2 * j as i64 + 1, 2)).collect();
    let (l, rr) = multipoint_generic(c, &t, n, r, AtPoints(pts.clone()), |j| pts[j].clone())?;
    let (lhs, rhs) = multipoint_generic(c, &t, n, r, Dilated, |j| {
        Poly::monomial(rational::int(j as i64 + 1), 1)
    })?;
    Ok(CdReport { kind: CdKind::Multipoint, check: Residual::new(lhs, rhs), printed: None, pointwise: Some(l - rr) })
}

/// Confluent limit. Column j holds j-th derivatives; the last entry is
/// `j · (P_{v+d-1})^{(j-1)}`. With `assoc`, column j uses `P^{(r+j)}_{·-j}` and
/// the right side carries no Δ_n term.
fn confluent(c: &RecCoeffs, prm: &CdParams, assoc: bool) -> Result<CdReport> {
    let d = c.d;
    let CdParams { n, r, .. } = *prm;
    let t = table(c, r + d, n + d)?;
    let shift = |j: usize| if assoc { j } else { 0 };
    let build = |v: usize, factor: bool| -> Result<Poly> {
        let cols = (0..=d)
            .map(|j| {
                let s = r + shift(j);
                let base = v as i64 - shift(j) as i64;
                let mut col = (0..d)
                    .map(|tt| Ok(t.p(s, base + tt as i64)?.deriv_n(j)))
                    .collect::<Result<Vec<_>>>()?;
                let last = if j == 0 {
                    Poly::zero()
                } else {
                    let p = t.p(s, base + d as i64 - 1)?.deriv_n(j - 1);
                    if factor {
                        p.scale(&rational::int(j as i64))
                    } else {
                        p
                    }
                };
                col.push(last);
                Ok(col)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(det_poly(&transpose(cols)))
    };
    let sum = |factor: bool| -> Result<Poly> {
        let mut acc = Poly::zero();
        for v in 1..=n {
            acc += build(v, factor)?.scale(&n_over_v(c, n, v, r)?);
        }
        Ok(acc)
    };
    let cols = (0..=d)
        .map(|j| {
            (0..=d)
                .map(|tt| Ok(t.p(r + shift(j), n as i64 - shift(j) as i64 + tt as i64)?.deriv_n(j)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rhs = det_poly(&transpose(cols));
    if !assoc {
        let fact: Rational = (1..=d as i64).fold(rational::one(), |acc, k| {
            acc * (1..=k).fold(rational::one(), |a, i| a * rational::int(i))
        });
        rhs -= Poly::constant(fact * delta_value(c, n, r)?);
    }
    let kind = if assoc { CdKind::ConfluentAssoc } else { CdKind::Confluent };
    let check = Residual::new(sum(true)?, rhs.clone());
    let printed = Some(Residual::new(sum(false)?, rhs));
    Ok(CdReport { kind, check, printed, pointwise: None })
}

pub fn verify_cd(c: &RecCoeffs, kind: CdKind, prm: &CdParams) -> Result<CdReport> {
    match kind {
        CdKind::Product | CdKind::Sum => product_sum(c, kind, prm),
        CdKind::Multipoint => multipoint(c, prm),
        CdKind::Confluent => confluent(c, prm, false),
        CdKind::ConfluentAssoc => confluent(c, prm, true),
    }
}
