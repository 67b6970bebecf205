//! d-symmetric sequences `B_{n+d+1} = x B_{n+d} - ρ_{n+1} B_n`, their
//! components `B_{(d+1)n+s}(x) = x^s B^s_n(x^{d+1})`, the links between
//! components, and Hahn/Pearson checks.

use std::str::FromStr;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::casorati::Residual;
use crate::darboux::{darboux_chain, lu, Schedule};
use crate::error::{Error, Result};
use crate::forms::moments_of;
use crate::linalg::solve_consistent;
use crate::poly::Poly;
use crate::rational::{self, Rational};
use crate::seq::{derivative_sequence, expand_in_basis, extract_recurrence, Extraction, PolySeq, RecCoeffs};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymData {
    pub d: usize,
    /// `rho[n-1]` is ρ_n.
    #[serde(with = "rational::serde_vec")]
    pub rho: Vec<Rational>,
}

impl SymData {
    pub fn new(d: usize, rho: Vec<Rational>) -> Result<Self> {
        if d == 0 {
            return Err(Error::BadParameter("d must be positive".into()));
        }
        if let Some(n) = rho.iter().position(Zero::is_zero) {
            return Err(Error::RegularityViolation { index: n as i64 + 1 });
        }
        Ok(SymData { d, rho })
    }

    pub fn constant(d: usize, rho: &Rational, len: usize) -> Self {
        SymData { d, rho: vec![rho.clone(); len] }
    }

    /// ρ_n, 1-based.
    pub fn rho(&self, n: usize) -> Result<&Rational> {
        if n == 0 {
            return Err(Error::MissingRho(0));
        }
        self.rho.get(n - 1).ok_or(Error::MissingRho(n))
    }

    /// ρ_j with ρ_j = 0 for j ≤ 0, which absorbs the short initial rows.
    fn rho_ext(&self, j: i64) -> Result<Rational> {
        if j <= 0 {
            Ok(rational::zero())
        } else {
            self.rho(j as usize).cloned()
        }
    }

    /// The same sequence as a general descriptor: β = 0, γ^ν = 0 for ν ≥ 1, γ^0 = ρ.
    pub fn sym_coeffs(&self) -> RecCoeffs {
        let len = self.rho.len();
        let mut gamma = vec![vec![rational::zero(); len]; self.d];
        gamma[0] = self.rho.clone();
        RecCoeffs { d: self.d, beta: vec![rational::zero(); len], gamma }
    }
}

pub fn dsym_generate(s: &SymData, n_max: usize) -> Result<PolySeq> {
    let d = s.d;
    let mut out: Vec<Poly> = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let p = if n <= d {
            Poly::monomial(rational::one(), n)
        } else {
            let m = n - d - 1;
            out[n - 1].mul_x() - out[m].scale(s.rho(m + 1)?)
        };
        out.push(p);
    }
    PolySeq::new(out)
}

/// Components `B^s`, s = 0..=d, from a d-symmetric sequence.
pub fn decompose(seq: &[Poly], d: usize) -> Result<Vec<PolySeq>> {
    let step = d + 1;
    let mut comps: Vec<Vec<Poly>> = vec![Vec::new(); step];
    for (m, p) in seq.iter().enumerate() {
        let s = m % step;
        let mut co = Vec::with_capacity(m / step + 1);
        for (k, c) in p.coeffs().iter().enumerate() {
            if k % step != s {
                if !c.is_zero() {
                    return Err(Error::NotDSymmetric(format!("B_{m} has a nonzero x^{k} term")));
                }
            } else {
                co.push(c.clone());
            }
        }
        comps[s].push(Poly::new(co));
    }
    comps.into_iter().map(PolySeq::new).collect()
}

/// Inverse of [`decompose`]: interleaves `x^s B^s_n(x^{d+1})`.
pub fn recompose(comps: &[PolySeq]) -> Vec<Poly> {
    let step = comps.len();
    let total: usize = comps.iter().map(|c| c.len()).sum();
    let mut out = Vec::with_capacity(total);
    for m in 0.. {
        let (n, s) = (m / step, m % step);
        let Some(p) = comps[s].get(n) else { break };
        let mut q = p.compose_power(step);
        for _ in 0..s {
            q = q.mul_x();
        }
        out.push(q);
    }
    out
}

fn nondecreasing(k: usize, lo: i64, hi: i64, f: &mut dyn FnMut(&[i64]) -> Result<()>) -> Result<()> {
    fn go(k: usize, lo: i64, hi: i64, cur: &mut Vec<i64>, f: &mut dyn FnMut(&[i64]) -> Result<()>) -> Result<()> {
        if cur.len() == k {
            return f(cur);
        }
        let start = cur.last().copied().unwrap_or(lo);
        for v in start..=hi {
            cur.push(v);
            go(k, lo, hi, cur, f)?;
            cur.pop();
        }
        Ok(())
    }
    go(k, lo, hi, &mut Vec::with_capacity(k), f)
}

fn increasing(k: usize, lo: i64, hi: i64, f: &mut dyn FnMut(&[i64]) -> Result<()>) -> Result<()> {
    fn go(k: usize, lo: i64, hi: i64, cur: &mut Vec<i64>, f: &mut dyn FnMut(&[i64]) -> Result<()>) -> Result<()> {
        if cur.len() == k {
            return f(cur);
        }
        let start = cur.last().map_or(lo, |v| v + 1);
        for v in start..=hi {
            cur.push(v);
            go(k, lo, hi, cur, f)?;
            cur.pop();
        }
        Ok(())
    }
    go(k, lo, hi, &mut Vec::with_capacity(k), f)
}

/// Coefficient of `B^i_{n+1-k}` in `t B^i_n`, as the multi-index sum.
fn band_sum(s: &SymData, i: usize, n: usize, k: usize) -> Result<Rational> {
    let d = s.d as i64;
    let base = (d + 1) * n as i64 + i as i64;
    let mut acc = rational::zero();
    nondecreasing(k, 1, d + 2 - k as i64, &mut |idx| {
        let mut p = rational::one();
        for (m, &im) in idx.iter().enumerate() {
            p *= s.rho_ext(base + im - (m as i64 + 1) * d)?;
            if p.is_zero() {
                break;
            }
        }
        acc += p;
        Ok(())
    })?;
    Ok(acc)
}

/// Recurrence coefficients of component i by the multi-index sums, β_0..β_{len-1}
/// and γ^ν_1..γ^ν_len.
pub fn component_coeffs(s: &SymData, i: usize, len: usize) -> Result<RecCoeffs> {
    let d = s.d;
    if i > d {
        return Err(Error::IndexOutOfRange(format!("component {i} > d = {d}")));
    }
    let beta = (0..len).map(|n| band_sum(s, i, n, 1)).collect::<Result<Vec<_>>>()?;
    let gamma = (0..d)
        .map(|nu| (1..=len).map(|j| band_sum(s, i, j + d - 1 - nu, d + 1 - nu)).collect())
        .collect::<Result<Vec<_>>>()?;
    Ok(RecCoeffs { d, beta, gamma })
}

/// Largest `len` accepted by [`component_coeffs`] with the stored ρ.
pub fn component_len(s: &SymData, i: usize) -> usize {
    let mut len = s.rho.len() / (s.d + 1) + 1;
    while len > 0 && component_coeffs(s, i, len).is_err() {
        len -= 1;
    }
    len
}

/// `γ^0_n(i) = Π_{ν=n}^{d+n} ρ_{(ν-1)d+n+i}`.
pub fn gamma0_closed(s: &SymData, i: usize, n: usize) -> Result<Rational> {
    let d = s.d as i64;
    let mut v = rational::one();
    for nu in n as i64..=d + n as i64 {
        v *= s.rho_ext((nu - 1) * d + n as i64 + i as i64)?;
    }
    Ok(v)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentCheck {
    pub i: usize,
    pub sum: RecCoeffs,
    pub fit: RecCoeffs,
    pub agree: bool,
    pub gamma0_product_agrees: bool,
}

/// Both routes to the coefficients of component i over `len` indices.
pub fn component_check(s: &SymData, i: usize, len: usize) -> Result<ComponentCheck> {
    let d = s.d;
    let sum = component_coeffs(s, i, len)?;
    // the fit stores γ^ν_1..γ^ν_{L-1-d} from L polynomials
    let comp_len = len + d + 1;
    let seq = dsym_generate(s, (d + 1) * (comp_len - 1) + i)?;
    let comps = decompose(&seq, d)?;
    let fit = match extract_recurrence(&comps[i][..comp_len], d)? {
        Extraction::Rec(c) => c.truncate(len),
        Extraction::Quasi(q) => {
            return Err(Error::NotDSymmetric(format!("component {i} is not banded at {:?}", q.first_violation)))
        }
    };
    let agree = fit == sum;
    let gamma0_product_agrees = (1..=len).try_fold(true, |ok, n| Ok::<_, Error>(ok && gamma0_closed(s, i, n)? == sum.gamma[0][n - 1]))?;
    Ok(ComponentCheck { i, sum, fit, agree, gamma0_product_agrees })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Link {
    /// Component i from component i+1 and one ρ.
    Adjacent,
    /// `x` times the last component expanded in component i.
    Top,
    /// Component i from component i+k.
    Step,
    /// `x^r B_n` expanded in the full sequence.
    Power,
    /// The (d+2)-term recurrence of component i.
    Band,
    /// `x C^d_n = C^0_{n+1} + ρ C^0_n`: the last component is the kernel sequence of the first.
    Kernel,
    /// LU multipliers of component 0 are ρ values.
    RhoM,
}

impl FromStr for Link {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "adjacent" => Link::Adjacent,
            "top" => Link::Top,
            "step" => Link::Step,
            "power" => Link::Power,
            "band" => Link::Band,
            "kernel" => Link::Kernel,
            "rho_m" | "rhom" => Link::RhoM,
            other => return Err(Error::BadSelector(other.to_string())),
        })
    }
}

impl Link {
    pub const ALL: [Link; 7] = [Link::Adjacent, Link::Top, Link::Step, Link::Power, Link::Band, Link::Kernel, Link::RhoM];
}

/// `n` is the degree index, `i` the component, `k` the step or the power of x.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkParams {
    pub n: usize,
    pub i: usize,
    pub k: usize,
}

struct Comps {
    seq: PolySeq,
    comps: Vec<PolySeq>,
}

impl Comps {
    fn new(s: &SymData, n_max: usize) -> Result<Self> {
        let seq = dsym_generate(s, n_max)?;
        let comps = decompose(&seq, s.d)?;
        Ok(Comps { seq, comps })
    }

    fn b(&self, m: i64) -> Result<Poly> {
        get(&self.seq, m)
    }

    fn c(&self, s: usize, n: i64) -> Result<Poly> {
        get(&self.comps[s], n)
    }
}

fn get(seq: &[Poly], m: i64) -> Result<Poly> {
    if m < 0 {
        return Ok(Poly::zero());
    }
    seq.get(m as usize).cloned().ok_or_else(|| Error::IndexOutOfRange(format!("degree {m} beyond the generated range")))
}

pub fn verify_links(s: &SymData, which: Link, prm: LinkParams) -> Result<Residual> {
    let d = s.d;
    let step = d as i64 + 1;
    let LinkParams { n, i, k } = prm;
    let (ni, ii) = (n as i64, i as i64);
    let need_comp = |top: usize| (d + 1) * (top + 1) + d;
    let t = Poly::x();
    match which {
        Link::Adjacent => {
            if i >= d {
                return Err(Error::IndexOutOfRange(format!("adjacent link needs i < d, got {i}")));
            }
            let c = Comps::new(s, need_comp(n + 1))?;
            let rhs = c.c(i + 1, ni + 1)? + c.c(i + 1, ni)?.scale(&s.rho_ext(step * ni + ii + 2)?);
            Ok(Residual::new(c.c(i, ni + 1)?, rhs))
        }
        Link::Top => {
            if i > d {
                return Err(Error::IndexOutOfRange(format!("top link needs i ≤ d, got {i}")));
            }
            let c = Comps::new(s, need_comp(n + 1))?;
            let mut rhs = c.c(i, ni + 1)?;
            for tt in 0..=i {
                let mut coef = rational::zero();
                increasing(tt + 1, 1, ii + 1, &mut |js| {
                    let mut p = rational::one();
                    for (m, &j) in js.iter().enumerate() {
                        p *= s.rho_ext(step * (ni - m as i64) + j)?;
                    }
                    coef += p;
                    Ok(())
                })?;
                rhs += c.c(i, ni - tt as i64)?.scale(&coef);
            }
            Ok(Residual::new(&t * &c.c(d, ni)?, rhs))
        }
        Link::Step => {
            if i + k > d {
                return Err(Error::IndexOutOfRange(format!("step link needs i + k ≤ d, got {i} + {k}")));
            }
            let c = Comps::new(s, need_comp(n + 1))?;
            let mut rhs = c.c(i + k, ni + 1)?;
            for tt in 1..=k {
                let mut coef = rational::zero();
                increasing(tt, 2, k as i64 + 1, &mut |js| {
                    let mut p = rational::one();
                    for (m, &j) in js.iter().enumerate() {
                        p *= s.rho_ext(step * (ni - m as i64) + ii + j)?;
                    }
                    coef += p;
                    Ok(())
                })?;
                rhs += c.c(i + k, ni + 1 - tt as i64)?.scale(&coef);
            }
            Ok(Residual::new(c.c(i, ni + 1)?, rhs))
        }
        Link::Power => {
            let r = k;
            let c = Comps::new(s, n + r)?;
            let mut rhs = c.b((n + r) as i64)?;
            for kk in 1..=r {
                let mut coef = rational::zero();
                nondecreasing(kk, 1, (r - kk + 1) as i64, &mut |idx| {
                    let mut p = rational::one();
                    for (m, &im) in idx.iter().enumerate() {
                        p *= s.rho_ext(ni + im - (m as i64 + 1) * d as i64)?;
                    }
                    coef += p;
                    Ok(())
                })?;
                rhs += c.b((n + r) as i64 - kk as i64 * step)?.scale(&coef);
            }
            let lhs = (0..r).fold(c.b(ni)?, |p, _| p.mul_x());
            Ok(Residual::new(lhs, rhs))
        }
        Link::Band => {
            if i > d {
                return Err(Error::IndexOutOfRange(format!("component {i} > d = {d}")));
            }
            let c = Comps::new(s, need_comp(n + 1))?;
            let mut rhs = c.c(i, ni + 1)?;
            for kk in 1..=d + 1 {
                rhs += c.c(i, ni + 1 - kk as i64)?.scale(&band_sum(s, i, n, kk)?);
            }
            Ok(Residual::new(&t * &c.c(i, ni)?, rhs))
        }
        Link::Kernel => {
            let c = Comps::new(s, need_comp(n + 1))?;
            let rhs = c.c(0, ni + 1)? + c.c(0, ni)?.scale(&s.rho_ext(step * ni + 1)?);
            Ok(Residual::new(&t * &c.c(d, ni)?, rhs))
        }
        Link::RhoM => {
            let c0 = component_coeffs(s, 0, n + d + 2)?;
            let f = lu(&c0, n + 1)?;
            Ok(Residual::new(Poly::constant(f.m[n].clone()), Poly::constant(s.rho_ext(step * ni + 1)?)))
        }
    }
}

/// Every link at every valid parameter point with degree index below `n_max`.
pub fn link_grid(d: usize, n_max: usize) -> Vec<(Link, LinkParams)> {
    let mut out = Vec::new();
    for n in 0..n_max {
        for i in 0..=d {
            for which in [Link::Top, Link::Band] {
                out.push((which, LinkParams { n, i, k: 0 }));
            }
            if i < d {
                out.push((Link::Adjacent, LinkParams { n, i, k: 0 }));
            }
            for k in 0..=d - i {
                out.push((Link::Step, LinkParams { n, i, k }));
            }
        }
        for r in 0..=d + 2 {
            out.push((Link::Power, LinkParams { n, i: 0, k: r }));
        }
        out.push((Link::Kernel, LinkParams { n, i: 0, k: 0 }));
        out.push((Link::RhoM, LinkParams { n, i: 0, k: 0 }));
    }
    out
}

/// Free entries of the bidiagonal split of the component-0 factor L:
/// factor s+1 has ρ_{(d+1)m+s+2} at (m+1, m).
pub fn chain_seeds(s: &SymData) -> Result<Vec<Vec<Rational>>> {
    let d = s.d;
    (0..d)
        .map(|st| (1..d - st).map(|k| s.rho_ext(((d + 1) * (k - 1) + st + 2) as i64)).collect())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainCheck {
    pub chain_exact: bool,
    /// Components whose chain sequence differs (should be empty).
    pub mismatched: Vec<usize>,
    pub factors_match_rho: bool,
}

/// Runs the Darboux chain on component 0 and compares link i with component i.
pub fn chain_check(s: &SymData, n: usize) -> Result<ChainCheck> {
    let d = s.d;
    let c0 = component_coeffs(s, 0, n + 3 * d + 6)?;
    let chain = darboux_chain(&c0, n, &Schedule::Seeds(chain_seeds(s)?))?;
    let comps = Comps::new(s, (d + 1) * (n + 1))?;
    let mismatched = (0..=d).filter(|&i| chain.links[i].seq[..] != comps.comps[i][..=n]).collect();
    let mut factors_match_rho = true;
    for st in 0..d {
        for m in 0..n {
            if chain.factor.lower[st][m] != s.rho_ext(((d + 1) * m + st + 2) as i64)? {
                factors_match_rho = false;
            }
        }
    }
    Ok(ChainCheck { chain_exact: chain.is_exact(), mismatched, factors_match_rho })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HahnOrder {
    pub order: usize,
    /// The order-m derivative sequence satisfies a (d+2)-term recurrence with γ^0 ≠ 0.
    pub dops: bool,
    /// Expansion terms of `P^{[m-1]}_n` beyond `P^{[m]}_{n-d-1}` (all must vanish).
    pub band_violations: usize,
    /// Disagreements of the band coefficients with the closed λ values.
    pub lambda_mismatches: usize,
}

/// `π P'_n = a_n P_{n+1} + b_n P_n + c_n P_{n-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructureRelation {
    pub pi: Poly,
    #[serde(with = "rational::serde_vec2")]
    pub abc: Vec<Vec<Rational>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HahnReport {
    pub d: usize,
    pub orders: Vec<HahnOrder>,
    pub structure: Option<StructureRelation>,
}

impl HahnReport {
    pub fn hahn_positive(&self) -> bool {
        self.orders.iter().all(|o| o.dops && o.band_violations == 0 && o.lambda_mismatches == 0)
    }
}

fn extracted(seq: &[Poly], d: usize) -> Result<Option<RecCoeffs>> {
    Ok(extract_recurrence(seq, d)?.rec().filter(|c| c.check_regular().is_ok()))
}

/// Closed λ_{n,ν} of `P_n = Σ_ν λ_{n,ν} Q_{n-ν}` where Q is the derivative
/// sequence of P, from both recurrences; `None` when an index leaves storage.
fn lambda_closed(p: &RecCoeffs, q: &RecCoeffs, n: usize, off: usize) -> Option<Rational> {
    let d = p.d;
    let nr = rational::int(n as i64);
    match off {
        0 => Some(rational::one()),
        1 => {
            if n == 0 {
                return Some(rational::zero());
            }
            Some(&nr * &(p.beta(n).ok()? - q.beta(n - 1).ok()?))
        }
        _ if off <= d + 1 => {
            let nu = d + 1 - off;
            let a = n as i64 - d as i64 + nu as i64;
            if a + 1 <= 0 {
                return Some(rational::zero());
            }
            let first = rational::int(a) * p.gamma(nu, (a + 1) as usize).ok()?;
            let second = if a <= 0 { rational::zero() } else { &nr * q.gamma(nu, a as usize).ok()? };
            Some(first - second)
        }
        _ => Some(rational::zero()),
    }
}

/// Hahn property through `max_order` derivatives of a d-OPS given as a sequence.
pub fn hahn_check(seq: &[Poly], d: usize, max_order: usize) -> Result<HahnReport> {
    let mut orders = Vec::with_capacity(max_order);
    let mut prev: Vec<Poly> = seq.to_vec();
    let mut prev_rec = extracted(&prev, d)?;
    for m in 1..=max_order {
        let cur = derivative_sequence(&prev, 1);
        if cur.len() < d + 3 {
            return Err(Error::IndexOutOfRange(format!("sequence too short for order {m}")));
        }
        let cur_rec = extracted(&cur, d)?;
        let mut band_violations = 0;
        let mut lambda_mismatches = 0;
        for n in 0..cur.len() {
            let co = expand_in_basis(&prev[n], &cur)?;
            band_violations += co.iter().take((n + 1).saturating_sub(d + 2)).filter(|c| !c.is_zero()).count();
            if let (Some(p), Some(q)) = (&prev_rec, &cur_rec) {
                for off in 0..=n.min(d + 1) {
                    if let Some(l) = lambda_closed(p, q, n, off) {
                        if l != co[n - off] {
                            lambda_mismatches += 1;
                        }
                    }
                }
            }
        }
        orders.push(HahnOrder { order: m, dops: cur_rec.is_some(), band_violations, lambda_mismatches });
        prev = cur;
        prev_rec = cur_rec;
    }
    Ok(HahnReport { d, orders, structure: structure_relation(seq)? })
}

/// Looks for π of degree ≤ 2 (highest degree first) with π P'_n in span(P_{n+1}, P_n, P_{n-1}).
pub fn structure_relation(seq: &[Poly]) -> Result<Option<StructureRelation>> {
    let top = seq.len().saturating_sub(2);
    if top < 2 {
        return Ok(None);
    }
    // column k: expansions of x^k P'_n; rows: coefficients below P_{n-1}
    let mut cols: Vec<Vec<Vec<Rational>>> = Vec::with_capacity(3);
    for k in 0..3 {
        let mut per_n = Vec::with_capacity(top);
        for n in 1..=top {
            let mut f = seq[n].deriv();
            for _ in 0..k {
                f = f.mul_x();
            }
            per_n.push(expand_in_basis(&f, seq)?);
        }
        cols.push(per_n);
    }
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for (idx, n) in (1..=top).enumerate() {
        for v in 0..n.saturating_sub(1) {
            rows.push((0..3).map(|k| cols[k][idx].get(v).cloned().unwrap_or_else(rational::zero)).collect());
        }
    }
    for lead in (0..3).rev() {
        // fix π's x^lead coefficient to 1 and drop higher ones
        let a: Vec<Vec<Rational>> = rows.iter().map(|r| r[..lead].to_vec()).collect();
        let b: Vec<Rational> = rows.iter().map(|r| -r[lead].clone()).collect();
        let sol = if lead == 0 {
            b.iter().all(Zero::is_zero).then(Vec::new)
        } else {
            solve_consistent(&a, &b)
        };
        if let Some(mut pi) = sol {
            pi.push(rational::one());
            let pi = Poly::new(pi);
            let abc = (1..=top)
                .map(|n| {
                    let co = expand_in_basis(&(&pi * &seq[n].deriv()), seq)?;
                    Ok([n + 1, n, n - 1].iter().map(|&v| co.get(v).cloned().unwrap_or_else(rational::zero)).collect())
                })
                .collect::<Result<Vec<Vec<Rational>>>>()?;
            return Ok(Some(StructureRelation { pi, abc }));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PearsonReport {
    /// `a[r]` and `b[r]` per line r = 0..d-1; empty entries mean no consistent fit.
    #[serde(with = "rational::serde_vec_opt")]
    pub a: Vec<Option<Rational>>,
    #[serde(with = "rational::serde_vec_opt")]
    pub b: Vec<Option<Rational>>,
    pub consistent: bool,
    pub normalized: bool,
}

/// Fits `w̃_r = b w_r + a x w_{r+1}` (r < d-1) and `w̃_{d-1} = a x² w_0 + b w_{d-1}`
/// on moments up to order N.
pub fn pearson_dsym_check(s: &SymData, nmom: usize) -> Result<PearsonReport> {
    let d = s.d;
    let seq = dsym_generate(s, nmom + 4)?;
    let w = moments_of(&seq, d, nmom + 2)?;
    let der = derivative_sequence(&seq, 1);
    let wt = moments_of(&der, d, nmom)?;
    let mut a = Vec::with_capacity(d);
    let mut b = Vec::with_capacity(d);
    for r in 0..d {
        let (other, shift) = if r + 1 < d { (r + 1, 1) } else { (0, 2) };
        let rows: Vec<Vec<Rational>> =
            (0..=nmom).map(|k| vec![w.get(other, k + shift).clone(), w.get(r, k).clone()]).collect();
        let rhs: Vec<Rational> = (0..=nmom).map(|k| wt.get(r, k).clone()).collect();
        match solve_consistent(&rows, &rhs) {
            Some(v) => {
                a.push(Some(v[0].clone()));
                b.push(Some(v[1].clone()));
            }
            None => {
                a.push(None);
                b.push(None);
            }
        }
    }
    let consistent = a.iter().all(Option::is_some);
    let normalized = consistent && a.iter().zip(&b).all(|(x, y)| x.as_ref().unwrap() + y.as_ref().unwrap() == rational::one());
    Ok(PearsonReport { a, b, consistent, normalized })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, q};

    fn ones(d: usize, len: usize) -> SymData {
        SymData::constant(d, &int(1), len)
    }

    #[test]
    fn generate_and_decompose() {
        let s = ones(2, 40);
        let b = dsym_generate(&s, 40).unwrap();
        for n in 0..=2 {
            assert_eq!(b[n], Poly::monomial(int(1), n));
        }
        assert_eq!(b[3], Poly::from_ints(&[-1, 0, 0, 1]));
        assert_eq!(b[6], Poly::from_ints(&[1, 0, 0, -4, 0, 0, 1]));
        let c = decompose(&b, 2).unwrap();
        assert_eq!(c[0][1], Poly::from_ints(&[-1, 1]));
        assert_eq!(c[1][1], Poly::from_ints(&[-2, 1]));
        assert_eq!(c[2][1], Poly::from_ints(&[-3, 1]));
        assert_eq!(c[0][2], Poly::from_ints(&[1, -4, 1]));
        assert_eq!(recompose(&c), b.to_vec());
        let d1 = dsym_generate(&ones(1, 5), 2).unwrap();
        assert_eq!(d1[2], Poly::from_ints(&[-1, 0, 1]));
        let mut bad = b.to_vec();
        bad[4] = &bad[4] + &Poly::x().mul_x();
        match decompose(&bad, 2) {
            Err(Error::NotDSymmetric(msg)) => assert!(msg.contains("x^2"), "{msg}"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(dsym_generate(&ones(2, 2), 10), Err(Error::MissingRho(3))));
    }

    #[test]
    fn component_coefficients_two_ways() {
        for d in 1..=3 {
            let s = SymData::new(d, (1..80).map(|n| q(n * n % 7 + 1, (n % 3 + 1) as i64)).collect()).unwrap();
            for i in 0..=d {
                let chk = component_check(&s, i, 12).unwrap();
                assert!(chk.agree, "d={d} i={i}\n{:?}\n{:?}", chk.sum, chk.fit);
                assert!(chk.gamma0_product_agrees, "d={d} i={i}");
            }
        }
    }

    #[test]
    fn worked_example() {
        for rho in [int(1), q(3, 2)] {
            let d = 2;
            let s = SymData::constant(d, &rho, 60);
            for i in 0..=d {
                let c = component_coeffs(&s, i, 6).unwrap();
                assert_eq!(c.beta[0], int(i as i64 + 1) * &rho);
                let expect = int(i as i64 + 1) * (int(d as i64) - q(i as i64, 2)) * &rho * &rho;
                assert_eq!(c.gamma[d - 1][0], expect);
                let c0 = component_coeffs(&s, 0, 6).unwrap();
                for n in 1..5 {
                    assert_eq!(c.beta[n], c0.beta[n]);
                    for k in 0..d {
                        assert_eq!(c.gamma[k][n], c0.gamma[k][n]);
                    }
                }
            }
        }
        let c0 = component_coeffs(&ones(2, 30), 0, 4).unwrap();
        assert_eq!(c0.beta[1], int(3));
        assert_eq!(c0.gamma[1][0], int(2));
    }

    #[test]
    fn links_vanish() {
        for d in 1..=3 {
            let s = SymData::new(d, (1..120).map(|n| q(2 * n + 1, n % 4 + 1)).collect()).unwrap();
            for n in 0..5 {
                for i in 0..=d {
                    for which in [Link::Top, Link::Band] {
                        let r = verify_links(&s, which, LinkParams { n, i, k: 0 }).unwrap();
                        assert!(r.is_zero(), "{which:?} d={d} n={n} i={i}: {}", r.residual);
                    }
                    if i < d {
                        assert!(verify_links(&s, Link::Adjacent, LinkParams { n, i, k: 0 }).unwrap().is_zero());
                    }
                    for k in 0..=d - i {
                        let r = verify_links(&s, Link::Step, LinkParams { n, i, k }).unwrap();
                        assert!(r.is_zero(), "step d={d} n={n} i={i} k={k}: {}", r.residual);
                    }
                }
                for r in 0..=d + 2 {
                    let res = verify_links(&s, Link::Power, LinkParams { n, i: 0, k: r }).unwrap();
                    assert!(res.is_zero(), "power d={d} n={n} r={r}: {}", res.residual);
                }
                assert!(verify_links(&s, Link::Kernel, LinkParams { n, i: 0, k: 0 }).unwrap().is_zero());
                assert!(verify_links(&s, Link::RhoM, LinkParams { n, i: 0, k: 0 }).unwrap().is_zero());
            }
        }
        let s = ones(2, 30);
        let r = verify_links(&s, Link::Kernel, LinkParams { n: 1, i: 0, k: 0 }).unwrap();
        assert_eq!(r.lhs, Poly::from_ints(&[0, -3, 1]));
    }

    #[test]
    fn chain_reproduces_components() {
        for d in 1..=3 {
            let s = SymData::new(d, (1..200).map(|n| q(n % 5 + 1, 2)).collect()).unwrap();
            let chk = chain_check(&s, 8).unwrap();
            assert!(chk.chain_exact && chk.mismatched.is_empty() && chk.factors_match_rho, "d={d} {chk:?}");
        }
    }

    #[test]
    fn hahn_constant_rho() {
        for d in 2..=3 {
            let s = ones(d, 80);
            let b = dsym_generate(&s, 24).unwrap();
            let rep = hahn_check(&b, d, 3).unwrap();
            assert!(rep.hahn_positive(), "d={d} {:?}", rep.orders);
            let comps = decompose(&b, d).unwrap();
            let s2 = ones(d, 200);
            let long = dsym_generate(&s2, (d + 1) * 14).unwrap();
            let comps_long = decompose(&long, d).unwrap();
            for i in 0..=d {
                let rep = hahn_check(&comps_long[i], d, 3).unwrap();
                assert!(rep.hahn_positive(), "d={d} i={i} {:?}", rep.orders);
            }
            assert!(!comps.is_empty());
        }
    }

    #[test]
    fn hahn_appell_and_negative() {
        // d-Hermite type: ρ_n = (n)_d falling products make P'_n = n P_{n-1}
        for d in 1..=2 {
            let rho = (1..60).map(|n| (0..d as i64).map(|j| int(n + j)).product::<Rational>() / int(d as i64 + 1)).collect();
            let b = dsym_generate(&SymData::new(d, rho).unwrap(), 16).unwrap();
            for n in 1..16 {
                assert_eq!(b[n].deriv(), b[n - 1].scale(&int(n as i64)), "d={d} n={n}");
            }
            let rep = hahn_check(&b, d, 2).unwrap();
            assert!(rep.hahn_positive());
            let st = rep.structure.unwrap();
            assert_eq!(st.pi, Poly::one());
            assert!(st.abc.iter().all(|r| r[0].is_zero() && r[1].is_zero()));
        }
        let s = SymData::new(2, (1..60).map(|n| q(n * n % 5 + 1, 1)).collect()).unwrap();
        let rep = hahn_check(&dsym_generate(&s, 20).unwrap(), 2, 1).unwrap();
        assert!(!rep.hahn_positive());
    }

    #[test]
    fn pearson_fit() {
        for d in 1..=2 {
            let rep = pearson_dsym_check(&ones(d, 60), 12).unwrap();
            assert!(rep.consistent, "d={d} {rep:?}");
            assert!(rep.normalized, "d={d} {rep:?}");
        }
    }
}
