//! Zeros of P_n as eigenvalues of the leading Jacobi block, total
//! nonnegativity and oscillation tests, interlacing, and exact multiplicity
//! and real-root counts.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::darboux::JacobiView;
use crate::error::{Error, Result};
use crate::linalg::{det_q, QMatrix};
use crate::poly::Poly;
use crate::rational::{self, Rational};
use crate::seq::{generate, RecCoeffs};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// |Im| allowed relative to the spectral radius.
    pub real: f64,
    /// Minimal gap relative to the spread of the roots.
    pub gap: f64,
    /// Newton target for |P(x)| relative to Σ|a_k||x|^k.
    pub newton: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { real: 1e-9, gap: 1e-8, newton: 1e-12 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Root {
    pub re: f64,
    pub im: f64,
    pub refined: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroSet {
    /// Sorted by real part.
    pub roots: Vec<Root>,
    pub spectral_radius: f64,
    pub tol: Tolerances,
}

impl ZeroSet {
    /// Real roots given directly, marked refined.
    pub fn from_real(mut v: Vec<f64>, tol: Tolerances) -> Self {
        v.sort_by(f64::total_cmp);
        let spectral_radius = v.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
        ZeroSet { roots: v.into_iter().map(|re| Root { re, im: 0.0, refined: true }).collect(), spectral_radius, tol }
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn max_imag(&self) -> f64 {
        self.roots.iter().fold(0.0, |a, r| a.max(r.im.abs()))
    }

    pub fn is_real(&self) -> bool {
        self.max_imag() <= self.tol.real * self.spectral_radius.max(1.0)
    }

    pub fn reals(&self) -> Result<Vec<f64>> {
        if !self.is_real() {
            return Err(Error::NonRealRoots(self.max_imag()));
        }
        Ok(self.roots.iter().map(|r| r.re).collect())
    }

    /// Smallest gap between consecutive real parts.
    pub fn min_gap(&self) -> f64 {
        self.roots.windows(2).map(|w| w[1].re - w[0].re).fold(f64::INFINITY, f64::min)
    }

    fn spread(&self) -> f64 {
        match (self.roots.first(), self.roots.last()) {
            (Some(a), Some(b)) if b.re > a.re => b.re - a.re,
            _ => 1.0,
        }
    }

    /// Real, pairwise separated by more than `gap · spread`.
    pub fn is_simple(&self) -> bool {
        self.is_real() && self.min_gap() > self.tol.gap * self.spread()
    }

    pub fn all_positive(&self) -> bool {
        self.roots.iter().all(|r| r.re > 0.0)
    }
}

pub fn dense_f64(m: &QMatrix) -> DMatrix<f64> {
    let n = m.len();
    DMatrix::from_fn(n, n, |i, j| rational::to_f64(&m[i][j]))
}

/// Diagonal similarity scaling by powers of two until row and column norms settle.
fn balance(a: &mut DMatrix<f64>) {
    let n = a.nrows();
    let radix = 2.0_f64;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let (mut c2, r2) = (c, r);
            while c2 < r2 / radix {
                c2 *= radix;
                f *= radix;
            }
            while c2 >= r2 * radix {
                c2 /= radix;
                f /= radix;
            }
            if (c * f + r / f) < 0.95 * s {
                done = false;
                for j in 0..n {
                    a[(i, j)] /= f;
                    a[(j, i)] *= f;
                }
            }
        }
    }
}

/// Eigenvalues by balancing and real Schur (Hessenberg QR), at most `100 n` sweeps.
pub fn eigenvalues(m: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    let n = m.nrows();
    let mut a = m.clone();
    balance(&mut a);
    let schur = nalgebra::linalg::Schur::try_new(a, f64::EPSILON, 100 * n.max(1)).ok_or(Error::QRNoConvergence(n))?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

fn scale_at(p: &Poly, x: f64) -> f64 {
    let ax = x.abs();
    p.coeffs().iter().rev().fold(0.0, |acc, c| acc * ax + rational::to_f64(c).abs())
}

/// Newton on a real root with exact residuals.
fn refine_real(p: &Poly, dp: &Poly, x0: f64, tol: f64) -> (f64, bool) {
    let resid = |x: f64| -> f64 {
        let v = rational::to_f64(&p.eval(&rational::from_f64(x))).abs();
        v / scale_at(p, x).max(f64::MIN_POSITIVE)
    };
    let mut x = x0;
    let mut best = resid(x);
    for _ in 0..8 {
        if best < tol {
            break;
        }
        let xr = rational::from_f64(x);
        let d = dp.eval(&xr);
        if d.is_zero() {
            break;
        }
        let step = rational::to_f64(&(p.eval(&xr) / d));
        let cand = x - step;
        if !cand.is_finite() {
            break;
        }
        let r = resid(cand);
        if r >= best {
            break;
        }
        x = cand;
        best = r;
    }
    (x, best < tol)
}

fn refine_complex(p: &Poly, z0: Complex64, tol: f64) -> (Complex64, bool) {
    let co: Vec<f64> = p.coeffs().iter().map(rational::to_f64).collect();
    let eval = |z: Complex64| -> (Complex64, Complex64) {
        let mut v = Complex64::new(0.0, 0.0);
        let mut dv = Complex64::new(0.0, 0.0);
        for c in co.iter().rev() {
            dv = dv * z + v;
            v = v * z + c;
        }
        (v, dv)
    };
    let scale = |z: Complex64| co.iter().rev().fold(0.0, |acc, c| acc * z.norm() + c.abs()).max(f64::MIN_POSITIVE);
    let mut z = z0;
    let mut best = eval(z).0.norm() / scale(z);
    for _ in 0..8 {
        if best < tol {
            break;
        }
        let (v, dv) = eval(z);
        if dv.norm() == 0.0 {
            break;
        }
        let cand = z - v / dv;
        let r = eval(cand).0.norm() / scale(cand);
        if !(r < best) {
            break;
        }
        z = cand;
        best = r;
    }
    (z, best < tol)
}

/// Eigenvalues of a matrix whose characteristic polynomial is `p`, refined against `p`.
pub fn zeros_from_matrix(m: &QMatrix, p: &Poly, tol: Tolerances) -> Result<ZeroSet> {
    if m.is_empty() {
        return Ok(ZeroSet { roots: Vec::new(), spectral_radius: 0.0, tol });
    }
    let ev = eigenvalues(&dense_f64(m))?;
    let radius = ev.iter().fold(0.0_f64, |a, z| a.max(z.norm()));
    let dp = p.deriv();
    let mut roots: Vec<Root> = ev
        .into_iter()
        .map(|z| {
            if z.im.abs() <= tol.real * radius.max(1.0) {
                let (x, ok) = refine_real(p, &dp, z.re, tol.newton);
                Root { re: x, im: z.im, refined: ok }
            } else {
                let (w, ok) = refine_complex(p, z, tol.newton);
                Root { re: w.re, im: w.im, refined: ok }
            }
        })
        .collect();
    roots.sort_by(|a, b| a.re.total_cmp(&b.re));
    Ok(ZeroSet { roots, spectral_radius: radius, tol })
}

pub fn zeros_of(c: &RecCoeffs, n: usize, tol: Tolerances) -> Result<ZeroSet> {
    if n == 0 {
        return Err(Error::IndexOutOfRange("P_0 has no zeros".into()));
    }
    let m = JacobiView::new(c.clone()).leading(n)?;
    let p = generate(c, n)?;
    zeros_from_matrix(&m, &p[n], tol)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TnMode {
    /// Every minor, exactly; square matrices up to 8×8.
    Oracle,
    /// Neville elimination of A and Aᵀ without row exchanges.
    Constructive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TnCertificate {
    pub tn: bool,
    pub mode: TnMode,
    /// The failing minor (rows, columns) or elimination step, when not TN.
    pub witness: Option<String>,
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v);
            go(v + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn oracle(m: &QMatrix) -> TnCertificate {
    let n = m.len();
    for k in 1..=n {
        let sets = subsets(n, k);
        for rows in &sets {
            for cols in &sets {
                let sub: QMatrix = rows.iter().map(|&i| cols.iter().map(|&j| m[i][j].clone()).collect()).collect();
                if det_q(&sub).is_negative() {
                    return TnCertificate {
                        tn: false,
                        mode: TnMode::Oracle,
                        witness: Some(format!("minor rows {rows:?} cols {cols:?} is negative")),
                    };
                }
            }
        }
    }
    TnCertificate { tn: true, mode: TnMode::Oracle, witness: None }
}

/// Neville elimination: returns the first failure, if any.
fn neville(m: &QMatrix) -> Option<String> {
    let n = m.len();
    let mut a = m.clone();
    for k in 0..n {
        for i in (k + 1..n).rev() {
            let piv = a[i - 1][k].clone();
            let v = a[i][k].clone();
            if v.is_zero() {
                continue;
            }
            if piv.is_zero() {
                return Some(format!("row exchange needed at step {k}, row {i}"));
            }
            let mult = &v / &piv;
            if mult.is_negative() {
                return Some(format!("negative multiplier at step {k}, row {i}"));
            }
            for j in k..n {
                let t = &mult * &a[i - 1][j];
                a[i][j] -= t;
            }
        }
    }
    (0..n).find(|&i| !a[i][i].is_positive()).map(|i| format!("diagonal pivot {i} is not positive"))
}

pub fn tn_check(m: &QMatrix, mode: TnMode) -> Result<TnCertificate> {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) {
        return Err(Error::BadParameter("tn_check needs a square matrix".into()));
    }
    match mode {
        TnMode::Oracle => {
            if n > 8 {
                return Err(Error::BadParameter(format!("oracle mode is limited to 8×8, got {n}×{n}")));
            }
            Ok(oracle(m))
        }
        TnMode::Constructive => {
            let t: QMatrix = (0..n).map(|i| (0..n).map(|j| m[j][i].clone()).collect()).collect();
            let witness = neville(m).or_else(|| neville(&t).map(|w| format!("transpose: {w}")));
            Ok(TnCertificate { tn: witness.is_none(), mode, witness })
        }
    }
}

/// TN, nonsingular, with positive first sub- and superdiagonals.
pub fn oscillation_check(m: &QMatrix) -> Result<bool> {
    let n = m.len();
    for i in 0..n.saturating_sub(1) {
        if !m[i][i + 1].is_positive() || !m[i + 1][i].is_positive() {
            return Ok(false);
        }
    }
    if det_q(m).is_zero() {
        return Ok(false);
    }
    Ok(tn_check(m, TnMode::Constructive)?.tn)
}

/// Strict alternation of two real spectra whose sizes differ by one.
pub fn interlacing_check(a: &ZeroSet, b: &ZeroSet) -> Result<bool> {
    for z in [a, b] {
        if !z.is_real() {
            return Err(Error::NonRealRoots(z.max_imag()));
        }
    }
    let (long, short) = if a.len() > b.len() { (a, b) } else { (b, a) };
    if long.len() != short.len() + 1 {
        return Ok(false);
    }
    let mut merged: Vec<f64> = Vec::with_capacity(long.len() + short.len());
    for i in 0..long.len() {
        merged.push(long.roots[i].re);
        if i < short.len() {
            merged.push(short.roots[i].re);
        }
    }
    let lo = merged.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = merged.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let spread = if hi > lo { hi - lo } else { 1.0 };
    let gap = a.tol.gap.max(b.tol.gap) * spread;
    Ok(merged.windows(2).all(|w| w[1] - w[0] > gap))
}

/// Exact strict interlacing of `q` (degree n-1) with `p` (degree n): the Cauchy
/// index of q/p over the real line is ±n. Settles pairs of roots closer than the
/// floating-point gap tolerance.
pub fn interlacing_exact(p: &Poly, q: &Poly) -> bool {
    let (Some(n), Some(m)) = (p.degree(), q.degree()) else {
        return false;
    };
    if n != m + 1 {
        return false;
    }
    let chain = remainder_chain(p, q);
    let index = variations(&chain, false) as i64 - variations(&chain, true) as i64;
    index.unsigned_abs() as usize == n
}

/// Signed remainder sequence a, b, -rem(a, b), … up to the last nonzero term.
fn remainder_chain(a: &Poly, b: &Poly) -> Vec<Poly> {
    let mut chain = vec![a.clone(), b.clone()];
    loop {
        let n = chain.len();
        let r = chain[n - 2].div_rem(&chain[n - 1]).1;
        if r.is_zero() {
            return chain;
        }
        chain.push(-r);
    }
}

/// Sign changes of the chain at +∞ or -∞.
fn variations(chain: &[Poly], at_plus: bool) -> usize {
    let signs: Vec<bool> = chain
        .iter()
        .map(|q| {
            let pos = q.lead().is_positive();
            let odd = q.degree().unwrap_or(0) % 2 == 1;
            if at_plus || !odd {
                pos
            } else {
                !pos
            }
        })
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Square-free factors by multiplicity: `out[i]` collects the roots of multiplicity i+1.
pub fn squarefree_factors(p: &Poly) -> Vec<Poly> {
    let mut out = Vec::new();
    if p.degree().unwrap_or(0) == 0 {
        return out;
    }
    let dp = p.deriv();
    let a0 = Poly::gcd(p, &dp);
    let mut b = p.div_rem(&a0).0;
    let mut c = dp.div_rem(&a0).0;
    let mut d = &c - &b.deriv();
    while b.degree().unwrap_or(0) > 0 {
        let a = Poly::gcd(&b, &d);
        let nb = b.div_rem(&a).0;
        c = d.div_rem(&a).0;
        b = nb;
        d = &c - &b.deriv();
        out.push(a);
    }
    out
}

/// Number of distinct real roots of a square-free polynomial by Sturm's theorem.
pub fn sturm_count(p: &Poly) -> usize {
    if p.degree().unwrap_or(0) == 0 {
        return 0;
    }
    let chain = remainder_chain(p, &p.deriv());
    variations(&chain, false) - variations(&chain, true)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZeroStructure {
    pub n: usize,
    pub max_multiplicity: usize,
    pub multiplicity_within_d: bool,
    /// Degree of gcd(P_n, …, P_{n+d}); 0 means no common zero.
    pub common_gcd_degree: usize,
    pub distinct_real: usize,
    /// Distinct real roots of odd multiplicity (sign changes), the nodal proxy.
    pub nodal: usize,
    /// For n = dk+q with 1 ≤ q ≤ d and γ^0 > 0: nodal ≥ k+1. `None` when not applicable.
    pub nodal_bound: Option<bool>,
}

pub fn zero_structure(c: &RecCoeffs, n: usize) -> Result<ZeroStructure> {
    let d = c.d;
    let p = generate(c, n + d)?;
    let pn = &p[n];
    let factors = squarefree_factors(pn);
    let max_multiplicity = factors.iter().rposition(|f| f.degree().unwrap_or(0) > 0).map_or(0, |i| i + 1);
    let g = p[n..=n + d].iter().fold(Poly::zero(), |acc, q| Poly::gcd(&acc, q));
    let common_gcd_degree = g.degree().unwrap_or(0);
    let square_free = factors.iter().fold(Poly::one(), |acc, f| &acc * f);
    let odd = factors.iter().step_by(2).fold(Poly::one(), |acc, f| &acc * f);
    let distinct_real = sturm_count(&square_free);
    let nodal = sturm_count(&odd);
    let nodal_bound = if n >= 1 && c.gamma[0].iter().take(n).all(|v| v.is_positive()) {
        let k = (n - 1) / d;
        Some(nodal > k)
    } else {
        None
    };
    Ok(ZeroStructure {
        n,
        max_multiplicity,
        multiplicity_within_d: max_multiplicity <= d,
        common_gcd_degree,
        distinct_real,
        nodal,
        nodal_bound,
    })
}

/// Random recurrence whose Jacobi matrix is a product of bidiagonal factors with
/// positive entries, so every leading block is an oscillation matrix.
pub fn oscillation_instance<R: rand::Rng + ?Sized>(d: usize, len: usize, rng: &mut R) -> Result<RecCoeffs> {
    let size = len + 1;
    let mut pos = || rational::random(rng, true, true);
    let lower: Vec<Vec<Rational>> = (0..d).map(|_| (0..size).map(|_| pos()).collect()).collect();
    let diag: Vec<Rational> = (0..size).map(|_| pos()).collect();
    crate::darboux::from_bidiagonal(&lower, &diag)
}

/// Real eigenvalues (within tolerance) counted against the exact Sturm count.
pub fn eigen_matches_sturm(z: &ZeroSet, c: &RecCoeffs, n: usize) -> Result<bool> {
    let st = zero_structure(c, n)?;
    let tol = z.tol.real * z.spectral_radius.max(1.0);
    let real = z.roots.iter().filter(|r| r.im.abs() <= tol).count();
    Ok(st.max_multiplicity > 1 || real == st.distinct_real)
}
