//! LU and UL factorization of the monic Jacobi matrix, kernel polynomials,
//! the Darboux chain and the bidiagonal factorization of L.
//!
//! Everything here is 0-based: `L[j+s][j]` is `lower.sub[s-1][j]`,
//! `U[j][j] = m[j]` and `U[j][j+1] = 1`. In 1-based terms `m[j]` is
//! m_{j+1} = -P_{j+1}(0)/P_j(0).

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{matmul, solve_q, QMatrix};
use crate::poly::Poly;
use crate::rational::{self, Rational};
use crate::seq::{expand_in_basis, generate, PolySeq, RecCoeffs};

/// The (d+2)-banded monic Jacobi matrix of a descriptor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JacobiView {
    pub coeffs: RecCoeffs,
}

impl JacobiView {
    pub fn new(coeffs: RecCoeffs) -> Self {
        JacobiView { coeffs }
    }

    pub fn d(&self) -> usize {
        self.coeffs.d
    }

    /// Entry (i, j), zero outside the band.
    pub fn entry(&self, i: usize, j: usize) -> Result<Rational> {
        let d = self.coeffs.d;
        if j == i + 1 {
            Ok(rational::one())
        } else if i == j {
            self.coeffs.beta(i).cloned()
        } else if i > j && i - j <= d {
            self.coeffs.gamma(d - (i - j), j + 1).cloned()
        } else {
            Ok(rational::zero())
        }
    }

    /// Leading n×n block.
    pub fn leading(&self, n: usize) -> Result<QMatrix> {
        (0..n).map(|i| (0..n).map(|j| self.entry(i, j)).collect()).collect()
    }

    /// Reads the bands of a dense matrix whose rows below `valid` are exact.
    pub fn from_matrix(d: usize, m: &QMatrix, valid: usize) -> Result<JacobiView> {
        for i in 0..valid {
            for j in 0..valid {
                let v = &m[i][j];
                let ok = if j == i + 1 {
                    v.is_one()
                } else {
                    j <= i + 1 && i <= j + d || v.is_zero()
                };
                if !ok {
                    return Err(Error::FactorizationFailed(format!("entry ({i}, {j}) breaks the band shape")));
                }
            }
        }
        let len = valid.saturating_sub(d);
        let beta = (0..len).map(|j| m[j][j].clone()).collect();
        let gamma = (0..d)
            .map(|nu| (0..len).map(|j| m[j + d - nu][j].clone()).collect())
            .collect();
        Ok(JacobiView { coeffs: RecCoeffs::new(d, beta, gamma)? })
    }
}

/// Unit lower triangular matrix with `sub.len()` subdiagonals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LowerBand {
    #[serde(with = "rational::serde_vec2")]
    pub sub: Vec<Vec<Rational>>,
}

impl LowerBand {
    pub fn width(&self) -> usize {
        self.sub.len()
    }

    pub fn get(&self, i: usize, j: usize) -> Rational {
        if i == j {
            return rational::one();
        }
        if j > i || i - j > self.sub.len() {
            return rational::zero();
        }
        self.sub[i - j - 1].get(j).cloned().unwrap_or_else(rational::zero)
    }

    /// Number of rows fully stored.
    pub fn rows(&self) -> usize {
        self.sub.iter().enumerate().map(|(s, v)| v.len() + s + 1).min().unwrap_or(usize::MAX)
    }

    pub fn dense(&self, n: usize) -> QMatrix {
        (0..n).map(|i| (0..n).map(|j| self.get(i, j)).collect()).collect()
    }
}

fn upper_dense(m: &[Rational], n: usize) -> QMatrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if j == i {
                        m[i].clone()
                    } else if j == i + 1 {
                        rational::one()
                    } else {
                        rational::zero()
                    }
                })
                .collect()
        })
        .collect()
}

/// `J = L U` or `J = U L` with the same storage.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Factors {
    #[serde(with = "rational::serde_vec")]
    pub m: Vec<Rational>,
    pub lower: LowerBand,
}

impl Factors {
    pub fn upper(&self, n: usize) -> QMatrix {
        upper_dense(&self.m, n)
    }

    pub fn lu_product(&self, n: usize) -> QMatrix {
        matmul(&self.lower.dense(n), &self.upper(n))
    }

    pub fn ul_product(&self, n: usize) -> QMatrix {
        let k = n + 1;
        let mut p = matmul(&self.upper(k), &self.lower.dense(k));
        p.truncate(n);
        p.iter_mut().for_each(|r| r.truncate(n));
        p
    }
}

/// Count of entries where two leading blocks differ.
pub fn mismatches(a: &QMatrix, b: &QMatrix) -> usize {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y).filter(|(u, v)| u != v).count()).sum()
}

/// LU factorization of the first `n` columns (needs β and γ through index n).
pub fn lu(c: &RecCoeffs, n: usize) -> Result<Factors> {
    let d = c.d;
    let mut m: Vec<Rational> = Vec::with_capacity(n);
    let mut sub: Vec<Vec<Rational>> = vec![Vec::with_capacity(n); d];
    for j in 0..n {
        let left = if j >= 1 { sub[0][j - 1].clone() } else { rational::zero() };
        let mj = c.beta(j)? - left;
        if mj.is_zero() {
            return Err(Error::ZeroAtOrigin(j + 1));
        }
        for s in 1..=d {
            let left = if j >= 1 && s < d { sub[s][j - 1].clone() } else { rational::zero() };
            sub[s - 1].push((c.gamma(d - s, j + 1)? - left) / &mj);
        }
        m.push(mj);
    }
    Ok(Factors { m, lower: LowerBand { sub } })
}

/// UL factorization. `free` holds m_1..m_d; when absent the first d values of
/// [`lu`] are used, so that feeding the kernel descriptor with the same values
/// returns the original factors.
pub fn ul(c: &RecCoeffs, free: Option<&[Rational]>, n: usize) -> Result<Factors> {
    let d = c.d;
    let free: Vec<Rational> = match free {
        Some(f) if f.len() == d => f.to_vec(),
        Some(f) => return Err(Error::BadParameter(format!("ul needs {d} free values, got {}", f.len()))),
        None => lu(c, d)?.m,
    };
    // L[i][k] for i ≤ current row; dense rows are simplest here.
    let mut lrows: Vec<Vec<Rational>> = vec![vec![rational::one()]];
    let mut m: Vec<Rational> = Vec::with_capacity(n);
    for i in 0..n {
        let mi = if i < d {
            free[i].clone()
        } else {
            let piv = lrows[i][i - d].clone();
            if piv.is_zero() {
                return Err(Error::Breakdown(i + 1));
            }
            c.gamma(0, i + 1 - d)? / piv
        };
        let mut row = vec![rational::zero(); i + 2];
        row[i + 1] = rational::one();
        row[i] = c.beta(i)? - &mi;
        for s in 1..d {
            if i >= s {
                let k = i - s;
                row[k] = c.gamma(d - s, k + 1)? - &mi * &lrows[i][k];
            }
        }
        m.push(mi);
        lrows.push(row);
    }
    let sub = (1..=d)
        .map(|s| (0..=n.saturating_sub(s)).map(|j| lrows.get(j + s).map_or_else(rational::zero, |r| r[j].clone())).collect())
        .collect();
    Ok(Factors { m, lower: LowerBand { sub } })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FactorCheck {
    /// Entries of the leading block where the product differs from J.
    pub mismatches: usize,
    /// Every `m_n` equals `-P_n(0)/P_{n-1}(0)` (LU only).
    pub origin_ratio: bool,
}

impl FactorCheck {
    pub fn is_exact(&self) -> bool {
        self.mismatches == 0 && self.origin_ratio
    }
}

pub fn check_lu(c: &RecCoeffs, f: &Factors, n: usize) -> Result<FactorCheck> {
    let j = JacobiView::new(c.clone()).leading(n)?;
    let mismatches = mismatches(&f.lu_product(n), &j);
    let p = generate(c, n)?;
    let origin_ratio = (1..=n).all(|k| {
        let prev = p[k - 1].coeff(0);
        !prev.is_zero() && f.m[k - 1] == -(p[k].coeff(0) / prev)
    });
    Ok(FactorCheck { mismatches, origin_ratio })
}

pub fn check_ul(c: &RecCoeffs, f: &Factors, n: usize) -> Result<FactorCheck> {
    // The last row of the block needs row n of L, so compare n-1 rows.
    let k = n.saturating_sub(1);
    let j = JacobiView::new(c.clone()).leading(k)?;
    Ok(FactorCheck { mismatches: mismatches(&f.ul_product(k), &j), origin_ratio: true })
}

/// The co-recursive values behind the first d rows of a UL factorization:
/// with `α_{j-1} = β_{j-1} - m_j` and `γ^{d-j+i}_i - m_j l_{j-1,i}` in place of
/// the original entries, every `L[n][n-t]` with 1 ≤ t ≤ n ≤ d satisfies
/// `-L[n][n-t] = Σ_{u=0}^{t-1} L[n][n-u] Q^{(n-t)}_{t-u}(0)`.
/// Returns the number of failing entries.
pub fn ul_corecursive_mismatches(c: &RecCoeffs, f: &Factors) -> Result<usize> {
    let d = c.d;
    let mut q = c.clone();
    for j in 1..=d {
        q.beta[j - 1] = c.beta(j - 1)? - &f.m[j - 1];
        for i in 1..j {
            let nu = d - j + i;
            q.gamma[nu][i - 1] = c.gamma(nu, i)? - &f.m[j - 1] * f.lower.get(j - 1, i - 1);
        }
    }
    let l = |a: usize, b: usize| f.lower.get(a, b);
    let mut bad = 0;
    for n in 1..=d {
        for t in 1..=n {
            let assoc = generate(&crate::seq::associated(&q, n - t)?, t)?;
            let mut s = rational::zero();
            for u in 0..t {
                s += l(n, n - u) * assoc[t - u].coeff(0);
            }
            if s != -l(n, n - t) {
                bad += 1;
            }
        }
    }
    Ok(bad)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Kernel {
    pub k: PolySeq,
    pub coeffs: RecCoeffs,
    pub factors: Factors,
    /// `P_n - Σ_k L[n][k] K_k`.
    pub expansion_residuals: Vec<Poly>,
    /// `x K_n - P_{n+1} - m_{n+1} P_n`.
    pub shift_residuals: Vec<Poly>,
}

impl Kernel {
    pub fn is_exact(&self) -> bool {
        self.expansion_residuals.iter().chain(&self.shift_residuals).all(Poly::is_zero)
    }
}

/// Descriptor of `U L` read from LU factors; stores `len` indices.
pub fn ul_coeffs(d: usize, f: &Factors, len: usize) -> Result<RecCoeffs> {
    let size = len + d + 2;
    if f.m.len() < size + 1 || f.lower.rows() < size + 1 {
        return Err(Error::MissingCoefficient { name: "factor".into(), index: size as i64 });
    }
    let prod = f.ul_product(size);
    Ok(JacobiView::from_matrix(d, &prod, len + d)?.coeffs)
}

/// Kernel polynomials K_0..K_n from `J' = U L`.
pub fn kernel(c: &RecCoeffs, n: usize) -> Result<Kernel> {
    let d = c.d;
    let factors = lu(c, n + 2 * d + 3)?;
    let coeffs = ul_coeffs(d, &factors, n + 1)?;
    let k = generate(&coeffs, n)?;
    let p = generate(c, n + 1)?;
    let expansion_residuals = (0..=n)
        .map(|i| {
            let mut r = p[i].clone();
            for j in i.saturating_sub(d)..=i {
                r -= k[j].scale(&factors.lower.get(i, j));
            }
            r
        })
        .collect();
    let shift_residuals = (0..=n).map(|i| &(&k[i].mul_x() - &p[i + 1]) - &p[i].scale(&factors.m[i])).collect();
    Ok(Kernel { k, coeffs, factors, expansion_residuals, shift_residuals })
}

/// How the free entries of a bidiagonal factorization are chosen.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Schedule {
    /// `t_kk = l_kk / 2` in every free row; every entry must come out positive.
    MinimalSlack,
    /// Explicit free entries: `seeds[s]` holds the first d-1-s subdiagonal
    /// entries of factor s+1. Only zero pivots fail.
    Seeds(Vec<Vec<Rational>>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BidiagFactor {
    /// `lower[s][j]` is the (j+1, j) entry of factor s+1.
    #[serde(with = "rational::serde_vec2")]
    pub lower: Vec<Vec<Rational>>,
    /// All factor entries are strictly positive.
    pub positive: bool,
}

impl BidiagFactor {
    pub fn dense(&self, s: usize, n: usize) -> QMatrix {
        LowerBand { sub: vec![self.lower[s].clone()] }.dense(n)
    }

    /// Product of all factors on the leading n×n block.
    pub fn product(&self, n: usize) -> QMatrix {
        (0..self.lower.len()).fold(crate::linalg::identity(n), |acc, s| matmul(&acc, &self.dense(s, n)))
    }
}

fn positive(v: &Rational) -> bool {
    v > &rational::zero()
}

/// Splits L (unit lower, `l.width()` subdiagonals) as `L_1 L_2 ⋯ L_d` over its
/// stored rows.
pub fn bidiag_factor(l: &LowerBand, schedule: &Schedule) -> Result<BidiagFactor> {
    let d = l.width();
    let rows = l.rows().min(l.sub.first().map_or(0, |s| s.len() + 1));
    let mut t: Vec<Vec<Rational>> = (0..rows).map(|i| (0..=i).map(|j| l.get(i, j)).collect()).collect();
    let mut lower = Vec::with_capacity(d);
    let strict = matches!(schedule, Schedule::MinimalSlack);
    for step in 0..d {
        let w = d - step;
        let name = step + 1;
        if w == 1 {
            let b: Vec<Rational> = (1..rows).map(|i| t[i][i - 1].clone()).collect();
            if strict {
                if let Some(k) = b.iter().position(|v| !positive(v)) {
                    return Err(Error::FactorizationFailed(format!("factor {name}: l^{name}_{} = {} is not positive", k + 1, rational::fmt(&b[k]))));
                }
            }
            lower.push(b);
            break;
        }
        // T = B⁻¹ t with B unit bidiagonal (entries b[i-1] at (i, i-1)); T has w-1 subdiagonals.
        let mut b: Vec<Rational> = Vec::with_capacity(rows);
        let mut next: Vec<Vec<Rational>> = vec![vec![rational::one()]];
        for i in 1..rows {
            let k = i; // 1-based row label of this free/determined entry
            let bi = if i < w {
                match schedule {
                    Schedule::MinimalSlack => &t[i][i - 1] / rational::int(2),
                    Schedule::Seeds(seeds) => seeds
                        .get(step)
                        .and_then(|s| s.get(i - 1))
                        .cloned()
                        .ok_or_else(|| Error::BadParameter(format!("missing seed {} for factor {name}", i)))?,
                }
            } else {
                let piv = &next[i - 1][i - w];
                if piv.is_zero() {
                    return Err(Error::FactorizationFailed(format!("factor {name}: zero pivot t_{{{},{}}}", k - 1, i - w + 1)));
                }
                &t[i][i - w] / piv
            };
            if strict && !positive(&bi) {
                return Err(Error::FactorizationFailed(format!("factor {name}: l^{name}_{k} = {} is not positive", rational::fmt(&bi))));
            }
            let lo = (i + 1).saturating_sub(w);
            let mut row = vec![rational::zero(); i + 1];
            row[i] = rational::one();
            for j in (lo..i).rev() {
                let above = next[i - 1].get(j).cloned().unwrap_or_else(rational::zero);
                let v = &t[i][j] - &bi * &above;
                if strict && !positive(&v) {
                    return Err(Error::FactorizationFailed(format!("factor {name}: t_{{{k},{}}} = {} is not positive", j + 1, rational::fmt(&v))));
                }
                row[j] = v;
            }
            b.push(bi);
            next.push(row);
        }
        lower.push(b);
        t = next;
    }
    let positive = lower.iter().flatten().all(positive);
    Ok(BidiagFactor { lower, positive })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainLink {
    pub jacobi: JacobiView,
    pub seq: PolySeq,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Chain {
    pub links: Vec<ChainLink>,
    pub factor: BidiagFactor,
    pub lu: Factors,
    /// `P^{(i)}_{m+1} - P^{(i+1)}_{m+1} - l P^{(i+1)}_m`, one list per i < d.
    pub connection_residuals: Vec<Vec<Poly>>,
}

impl Chain {
    pub fn is_exact(&self) -> bool {
        self.connection_residuals.iter().flatten().all(Poly::is_zero)
    }
}

/// `J^{(i)} = L_{i+1} ⋯ L_d U L_1 ⋯ L_i` for i = 0..d with their sequences up to degree n.
/// Recurrence of J = L_1 ⋯ L_d U, where `lower[s][j]` is the (j+1, j) entry of L_{s+1}
/// and `diag` the diagonal of the unit-superdiagonal U. Valid for `diag.len() - 1` rows.
pub fn from_bidiagonal(lower: &[Vec<Rational>], diag: &[Rational]) -> Result<RecCoeffs> {
    let d = lower.len();
    let size = diag.len();
    if d == 0 || size < 2 || lower.iter().any(|l| l.len() < size) {
        return Err(Error::BadParameter("need d ≥ 1 factors covering every row".into()));
    }
    let bf = BidiagFactor { lower: lower.to_vec(), positive: true };
    let j = matmul(&bf.product(size), &upper_dense(diag, size));
    Ok(JacobiView::from_matrix(d, &j, size - 1)?.coeffs)
}

pub fn darboux_chain(c: &RecCoeffs, n: usize, schedule: &Schedule) -> Result<Chain> {
    let d = c.d;
    let size = n + d + 3;
    let lu_f = lu(c, size + d)?;
    let factor = bidiag_factor(&lu_f.lower, schedule)?;
    let u = lu_f.upper(size);
    let dense: Vec<QMatrix> = (0..d).map(|s| factor.dense(s, size)).collect();
    let mut links = Vec::with_capacity(d + 1);
    for i in 0..=d {
        let mut prod = crate::linalg::identity(size);
        for f in &dense[i..] {
            prod = matmul(&prod, f);
        }
        prod = matmul(&prod, &u);
        for f in &dense[..i] {
            prod = matmul(&prod, f);
        }
        let jacobi = JacobiView::from_matrix(d, &prod, size - 1)?;
        let seq = generate(&jacobi.coeffs, n)?;
        links.push(ChainLink { jacobi, seq });
    }
    let connection_residuals = (0..d)
        .map(|i| {
            (0..n)
                .map(|m| {
                    let l = &factor.lower[i][m];
                    &(&links[i].seq[m + 1] - &links[i + 1].seq[m + 1]) - &links[i + 1].seq[m].scale(l)
                })
                .collect()
        })
        .collect();
    Ok(Chain { links, factor, lu: lu_f, connection_residuals })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KernelDual {
    /// `a[r][i]`, i ≤ r.
    #[serde(with = "rational::serde_vec2")]
    pub a: Vec<Vec<Rational>>,
    /// `b[r][i]`, i < d.
    #[serde(with = "rational::serde_vec2")]
    pub b: Vec<Vec<Rational>>,
    /// `⟨v_r, K_m⟩ - δ_{r,m}` for m ≤ n, indexed `[r][m]`.
    #[serde(with = "rational::serde_vec2")]
    pub residuals: Vec<Vec<Rational>>,
}

impl KernelDual {
    pub fn is_exact(&self) -> bool {
        self.residuals.iter().flatten().all(Zero::is_zero)
    }
}

/// Dual forms of the kernel sequence written as
/// `v_r = Σ_{i≤r} (a^i_r x - b^i_r) u_i - Σ_{i>r} b^i_r u_i` over the dual forms u of P.
pub fn kernel_dual_matrix(c: &RecCoeffs, n: usize) -> Result<KernelDual> {
    let d = c.d;
    let ker = kernel(c, n.max(d))?;
    let l = &ker.factors.lower;
    let jac = JacobiView::new(c.clone());
    let mut a = Vec::with_capacity(d);
    let mut b = Vec::with_capacity(d);
    for r in 0..d {
        // ⟨v_r, P_{d+i}⟩ = L[d+i][r], i = 0..=r.
        let sys: QMatrix = (0..=r)
            .map(|i| (0..=r).map(|j| jac.entry(d + i, j)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        let rhs: Vec<Rational> = (0..=r).map(|i| l.get(d + i, r)).collect();
        let ar = solve_q(&sys, &rhs)?;
        let br = (0..d)
            .map(|i| {
                let mut s = -l.get(i, r);
                for (j, aj) in ar.iter().enumerate() {
                    s += aj * jac.entry(i, j)?;
                }
                Ok(s)
            })
            .collect::<Result<Vec<_>>>()?;
        a.push(ar);
        b.push(br);
    }
    let basis = generate(c, n + 1)?;
    let mut residuals = vec![Vec::with_capacity(n + 1); d];
    for m in 0..=n {
        let km = &ker.k[m];
        let plain = expand_in_basis(km, &basis)?;
        let shifted = expand_in_basis(&km.mul_x(), &basis)?;
        for r in 0..d {
            let mut s = rational::zero();
            for i in 0..d {
                let u = |v: &[Rational]| v.get(i).cloned().unwrap_or_else(rational::zero);
                if i <= r {
                    s += &a[r][i] * u(&shifted);
                }
                s -= &b[r][i] * u(&plain);
            }
            if r == m {
                s -= rational::one();
            }
            residuals[r].push(s);
        }
    }
    Ok(KernelDual { a, b, residuals })
}
