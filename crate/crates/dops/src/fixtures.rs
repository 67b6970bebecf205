//! Named example families with closed-form recurrence coefficients.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::dsym::SymData;
use crate::error::{Error, Result};
use crate::rational::{self, int, Rational};
use crate::seq::RecCoeffs;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Fixture {
    /// β_n = q^n β_0, γ^i_{n+1} = [n+d-i, d-i]_q q^n γ^i_1. At q = 1 this is the Appell (d-Hermite) family.
    QAppell {
        d: usize,
        #[serde(with = "rational::serde_rat")]
        q: Rational,
        #[serde(with = "rational::serde_rat")]
        beta0: Rational,
        #[serde(with = "rational::serde_vec")]
        gamma1: Vec<Rational>,
    },
    /// Discrete Appell: β_n = wn - b_0, γ^i_{n+1} = -b_i (n+1)_{d-i}.
    DCharlier {
        d: usize,
        #[serde(with = "rational::serde_rat")]
        w: Rational,
        #[serde(with = "rational::serde_vec")]
        b: Vec<Rational>,
    },
    /// d-symmetric, generated by (1 - xt + t^{d+1})^{-α}.
    Humbert {
        d: usize,
        #[serde(with = "rational::serde_rat")]
        alpha: Rational,
    },
    /// exp(xt/(1-at) + Σ b_k t^k/k!), with b_k = 0 past the given list.
    Exponential {
        d: usize,
        #[serde(with = "rational::serde_rat")]
        a: Rational,
        #[serde(with = "rational::serde_vec")]
        b: Vec<Rational>,
    },
    /// d = 2, β_n = n+1, γ^1_n = n, γ^0_n = n(n+1)/2. Its derivatives are not a 2-OPS.
    LaguerreType,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum FixtureData {
    Rec(RecCoeffs),
    Sym(SymData),
}

impl FixtureData {
    /// The recurrence, expanded to the full (d+2)-term form for d-symmetric data.
    pub fn coeffs(&self) -> RecCoeffs {
        match self {
            FixtureData::Rec(c) => c.clone(),
            FixtureData::Sym(s) => s.sym_coeffs(),
        }
    }
}

fn pow(q: &Rational, n: usize) -> Rational {
    (0..n).fold(Rational::one(), |a, _| a * q)
}

/// Gaussian binomial by the q-Pascal rule, valid at q = 1 too.
pub fn q_binomial(n: usize, k: usize, q: &Rational) -> Rational {
    if k > n {
        return Rational::zero();
    }
    let mut row = vec![Rational::one()];
    for m in 1..=n {
        let mut next = vec![Rational::one(); m + 1];
        for j in 1..m {
            next[j] = &row[j - 1] + pow(q, j) * &row[j];
        }
        row = next;
    }
    row[k].clone()
}

/// Rising factorial (a)_k.
pub fn pochhammer(a: &Rational, k: usize) -> Rational {
    (0..k).fold(Rational::one(), |acc, i| acc * (a + int(i as i64)))
}

fn binom(n: usize, k: usize) -> Rational {
    if k > n {
        return Rational::zero();
    }
    pochhammer(&int((n - k + 1) as i64), k) / pochhammer(&Rational::one(), k)
}

fn need_len(v: &[Rational], d: usize, what: &str) -> Result<()> {
    if v.len() != d {
        return Err(Error::BadParameter(format!("{what} needs {d} values, got {}", v.len())));
    }
    Ok(())
}

pub fn fixture(f: &Fixture, len: usize) -> Result<FixtureData> {
    match f {
        Fixture::QAppell { d, q, beta0, gamma1 } => {
            need_len(gamma1, *d, "gamma1")?;
            if q.is_zero() {
                return Err(Error::BadParameter("q must be nonzero".into()));
            }
            let c = RecCoeffs::from_fn(*d, len, |n| pow(q, n) * beta0, |i, j| {
                let n = j - 1;
                q_binomial(n + d - i, d - i, q) * pow(q, n) * &gamma1[i]
            });
            Ok(FixtureData::Rec(RecCoeffs::new(c.d, c.beta, c.gamma)?))
        }
        Fixture::DCharlier { d, w, b } => {
            need_len(b, *d, "b")?;
            let c = RecCoeffs::from_fn(*d, len, |n| w * int(n as i64) - &b[0], |i, j| {
                -(&b[i]) * pochhammer(&int(j as i64), d - i)
            });
            Ok(FixtureData::Rec(RecCoeffs::new(c.d, c.beta, c.gamma)?))
        }
        Fixture::Humbert { d, alpha } => {
            let d = *d;
            let mut rho = Vec::with_capacity(len);
            for n in 0..len {
                let den = pochhammer(&(alpha + int(n as i64)), d + 1);
                if den.is_zero() {
                    return Err(Error::BadParameter(format!("(α+{n})_{} vanishes", d + 1)));
                }
                let nn = int(n as i64);
                let tail = int(d as i64 + 1) * (alpha - Rational::one()) / (&nn + int(d as i64 + 1)) + Rational::one();
                rho.push(pochhammer(&(nn + Rational::one()), d + 1) / den * tail);
            }
            SymData::new(d, rho).map(FixtureData::Sym).map_err(|e| match e {
                Error::ZeroAtOrigin(_) | Error::RegularityViolation { .. } => {
                    Error::BadParameter(format!("α gives a vanishing ρ: {e}"))
                }
                e => e,
            })
        }
        Fixture::Exponential { d, a, b } => {
            let d = *d;
            let bk = |k: usize| b.get(k).cloned().unwrap_or_else(Rational::zero);
            // P_{n+1} = (x + 2an + b_1) P_n + Σ_j coef_j(n) P_{n-j}
            let ct = |j: usize| {
                let jj = int(j as i64);
                let mut v = bk(j + 1) - int(2) * a * &jj * bk(j);
                if j >= 2 {
                    v += a * a * &jj * (&jj - Rational::one()) * bk(j - 1);
                }
                v
            };
            let coef = |j: usize, n: usize| {
                let mut v = binom(n, j) * ct(j);
                if j == 1 {
                    v -= a * a * int(n as i64) * int(n as i64 - 1);
                }
                v
            };
            let top = b.len() + 1;
            for j in d + 1..=top {
                if !ct(j).is_zero() {
                    return Err(Error::BadParameter(format!("the recurrence has a term P_{{n-{j}}} beyond d = {d}")));
                }
            }
            let c = RecCoeffs::from_fn(d, len, |n| -(int(2) * a * int(n as i64) + bk(1)), |k, m| {
                let j = d - k;
                -coef(j, m + j - 1)
            });
            Ok(FixtureData::Rec(RecCoeffs::new(c.d, c.beta, c.gamma)?))
        }
        Fixture::LaguerreType => Ok(FixtureData::Rec(RecCoeffs::from_fn(
            2,
            len,
            |n| int(n as i64 + 1),
            |nu, j| if nu == 1 { int(j as i64) } else { int((j * (j + 1) / 2) as i64) },
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsym::dsym_generate;
    use crate::poly::Poly;
    use crate::rational::q;
    use crate::seq::{derivative_sequence, extract_recurrence, generate, Extraction};

    fn rec(f: Fixture, len: usize) -> RecCoeffs {
        match fixture(&f, len).unwrap() {
            FixtureData::Rec(c) => c,
            FixtureData::Sym(_) => panic!("expected a recurrence"),
        }
    }

    #[test]
    fn gaussian_binomials() {
        assert_eq!(q_binomial(4, 2, &int(1)), int(6));
        // [4,2]_q = 1 + q + 2q² + q³ + q⁴
        let x = q(1, 2);
        let want = Poly::from_ints(&[1, 1, 2, 1, 1]).eval(&x);
        assert_eq!(q_binomial(4, 2, &x), want);
        assert_eq!(q_binomial(2, 3, &x), Rational::zero());
    }

    #[test]
    fn q_appell_at_one_is_appell() {
        for d in 1..=3 {
            let g: Vec<Rational> = (0..d).map(|i| q(i as i64 + 2, 3)).collect();
            let c = rec(Fixture::QAppell { d, q: int(1), beta0: q(1, 2), gamma1: g }, 16);
            let p = generate(&c, 12).unwrap();
            for n in 0..12 {
                assert_eq!(p[n + 1].deriv(), p[n].scale(&int(n as i64 + 1)), "d={d} n={n}");
            }
        }
        let c = rec(Fixture::QAppell { d: 2, q: q(1, 3), beta0: int(1), gamma1: vec![int(1), int(2)] }, 8);
        assert_eq!(c.beta[2], q(1, 9));
        // γ^1_2 = [2,1]_q q γ^1_1 = (1+q) q · 2
        assert_eq!(c.gamma[1][1], q(8, 9));
        assert!(fixture(&Fixture::QAppell { d: 2, q: int(1), beta0: int(0), gamma1: vec![int(0), int(1)] }, 4).is_err());
    }

    #[test]
    fn charlier_is_discrete_appell() {
        for d in 1..=3 {
            let w = q(3, 2);
            let b: Vec<Rational> = (0..d).map(|i| q(-(i as i64) - 1, 2)).collect();
            let c = rec(Fixture::DCharlier { d, w: w.clone(), b }, 14);
            let p = generate(&c, 10).unwrap();
            let shift = |f: &Poly| {
                // f(x + w) by Horner
                let xw = &Poly::x() + &Poly::constant(w.clone());
                f.coeffs().iter().rev().fold(Poly::zero(), |acc, a| &(&acc * &xw) + &Poly::constant(a.clone()))
            };
            for n in 0..10 {
                let delta = (&shift(&p[n + 1]) - &p[n + 1]).scale(&(Rational::one() / &w));
                assert_eq!(delta, p[n].scale(&int(n as i64 + 1)), "d={d} n={n}");
            }
        }
    }

    fn humbert_direct(d: usize, alpha: &Rational, n: usize) -> Poly {
        // Coefficient of tⁿ in (1 - xt + t^{d+1})^{-α}, made monic.
        let mut c = vec![Rational::zero(); n + 1];
        let mut k = 0;
        while (d + 1) * k <= n {
            let m = n - d * k;
            let sign = if k % 2 == 0 { Rational::one() } else { -Rational::one() };
            c[n - (d + 1) * k] = sign * pochhammer(alpha, m)
                / (pochhammer(&Rational::one(), k) * pochhammer(&Rational::one(), n - (d + 1) * k));
            k += 1;
        }
        Poly::new(c).monic()
    }

    #[test]
    fn humbert_matches_generating_function() {
        for d in 1..=3 {
            for alpha in [int(1), q(1, 2), q(7, 3)] {
                let s = match fixture(&Fixture::Humbert { d, alpha: alpha.clone() }, 20).unwrap() {
                    FixtureData::Sym(s) => s,
                    FixtureData::Rec(_) => unreachable!(),
                };
                let b = dsym_generate(&s, 14).unwrap();
                for n in 0..=14 {
                    assert_eq!(b[n], humbert_direct(d, &alpha, n), "d={d} α={alpha} n={n}");
                }
            }
        }
        let s = fixture(&Fixture::Humbert { d: 2, alpha: int(1) }, 10).unwrap();
        if let FixtureData::Sym(s) = s {
            assert!(s.rho.iter().all(|r| r.is_one()));
        }
        assert!(matches!(fixture(&Fixture::Humbert { d: 2, alpha: int(-3) }, 10), Err(Error::BadParameter(_))));
    }

    fn exp_direct(a: &Rational, b: &[Rational], n: usize) -> Vec<Poly> {
        // n! [tⁿ] exp(S), S = xt/(1-at) + Σ_{k≥1} b_k t^k/k!, via n E_n = Σ k S_k E_{n-k}.
        let mut s = vec![Poly::zero(); n + 1];
        for (k, sk) in s.iter_mut().enumerate().skip(1) {
            let mut v = Poly::monomial(pow(a, k - 1), 1);
            if let Some(bk) = b.get(k) {
                v = &v + &Poly::constant(bk / pochhammer(&Rational::one(), k));
            }
            *sk = v;
        }
        let mut e = vec![Poly::one()];
        for m in 1..=n {
            let mut acc = Poly::zero();
            for k in 1..=m {
                acc = &acc + &(&s[k] * &e[m - k]).scale(&int(k as i64));
            }
            e.push(acc.scale(&q(1, m as i64)));
        }
        e.iter().enumerate().map(|(m, p)| p.scale(&pochhammer(&Rational::one(), m))).collect()
    }

    #[test]
    fn exponential_family() {
        let cases: Vec<(usize, Rational, Vec<Rational>)> = vec![
            (1, int(0), vec![int(0), int(-1), int(-1)]),
            (2, q(-1, 3), vec![int(0), int(-1), int(-2)]),
            (3, int(-1), vec![int(0), q(-1, 2), int(-1), int(-3)]),
            // a = 0: Appell, the last band comes from b_{d+1}
            (2, int(0), vec![int(0), int(1), int(-1), int(2)]),
        ];
        for (d, a, b) in cases {
            let b_used: Vec<Rational> = if a.is_zero() { b.clone() } else { b[..d].to_vec() };
            let c = rec(Fixture::Exponential { d, a: a.clone(), b: b_used.clone() }, 14);
            let p = generate(&c, 10).unwrap();
            assert_eq!(p.to_vec(), exp_direct(&a, &b_used, 10), "d={d} a={a}");
            if a.is_zero() {
                for n in 0..10 {
                    assert_eq!(p[n + 1].deriv(), p[n].scale(&int(n as i64 + 1)));
                }
            }
            let ds = derivative_sequence(&p, 1);
            match extract_recurrence(&ds, d).unwrap() {
                Extraction::Rec(e) => {
                    for n in 0..6 {
                        let want = -(&a * int(2 * n as i64 + 1) + &b_used.get(1).cloned().unwrap_or_else(Rational::zero));
                        assert_eq!(e.beta[n], want);
                    }
                }
                Extraction::Quasi(_) => panic!("derivatives should satisfy a recurrence"),
            }
        }
        let bad = Fixture::Exponential { d: 1, a: int(1), b: vec![int(0), int(1), int(1)] };
        assert!(matches!(fixture(&bad, 6), Err(Error::BadParameter(_))));
    }

    #[test]
    fn laguerre_type_is_not_hahn() {
        let c = rec(Fixture::LaguerreType, 30);
        let p = generate(&c, 20).unwrap();
        let ds = derivative_sequence(&p, 1);
        assert!(matches!(extract_recurrence(&ds, 2).unwrap(), Extraction::Quasi(_)));
    }
}
