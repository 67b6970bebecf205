//! Dense univariate polynomials over exact rationals.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::rational::{self, Rational};

/// `coeffs[k]` is the coefficient of `x^k`; no trailing zeros are stored.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(rational::one())
    }

    pub fn x() -> Self {
        Poly::new(vec![rational::zero(), rational::one()])
    }

    pub fn constant(c: Rational) -> Self {
        Poly::new(vec![c])
    }

    /// `x - a`
    pub fn linear(a: &Rational) -> Self {
        Poly::new(vec![-a.clone(), rational::one()])
    }

    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut v = vec![rational::zero(); k + 1];
        v[k] = c;
        Poly::new(v)
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Poly::new(c.iter().map(|&v| rational::int(v)).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rational> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(rational::zero)
    }

    pub fn lead(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(rational::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| c.is_one())
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    pub fn mul_x(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut v = Vec::with_capacity(self.coeffs.len() + 1);
        v.push(rational::zero());
        v.extend(self.coeffs.iter().cloned());
        Poly { coeffs: v }
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + rational::to_f64(c);
        }
        acc
    }

    pub fn deriv(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * rational::int(k as i64))
                .collect(),
        )
    }

    pub fn deriv_n(&self, n: usize) -> Poly {
        (0..n).fold(self.clone(), |p, _| p.deriv())
    }

    /// `p(x^m)`
    pub fn compose_power(&self, m: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![rational::zero(); (self.coeffs.len() - 1) * m + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            v[k * m] = c.clone();
        }
        Poly::new(v)
    }

    pub fn pow(&self, e: usize) -> Poly {
        (0..e).fold(Poly::one(), |acc, _| &acc * self)
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, b: &Poly) -> (Poly, Poly) {
        let db = b.degree().expect("division by zero polynomial");
        let lb = b.lead();
        let mut r = self.coeffs.clone();
        if r.len() <= db {
            return (Poly::zero(), self.clone());
        }
        let mut qv = vec![rational::zero(); r.len() - db];
        for k in (0..qv.len()).rev() {
            let c = &r[k + db] / &lb;
            if !c.is_zero() {
                for (i, bc) in b.coeffs.iter().enumerate() {
                    r[k + i] -= &c * bc;
                }
            }
            qv[k] = c;
        }
        r.truncate(db);
        (Poly::new(qv), Poly::new(r))
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let inv = self.lead().recip();
        self.scale(&inv)
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(rational::fmt).collect()
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c < &rational::zero();
            let a = if neg { -c.clone() } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let coef = rational::fmt(&a);
            match k {
                0 => write!(f, "{coef}")?,
                _ => {
                    if !a.is_one() {
                        write!(f, "{coef}*")?;
                    }
                    if k == 1 {
                        write!(f, "x")?;
                    } else {
                        write!(f, "x^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        rational::serde_vec::serialize(&self.coeffs, s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        rational::serde_vec::deserialize(d).map(Poly::new)
    }
}

fn add_vecs(a: &[Rational], b: &[Rational], negate_b: bool) -> Poly {
    let n = a.len().max(b.len());
    let mut v = Vec::with_capacity(n);
    for k in 0..n {
        let x = a.get(k);
        let y = b.get(k);
        v.push(match (x, y) {
            (Some(x), Some(y)) => {
                if negate_b {
                    x - y
                } else {
                    x + y
                }
            }
            (Some(x), None) => x.clone(),
            (None, Some(y)) => {
                if negate_b {
                    -y.clone()
                } else {
                    y.clone()
                }
            }
            (None, None) => unreachable!(),
        });
    }
    Poly::new(v)
}

impl Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        add_vecs(&self.coeffs, &rhs.coeffs, false)
    }
}

impl Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        add_vecs(&self.coeffs, &rhs.coeffs, true)
    }
}

impl Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Poly::new(v)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|c| -c.clone()).collect() }
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: &Poly) -> Poly {
                (&self).$m(rhs)
            }
        }
        impl $tr<Poly> for &Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                self.$m(&rhs)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        *self = &*self + rhs;
    }
}

impl AddAssign<Poly> for Poly {
    fn add_assign(&mut self, rhs: Poly) {
        *self = &*self + &rhs;
    }
}

impl SubAssign<&Poly> for Poly {
    fn sub_assign(&mut self, rhs: &Poly) {
        *self = &*self - rhs;
    }
}

impl SubAssign<Poly> for Poly {
    fn sub_assign(&mut self, rhs: Poly) {
        *self = &*self - &rhs;
    }
}

impl Mul<&Rational> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Rational) -> Poly {
        self.scale(rhs)
    }
}

impl Mul<&Rational> for Poly {
    type Output = Poly;
    fn mul(self, rhs: &Rational) -> Poly {
        self.scale(rhs)
    }
}

impl Zero for Poly {
    fn zero() -> Self {
        Poly::zero()
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl One for Poly {
    fn one() -> Self {
        Poly::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, q};

    #[test]
    fn arithmetic() {
        let a = Poly::from_ints(&[-1, 0, 1]);
        let b = Poly::from_ints(&[1, 1]);
        assert_eq!(&a * &b, Poly::from_ints(&[-1, -1, 1, 1]));
        assert_eq!(&a - &a, Poly::zero());
        assert_eq!((&a + &b).degree(), Some(2));
        assert_eq!(a.eval(&int(3)), int(8));
    }

    #[test]
    fn division_and_gcd() {
        let a = Poly::from_ints(&[-1, 0, 1]);
        let b = Poly::from_ints(&[1, 1]);
        let (qq, r) = a.div_rem(&b);
        assert_eq!(qq, Poly::from_ints(&[-1, 1]));
        assert!(r.is_zero());
        let c = Poly::from_ints(&[2, 3, 1]);
        assert_eq!(Poly::gcd(&a, &c), b);
        let p = Poly::from_ints(&[-1, 0, 0, 1]);
        assert_eq!(Poly::gcd(&p, &p.deriv()), Poly::one());
    }

    #[test]
    fn derivative_and_power_substitution() {
        let a = Poly::from_ints(&[5, 0, 3, 1]);
        assert_eq!(a.deriv(), Poly::from_ints(&[0, 6, 3]));
        assert_eq!(a.deriv_n(3), Poly::from_ints(&[6]));
        assert_eq!(Poly::from_ints(&[1, -4, 1]).compose_power(3), Poly::from_ints(&[1, 0, 0, -4, 0, 0, 1]));
    }

    #[test]
    fn display() {
        let a = Poly::new(vec![q(-1, 2), int(0), int(1)]);
        assert_eq!(a.to_string(), "x^2 - 1/2");
        assert_eq!(Poly::zero().to_string(), "0");
    }
}
