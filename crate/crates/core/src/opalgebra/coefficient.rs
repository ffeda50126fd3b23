//! Exact scalars of the operator algebra: the ring ℚ[i][ħ].

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact Gaussian rational `re + im·i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussianRational { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        GaussianRational {
            re,
            im: BigRational::zero(),
        }
    }

    pub fn zero() -> Self {
        Self::real(BigRational::zero())
    }

    pub fn one() -> Self {
        Self::real(BigRational::one())
    }

    pub fn i() -> Self {
        GaussianRational {
            re: BigRational::zero(),
            im: BigRational::one(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussianRational {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// `(-i)^k`
    pub fn neg_i_pow(k: u32) -> Self {
        let one = BigRational::one();
        match k % 4 {
            0 => Self::real(one),
            1 => Self::new(BigRational::zero(), -one),
            2 => Self::real(-one),
            _ => Self::new(BigRational::zero(), one),
        }
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        GaussianRational {
            re: &self.re * r,
            im: &self.im * r,
        }
    }
}

impl Add for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl Sub for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}

impl Mul for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }
}

pub(crate) fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for GaussianRational {
    /// `(a)`, `(b*i)` or `(a+b*i)` / `(a-b*i)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "({})", fmt_rational(&self.re))
        } else if self.re.is_zero() {
            write!(f, "({}*i)", fmt_rational(&self.im))
        } else {
            let sign = if self.im.is_negative() { '-' } else { '+' };
            write!(
                f,
                "({}{}{}*i)",
                fmt_rational(&self.re),
                sign,
                fmt_rational(&self.im.abs())
            )
        }
    }
}

/// Element of ℚ[i][ħ]: map from ħ-exponent to a nonzero Gaussian rational.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Coefficient {
    terms: BTreeMap<u32, GaussianRational>,
}

impl Coefficient {
    pub fn zero() -> Self {
        Coefficient::default()
    }

    pub fn one() -> Self {
        Self::monomial(GaussianRational::one(), 0)
    }

    /// `c · ħ^k`
    pub fn monomial(c: GaussianRational, k: u32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(k, c);
        }
        Coefficient { terms }
    }

    pub fn rational(r: BigRational) -> Self {
        Self::monomial(GaussianRational::real(r), 0)
    }

    pub fn integer(n: i64) -> Self {
        Self::rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// `ħ^k`
    pub fn hbar_pow(k: u32) -> Self {
        Self::monomial(GaussianRational::one(), k)
    }

    /// `iħ`
    pub fn i_hbar() -> Self {
        Self::monomial(GaussianRational::i(), 1)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `(ħ-exponent, coefficient)` pairs in ascending exponent order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, &GaussianRational)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn get(&self, hbar_exp: u32) -> Option<&GaussianRational> {
        self.terms.get(&hbar_exp)
    }

    pub fn conj(&self) -> Self {
        Coefficient {
            terms: self.terms.iter().map(|(k, c)| (*k, c.conj())).collect(),
        }
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        let mut out = Coefficient::zero();
        for (k, c) in &self.terms {
            out.add_term(*k, &c.scale(r));
        }
        out
    }

    pub fn scale_gaussian(&self, g: &GaussianRational) -> Self {
        let mut out = Coefficient::zero();
        for (k, c) in &self.terms {
            out.add_term(*k, &(c * g));
        }
        out
    }

    /// Multiplies by `g·ħ^shift`.
    pub(crate) fn scaled_shifted(&self, g: &GaussianRational, shift: u32) -> Self {
        let mut out = Coefficient::zero();
        for (k, c) in &self.terms {
            out.add_term(k + shift, &(c * g));
        }
        out
    }

    pub(crate) fn add_term(&mut self, k: u32, c: &GaussianRational) {
        if c.is_zero() {
            return;
        }
        let drop = match self.terms.get_mut(&k) {
            Some(existing) => {
                *existing = &*existing + c;
                existing.is_zero()
            }
            None => {
                self.terms.insert(k, c.clone());
                false
            }
        };
        if drop {
            self.terms.remove(&k);
        }
    }

    pub(crate) fn add_assign_ref(&mut self, other: &Coefficient) {
        for (k, c) in &other.terms {
            self.add_term(*k, c);
        }
    }

    /// Evaluates at a numeric ħ, returning `(re, im)`.
    pub fn to_complex(&self, hbar: f64) -> (f64, f64) {
        use num_traits::ToPrimitive;
        let mut re = 0.0;
        let mut im = 0.0;
        for (k, c) in &self.terms {
            let h = hbar.powi(*k as i32);
            re += c.re.to_f64().unwrap_or(f64::NAN) * h;
            im += c.im.to_f64().unwrap_or(f64::NAN) * h;
        }
        (re, im)
    }
}

impl Add for &Coefficient {
    type Output = Coefficient;
    fn add(self, rhs: &Coefficient) -> Coefficient {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl Sub for &Coefficient {
    type Output = Coefficient;
    fn sub(self, rhs: &Coefficient) -> Coefficient {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(*k, &(-c));
        }
        out
    }
}

impl Mul for &Coefficient {
    type Output = Coefficient;
    fn mul(self, rhs: &Coefficient) -> Coefficient {
        let mut out = Coefficient::zero();
        for (ka, a) in &self.terms {
            for (kb, b) in &rhs.terms {
                out.add_term(ka + kb, &(a * b));
            }
        }
        out
    }
}

impl Neg for &Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        Coefficient {
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }
}

impl fmt::Display for Coefficient {
    /// Pieces `(a+b*i)*hbar^k` joined by ` + `; `0` when empty.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (k, c)) in self.terms.iter().enumerate() {
            if idx > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            if *k > 0 {
                write!(f, "*hbar^{k}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn rationals_stay_reduced() {
        let c = Coefficient::rational(q(2, 4));
        let g = c.get(0).unwrap();
        assert_eq!(g.re.numer(), &BigInt::from(1));
        assert_eq!(g.re.denom(), &BigInt::from(2));
        let neg = Coefficient::rational(q(3, -6));
        assert_eq!(neg.get(0).unwrap().re.denom(), &BigInt::from(2));
    }

    #[test]
    fn cancellation_drops_entries() {
        let a = Coefficient::i_hbar();
        let z = &a - &a;
        assert!(z.is_zero());
        assert_eq!(z.to_string(), "0");
    }

    #[test]
    fn i_hbar_squared_is_minus_hbar_squared() {
        let a = Coefficient::i_hbar();
        let sq = &a * &a;
        assert_eq!(sq, Coefficient::monomial(GaussianRational::real(q(-1, 1)), 2));
        assert_eq!(sq.to_string(), "(-1)*hbar^2");
    }

    #[test]
    fn rendering_of_gaussian_pieces() {
        let g = GaussianRational::new(q(1, 2), q(-3, 4));
        assert_eq!(g.to_string(), "(1/2-3/4*i)");
        assert_eq!(GaussianRational::i().to_string(), "(1*i)");
        let c = &Coefficient::one() + &Coefficient::monomial(GaussianRational::new(q(0, 1), q(-1, 2)), 1);
        assert_eq!(c.to_string(), "(1) + (-1/2*i)*hbar^1");
    }

    #[test]
    fn neg_i_powers_cycle() {
        let mut acc = GaussianRational::one();
        let neg_i = GaussianRational::neg_i_pow(1);
        for k in 0..8 {
            assert_eq!(GaussianRational::neg_i_pow(k), acc);
            acc = &acc * &neg_i;
        }
    }
}
