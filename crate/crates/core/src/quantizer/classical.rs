use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::opalgebra::{fmt_rational, Monomial};

/// Commutative polynomial in `x₁..xₙ, p₁..pₙ` with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ClassicalPoly {
    dims: usize,
    terms: BTreeMap<Monomial, BigRational>,
}

impl ClassicalPoly {
    pub fn zero(dims: usize) -> Self {
        ClassicalPoly {
            dims,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dims: usize, c: BigRational) -> Self {
        Self::term(Monomial::one(dims), c)
    }

    pub fn term(mono: Monomial, c: BigRational) -> Self {
        let dims = mono.dims();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(mono, c);
        }
        ClassicalPoly { dims, terms }
    }

    /// `c · xᵃ pᵇ` in one dimension.
    pub fn monomial_1d(c: BigRational, m: u32, l: u32) -> Self {
        Self::term(Monomial::new(vec![m], vec![l]), c)
    }

    pub fn x(dims: usize, j: usize) -> Self {
        let mut m = Monomial::one(dims);
        m.x[j] = 1;
        Self::term(m, BigRational::one())
    }

    pub fn p(dims: usize, j: usize) -> Self {
        let mut m = Monomial::one(dims);
        m.p[j] = 1;
        Self::term(m, BigRational::one())
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn has_momentum(&self) -> bool {
        self.terms.keys().any(Monomial::has_momentum)
    }

    /// Highest dimension index actually used (at least 1).
    pub fn used_dims(&self) -> usize {
        self.terms
            .keys()
            .flat_map(|m| {
                (0..m.dims()).filter(move |&j| m.x[j] > 0 || m.p[j] > 0)
            })
            .max()
            .map_or(1, |j| j + 1)
    }

    /// Re-embeds the polynomial into `dims` dimensions. Fails if a dropped
    /// dimension is in use.
    pub fn with_dims(&self, dims: usize) -> Result<Self> {
        if dims < self.used_dims() && !self.is_zero() {
            return Err(Error::DimensionMismatch {
                left: self.dims,
                right: dims,
            });
        }
        let mut out = Self::zero(dims);
        for (m, c) in &self.terms {
            let mut x = m.x.clone();
            let mut p = m.p.clone();
            x.resize(dims, 0);
            p.resize(dims, 0);
            out.accumulate(Monomial::new(x, p), c);
        }
        Ok(out)
    }

    pub(crate) fn accumulate(&mut self, mono: Monomial, c: &BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(mono.clone()).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&mono);
        }
    }

    fn check_dims(&self, other: &Self) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch {
                left: self.dims,
                right: other.dims,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.accumulate(m.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        let mut out = Self::zero(self.dims);
        for (m, c) in &self.terms {
            out.accumulate(m.clone(), &(c * r));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        let mut out = Self::zero(self.dims);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let x = ma.x.iter().zip(&mb.x).map(|(a, b)| a + b).collect();
                let p = ma.p.iter().zip(&mb.p).map(|(a, b)| a + b).collect();
                out.accumulate(Monomial::new(x, p), &(ca * cb));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(self.dims, BigRational::one());
        for _ in 0..e {
            acc = acc.mul(self).expect("same dims");
        }
        acc
    }

    /// Exact partial derivative with respect to `xⱼ`.
    pub fn d_dx(&self, j: usize) -> Self {
        self.derivative(j, false)
    }

    /// Exact partial derivative with respect to `pⱼ`.
    pub fn d_dp(&self, j: usize) -> Self {
        self.derivative(j, true)
    }

    fn derivative(&self, j: usize, momentum: bool) -> Self {
        let mut out = Self::zero(self.dims);
        for (m, c) in &self.terms {
            let e = if momentum { m.p[j] } else { m.x[j] };
            if e == 0 {
                continue;
            }
            let mut dm = m.clone();
            if momentum {
                dm.p[j] -= 1;
            } else {
                dm.x[j] -= 1;
            }
            out.accumulate(dm, &(c * BigRational::from_integer(BigInt::from(e))));
        }
        out
    }

    /// Numeric evaluation at `(x, p)`.
    pub fn eval(&self, x: &[f64], p: &[f64]) -> f64 {
        self.compile().eval(x, p)
    }

    /// Floating-point form for repeated evaluation.
    pub fn compile(&self) -> NumericPoly {
        NumericPoly {
            dims: self.dims,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (c.to_f64().unwrap_or(f64::NAN), m.x.clone(), m.p.clone()))
                .collect(),
        }
    }
}

impl fmt::Display for ClassicalPoly {
    /// Renders in the observable grammar (`x`, `p` for one dimension,
    /// `x1..`, `p1..` otherwise), so the output re-parses to the same poly.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            match (idx, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let abs = c.abs();
            if m.is_constant() {
                write!(f, "{}", fmt_rational(&abs))?;
            } else {
                if !abs.is_one() {
                    write!(f, "{}*", fmt_rational(&abs))?;
                }
                m.write_vars(f)?;
            }
        }
        Ok(())
    }
}

/// Floating-point polynomial: `(coefficient, x exponents, p exponents)` terms.
#[derive(Clone, Debug, PartialEq)]
pub struct NumericPoly {
    dims: usize,
    terms: Vec<(f64, Vec<u32>, Vec<u32>)>,
}

impl NumericPoly {
    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn eval(&self, x: &[f64], p: &[f64]) -> f64 {
        let mut total = 0.0;
        for (c, xe, pe) in &self.terms {
            let mut v = *c;
            for (xi, &e) in x.iter().zip(xe) {
                if e > 0 {
                    v *= xi.powi(e as i32);
                }
            }
            for (pi, &e) in p.iter().zip(pe) {
                if e > 0 {
                    v *= pi.powi(e as i32);
                }
            }
            total += v;
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn derivatives_are_exact() {
        // ½ p² x²
        let h = ClassicalPoly::monomial_1d(q(1, 2), 2, 2);
        assert_eq!(h.d_dx(0), ClassicalPoly::monomial_1d(q(1, 1), 1, 2));
        assert_eq!(h.d_dp(0), ClassicalPoly::monomial_1d(q(1, 1), 2, 1));
        assert!(ClassicalPoly::monomial_1d(q(1, 1), 0, 3).d_dx(0).is_zero());
    }

    #[test]
    fn rendering() {
        let h = ClassicalPoly::monomial_1d(q(1, 2), 0, 2)
            .add(&ClassicalPoly::monomial_1d(q(-1, 2), 2, 0))
            .unwrap()
            .add(&ClassicalPoly::constant(1, q(3, 1)))
            .unwrap();
        assert_eq!(h.to_string(), "3 + 1/2*p^2 - 1/2*x^2");
        let two = ClassicalPoly::x(2, 1).mul(&ClassicalPoly::p(2, 0)).unwrap();
        assert_eq!(two.to_string(), "x2*p1");
        assert_eq!(ClassicalPoly::zero(1).to_string(), "0");
    }

    #[test]
    fn eval_and_used_dims() {
        let h = ClassicalPoly::x(3, 1).mul(&ClassicalPoly::p(3, 2)).unwrap();
        assert_eq!(h.used_dims(), 3);
        assert_eq!(h.eval(&[0.0, 2.0, 0.0], &[0.0, 0.0, 1.5]), 3.0);
        assert!(h.with_dims(2).is_err());
        let y = ClassicalPoly::x(3, 0).with_dims(1).unwrap();
        assert_eq!(y, ClassicalPoly::x(1, 0));
    }
}
