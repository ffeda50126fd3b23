//! Exact noncommutative polynomial algebra in `n` canonical pairs `(x̂ⱼ, p̂ⱼ)`
//! with `[x̂ⱼ, p̂ₖ] = iħδⱼₖ`.
//!
//! Every [`OperatorPoly`] is stored in normal form: within each dimension all
//! `x̂ⱼ` stand to the left of all `p̂ⱼ`, and dimensions appear in index order.
//! Equality of normal forms is equality of operators.

mod coefficient;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub use coefficient::{Coefficient, GaussianRational};
pub(crate) use coefficient::fmt_rational;

use crate::error::{Error, Result};

pub(crate) fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub(crate) fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Exponent vectors of `x₁^a₁⋯xₙ^aₙ p₁^b₁⋯pₙ^bₙ`.
///
/// As an operator monomial this is the normal-ordered word; as a classical
/// monomial the order is irrelevant. Ordering is lexicographic on `(x, p)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub x: Vec<u32>,
    pub p: Vec<u32>,
}

pub type OperatorMonomial = Monomial;

impl Monomial {
    pub fn one(dims: usize) -> Self {
        Monomial {
            x: vec![0; dims],
            p: vec![0; dims],
        }
    }

    pub fn new(x: Vec<u32>, p: Vec<u32>) -> Self {
        assert_eq!(x.len(), p.len(), "exponent vectors must have equal length");
        Monomial { x, p }
    }

    pub fn dims(&self) -> usize {
        self.x.len()
    }

    pub fn degree(&self) -> u32 {
        self.x.iter().chain(&self.p).sum()
    }

    pub fn is_constant(&self) -> bool {
        self.degree() == 0
    }

    pub fn has_momentum(&self) -> bool {
        self.p.iter().any(|&e| e > 0)
    }

    pub(crate) fn write_vars(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dims = self.dims();
        let mut first = true;
        let mut emit = |f: &mut fmt::Formatter<'_>, base: char, j: usize, e: u32| -> fmt::Result {
            if e == 0 {
                return Ok(());
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            write!(f, "{base}")?;
            if dims > 1 {
                write!(f, "{}", j + 1)?;
            }
            if e > 1 {
                write!(f, "^{e}")?;
            }
            Ok(())
        };
        for (j, &e) in self.x.iter().enumerate() {
            emit(f, 'x', j, e)?;
        }
        for (j, &e) in self.p.iter().enumerate() {
            emit(f, 'p', j, e)?;
        }
        Ok(())
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_constant() {
            return write!(f, "1");
        }
        self.write_vars(f)
    }
}

/// Normal-ordered product of two normal-ordered monomials.
///
/// Per dimension `(x^a p^b)(x^c p^d) = Σₖ k!·C(b,k)·C(c,k)·(−iħ)^k x^{a+c−k} p^{b+d−k}`;
/// dimensions commute, so the full product is the Cartesian product of the
/// per-dimension expansions. Returns `(integer weight, ħ power, monomial)`.
fn monomial_product(a: &Monomial, b: &Monomial) -> Vec<(BigInt, u32, Monomial)> {
    let dims = a.dims();
    let mut acc: Vec<(BigInt, u32, Vec<u32>, Vec<u32>)> =
        vec![(BigInt::one(), 0, Vec::with_capacity(dims), Vec::with_capacity(dims))];
    for j in 0..dims {
        let (pa, xb) = (a.p[j], b.x[j]);
        let mut next = Vec::with_capacity(acc.len() * (pa.min(xb) as usize + 1));
        for k in 0..=pa.min(xb) {
            let w = binomial(pa, k) * binomial(xb, k) * factorial(k);
            let xe = a.x[j] + xb - k;
            let pe = pa + b.p[j] - k;
            for (aw, ak, ax, ap) in &acc {
                let mut nx = ax.clone();
                nx.push(xe);
                let mut np = ap.clone();
                np.push(pe);
                next.push((aw * &w, ak + k, nx, np));
            }
        }
        acc = next;
    }
    acc.into_iter()
        .map(|(w, k, x, p)| (w, k, Monomial { x, p }))
        .collect()
}

/// Noncommutative polynomial in normal form with coefficients in ℚ[i][ħ].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OperatorPoly {
    dims: usize,
    terms: BTreeMap<Monomial, Coefficient>,
}

impl OperatorPoly {
    pub fn zero(dims: usize) -> Self {
        OperatorPoly {
            dims,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dims: usize, c: Coefficient) -> Self {
        Self::term(Monomial::one(dims), c)
    }

    pub fn one(dims: usize) -> Self {
        Self::constant(dims, Coefficient::one())
    }

    /// A single normal-ordered term.
    pub fn term(mono: Monomial, c: Coefficient) -> Self {
        let dims = mono.dims();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(mono, c);
        }
        OperatorPoly { dims, terms }
    }

    /// `x̂ⱼ^e` (j is zero-based).
    pub fn x_pow(dims: usize, j: usize, e: u32) -> Self {
        let mut m = Monomial::one(dims);
        m.x[j] = e;
        Self::term(m, Coefficient::one())
    }

    /// `p̂ⱼ^e` (j is zero-based).
    pub fn p_pow(dims: usize, j: usize, e: u32) -> Self {
        let mut m = Monomial::one(dims);
        m.p[j] = e;
        Self::term(m, Coefficient::one())
    }

    pub fn x(dims: usize, j: usize) -> Self {
        Self::x_pow(dims, j, 1)
    }

    pub fn p(dims: usize, j: usize) -> Self {
        Self::p_pow(dims, j, 1)
    }

    /// `x̂^a` as a full multi-index power.
    pub fn x_monomial(exps: &[u32]) -> Self {
        Self::term(Monomial::new(exps.to_vec(), vec![0; exps.len()]), Coefficient::one())
    }

    /// `p̂^b` as a full multi-index power.
    pub fn p_monomial(exps: &[u32]) -> Self {
        Self::term(Monomial::new(vec![0; exps.len()], exps.to_vec()), Coefficient::one())
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coefficient)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, mono: &Monomial) -> Option<&Coefficient> {
        self.terms.get(mono)
    }

    /// The operator as a pure scalar, if it has no `x̂`/`p̂` dependence.
    pub fn as_scalar(&self) -> Option<Coefficient> {
        match self.terms.len() {
            0 => Some(Coefficient::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_constant().then(|| c.clone())
            }
            _ => None,
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

    fn accumulate(&mut self, mono: Monomial, c: &Coefficient) {
        if c.is_zero() {
            return;
        }
        let drop = match self.terms.get_mut(&mono) {
            Some(existing) => {
                existing.add_assign_ref(c);
                existing.is_zero()
            }
            None => {
                self.terms.insert(mono.clone(), c.clone());
                false
            }
        };
        if drop {
            self.terms.remove(&mono);
        }
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
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        OperatorPoly {
            dims: self.dims,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, c: &Coefficient) -> Self {
        let mut out = Self::zero(self.dims);
        for (m, tc) in &self.terms {
            out.accumulate(m.clone(), &(tc * c));
        }
        out
    }

    pub fn scale_rational(&self, r: &BigRational) -> Self {
        let mut out = Self::zero(self.dims);
        for (m, tc) in &self.terms {
            out.accumulate(m.clone(), &tc.scale(r));
        }
        out
    }

    /// Product in normal form.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        let mut out = Self::zero(self.dims);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let cab = ca * cb;
                for (w, k, m) in monomial_product(ma, mb) {
                    let g = GaussianRational::neg_i_pow(k).scale(&BigRational::from_integer(w));
                    out.accumulate(m, &cab.scaled_shifted(&g, k));
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.dims);
        for _ in 0..e {
            acc = acc.mul(self).expect("same dims");
        }
        acc
    }

    /// `[a, b] = ab − ba`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    /// Formal adjoint: reverses each word, conjugates coefficients and
    /// re-normal-orders. `x̂ⱼ`, `p̂ⱼ` and ħ are self-adjoint.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(self.dims);
        for (m, c) in &self.terms {
            // (X^a P^b)† = P^b X^a
            let reversed = Self::p_monomial(&m.p)
                .mul(&Self::x_monomial(&m.x))
                .expect("same dims");
            let piece = reversed.scale(&c.conj());
            for (rm, rc) in piece.terms {
                out.accumulate(rm, &rc);
            }
        }
        out
    }

    /// Multiplies the letters of `word` left to right and returns the
    /// normal form. Letters are `(dimension, is_momentum)`.
    pub fn from_word(dims: usize, word: &[(usize, bool)]) -> Self {
        word.iter().fold(Self::one(dims), |acc, &(j, is_p)| {
            let letter = if is_p { Self::p(dims, j) } else { Self::x(dims, j) };
            acc.mul(&letter).expect("same dims")
        })
    }
}

impl fmt::Display for OperatorPoly {
    /// Canonical text form: pieces `(a+b*i)*hbar^k*x^a*p^b` joined by ` + `,
    /// ordered by monomial and then by ħ power. The zero operator is `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            for (k, g) in c.iter() {
                if !first {
                    write!(f, " + ")?;
                }
                first = false;
                write!(f, "{g}")?;
                if k > 0 {
                    write!(f, "*hbar^{k}")?;
                }
                if !m.is_constant() {
                    write!(f, "*")?;
                    m.write_vars(f)?;
                }
            }
        }
        Ok(())
    }
}
