//! Quantization rules mapping classical polynomial observables to
//! normal-ordered operators.
//!
//! Born–Jordan quantization goes through the two-point averaged symbol
//! `H̄(x, x′, p) = ∫₀¹ H(τx + (1−τ)x′, p) dτ` followed by kernel quantization
//! `xᵃ x′ᵇ pˡ ↦ x̂ᵃ p̂ˡ x̂ᵇ`. Weyl and symmetric quantization are direct
//! ordering rules. All arithmetic is exact.

mod classical;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub use classical::{ClassicalPoly, NumericPoly};

use crate::error::{Error, Result};
use crate::opalgebra::{binomial, factorial, Coefficient, Monomial, OperatorPoly};

/// Exponents of `xᵃ x′ᵇ pˡ`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TwoPointMonomial {
    pub x: Vec<u32>,
    pub x_prime: Vec<u32>,
    pub p: Vec<u32>,
}

/// Commutative polynomial in `x, x′, p` with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TwoPointSymbol {
    dims: usize,
    terms: BTreeMap<TwoPointMonomial, BigRational>,
}

impl TwoPointSymbol {
    pub fn zero(dims: usize) -> Self {
        TwoPointSymbol {
            dims,
            terms: BTreeMap::new(),
        }
    }

    pub fn term(mono: TwoPointMonomial, c: BigRational) -> Self {
        let mut s = Self::zero(mono.x.len());
        s.accumulate(mono, &c);
        s
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TwoPointMonomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn accumulate(&mut self, mono: TwoPointMonomial, c: &BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(mono.clone()).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&mono);
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch {
                left: self.dims,
                right: other.dims,
            });
        }
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.accumulate(m.clone(), c);
        }
        Ok(out)
    }

    /// Restriction to the diagonal `x′ = x`.
    pub fn diagonal(&self) -> ClassicalPoly {
        let mut out = ClassicalPoly::zero(self.dims);
        for (m, c) in &self.terms {
            let x = m.x.iter().zip(&m.x_prime).map(|(a, b)| a + b).collect();
            out.accumulate(Monomial::new(x, m.p.clone()), c);
        }
        out
    }

    pub fn eval(&self, x: &[f64], x_prime: &[f64], p: &[f64]) -> f64 {
        self.compile().eval(x, x_prime, p)
    }

    pub fn compile(&self) -> NumericTwoPoint {
        NumericTwoPoint {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    (
                        c.to_f64().unwrap_or(f64::NAN),
                        m.x.clone(),
                        m.x_prime.clone(),
                        m.p.clone(),
                    )
                })
                .collect(),
        }
    }
}

type TwoPointTerm = (f64, Vec<u32>, Vec<u32>, Vec<u32>);

/// Floating-point form of a [`TwoPointSymbol`].
#[derive(Clone, Debug, PartialEq)]
pub struct NumericTwoPoint {
    terms: Vec<TwoPointTerm>,
}

impl NumericTwoPoint {
    pub fn eval(&self, x: &[f64], x_prime: &[f64], p: &[f64]) -> f64 {
        let pw = |v: f64, e: u32| if e == 0 { 1.0 } else { v.powi(e as i32) };
        self.terms
            .iter()
            .map(|(c, a, b, l)| {
                let mut v = *c;
                for j in 0..a.len() {
                    v *= pw(x[j], a[j]) * pw(x_prime[j], b[j]);
                    if l[j] > 0 {
                        v *= pw(p[j], l[j]);
                    }
                }
                v
            })
            .sum()
    }
}

fn rational(n: BigInt, d: BigInt) -> BigRational {
    BigRational::new(n, d)
}

fn int(n: u32) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `H̄(x, x′, p) = ∫₀¹ H(τx + (1−τ)x′, p) dτ`, computed exactly.
///
/// Each `Πⱼ xⱼ^{mⱼ}` expands binomially per dimension with a single shared τ;
/// the τ-integral uses `∫₀¹ τᴷ(1−τ)ᴹ⁻ᴷ dτ = K!(M−K)!/(M+1)!` with `K = Σkⱼ`,
/// `M = Σmⱼ`.
pub fn average_symbol(h: &ClassicalPoly) -> TwoPointSymbol {
    let dims = h.dims();
    let mut out = TwoPointSymbol::zero(dims);
    for (mono, c) in h.terms() {
        let total: u32 = mono.x.iter().sum();
        let denom = factorial(total + 1);
        // enumerate multi-indices k with 0 ≤ kⱼ ≤ mⱼ
        let mut k = vec![0u32; dims];
        loop {
            let kk: u32 = k.iter().sum();
            let mut w = factorial(kk) * factorial(total - kk);
            for j in 0..dims {
                w *= binomial(mono.x[j], k[j]);
            }
            let x_prime = mono.x.iter().zip(&k).map(|(m, kj)| m - kj).collect();
            let term = TwoPointMonomial {
                x: k.clone(),
                x_prime,
                p: mono.p.clone(),
            };
            out.accumulate(term, &(c * rational(w, denom.clone())));

            let mut j = 0;
            while j < dims {
                if k[j] < mono.x[j] {
                    k[j] += 1;
                    break;
                }
                k[j] = 0;
                j += 1;
            }
            if j == dims {
                break;
            }
        }
    }
    out
}

/// Kernel quantization: `xᵃ x′ᵇ pˡ ↦ x̂ᵃ p̂ˡ x̂ᵇ`, the operator whose kernel is
/// `(2πħ)⁻ⁿ ∫ e^{ip(x−x′)/ħ} T(x, x′, p) dp`.
pub fn kernel_quantize(t: &TwoPointSymbol) -> OperatorPoly {
    let dims = t.dims();
    let mut out = OperatorPoly::zero(dims);
    for (m, c) in t.terms() {
        let word = OperatorPoly::x_monomial(&m.x)
            .mul(&OperatorPoly::p_monomial(&m.p))
            .and_then(|w| w.mul(&OperatorPoly::x_monomial(&m.x_prime)))
            .expect("same dims");
        out = out.add(&word.scale_rational(c)).expect("same dims");
    }
    out
}

/// Born–Jordan quantization.
pub fn quantize_bj(h: &ClassicalPoly) -> OperatorPoly {
    kernel_quantize(&average_symbol(h))
}

/// One-dimensional ordering sum `(1/(m+1)) Σₖ x̂ᵏ p̂ˡ x̂ᵐ⁻ᵏ`.
pub fn born_jordan_ordering_sum(m: u32, l: u32) -> OperatorPoly {
    let mut out = OperatorPoly::zero(1);
    for k in 0..=m {
        out = out.add(&ordered_word(1, 0, k, l, m - k)).expect("same dims");
    }
    out.scale_rational(&rational(BigInt::one(), BigInt::from(m + 1)))
}

/// One-dimensional ordering sum `2⁻ᵐ Σₖ C(m,k) x̂ᵏ p̂ˡ x̂ᵐ⁻ᵏ`.
pub fn weyl_ordering_sum(m: u32, l: u32) -> OperatorPoly {
    weyl_factor(1, 0, m, l)
}

/// `x̂ⱼᵃ p̂ⱼˡ x̂ⱼᵇ` embedded in `dims` dimensions.
fn ordered_word(dims: usize, j: usize, a: u32, l: u32, b: u32) -> OperatorPoly {
    OperatorPoly::x_pow(dims, j, a)
        .mul(&OperatorPoly::p_pow(dims, j, l))
        .and_then(|w| w.mul(&OperatorPoly::x_pow(dims, j, b)))
        .expect("same dims")
}

fn weyl_factor(dims: usize, j: usize, m: u32, l: u32) -> OperatorPoly {
    let mut out = OperatorPoly::zero(dims);
    for k in 0..=m {
        let w = ordered_word(dims, j, k, l, m - k)
            .scale_rational(&BigRational::from_integer(binomial(m, k)));
        out = out.add(&w).expect("same dims");
    }
    out.scale_rational(&rational(BigInt::one(), BigInt::one() << m))
}

/// Weyl quantization; factorizes over dimensions because distinct
/// dimensions commute.
pub fn quantize_weyl(h: &ClassicalPoly) -> OperatorPoly {
    let dims = h.dims();
    let mut out = OperatorPoly::zero(dims);
    for (mono, c) in h.terms() {
        let mut op = OperatorPoly::one(dims);
        for j in 0..dims {
            if mono.x[j] == 0 && mono.p[j] == 0 {
                continue;
            }
            op = op.mul(&weyl_factor(dims, j, mono.x[j], mono.p[j])).expect("same dims");
        }
        out = out.add(&op.scale_rational(c)).expect("same dims");
    }
    out
}

/// Symmetric rule `½(X̂P̂ + P̂X̂)` with `X̂`, `P̂` the full position and
/// momentum parts of each monomial.
pub fn quantize_symmetric(h: &ClassicalPoly) -> OperatorPoly {
    let dims = h.dims();
    let half = rational(BigInt::one(), BigInt::from(2));
    let mut out = OperatorPoly::zero(dims);
    for (mono, c) in h.terms() {
        let x = OperatorPoly::x_monomial(&mono.x);
        let p = OperatorPoly::p_monomial(&mono.p);
        let sym = x.mul(&p).unwrap().add(&p.mul(&x).unwrap()).unwrap();
        out = out.add(&sym.scale_rational(&(c * &half))).expect("same dims");
    }
    out
}

/// Which quantization rule to apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    BornJordan,
    Weyl,
    Symmetric,
}

impl Rule {
    pub const ALL: [Rule; 3] = [Rule::BornJordan, Rule::Weyl, Rule::Symmetric];

    pub fn quantize(self, h: &ClassicalPoly) -> OperatorPoly {
        match self {
            Rule::BornJordan => quantize_bj(h),
            Rule::Weyl => quantize_weyl(h),
            Rule::Symmetric => quantize_symmetric(h),
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            Rule::BornJordan => "bj",
            Rule::Weyl => "weyl",
            Rule::Symmetric => "sym",
        }
    }
}

/// Multiplication operator of a position-only polynomial.
pub fn multiplication_operator(f: &ClassicalPoly) -> Result<OperatorPoly> {
    if f.has_momentum() {
        return Err(Error::MomentumDependence(f.to_string()));
    }
    let mut out = OperatorPoly::zero(f.dims());
    for (m, c) in f.terms() {
        out = out.add(&OperatorPoly::term(m.clone(), Coefficient::rational(c.clone())))?;
    }
    Ok(out)
}

fn check_physical(masses: &[BigRational], a: &[ClassicalPoly], v: &ClassicalPoly) -> Result<usize> {
    let dims = v.dims();
    if masses.len() != dims {
        return Err(Error::DimensionMismatch {
            left: dims,
            right: masses.len(),
        });
    }
    if a.len() != dims {
        return Err(Error::DimensionMismatch {
            left: dims,
            right: a.len(),
        });
    }
    if masses.iter().any(|m| m <= &BigRational::zero()) {
        return Err(Error::InvalidArgument("masses must be positive".into()));
    }
    for f in a.iter().chain(std::iter::once(v)) {
        if f.dims() != dims {
            return Err(Error::DimensionMismatch {
                left: dims,
                right: f.dims(),
            });
        }
        if f.has_momentum() {
            return Err(Error::MomentumDependence(f.to_string()));
        }
    }
    Ok(dims)
}

/// Classical `Σⱼ (pⱼ − Aⱼ(x))²/2mⱼ + V(x)`.
pub fn physical_hamiltonian(
    masses: &[BigRational],
    a: &[ClassicalPoly],
    v: &ClassicalPoly,
) -> Result<ClassicalPoly> {
    let dims = check_physical(masses, a, v)?;
    let mut h = v.clone();
    for j in 0..dims {
        let shifted = ClassicalPoly::p(dims, j).sub(&a[j])?;
        let inv = (masses[j].clone() * int(2)).recip();
        h = h.add(&shifted.pow(2).scale(&inv))?;
    }
    Ok(h)
}

/// Born–Jordan quantization of `Σⱼ (pⱼ − Aⱼ(x))²/2mⱼ + V(x)`.
pub fn quantize_physical(
    masses: &[BigRational],
    a: &[ClassicalPoly],
    v: &ClassicalPoly,
) -> Result<OperatorPoly> {
    Ok(quantize_bj(&physical_hamiltonian(masses, a, v)?))
}

/// The operator `Σⱼ (p̂ⱼ − Âⱼ)²/2mⱼ + V̂` built directly in the algebra.
pub fn minimal_coupling_operator(
    masses: &[BigRational],
    a: &[ClassicalPoly],
    v: &ClassicalPoly,
) -> Result<OperatorPoly> {
    let dims = check_physical(masses, a, v)?;
    let mut out = multiplication_operator(v)?;
    for j in 0..dims {
        let shifted = OperatorPoly::p(dims, j).sub(&multiplication_operator(&a[j])?)?;
        let inv = (masses[j].clone() * int(2)).recip();
        out = out.add(&shifted.pow(2).scale_rational(&inv))?;
    }
    Ok(out)
}

/// Weyl − Born–Jordan differences for the squared angular momentum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AngularMomentumReport {
    /// Differences for `ℓₓ²`, `ℓ_y²`, `ℓ_z²`.
    pub components: [Coefficient; 3],
    /// Difference for `ℓ² = ℓₓ² + ℓ_y² + ℓ_z²`.
    pub total: Coefficient,
}

impl AngularMomentumReport {
    pub fn per_component(&self) -> &Coefficient {
        &self.components[0]
    }
}

/// Classical `ℓₓ, ℓ_y, ℓ_z` in three dimensions (x, y, z = dims 0, 1, 2).
pub fn angular_momentum_components() -> [ClassicalPoly; 3] {
    let x = |j| ClassicalPoly::x(3, j);
    let p = |j| ClassicalPoly::p(3, j);
    let cross = |a: usize, b: usize| x(a).mul(&p(b)).unwrap().sub(&x(b).mul(&p(a)).unwrap()).unwrap();
    [cross(1, 2), cross(2, 0), cross(0, 1)]
}

pub fn angular_momentum_report() -> AngularMomentumReport {
    let squares = angular_momentum_components().map(|l| l.pow(2));
    let diff = |h: &ClassicalPoly| {
        quantize_weyl(h)
            .sub(&quantize_bj(h))
            .expect("same dims")
            .as_scalar()
            .expect("Weyl and Born-Jordan differ by a scalar on angular momentum squares")
    };
    let components = [diff(&squares[0]), diff(&squares[1]), diff(&squares[2])];
    let l2 = squares
        .iter()
        .skip(1)
        .fold(squares[0].clone(), |acc, s| acc.add(s).unwrap());
    AngularMomentumReport {
        components,
        total: diff(&l2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opalgebra::GaussianRational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn mono(m: u32, l: u32) -> ClassicalPoly {
        ClassicalPoly::monomial_1d(q(1, 1), m, l)
    }

    fn op(terms: &[(u32, u32, Coefficient)]) -> OperatorPoly {
        terms.iter().fold(OperatorPoly::zero(1), |acc, (a, b, c)| {
            acc.add(&OperatorPoly::term(Monomial::new(vec![*a], vec![*b]), c.clone())).unwrap()
        })
    }

    fn rc(n: i64, d: i64, k: u32) -> Coefficient {
        Coefficient::monomial(GaussianRational::real(q(n, d)), k)
    }

    fn ic(n: i64, d: i64, k: u32) -> Coefficient {
        Coefficient::monomial(GaussianRational::new(q(0, 1), q(n, d)), k)
    }

    fn tp(x: u32, xp: u32, p: u32, c: BigRational) -> TwoPointSymbol {
        TwoPointSymbol::term(
            TwoPointMonomial {
                x: vec![x],
                x_prime: vec![xp],
                p: vec![p],
            },
            c,
        )
    }

    #[test]
    fn average_of_x2p2() {
        let avg = average_symbol(&mono(2, 2));
        let third = q(1, 3);
        let expected = tp(2, 0, 2, third.clone())
            .add(&tp(1, 1, 2, third.clone()))
            .unwrap()
            .add(&tp(0, 2, 2, third))
            .unwrap();
        assert_eq!(avg, expected);
        // ½p²x² → (1/6)p²(x² + xx′ + x′²)
        let half = average_symbol(&ClassicalPoly::monomial_1d(q(1, 2), 2, 2));
        for (_, c) in half.terms() {
            assert_eq!(c, &q(1, 6));
        }
    }

    #[test]
    fn average_of_momentum_only_is_unchanged() {
        assert_eq!(average_symbol(&mono(0, 2)), tp(0, 0, 2, q(1, 1)));
    }

    #[test]
    fn average_of_general_monomial_is_uniform() {
        for m in 0..7 {
            let avg = average_symbol(&mono(m, 3));
            let mut expected = TwoPointSymbol::zero(1);
            for k in 0..=m {
                expected = expected.add(&tp(k, m - k, 3, q(1, m as i64 + 1))).unwrap();
            }
            assert_eq!(avg, expected);
        }
    }

    #[test]
    fn kernel_quantize_x_xprime_p() {
        let t = tp(1, 1, 1, q(1, 1));
        assert_eq!(kernel_quantize(&t), op(&[(2, 1, Coefficient::one()), (1, 0, ic(-1, 1, 1))]));
    }

    #[test]
    fn kernel_quantize_potential_on_diagonal() {
        // V̄ for V = x³ quantizes to multiplication by x³
        let avg = average_symbol(&mono(3, 0));
        assert_eq!(avg.diagonal(), mono(3, 0));
        assert_eq!(kernel_quantize(&avg), OperatorPoly::x_pow(1, 0, 3));
    }

    #[test]
    fn bj_examples() {
        assert_eq!(
            quantize_bj(&mono(2, 2)),
            op(&[(2, 2, Coefficient::one()), (1, 1, ic(-2, 1, 1)), (0, 0, rc(-2, 3, 2))])
        );
        assert_eq!(quantize_bj(&mono(1, 1)), op(&[(1, 1, Coefficient::one()), (0, 0, ic(-1, 2, 1))]));
        assert_eq!(quantize_bj(&mono(3, 1)), op(&[(3, 1, Coefficient::one()), (2, 0, ic(-3, 2, 1))]));
    }

    #[test]
    fn weyl_examples() {
        assert_eq!(
            quantize_weyl(&mono(2, 2)),
            op(&[(2, 2, Coefficient::one()), (1, 1, ic(-2, 1, 1)), (0, 0, rc(-1, 2, 2))])
        );
        assert_eq!(quantize_weyl(&mono(3, 1)), quantize_bj(&mono(3, 1)));
        // y² p_z² with n = 2
        let h = ClassicalPoly::x(2, 0).pow(2).mul(&ClassicalPoly::p(2, 1).pow(2)).unwrap();
        let expected = OperatorPoly::x_pow(2, 0, 2).mul(&OperatorPoly::p_pow(2, 1, 2)).unwrap();
        assert_eq!(quantize_weyl(&h), expected);
        assert_eq!(quantize_bj(&h), expected);
    }

    #[test]
    fn symmetric_examples() {
        assert_eq!(quantize_symmetric(&mono(1, 1)), quantize_bj(&mono(1, 1)));
        assert_eq!(
            quantize_symmetric(&mono(2, 2)),
            op(&[(2, 2, Coefficient::one()), (1, 1, ic(-2, 1, 1)), (0, 0, rc(-1, 1, 2))])
        );
        assert_eq!(quantize_symmetric(&mono(2, 0)), OperatorPoly::x_pow(1, 0, 2));
    }

    #[test]
    fn weyl_minus_bj_on_x2p2() {
        let d = quantize_weyl(&mono(2, 2)).sub(&quantize_bj(&mono(2, 2))).unwrap();
        assert_eq!(d.to_string(), "(1/6)*hbar^2");
    }

    /// Hand derivation for yz·p_y·p_z with a = ŷp̂_y, A = p̂_yŷ, b = ẑp̂_z,
    /// B = p̂_zẑ: Weyl = ¼(a+A)(b+B), BJ = ⅓(ab+AB) + ⅙(aB+Ab), so
    /// Weyl − BJ = (1/12)(a−A)(B−b) = ħ²/12. Hence W − BJ on ℓₓ², which
    /// carries −2·yz·p_y·p_z, equals −ħ²/6.
    #[test]
    fn angular_momentum_differences_from_hand_derivation() {
        let dims = 3;
        let h = ClassicalPoly::x(dims, 1)
            .mul(&ClassicalPoly::x(dims, 2))
            .unwrap()
            .mul(&ClassicalPoly::p(dims, 1))
            .unwrap()
            .mul(&ClassicalPoly::p(dims, 2))
            .unwrap();
        let a = OperatorPoly::from_word(dims, &[(1, false), (1, true)]);
        let big_a = OperatorPoly::from_word(dims, &[(1, true), (1, false)]);
        let b = OperatorPoly::from_word(dims, &[(2, false), (2, true)]);
        let big_b = OperatorPoly::from_word(dims, &[(2, true), (2, false)]);
        let weyl = a.add(&big_a).unwrap().mul(&b.add(&big_b).unwrap()).unwrap().scale_rational(&q(1, 4));
        let bj = a
            .mul(&b)
            .unwrap()
            .add(&big_a.mul(&big_b).unwrap())
            .unwrap()
            .scale_rational(&q(1, 3))
            .add(&a.mul(&big_b).unwrap().add(&big_a.mul(&b).unwrap()).unwrap().scale_rational(&q(1, 6)))
            .unwrap();
        assert_eq!(quantize_weyl(&h), weyl);
        assert_eq!(quantize_bj(&h), bj);
        assert_eq!(weyl.sub(&bj).unwrap().as_scalar().unwrap(), rc(1, 12, 2));

        let report = angular_momentum_report();
        for c in &report.components {
            assert_eq!(c, &rc(-1, 6, 2));
        }
        assert_eq!(report.total, rc(-1, 2, 2));
    }

    /// BJ is covariant under linear point transformations, so for
    /// u = (y+z)/√2 the 2-D BJ of u²p_u² must reproduce the 1-D x²p²
    /// difference ħ²/6. Expanding (y+z)²(p_y+p_z)²/4 ties this to ħ²/12 for
    /// yz·p_y·p_z and confirms its sign.
    #[test]
    fn rotated_coordinate_consistency() {
        let dims = 2;
        let s = ClassicalPoly::x(dims, 0).add(&ClassicalPoly::x(dims, 1)).unwrap();
        let ps = ClassicalPoly::p(dims, 0).add(&ClassicalPoly::p(dims, 1)).unwrap();
        let h = s.pow(2).mul(&ps.pow(2)).unwrap().scale(&q(1, 4));
        let d = quantize_weyl(&h).sub(&quantize_bj(&h)).unwrap();
        assert_eq!(d.as_scalar().unwrap(), rc(1, 6, 2));
    }

    #[test]
    fn commuting_factor_difference_vanishes() {
        let h = ClassicalPoly::x(3, 1).pow(2).mul(&ClassicalPoly::p(3, 2).pow(2)).unwrap();
        assert!(quantize_weyl(&h).sub(&quantize_bj(&h)).unwrap().is_zero());
    }

    #[test]
    fn physical_examples() {
        let one = vec![q(1, 1)];
        // BJ(p·x²) = ½(p̂x̂² + x̂²p̂) = x̂²p̂ − iħx̂
        let pa = ClassicalPoly::p(1, 0).mul(&mono(2, 0)).unwrap();
        assert_eq!(quantize_bj(&pa), op(&[(2, 1, Coefficient::one()), (1, 0, ic(-1, 1, 1))]));

        let a = vec![mono(2, 0)];
        let v = ClassicalPoly::zero(1);
        let h = physical_hamiltonian(&one, &a, &v).unwrap();
        assert_eq!(quantize_physical(&one, &a, &v).unwrap(), quantize_weyl(&h));
        assert_eq!(
            quantize_physical(&one, &a, &v).unwrap(),
            minimal_coupling_operator(&one, &a, &v).unwrap()
        );

        let quartic = mono(4, 0);
        let free_a = vec![ClassicalPoly::zero(1)];
        let expected = OperatorPoly::p_pow(1, 0, 2)
            .scale_rational(&q(1, 2))
            .add(&OperatorPoly::x_pow(1, 0, 4))
            .unwrap();
        assert_eq!(quantize_physical(&one, &free_a, &quartic).unwrap(), expected);
    }

    #[test]
    fn physical_rejects_momentum_in_potentials() {
        let one = vec![q(1, 1)];
        let bad = vec![ClassicalPoly::p(1, 0)];
        assert!(matches!(
            quantize_physical(&one, &bad, &ClassicalPoly::zero(1)),
            Err(Error::MomentumDependence(_))
        ));
        let a = vec![ClassicalPoly::zero(1)];
        assert!(quantize_physical(&one, &a, &mono(1, 1)).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_classical(dims: usize, max_exp: u32) -> impl Strategy<Value = ClassicalPoly> {
            let term = (
                proptest::collection::vec(0..=max_exp, dims),
                proptest::collection::vec(0..=max_exp, dims),
                -4i64..5,
                1i64..4,
            );
            proptest::collection::vec(term, 0..4).prop_map(move |ts| {
                ts.into_iter().fold(ClassicalPoly::zero(dims), |acc, (x, p, n, d)| {
                    acc.add(&ClassicalPoly::term(Monomial::new(x, p), q(n, d))).unwrap()
                })
            })
        }

        fn arb_position(dims: usize) -> impl Strategy<Value = ClassicalPoly> {
            arb_classical(dims, 3).prop_map(move |h| {
                let mut out = ClassicalPoly::zero(dims);
                for (m, c) in h.terms() {
                    out.accumulate(Monomial::new(m.x.clone(), vec![0; dims]), c);
                }
                out
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]

            #[test]
            fn rules_are_linear(h1 in arb_classical(2, 2), h2 in arb_classical(2, 2), a in -3i64..4, b in -3i64..4) {
                let (qa, qb) = (q(a, 2), q(b, 3));
                let combo = h1.scale(&qa).add(&h2.scale(&qb)).unwrap();
                for rule in Rule::ALL {
                    let lhs = rule.quantize(&combo);
                    let rhs = rule.quantize(&h1).scale_rational(&qa)
                        .add(&rule.quantize(&h2).scale_rational(&qb)).unwrap();
                    prop_assert_eq!(lhs, rhs);
                }
            }

            #[test]
            fn real_observables_give_self_adjoint_operators(h in arb_classical(2, 2)) {
                for rule in Rule::ALL {
                    let op = rule.quantize(&h);
                    prop_assert_eq!(op.adjoint(), op);
                }
            }

            #[test]
            fn averaged_symbol_restricts_to_original(h in arb_classical(3, 3)) {
                prop_assert_eq!(average_symbol(&h).diagonal(), h);
            }

            #[test]
            fn momentum_times_position_function_is_symmetric(f in arb_position(3), j in 0usize..3) {
                let pf = ClassicalPoly::p(3, j).mul(&f).unwrap();
                let fop = multiplication_operator(&f).unwrap();
                let pj = OperatorPoly::p(3, j);
                let sym = pj.mul(&fop).unwrap().add(&fop.mul(&pj).unwrap()).unwrap().scale_rational(&q(1, 2));
                prop_assert_eq!(quantize_bj(&pf), sym.clone());
                prop_assert_eq!(quantize_weyl(&pf), sym);
            }
        }
    }
}
