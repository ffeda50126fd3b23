//! Potentials `V(x)` shared by the classical and propagator modules.

use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::quantizer::{average_symbol, ClassicalPoly, NumericPoly, NumericTwoPoint};

type PotentialFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Repr {
    Polynomial {
        poly: ClassicalPoly,
        value: NumericPoly,
        gradient: Vec<NumericPoly>,
        average: NumericTwoPoint,
    },
    Callable(PotentialFn),
}

/// A real potential: either an exact polynomial in `x` or an arbitrary callable.
#[derive(Clone)]
pub struct Potential {
    dims: usize,
    label: String,
    repr: Repr,
}

impl Potential {
    pub fn polynomial(poly: ClassicalPoly) -> Result<Self> {
        if poly.has_momentum() {
            return Err(Error::MomentumDependence(poly.to_string()));
        }
        let dims = poly.dims();
        Ok(Potential {
            dims,
            label: poly.to_string(),
            repr: Repr::Polynomial {
                value: poly.compile(),
                gradient: (0..dims).map(|j| poly.d_dx(j).compile()).collect(),
                average: average_symbol(&poly).compile(),
                poly,
            },
        })
    }

    pub fn callable<F>(dims: usize, label: impl Into<String>, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Potential {
            dims,
            label: label.into(),
            repr: Repr::Callable(Arc::new(f)),
        }
    }

    pub fn zero(dims: usize) -> Self {
        Self::polynomial(ClassicalPoly::zero(dims)).expect("zero has no momentum")
    }

    /// `½ m ω² x²` in one dimension.
    pub fn harmonic(mass: f64, omega: f64) -> Self {
        let c = BigRational::from_float(0.5 * mass * omega * omega).expect("finite coefficients");
        let mut p = Self::polynomial(ClassicalPoly::monomial_1d(c, 2, 0)).expect("position only");
        p.label = "ho".into();
        p
    }

    /// `x⁴` in one dimension.
    pub fn quartic() -> Self {
        let one = BigRational::from_integer(1.into());
        let mut p = Self::polynomial(ClassicalPoly::monomial_1d(one, 4, 0)).expect("position only");
        p.label = "quartic".into();
        p
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn as_polynomial(&self) -> Option<&ClassicalPoly> {
        match &self.repr {
            Repr::Polynomial { poly, .. } => Some(poly),
            Repr::Callable(_) => None,
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        match &self.repr {
            Repr::Polynomial { value, .. } => value.eval(x, &[]),
            Repr::Callable(f) => f(x),
        }
    }

    /// `∇V` into `out`: exact for polynomials, central differences otherwise.
    pub fn gradient(&self, x: &[f64], out: &mut [f64]) {
        match &self.repr {
            Repr::Polynomial { gradient, .. } => {
                for (o, g) in out.iter_mut().zip(gradient) {
                    *o = g.eval(x, &[]);
                }
            }
            Repr::Callable(f) => {
                let mut probe = x.to_vec();
                for j in 0..x.len() {
                    let h = 1e-5 * x[j].abs().max(1.0);
                    probe[j] = x[j] + h;
                    let up = f(&probe);
                    probe[j] = x[j] - h;
                    let down = f(&probe);
                    probe[j] = x[j];
                    out[j] = (up - down) / (2.0 * h);
                }
            }
        }
    }

    /// `V̄(x, x′) = ∫₀¹ V(τx + (1−τ)x′) dτ`: exact term rule for polynomials,
    /// 16-node Gauss–Legendre for callables.
    pub fn segment_average(&self, x: &[f64], x_prime: &[f64]) -> f64 {
        match &self.repr {
            Repr::Polynomial { average, .. } => average.eval(x, x_prime, &[]),
            Repr::Callable(f) => {
                let mut point = vec![0.0; x.len()];
                GaussLegendre::sixteen().integrate(0.0, 1.0, |tau| {
                    for j in 0..x.len() {
                        point[j] = tau * x[j] + (1.0 - tau) * x_prime[j];
                    }
                    f(&point)
                })
            }
        }
    }
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Potential")
            .field("dims", &self.dims)
            .field("label", &self.label)
            .finish()
    }
}
