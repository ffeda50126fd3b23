use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::grid::Grid1D;

/// Entries below this fraction of the largest are dropped (treated as zero)
/// when building grid kernels.
pub(crate) const BAND_CUTOFF: f64 = 1e-14;

/// Continuum free kernel `√(m/2πiħt) exp(i m (x−x′)²/2ħt)`, with `√(1/i) = e^{−iπ/4}`.
pub fn free_kernel(x: f64, x_prime: f64, t: f64, mass: f64, hbar: f64) -> Complex64 {
    let amp = (mass / (2.0 * PI * hbar * t)).sqrt();
    let d = x - x_prime;
    Complex64::from_polar(amp, mass * d * d / (2.0 * hbar * t) - PI / 4.0)
}

/// `exp(−iĤ₀t/ħ)` for the finite-difference kinetic operator with Dirichlet
/// ends, from its closed-form sine eigenbasis.
#[derive(Clone, Debug)]
pub struct GridFreePropagator {
    grid: Grid1D,
    hbar: f64,
    basis: DMatrix<f64>,
    energies: DVector<f64>,
}

impl GridFreePropagator {
    pub fn new(grid: Grid1D, mass: f64, hbar: f64) -> Self {
        let n = grid.n_points();
        let np1 = (n + 1) as f64;
        let scale = (2.0 / np1).sqrt();
        let basis = DMatrix::from_fn(n, n, |i, k| scale * (((i + 1) * (k + 1)) as f64 * PI / np1).sin());
        let dx = grid.dx();
        let c = hbar * hbar / (2.0 * mass * dx * dx);
        let energies = DVector::from_fn(n, |k, _| c * (2.0 - 2.0 * ((k + 1) as f64 * PI / np1).cos()));
        GridFreePropagator {
            grid,
            hbar,
            basis,
            energies,
        }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    /// The unitary `exp(−iĤ₀t/ħ)`.
    pub fn operator(&self, t: f64) -> DMatrix<Complex64> {
        spectral_exponential(&self.basis, &self.energies, t / self.hbar)
    }
}

/// `U diag(e^{−iλₖs}) Uᵀ` for a real orthogonal `U`, as `C − iS` with two real products.
pub(crate) fn spectral_exponential(u: &DMatrix<f64>, lambda: &DVector<f64>, s: f64) -> DMatrix<Complex64> {
    let mut uc = u.clone();
    let mut us = u.clone();
    for (k, l) in lambda.iter().enumerate() {
        let (sin, cos) = (l * s).sin_cos();
        uc.column_mut(k).scale_mut(cos);
        us.column_mut(k).scale_mut(sin);
    }
    let c = &uc * u.transpose();
    let sm = &us * u.transpose();
    DMatrix::from_fn(u.nrows(), u.nrows(), |i, j| Complex64::new(c[(i, j)], -sm[(i, j)]))
}

/// Zeroes entries below `BAND_CUTOFF · max|a|` and returns the index band
/// `(lo, hi)` of retained entries for each column.
pub(crate) fn truncate_band(a: &mut DMatrix<Complex64>) -> Vec<(usize, usize)> {
    let max = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let floor = BAND_CUTOFF * max;
    let n = a.nrows();
    let mut band = Vec::with_capacity(a.ncols());
    for j in 0..a.ncols() {
        let mut lo = n;
        let mut hi = 0;
        for i in 0..n {
            if a[(i, j)].norm() < floor {
                a[(i, j)] = Complex64::new(0.0, 0.0);
            } else {
                lo = lo.min(i);
                hi = hi.max(i);
            }
        }
        band.push((lo.min(j), hi.max(j)));
    }
    band
}
