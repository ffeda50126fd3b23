use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use super::free::spectral_exponential;
use super::grid::{Grid1D, WaveFunction};
use super::{KernelKind, KernelMatrix};
use crate::error::{Error, Result};
use crate::potential::Potential;

/// Reference dynamics `exp(−iĤt/ħ)` for `Ĥ = −ħ²/2m D₂ + diag(V)` with
/// second-order central differences and Dirichlet ends. The eigen
/// decomposition is computed once.
#[derive(Clone, Debug)]
pub struct ExactEvolver {
    grid: Grid1D,
    hbar: f64,
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
}

impl ExactEvolver {
    pub fn new(grid: Grid1D, mass: f64, potential: &Potential, hbar: f64) -> Result<Self> {
        if potential.dims() != 1 {
            return Err(Error::DimensionMismatch {
                left: 1,
                right: potential.dims(),
            });
        }
        let n = grid.n_points();
        let dx = grid.dx();
        let c = hbar * hbar / (2.0 * mass * dx * dx);
        let mut h = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            let v = potential.value(&[grid.point(i as isize)]);
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    at: grid.point(i as isize),
                });
            }
            h[(i, i)] = 2.0 * c + v;
            if i + 1 < n {
                h[(i, i + 1)] = -c;
                h[(i + 1, i)] = -c;
            }
        }
        let eig = SymmetricEigen::new(h);
        Ok(ExactEvolver {
            grid,
            hbar,
            eigenvalues: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
        })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    /// Eigenvalues of the discretized Hamiltonian, ascending.
    pub fn energies(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self.eigenvalues.iter().copied().collect();
        e.sort_by(f64::total_cmp);
        e
    }

    /// `exp(−iĤt/ħ) ψ` without forming the full matrix.
    pub fn evolve(&self, psi: &WaveFunction, t: f64) -> Result<WaveFunction> {
        self.grid.check_same(psi.grid())?;
        let u = &self.eigenvectors;
        let n = self.grid.n_points();
        let re = DVector::from_iterator(n, psi.values().iter().map(|z| z.re));
        let im = DVector::from_iterator(n, psi.values().iter().map(|z| z.im));
        let cr = u.tr_mul(&re);
        let ci = u.tr_mul(&im);
        let mut ar = DVector::zeros(n);
        let mut ai = DVector::zeros(n);
        for k in 0..n {
            let phase = Complex64::from_polar(1.0, -self.eigenvalues[k] * t / self.hbar);
            let z = phase * Complex64::new(cr[k], ci[k]);
            ar[k] = z.re;
            ai[k] = z.im;
        }
        let out_r = u * ar;
        let out_i = u * ai;
        WaveFunction::new(
            self.grid,
            (0..n).map(|i| Complex64::new(out_r[i], out_i[i])).collect(),
        )
    }

    /// The unitary matrix `exp(−iĤt/ħ)`.
    pub fn operator(&self, t: f64) -> DMatrix<Complex64> {
        spectral_exponential(&self.eigenvectors, &self.eigenvalues, t / self.hbar)
    }

    /// The operator as an integral kernel (divided by `dx`).
    pub fn kernel(&self, t: f64) -> Result<KernelMatrix> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::InvalidArgument(format!("t must be non-negative, got {t}")));
        }
        let inv_dx = 1.0 / self.grid.dx();
        Ok(KernelMatrix::new(
            self.grid,
            t,
            KernelKind::Exact,
            self.operator(t).map(|z| z * inv_dx),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oscillator_spectrum() {
        let ev = ExactEvolver::new(Grid1D::standard(), 1.0, &Potential::harmonic(1.0, 1.0), 1.0).unwrap();
        let e = ev.energies();
        for (k, ek) in e.iter().take(4).enumerate() {
            assert!((ek - (k as f64 + 0.5)).abs() < 1e-3, "level {k}: {ek}");
        }
    }

    #[test]
    fn evolve_matches_operator() {
        let grid = Grid1D::new(-6.0, 6.0, 96).unwrap();
        let ev = ExactEvolver::new(grid, 1.0, &Potential::quartic(), 1.0).unwrap();
        let psi = WaveFunction::gaussian(grid, 0.5, 0.7, 1.0);
        let a = ev.evolve(&psi, 0.4).unwrap();
        let u = ev.operator(0.4);
        let v = DVector::from_column_slice(psi.values());
        let b = u * v;
        for i in 0..96 {
            assert!((a.values()[i] - b[i]).norm() < 1e-12);
        }
        assert!((a.norm() - psi.norm()).abs() < 1e-12);
    }
}
