use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Uniform grid of `n_points` interior nodes of `[x_min, x_max]`; the wave
/// function vanishes at both ends, so `dx = (x_max − x_min)/(n_points + 1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid1D {
    x_min: f64,
    x_max: f64,
    n_points: usize,
}

impl Grid1D {
    pub const MIN_POINTS: usize = 16;

    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "grid needs x_max > x_min, got [{x_min}, {x_max}]"
            )));
        }
        if n_points < Self::MIN_POINTS {
            return Err(Error::InvalidArgument(format!(
                "grid needs at least {} points, got {n_points}",
                Self::MIN_POINTS
            )));
        }
        Ok(Grid1D {
            x_min,
            x_max,
            n_points,
        })
    }

    /// `[−8, 8]` with 512 points.
    pub fn standard() -> Self {
        Grid1D::new(-8.0, 8.0, 512).unwrap()
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points + 1) as f64
    }

    /// Node `i`; indices `-1` and `n_points` give the boundary points.
    pub fn point(&self, i: isize) -> f64 {
        self.x_min + (i + 1) as f64 * self.dx()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points as isize).map(|i| self.point(i)).collect()
    }

    pub(crate) fn check_same(&self, other: &Grid1D) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WaveFunction {
    grid: Grid1D,
    values: Vec<Complex64>,
}

impl WaveFunction {
    pub fn new(grid: Grid1D, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::DimensionMismatch {
                left: grid.n_points(),
                right: values.len(),
            });
        }
        Ok(WaveFunction { grid, values })
    }

    pub fn from_fn<F: FnMut(f64) -> Complex64>(grid: Grid1D, mut f: F) -> Self {
        let values = grid.points().into_iter().map(&mut f).collect();
        WaveFunction { grid, values }
    }

    /// `(πσ²)^{-1/4} exp(−(x−x₀)²/2σ² + ik₀x)`.
    pub fn gaussian(grid: Grid1D, x0: f64, sigma: f64, k0: f64) -> Self {
        let norm = (PI * sigma * sigma).powf(-0.25);
        Self::from_fn(grid, |x| {
            let d = (x - x0) / sigma;
            Complex64::from_polar(norm * (-0.5 * d * d).exp(), k0 * x)
        })
    }

    /// The unit Gaussian `π^{-1/4} e^{−x²/2}`.
    pub fn standard(grid: Grid1D) -> Self {
        Self::gaussian(grid, 0.0, 1.0, 0.0)
    }

    /// Oscillator ground state `(mω/πħ)^{1/4} exp(−mωx²/2ħ)`.
    pub fn ho_ground_state(grid: Grid1D, mass: f64, omega: f64, hbar: f64) -> Self {
        Self::gaussian(grid, 0.0, (hbar / (mass * omega)).sqrt(), 0.0)
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// `⟨self, other⟩ = Σ conj(ψᵢ) φᵢ dx`.
    pub fn inner(&self, other: &WaveFunction) -> Result<Complex64> {
        self.grid.check_same(&other.grid)?;
        let s: Complex64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(s * self.grid.dx())
    }

    pub fn norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dx()).sqrt()
    }

    /// L² distance `‖self − other‖`.
    pub fn distance(&self, other: &WaveFunction) -> Result<f64> {
        self.grid.check_same(&other.grid)?;
        let s: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        Ok((s * self.grid.dx()).sqrt())
    }

    /// `|⟨self, other⟩|² / (‖self‖²‖other‖²)`.
    pub fn fidelity(&self, other: &WaveFunction) -> Result<f64> {
        let ov = self.inner(other)?;
        Ok(ov.norm_sqr() / (self.norm().powi(2) * other.norm().powi(2)))
    }
}
