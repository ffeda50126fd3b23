//! Short-time propagators on a 1D grid and wave-function convergence studies.
//!
//! Grid kernels share one construction: the exact finite-difference free
//! propagator `F = exp(−iĤ₀t/ħ)` times a pointwise modulation `M(x, x′)`,
//! `K = F ∘ M / dx`. For the Kerner–Sutcliffe and midpoint kernels
//! `M = exp(−iV_eff(x, x′)t/ħ)`; for Van Vleck `M = √(ρt/m) exp(iR/ħ)` with
//! `R = S − m(x−x′)²/2t`. The continuum free kernel cannot be sampled on the
//! grid at small `t` (its phase oscillates faster than `dx` resolves), while
//! `F` is its band-limited counterpart.

mod exact;
mod free;
mod grid;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub use exact::ExactEvolver;
pub use free::{free_kernel, GridFreePropagator};
pub use grid::{Grid1D, WaveFunction};

use crate::convergence::{ConvergenceReport, Sample, SkippedSample};
use crate::error::{Error, Result};
use crate::hamilton::{two_point_action_from, BvpOptions, HamiltonianKind, HamiltonianSpec};
use crate::potential::Potential;

/// `V̄(x, x′)`, the average of `V` over the segment `[x′, x]`.
pub fn vbar(v: &Potential, x: f64, x_prime: f64) -> f64 {
    v.segment_average(&[x], &[x_prime])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KernelKind {
    Ks,
    VanVleck,
    Midpoint1,
    Midpoint2,
    Exact,
}

impl KernelKind {
    pub fn label(self) -> &'static str {
        match self {
            KernelKind::Ks => "ks",
            KernelKind::VanVleck => "vv",
            KernelKind::Midpoint1 => "mid1",
            KernelKind::Midpoint2 => "mid2",
            KernelKind::Exact => "exact",
        }
    }
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A two-point kernel `K(xᵢ, xⱼ, t)` sampled on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelMatrix {
    grid: Grid1D,
    t: f64,
    kind: KernelKind,
    entries: DMatrix<Complex64>,
}

impl KernelMatrix {
    pub(crate) fn new(grid: Grid1D, t: f64, kind: KernelKind, entries: DMatrix<Complex64>) -> Self {
        KernelMatrix {
            grid,
            t,
            kind,
            entries,
        }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `max |K(xᵢ,xⱼ) − K(xⱼ,xᵢ)|`.
    pub fn max_asymmetry(&self) -> f64 {
        (&self.entries - self.entries.transpose())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// Which pointwise potential replaces `V̄` in a midpoint kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MidpointRule {
    /// `½(V(x) + V(x′))`
    EndpointAverage,
    /// `V(½(x + x′))`
    Midpoint,
}

impl MidpointRule {
    pub fn from_variant(variant: u8) -> Result<Self> {
        match variant {
            1 => Ok(MidpointRule::EndpointAverage),
            2 => Ok(MidpointRule::Midpoint),
            v => Err(Error::InvalidArgument(format!("midpoint variant must be 1 or 2, got {v}"))),
        }
    }
}

type ActionFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Method {
    Ks,
    Midpoint(MidpointRule),
    VanVleck { h: HamiltonianSpec, opts: BvpOptions, max_step: f64 },
    VanVleckClosedForm(ActionFn),
    Exact,
}

/// Recipe for a kernel family `t ↦ K(·, ·, t)` on a fixed grid.
#[derive(Clone)]
pub struct KernelBuilder {
    grid: Grid1D,
    mass: f64,
    hbar: f64,
    potential: Potential,
    method: Method,
}

fn check_physical(mass: f64, hbar: f64, potential: &Potential) -> Result<()> {
    if !(mass > 0.0) || !(hbar > 0.0) {
        return Err(Error::InvalidArgument("mass and hbar must be positive".into()));
    }
    if potential.dims() != 1 {
        return Err(Error::DimensionMismatch {
            left: 1,
            right: potential.dims(),
        });
    }
    Ok(())
}

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("t must be positive, got {t}")));
    }
    Ok(())
}

impl KernelBuilder {
    /// Kerner–Sutcliffe: `V̄(x, x′)` in the action.
    pub fn ks(grid: Grid1D, mass: f64, potential: Potential, hbar: f64) -> Result<Self> {
        check_physical(mass, hbar, &potential)?;
        Ok(KernelBuilder {
            grid,
            mass,
            hbar,
            potential,
            method: Method::Ks,
        })
    }

    pub fn midpoint(grid: Grid1D, mass: f64, potential: Potential, hbar: f64, rule: MidpointRule) -> Result<Self> {
        check_physical(mass, hbar, &potential)?;
        Ok(KernelBuilder {
            grid,
            mass,
            hbar,
            potential,
            method: Method::Midpoint(rule),
        })
    }

    /// Van Vleck with actions from shooting. Trajectories use RK4 steps no
    /// longer than `1e-3`; see [`KernelBuilder::with_max_step`].
    pub fn van_vleck(h: HamiltonianSpec, grid: Grid1D) -> Result<Self> {
        let (mass, potential) = match h.kind() {
            HamiltonianKind::KineticPlusPotential { masses, potential } if masses.len() == 1 => {
                (masses[0], potential.clone())
            }
            _ => {
                return Err(Error::InvalidArgument(
                    "grid Van Vleck kernel needs a one-dimensional kinetic-plus-potential Hamiltonian".into(),
                ))
            }
        };
        let hbar = h.hbar();
        check_physical(mass, hbar, &potential)?;
        Ok(KernelBuilder {
            grid,
            mass,
            hbar,
            potential,
            method: Method::VanVleck {
                h,
                opts: BvpOptions::default(),
                max_step: 1e-3,
            },
        })
    }

    /// Van Vleck with a known action `S(x, x′, t)`; `potential` defines the
    /// reference dynamics.
    pub fn van_vleck_closed_form<F>(grid: Grid1D, mass: f64, potential: Potential, hbar: f64, action: F) -> Result<Self>
    where
        F: Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
    {
        check_physical(mass, hbar, &potential)?;
        Ok(KernelBuilder {
            grid,
            mass,
            hbar,
            potential,
            method: Method::VanVleckClosedForm(Arc::new(action)),
        })
    }

    pub fn exact(grid: Grid1D, mass: f64, potential: Potential, hbar: f64) -> Result<Self> {
        check_physical(mass, hbar, &potential)?;
        Ok(KernelBuilder {
            grid,
            mass,
            hbar,
            potential,
            method: Method::Exact,
        })
    }

    /// Shooting settings for a Van Vleck builder; ignored for other kinds.
    pub fn with_bvp_options(mut self, new_opts: BvpOptions, new_max_step: f64) -> Self {
        if let Method::VanVleck { opts, max_step, .. } = &mut self.method {
            *opts = new_opts;
            *max_step = new_max_step;
        }
        self
    }

    pub fn with_max_step(self, max_step: f64) -> Self {
        let opts = match &self.method {
            Method::VanVleck { opts, .. } => *opts,
            _ => return self,
        };
        self.with_bvp_options(opts, max_step)
    }

    pub fn kind(&self) -> KernelKind {
        match self.method {
            Method::Ks => KernelKind::Ks,
            Method::Midpoint(MidpointRule::EndpointAverage) => KernelKind::Midpoint1,
            Method::Midpoint(MidpointRule::Midpoint) => KernelKind::Midpoint2,
            Method::VanVleck { .. } | Method::VanVleckClosedForm(_) => KernelKind::VanVleck,
            Method::Exact => KernelKind::Exact,
        }
    }

    pub fn label(&self) -> &'static str {
        self.kind().label()
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    /// The numerically exact evolver for this builder's dynamics.
    pub fn reference(&self) -> Result<ExactEvolver> {
        ExactEvolver::new(self.grid, self.mass, &self.potential, self.hbar)
    }

    fn effective_potential(&self, x: f64, x_prime: f64) -> f64 {
        match self.method {
            Method::Midpoint(MidpointRule::EndpointAverage) => {
                0.5 * (self.potential.value(&[x]) + self.potential.value(&[x_prime]))
            }
            Method::Midpoint(MidpointRule::Midpoint) => self.potential.value(&[0.5 * (x + x_prime)]),
            _ => vbar(&self.potential, x, x_prime),
        }
    }

    /// The continuum kernel at one point, `K(x, x′, t)`.
    pub fn entry(&self, x: f64, x_prime: f64, t: f64) -> Result<Complex64> {
        check_t(t)?;
        let free = free_kernel(x, x_prime, t, self.mass, self.hbar);
        match &self.method {
            Method::Ks | Method::Midpoint(_) => {
                Ok(free * Complex64::from_polar(1.0, -self.effective_potential(x, x_prime) * t / self.hbar))
            }
            Method::VanVleck { .. } | Method::VanVleckClosedForm(_) => {
                let d = self.grid.dx();
                let mut r = [[0.0; 3]; 3];
                for (a, row) in r.iter_mut().enumerate() {
                    let xi = x + (a as f64 - 1.0) * d;
                    let mut guess = None;
                    for (b, cell) in row.iter_mut().enumerate() {
                        let xj = x_prime + (b as f64 - 1.0) * d;
                        let (s, p0) = self.solve_action(xi, xj, t, guess)?;
                        guess = p0;
                        *cell = s - self.mass * (xi - xj).powi(2) / (2.0 * t);
                    }
                }
                let mixed = (r[2][2] - r[2][0] - r[0][2] + r[0][0]) / (4.0 * d * d);
                let rho = self.mass / t - mixed;
                if !(rho > 0.0) {
                    return Err(caustic(x, x_prime, t, rho));
                }
                Ok(free * Complex64::from_polar((rho * t / self.mass).sqrt(), r[1][1] / self.hbar))
            }
            Method::Exact => Err(Error::InvalidArgument(
                "the exact reference has no pointwise closed form".into(),
            )),
        }
    }

    fn solve_action(&self, x: f64, x_prime: f64, t: f64, guess: Option<f64>) -> Result<(f64, Option<f64>)> {
        match &self.method {
            Method::VanVleckClosedForm(s) => Ok((s(x, x_prime, t), None)),
            Method::VanVleck { h, opts, max_step } => {
                let o = BvpOptions {
                    steps: rk4_steps(t, *max_step),
                    ..*opts
                };
                let g = guess.unwrap_or(self.mass * (x - x_prime) / t);
                let sol = two_point_action_from(h, &[x], &[x_prime], t, &[g], &o)?;
                if !sol.converged {
                    return Err(crate::hamilton::bvp_failure(&[x], &[x_prime], t, &sol));
                }
                Ok((sol.action, Some(sol.p0[0])))
            }
            _ => unreachable!("actions are only solved for Van Vleck kernels"),
        }
    }

    pub fn build(&self, t: f64) -> Result<KernelMatrix> {
        if let Method::Exact = self.method {
            return self.reference()?.kernel(t);
        }
        check_t(t)?;
        let mut f = GridFreePropagator::new(self.grid, self.mass, self.hbar).operator(t);
        let band = free::truncate_band(&mut f);
        let inv_dx = 1.0 / self.grid.dx();
        let n = self.grid.n_points();
        match &self.method {
            Method::Ks | Method::Midpoint(_) => {
                for (j, &(lo, hi)) in band.iter().enumerate() {
                    let xj = self.grid.point(j as isize);
                    for i in lo..=hi {
                        let xi = self.grid.point(i as isize);
                        let phase = -self.effective_potential(xi, xj) * t / self.hbar;
                        f[(i, j)] *= Complex64::from_polar(inv_dx, phase);
                    }
                }
            }
            Method::VanVleck { .. } | Method::VanVleckClosedForm(_) => {
                let r = self.reduced_actions(t, &band)?;
                let d = self.grid.dx();
                let w = n + 2;
                let at = |i: usize, j: usize| r[i * w + j];
                for (j, &(lo, hi)) in band.iter().enumerate() {
                    for i in lo..=hi {
                        // shifted by one for the boundary row/column
                        let (ie, je) = (i + 1, j + 1);
                        let mixed =
                            (at(ie + 1, je + 1) - at(ie + 1, je - 1) - at(ie - 1, je + 1) + at(ie - 1, je - 1)) / (4.0 * d * d);
                        let rho = self.mass / t - mixed;
                        let (xi, xj) = (self.grid.point(i as isize), self.grid.point(j as isize));
                        if !(rho > 0.0) {
                            return Err(caustic(xi, xj, t, rho));
                        }
                        let m = Complex64::from_polar((rho * t / self.mass).sqrt() * inv_dx, at(ie, je) / self.hbar);
                        f[(i, j)] *= m;
                    }
                }
            }
            Method::Exact => unreachable!(),
        }
        let kernel = KernelMatrix::new(self.grid, t, self.kind(), f);
        if !kernel.is_finite() {
            return Err(Error::NonFinite { at: t });
        }
        Ok(kernel)
    }

    /// `R = S − m(x−x′)²/2t` on the grid extended by the boundary nodes,
    /// wherever the band (widened by one) needs it. Row-major `(n+2)²`,
    /// NaN where not computed.
    fn reduced_actions(&self, t: f64, band: &[(usize, usize)]) -> Result<Vec<f64>> {
        let n = self.grid.n_points();
        let w = n + 2;
        let mut r = vec![f64::NAN; w * w];
        for je in 0..w {
            // columns j−1, j, j+1 of the real grid that touch this extended column
            let mut lo = usize::MAX;
            let mut hi = 0;
            for j in je.saturating_sub(2)..=je.min(n - 1) {
                if j + 2 < je {
                    continue;
                }
                let (l, h) = band[j];
                lo = lo.min(l);
                hi = hi.max(h + 2);
            }
            let hi = hi.min(w - 1);
            let xj = self.grid.point(je as isize - 1);
            let start = je.clamp(lo, hi);
            let mut solve_run = |rows: &mut dyn Iterator<Item = usize>| -> Result<()> {
                let mut prev: Vec<f64> = Vec::new();
                for ie in rows {
                    let xi = self.grid.point(ie as isize - 1);
                    let guess = match prev.len() {
                        0 => None,
                        1 => Some(prev[0]),
                        k => Some(2.0 * prev[k - 1] - prev[k - 2]),
                    };
                    let (s, p0) = self.solve_action(xi, xj, t, guess)?;
                    if let Some(p) = p0 {
                        prev.push(p);
                    }
                    r[ie * w + je] = s - self.mass * (xi - xj).powi(2) / (2.0 * t);
                }
                Ok(())
            };
            solve_run(&mut (start..=hi))?;
            solve_run(&mut (lo..start).rev())?;
        }
        Ok(r)
    }
}

fn rk4_steps(t: f64, max_step: f64) -> usize {
    ((t / max_step).ceil() as usize).max(16)
}

fn caustic(x: f64, x_prime: f64, t: f64, rho: f64) -> Error {
    Error::BoundaryValue {
        x: vec![x],
        x_prime: vec![x_prime],
        t,
        reason: format!("Van Vleck density {rho:e} is not positive"),
    }
}

impl fmt::Debug for KernelBuilder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KernelBuilder")
            .field("kind", &self.kind())
            .field("grid", &self.grid)
            .field("mass", &self.mass)
            .field("hbar", &self.hbar)
            .field("potential", &self.potential)
            .finish()
    }
}

pub fn ks_kernel(grid: Grid1D, t: f64, mass: f64, v: &Potential, hbar: f64) -> Result<KernelMatrix> {
    KernelBuilder::ks(grid, mass, v.clone(), hbar)?.build(t)
}

pub fn midpoint_kernel(grid: Grid1D, t: f64, mass: f64, v: &Potential, hbar: f64, variant: u8) -> Result<KernelMatrix> {
    KernelBuilder::midpoint(grid, mass, v.clone(), hbar, MidpointRule::from_variant(variant)?)?.build(t)
}

pub fn vanvleck_kernel(h: &HamiltonianSpec, grid: Grid1D, t: f64, hbar: f64) -> Result<KernelMatrix> {
    KernelBuilder::van_vleck(h.clone().with_hbar(hbar)?, grid)?.build(t)
}

pub fn exact_reference(grid: Grid1D, mass: f64, v: &Potential, hbar: f64, t: f64) -> Result<KernelMatrix> {
    ExactEvolver::new(grid, mass, v, hbar)?.kernel(t)
}

/// `ψ(xᵢ) = Σⱼ K(xᵢ, xⱼ) ψ₀(xⱼ) dx`: the trapezoid rule on interior nodes,
/// the boundary values being zero.
pub fn apply_kernel(k: &KernelMatrix, psi0: &WaveFunction) -> Result<WaveFunction> {
    k.grid.check_same(psi0.grid())?;
    let v = DVector::from_column_slice(psi0.values());
    let out = &k.entries * v * Complex64::new(k.grid.dx(), 0.0);
    WaveFunction::new(k.grid, out.iter().copied().collect())
}

/// `n_steps` applications of the builder's kernel at `t / n_steps`.
pub fn compose_steps(builder: &KernelBuilder, n_steps: usize, t: f64, psi0: &WaveFunction) -> Result<WaveFunction> {
    if n_steps == 0 {
        return Err(Error::InvalidArgument("need at least one step".into()));
    }
    let k = builder.build(t / n_steps as f64)?;
    let mut psi = psi0.clone();
    for _ in 0..n_steps {
        psi = apply_kernel(&k, &psi)?;
    }
    Ok(psi)
}

/// One-step L² error of each builder against its exact evolver, keyed by
/// builder label. Errors below `1e-12‖ψ₀‖` are treated as round-off.
pub fn wavefunction_error_study(
    builders: &[KernelBuilder],
    psi0: &WaveFunction,
    t_grid: &[f64],
) -> Result<BTreeMap<String, ConvergenceReport>> {
    if t_grid.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::InvalidArgument("t grid must be strictly positive".into()));
    }
    let floor = 1e-12 * psi0.norm();
    let mut out = BTreeMap::new();
    for b in builders {
        b.grid.check_same(psi0.grid())?;
        let reference = b.reference()?;
        let mut samples = Vec::new();
        let mut failures = Vec::new();
        for &t in t_grid {
            let approx = b.build(t).and_then(|k| apply_kernel(&k, psi0));
            match approx {
                Ok(psi) => {
                    let exact = reference.evolve(psi0, t)?;
                    samples.push(Sample {
                        t,
                        error: psi.distance(&exact)?,
                    });
                }
                Err(e) => failures.push(SkippedSample {
                    t,
                    reason: e.to_string(),
                }),
            }
        }
        out.insert(b.label().to_string(), ConvergenceReport::new(b.label(), samples, failures, floor));
    }
    Ok(out)
}

/// The free Gaussian `(πσ²)^{-1/4} e^{−x²/2σ²}` after time `t`.
pub fn free_gaussian(x: f64, t: f64, sigma: f64, mass: f64, hbar: f64) -> Complex64 {
    let a = Complex64::new(1.0, hbar * t / (mass * sigma * sigma));
    let norm = (PI * sigma * sigma).powf(-0.25);
    norm / a.sqrt() * (-(x * x) / (2.0 * sigma * sigma * a)).exp()
}
