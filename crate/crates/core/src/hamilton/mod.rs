//! Classical mechanics: Hamiltonian flows, two-point actions `S(x, x′, t)`
//! by shooting, and the short-time approximations `S̄`, `S₁`, `S₂`.

mod flow;

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::{DMatrix, DVector};

pub use flow::{flow_rk4, Flow, PhasePoint};

use crate::convergence::{ConvergenceReport, Sample, SkippedSample};
use crate::error::{Error, Result};
use crate::potential::Potential;
use crate::quantizer::{average_symbol, ClassicalPoly, NumericPoly, NumericTwoPoint};

#[derive(Clone, Debug)]
pub enum HamiltonianKind {
    /// `Σⱼ pⱼ²/2mⱼ + V(x)`
    KineticPlusPotential { masses: Vec<f64>, potential: Potential },
    /// Arbitrary polynomial `H(x, p)`
    General(ClassicalPoly),
}

#[derive(Clone, Debug)]
struct CompiledGeneral {
    energy: NumericPoly,
    dh_dx: Vec<NumericPoly>,
    dh_dp: Vec<NumericPoly>,
    average: NumericTwoPoint,
}

#[derive(Clone, Debug)]
pub struct HamiltonianSpec {
    kind: HamiltonianKind,
    hbar: f64,
    general: Option<CompiledGeneral>,
}

impl HamiltonianSpec {
    pub fn kinetic_plus_potential(masses: Vec<f64>, potential: Potential) -> Result<Self> {
        if masses.len() != potential.dims() {
            return Err(Error::DimensionMismatch {
                left: masses.len(),
                right: potential.dims(),
            });
        }
        if masses.iter().any(|m| !(*m > 0.0) || !m.is_finite()) {
            return Err(Error::InvalidArgument("masses must be positive".into()));
        }
        Ok(HamiltonianSpec {
            kind: HamiltonianKind::KineticPlusPotential { masses, potential },
            hbar: 1.0,
            general: None,
        })
    }

    pub fn general(h: ClassicalPoly) -> Self {
        let dims = h.dims();
        let general = CompiledGeneral {
            energy: h.compile(),
            dh_dx: (0..dims).map(|j| h.d_dx(j).compile()).collect(),
            dh_dp: (0..dims).map(|j| h.d_dp(j).compile()).collect(),
            average: average_symbol(&h).compile(),
        };
        HamiltonianSpec {
            kind: HamiltonianKind::General(h),
            hbar: 1.0,
            general: Some(general),
        }
    }

    /// One-dimensional `p²/2m + ½mω²x²`.
    pub fn harmonic_oscillator(mass: f64, omega: f64) -> Self {
        Self::kinetic_plus_potential(vec![mass], Potential::harmonic(mass, omega))
            .expect("valid oscillator parameters")
    }

    pub fn free(mass: f64) -> Self {
        Self::kinetic_plus_potential(vec![mass], Potential::zero(1).with_label("free"))
            .expect("valid free particle")
    }

    pub fn with_hbar(mut self, hbar: f64) -> Result<Self> {
        if !(hbar > 0.0) {
            return Err(Error::InvalidArgument("hbar must be positive".into()));
        }
        self.hbar = hbar;
        Ok(self)
    }

    pub fn kind(&self) -> &HamiltonianKind {
        &self.kind
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn dims(&self) -> usize {
        match &self.kind {
            HamiltonianKind::KineticPlusPotential { masses, .. } => masses.len(),
            HamiltonianKind::General(h) => h.dims(),
        }
    }

    pub fn masses(&self) -> Option<&[f64]> {
        match &self.kind {
            HamiltonianKind::KineticPlusPotential { masses, .. } => Some(masses),
            HamiltonianKind::General(_) => None,
        }
    }

    pub fn potential(&self) -> Option<&Potential> {
        match &self.kind {
            HamiltonianKind::KineticPlusPotential { potential, .. } => Some(potential),
            HamiltonianKind::General(_) => None,
        }
    }

    pub fn energy(&self, x: &[f64], p: &[f64]) -> f64 {
        match &self.kind {
            HamiltonianKind::KineticPlusPotential { masses, potential } => {
                let kin: f64 = p.iter().zip(masses).map(|(p, m)| p * p / (2.0 * m)).sum();
                kin + potential.value(x)
            }
            HamiltonianKind::General(_) => self.general.as_ref().unwrap().energy.eval(x, p),
        }
    }

    /// `dx = ∂H/∂p`, `dp = −∂H/∂x`.
    pub fn vector_field(&self, x: &[f64], p: &[f64], dx: &mut [f64], dp: &mut [f64]) {
        match &self.kind {
            HamiltonianKind::KineticPlusPotential { masses, potential } => {
                for j in 0..masses.len() {
                    dx[j] = p[j] / masses[j];
                }
                potential.gradient(x, dp);
                for v in dp.iter_mut() {
                    *v = -*v;
                }
            }
            HamiltonianKind::General(_) => {
                let g = self.general.as_ref().unwrap();
                for j in 0..dx.len() {
                    dx[j] = g.dh_dp[j].eval(x, p);
                    dp[j] = -g.dh_dx[j].eval(x, p);
                }
            }
        }
    }

    /// `H̄(x, x′, p) = ∫₀¹ H(τx + (1−τ)x′, p) dτ`.
    pub fn averaged_energy(&self, x: &[f64], x_prime: &[f64], p: &[f64]) -> f64 {
        match &self.kind {
            HamiltonianKind::KineticPlusPotential { masses, potential } => {
                let kin: f64 = p.iter().zip(masses).map(|(p, m)| p * p / (2.0 * m)).sum();
                kin + potential.segment_average(x, x_prime)
            }
            HamiltonianKind::General(_) => self.general.as_ref().unwrap().average.eval(x, x_prime, p),
        }
    }

    /// Free-particle momentum `m(x − x′)/t` (unit mass for general `H`).
    pub fn free_guess(&self, x: &[f64], x_prime: &[f64], t: f64) -> Vec<f64> {
        let masses = self.masses();
        (0..x.len())
            .map(|j| masses.map_or(1.0, |m| m[j]) * (x[j] - x_prime[j]) / t)
            .collect()
    }
}

/// Shooting-method settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BvpOptions {
    pub steps: usize,
    pub tolerance: f64,
    pub max_iter: usize,
    /// Relative step for the finite-difference Jacobian.
    pub fd_step: f64,
}

impl Default for BvpOptions {
    fn default() -> Self {
        BvpOptions {
            steps: 1000,
            tolerance: 1e-10,
            max_iter: 50,
            fd_step: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ActionResult {
    /// Action along the solved trajectory.
    pub action: f64,
    pub p0: Vec<f64>,
    pub pt: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    /// `|x(t; p0) − x|∞` at the returned `p0`.
    pub residual: f64,
}

fn check_times(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("t must be positive, got {t}")));
    }
    Ok(())
}

/// Hamilton's two-point function by shooting from the free-particle guess.
pub fn two_point_action(
    h: &HamiltonianSpec,
    x: &[f64],
    x_prime: &[f64],
    t: f64,
    opts: &BvpOptions,
) -> Result<ActionResult> {
    check_times(t)?;
    let guess = h.free_guess(x, x_prime, t);
    two_point_action_from(h, x, x_prime, t, &guess, opts)
}

/// As [`two_point_action`] with an explicit initial momentum guess.
///
/// Newton iteration on `p₀` with a forward-difference Jacobian. Once the
/// endpoint residual is below tolerance the action is corrected to first
/// order by `−p_t·(x(t) − x)`.
pub fn two_point_action_from(
    h: &HamiltonianSpec,
    x: &[f64],
    x_prime: &[f64],
    t: f64,
    guess: &[f64],
    opts: &BvpOptions,
) -> Result<ActionResult> {
    check_times(t)?;
    let n = h.dims();
    if x.len() != n || x_prime.len() != n || guess.len() != n {
        return Err(Error::DimensionMismatch {
            left: n,
            right: x.len(),
        });
    }
    let mut integ = flow::Integrator::new(h);
    let mut buf = Vec::with_capacity(2 * n + 1);
    let mut probe_buf = Vec::with_capacity(2 * n + 1);
    let mut p0 = guess.to_vec();
    let mut iterations = 0;
    let residual_of = |state: &[f64]| -> f64 {
        (0..n).map(|j| (state[j] - x[j]).abs()).fold(0.0, f64::max)
    };

    flow::endpoint(&mut integ, x_prime, &p0, t, opts.steps, &mut buf)?;
    let mut residual = residual_of(&buf);
    while residual >= opts.tolerance && iterations < opts.max_iter {
        iterations += 1;
        let mut jac = DMatrix::<f64>::zeros(n, n);
        let mut probe = p0.clone();
        for k in 0..n {
            let step = opts.fd_step * p0[k].abs().max(1.0);
            probe[k] = p0[k] + step;
            flow::endpoint(&mut integ, x_prime, &probe, t, opts.steps, &mut probe_buf)?;
            for j in 0..n {
                jac[(j, k)] = (probe_buf[j] - buf[j]) / step;
            }
            probe[k] = p0[k];
        }
        let rhs = DVector::from_iterator(n, (0..n).map(|j| x[j] - buf[j]));
        let Some(delta) = jac.lu().solve(&rhs) else {
            break;
        };
        for k in 0..n {
            p0[k] += delta[k];
        }
        flow::endpoint(&mut integ, x_prime, &p0, t, opts.steps, &mut buf)?;
        residual = residual_of(&buf);
    }

    let pt = buf[n..2 * n].to_vec();
    let correction: f64 = (0..n).map(|j| pt[j] * (buf[j] - x[j])).sum();
    Ok(ActionResult {
        action: buf[2 * n] - correction,
        p0,
        pt,
        converged: residual < opts.tolerance,
        iterations,
        residual,
    })
}

fn kinetic_term(masses: &[f64], x: &[f64], x_prime: &[f64], t: f64) -> f64 {
    masses
        .iter()
        .zip(x.iter().zip(x_prime))
        .map(|(m, (a, b))| m * (a - b) * (a - b))
        .sum::<f64>()
        / (2.0 * t)
}

/// `S̄ = Σ mⱼ(xⱼ − x′ⱼ)²/2t − V̄(x, x′)·t`.
pub fn sbar_kepot(x: &[f64], x_prime: &[f64], t: f64, masses: &[f64], v: &Potential) -> Result<f64> {
    check_times(t)?;
    Ok(kinetic_term(masses, x, x_prime, t) - v.segment_average(x, x_prime) * t)
}

/// `(S₁, S₂)`: the endpoint-average and midpoint rules.
pub fn midpoint_actions(
    x: &[f64],
    x_prime: &[f64],
    t: f64,
    masses: &[f64],
    v: &Potential,
) -> Result<(f64, f64)> {
    check_times(t)?;
    let kin = kinetic_term(masses, x, x_prime, t);
    let endpoint_avg = 0.5 * (v.value(x) + v.value(x_prime));
    let mid: Vec<f64> = x.iter().zip(x_prime).map(|(a, b)| 0.5 * (a + b)).collect();
    Ok((kin - endpoint_avg * t, kin - v.value(&mid) * t))
}

/// `S̄ = p_t·(x − x′) − H̄(x, x′, p_t)·t` with `p_t` the final momentum of
/// the solved trajectory.
pub fn sbar_general(h: &HamiltonianSpec, x: &[f64], x_prime: &[f64], t: f64, opts: &BvpOptions) -> Result<f64> {
    let sol = two_point_action(h, x, x_prime, t, opts)?;
    if !sol.converged {
        return Err(bvp_failure(x, x_prime, t, &sol));
    }
    Ok(sbar_from_momentum(h, x, x_prime, t, &sol.pt))
}

fn sbar_from_momentum(h: &HamiltonianSpec, x: &[f64], x_prime: &[f64], t: f64, p: &[f64]) -> f64 {
    let pdx: f64 = p.iter().zip(x.iter().zip(x_prime)).map(|(p, (a, b))| p * (a - b)).sum();
    pdx - h.averaged_energy(x, x_prime, p) * t
}

pub(crate) fn bvp_failure(x: &[f64], x_prime: &[f64], t: f64, sol: &ActionResult) -> Error {
    Error::BoundaryValue {
        x: x.to_vec(),
        x_prime: x_prime.to_vec(),
        t,
        reason: format!(
            "Newton did not converge after {} iterations (residual {:e})",
            sol.iterations, sol.residual
        ),
    }
}

/// The approximate actions compared by [`action_error_study`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ActionApproximation {
    /// Segment-averaged potential (or averaged Hamiltonian for general `H`).
    Sbar,
    /// Endpoint average `½(V(x) + V(x′))`.
    S1,
    /// Midpoint value `V(½(x + x′))`.
    S2,
}

impl ActionApproximation {
    pub fn label(self) -> &'static str {
        match self {
            ActionApproximation::Sbar => "sbar",
            ActionApproximation::S1 => "s1",
            ActionApproximation::S2 => "s2",
        }
    }
}

impl fmt::Display for ActionApproximation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

pub type ActionStudy = BTreeMap<ActionApproximation, ConvergenceReport>;

/// Errors `|S − S̄|`, `|S − S₁|`, `|S − S₂|` over `t_grid` with log-log fits.
///
/// `S` comes from `reference` when given, otherwise from shooting. For a
/// general polynomial `H` only `S̄` (the averaged-Hamiltonian form) is
/// defined. Errors below `64ε|S|` (closed-form reference) or `1e-13|S|`
/// (shooting, whose summed action carries that much round-off) count as
/// exact and are not fitted.
pub fn action_error_study(
    h: &HamiltonianSpec,
    x: &[f64],
    x_prime: &[f64],
    t_grid: &[f64],
    opts: &BvpOptions,
    reference: Option<&dyn Fn(f64) -> f64>,
) -> Result<ActionStudy> {
    if t_grid.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::InvalidArgument("t grid must be strictly positive".into()));
    }
    let approximations: &[ActionApproximation] = match h.kind() {
        HamiltonianKind::KineticPlusPotential { .. } => &[
            ActionApproximation::Sbar,
            ActionApproximation::S1,
            ActionApproximation::S2,
        ],
        HamiltonianKind::General(_) => &[ActionApproximation::Sbar],
    };
    let mut raw: BTreeMap<ActionApproximation, Vec<Sample>> = BTreeMap::new();
    let mut failures = Vec::new();
    let mut floors: Vec<(f64, f64)> = Vec::new();

    for &t in t_grid {
        let solved = match reference {
            Some(f) => Ok((f(t), None)),
            None => two_point_action(h, x, x_prime, t, opts).and_then(|sol| {
                if sol.converged {
                    Ok((sol.action, Some(sol.pt)))
                } else {
                    Err(bvp_failure(x, x_prime, t, &sol))
                }
            }),
        };
        let (s_exact, pt) = match solved {
            Ok(v) => v,
            Err(e) => {
                failures.push(SkippedSample {
                    t,
                    reason: e.to_string(),
                });
                continue;
            }
        };
        let rel = if reference.is_some() { 64.0 * f64::EPSILON } else { 1e-13 };
        floors.push((t, rel * s_exact.abs()));
        match h.kind() {
            HamiltonianKind::KineticPlusPotential { masses, potential } => {
                let sbar = sbar_kepot(x, x_prime, t, masses, potential)?;
                let (s1, s2) = midpoint_actions(x, x_prime, t, masses, potential)?;
                for (a, v) in [
                    (ActionApproximation::Sbar, sbar),
                    (ActionApproximation::S1, s1),
                    (ActionApproximation::S2, s2),
                ] {
                    raw.entry(a).or_default().push(Sample {
                        t,
                        error: (s_exact - v).abs(),
                    });
                }
            }
            HamiltonianKind::General(_) => {
                let pt = match pt {
                    Some(pt) => pt,
                    None => {
                        let sol = two_point_action(h, x, x_prime, t, opts)?;
                        if !sol.converged {
                            failures.push(SkippedSample {
                                t,
                                reason: bvp_failure(x, x_prime, t, &sol).to_string(),
                            });
                            continue;
                        }
                        sol.pt
                    }
                };
                let sbar = sbar_from_momentum(h, x, x_prime, t, &pt);
                raw.entry(ActionApproximation::Sbar).or_default().push(Sample {
                    t,
                    error: (s_exact - sbar).abs(),
                });
            }
        }
    }

    let mut study = ActionStudy::new();
    for &a in approximations {
        let samples = raw.remove(&a).unwrap_or_default();
        let mut kept = Vec::new();
        let mut skipped = failures.clone();
        for s in samples {
            let floor = floors.iter().find(|(t, _)| *t == s.t).map_or(0.0, |f| f.1);
            if s.error <= floor {
                skipped.push(SkippedSample {
                    t: s.t,
                    reason: format!("error {:e} at round-off", s.error),
                });
            } else {
                kept.push(s);
            }
        }
        study.insert(a, ConvergenceReport::new(a.label(), kept, skipped, 0.0));
    }
    Ok(study)
}

/// Closed-form oscillator action `m ω ((x² + x′²) cos ωt − 2xx′) / (2 sin ωt)`.
pub fn harmonic_action(mass: f64, omega: f64, x: f64, x_prime: f64, t: f64) -> f64 {
    let (s, c) = (omega * t).sin_cos();
    mass * omega * ((x * x + x_prime * x_prime) * c - 2.0 * x * x_prime) / (2.0 * s)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::convergence::standard_t_grid;
    use num_rational::BigRational;

    fn half_p2x2() -> HamiltonianSpec {
        HamiltonianSpec::general(ClassicalPoly::monomial_1d(BigRational::new(1.into(), 2.into()), 2, 2))
    }

    #[test]
    fn free_flow_is_a_straight_line() {
        let f = flow_rk4(&HamiltonianSpec::free(1.0), &[0.0], &[1.0], 1.0, 10).unwrap();
        assert!((f.x[0] - 1.0).abs() < 1e-14);
        assert!((f.p[0] - 1.0).abs() < 1e-14);
        assert_eq!(f.trajectory.len(), 11);
    }

    #[test]
    fn oscillator_quarter_period() {
        let h = HamiltonianSpec::harmonic_oscillator(1.0, 1.0);
        let f = flow_rk4(&h, &[1.0], &[0.0], PI / 2.0, 1000).unwrap();
        assert!(f.x[0].abs() < 1e-8);
        assert!((f.p[0] + 1.0).abs() < 1e-8);
    }

    #[test]
    fn p2x2_energy_is_conserved() {
        let h = half_p2x2();
        let f = flow_rk4(&h, &[2.0], &[0.7], 0.5, 1000).unwrap();
        let e0 = h.energy(&[2.0], &[0.7]);
        for pt in &f.trajectory {
            assert!((h.energy(&pt.x, &pt.p) - e0).abs() < 1e-8 * e0);
        }
    }

    #[test]
    fn rk4_is_fourth_order() {
        let h = HamiltonianSpec::harmonic_oscillator(1.0, 1.0);
        let exact = (1.0f64).cos();
        let err = |steps| (flow_rk4(&h, &[1.0], &[0.0], 1.0, steps).unwrap().x[0] - exact).abs();
        let ratio = err(20) / err(40);
        assert!((ratio - 16.0).abs() < 1.0, "ratio {ratio}");
    }

    #[test]
    fn flow_rejects_bad_input() {
        let h = HamiltonianSpec::free(1.0);
        assert!(flow_rk4(&h, &[0.0], &[1.0], 1.0, 0).is_err());
        assert!(matches!(flow_rk4(&h, &[f64::NAN], &[1.0], 1.0, 5), Err(Error::NonFinite { .. })));
        let blowup = HamiltonianSpec::kinetic_plus_potential(
            vec![1.0],
            Potential::callable(1, "exp", |x: &[f64]| -(50.0 * x[0]).exp()),
        )
        .unwrap();
        assert!(matches!(flow_rk4(&blowup, &[1.0], &[10.0], 50.0, 10), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn free_action_is_exact() {
        let h = HamiltonianSpec::free(1.0);
        let r = two_point_action(&h, &[1.3], &[-0.4], 0.7, &BvpOptions::default()).unwrap();
        assert!(r.converged);
        assert!((r.action - 1.7f64.powi(2) / 1.4).abs() < 1e-12);
    }

    #[test]
    fn oscillator_action_matches_generating_function() {
        let h = HamiltonianSpec::harmonic_oscillator(1.0, 1.0);
        for t in [0.05, 0.3, 1.0] {
            let r = two_point_action(&h, &[1.0], &[0.0], t, &BvpOptions::default()).unwrap();
            let exact = t.cos() / (2.0 * t.sin());
            assert!(r.converged && r.residual < 1e-10);
            assert!((r.action - exact).abs() < 1e-10 * exact.abs(), "t={t}");
            assert_eq!(harmonic_action(1.0, 1.0, 1.0, 0.0, t), exact);
        }
    }

    #[test]
    fn p2x2_action_is_log_squared() {
        let r = two_point_action(&half_p2x2(), &[2.0], &[1.0], 0.2, &BvpOptions::default()).unwrap();
        let exact = 2f64.ln().powi(2) / 0.4;
        assert!(r.converged);
        assert!((r.action - exact).abs() < 1e-9 * exact);
    }

    #[test]
    fn nonpositive_time_is_an_error() {
        let h = HamiltonianSpec::free(1.0);
        assert!(two_point_action(&h, &[0.0], &[1.0], 0.0, &BvpOptions::default()).is_err());
        assert!(sbar_kepot(&[0.0], &[1.0], -1.0, &[1.0], &Potential::zero(1)).is_err());
        assert!(midpoint_actions(&[0.0], &[1.0], 0.0, &[1.0], &Potential::zero(1)).is_err());
    }

    #[test]
    fn nonconvergence_is_flagged() {
        let h = HamiltonianSpec::harmonic_oscillator(1.0, 1.0);
        let opts = BvpOptions {
            max_iter: 0,
            ..BvpOptions::default()
        };
        let r = two_point_action(&h, &[1.0], &[0.0], 0.5, &opts).unwrap();
        assert!(!r.converged);
        assert!(sbar_general(&h, &[1.0], &[0.0], 0.5, &opts).is_err());
    }

    #[test]
    fn generating_function_derivatives() {
        let opts = BvpOptions::default();
        let cases = [
            (HamiltonianSpec::harmonic_oscillator(1.0, 1.0), 1.0, 0.0, 0.4),
            (
                HamiltonianSpec::kinetic_plus_potential(vec![1.0], Potential::quartic()).unwrap(),
                1.0,
                0.5,
                0.2,
            ),
        ];
        for (h, x, xp, t) in cases {
            let sol = two_point_action(&h, &[x], &[xp], t, &opts).unwrap();
            let d = 1e-5;
            let s = |a: f64, b: f64| two_point_action(&h, &[a], &[b], t, &opts).unwrap().action;
            let ds_dx = (s(x + d, xp) - s(x - d, xp)) / (2.0 * d);
            let ds_dxp = (s(x, xp + d) - s(x, xp - d)) / (2.0 * d);
            assert!((ds_dx - sol.pt[0]).abs() < 1e-4 * sol.pt[0].abs());
            assert!((ds_dxp + sol.p0[0]).abs() < 1e-4 * sol.p0[0].abs());
        }
    }

    #[test]
    fn solved_trajectories_conserve_energy() {
        let h = HamiltonianSpec::kinetic_plus_potential(vec![1.0], Potential::quartic()).unwrap();
        let sol = two_point_action(&h, &[1.0], &[0.5], 0.2, &BvpOptions::default()).unwrap();
        let f = flow_rk4(&h, &[0.5], &sol.p0, 0.2, 1000).unwrap();
        let e0 = h.energy(&[0.5], &sol.p0);
        for pt in &f.trajectory {
            assert!((h.energy(&pt.x, &pt.p) - e0).abs() < 1e-8 * e0.abs());
        }
    }

    #[test]
    fn sbar_kepot_examples() {
        let ho = Potential::harmonic(1.0, 1.0);
        for t in [0.1, 0.01] {
            let v = sbar_kepot(&[1.0], &[0.0], t, &[1.0], &ho).unwrap();
            assert!((v - (1.0 / (2.0 * t) - t / 6.0)).abs() < 1e-13 / t);
        }
        let free = sbar_kepot(&[2.0], &[0.5], 0.3, &[2.0], &Potential::zero(1)).unwrap();
        assert!((free - 2.0 * 1.5f64.powi(2) / 0.6).abs() < 1e-13);
        let lin = Potential::polynomial(ClassicalPoly::monomial_1d(BigRational::from_integer(3.into()), 1, 0)).unwrap();
        let sb = sbar_kepot(&[2.0], &[0.5], 0.3, &[1.0], &lin).unwrap();
        let (_, s2) = midpoint_actions(&[2.0], &[0.5], 0.3, &[1.0], &lin).unwrap();
        assert!((sb - s2).abs() < 1e-14);
    }

    #[test]
    fn midpoint_examples() {
        let ho = Potential::harmonic(1.0, 1.0);
        let t = 0.1;
        let (s1, s2) = midpoint_actions(&[1.0], &[0.0], t, &[1.0], &ho).unwrap();
        assert!((s1 - (1.0 / (2.0 * t) - t / 4.0)).abs() < 1e-13);
        assert!((s2 - (1.0 / (2.0 * t) - t / 8.0)).abs() < 1e-13);
        // degenerate segment
        let q = Potential::quartic();
        let (a, b) = midpoint_actions(&[0.7], &[0.7], t, &[1.0], &q).unwrap();
        let c = sbar_kepot(&[0.7], &[0.7], t, &[1.0], &q).unwrap();
        let want = -0.7f64.powi(4) * t;
        for v in [a, b, c] {
            assert!((v - want).abs() < 1e-15);
        }
        let (f1, f2) = midpoint_actions(&[1.0], &[0.2], t, &[1.0], &Potential::zero(1)).unwrap();
        assert_eq!(f1, f2);
    }

    #[test]
    fn sbar_general_free_and_kinetic_forms() {
        let opts = BvpOptions::default();
        let free = sbar_general(&HamiltonianSpec::free(1.0), &[1.0], &[0.25], 0.3, &opts).unwrap();
        assert!((free - 0.75f64.powi(2) / 0.6).abs() < 1e-10);
        // kinetic-plus-potential: the two S̄ forms differ by −(t/2m)(p_t − m(x−x′)/t)², i.e. O(t³)
        let h = HamiltonianSpec::harmonic_oscillator(1.0, 1.0);
        let ho = Potential::harmonic(1.0, 1.0);
        let mut diffs = Vec::new();
        for t in [0.04, 0.02, 0.01] {
            let g = sbar_general(&h, &[1.0], &[0.0], t, &opts).unwrap();
            let k = sbar_kepot(&[1.0], &[0.0], t, &[1.0], &ho).unwrap();
            let pt = (t.cos() - 0.0) / t.sin();
            let predicted = -(t / 2.0) * (pt - 1.0 / t).powi(2);
            assert!((g - k - predicted).abs() < 1e-9, "t={t}");
            diffs.push(Sample { t, error: (g - k).abs() });
        }
        let fit = crate::convergence::fit_log_log(&diffs).unwrap();
        assert!((fit.slope - 3.0).abs() < 0.05);
    }

    #[test]
    fn oscillator_action_study_slopes() {
        let h = HamiltonianSpec::harmonic_oscillator(1.0, 1.0);
        let study = action_error_study(&h, &[1.0], &[0.0], &standard_t_grid(), &BvpOptions::default(), None).unwrap();
        let slope = |a| study[&a].slope().unwrap();
        assert!((slope(ActionApproximation::Sbar) - 3.0).abs() < 0.15);
        assert!((slope(ActionApproximation::S1) - 1.0).abs() < 0.15);
        assert!((slope(ActionApproximation::S2) - 1.0).abs() < 0.15);
    }

    #[test]
    fn free_action_study_is_degenerate() {
        let h = HamiltonianSpec::free(1.0);
        let study = action_error_study(&h, &[1.0], &[0.0], &standard_t_grid(), &BvpOptions::default(), None).unwrap();
        for report in study.values() {
            assert!(report.is_degenerate(), "{}: {:?}", report.label, report.samples);
        }
    }
}
