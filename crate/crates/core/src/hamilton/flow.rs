use crate::error::{Error, Result};

use super::HamiltonianSpec;

/// One sampled point of a phase-space trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct PhasePoint {
    pub s: f64,
    pub x: Vec<f64>,
    pub p: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Flow {
    pub x: Vec<f64>,
    pub p: Vec<f64>,
    /// `∫ (p·ẋ − H) ds` along the trajectory.
    pub action: f64,
    /// Initial point plus one point per step.
    pub trajectory: Vec<PhasePoint>,
}

/// Fixed-step RK4 on `ẋ = ∂H/∂p`, `ṗ = −∂H/∂x`, `Ṡ = p·ẋ − H`.
pub(crate) struct Integrator<'a> {
    h: &'a HamiltonianSpec,
    n: usize,
    k: [Vec<f64>; 4],
    tmp: Vec<f64>,
}

impl<'a> Integrator<'a> {
    pub(crate) fn new(h: &'a HamiltonianSpec) -> Self {
        let n = h.dims();
        let len = 2 * n + 1;
        Integrator {
            h,
            n,
            k: [vec![0.0; len], vec![0.0; len], vec![0.0; len], vec![0.0; len]],
            tmp: vec![0.0; len],
        }
    }

    fn rhs(h: &HamiltonianSpec, n: usize, state: &[f64], out: &mut [f64]) {
        let (x, rest) = state.split_at(n);
        let p = &rest[..n];
        let (dx, rest_out) = out.split_at_mut(n);
        let (dp, ds) = rest_out.split_at_mut(n);
        h.vector_field(x, p, dx, dp);
        let pv: f64 = p.iter().zip(dx.iter()).map(|(a, b)| a * b).sum();
        ds[0] = pv - h.energy(x, p);
    }

    /// Advances `state = [x, p, S]` in place; calls `observe` after each step.
    pub(crate) fn run<F: FnMut(f64, &[f64])>(
        &mut self,
        state: &mut [f64],
        t: f64,
        steps: usize,
        mut observe: F,
    ) -> Result<()> {
        let dt = t / steps as f64;
        let len = state.len();
        for step in 0..steps {
            let [k1, k2, k3, k4] = &mut self.k;
            Self::rhs(self.h, self.n, state, k1);
            for i in 0..len {
                self.tmp[i] = state[i] + 0.5 * dt * k1[i];
            }
            Self::rhs(self.h, self.n, &self.tmp, k2);
            for i in 0..len {
                self.tmp[i] = state[i] + 0.5 * dt * k2[i];
            }
            Self::rhs(self.h, self.n, &self.tmp, k3);
            for i in 0..len {
                self.tmp[i] = state[i] + dt * k3[i];
            }
            Self::rhs(self.h, self.n, &self.tmp, k4);
            for i in 0..len {
                state[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            let s = dt * (step + 1) as f64;
            if state.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite { at: s });
            }
            observe(s, state);
        }
        Ok(())
    }
}

/// Integrates Hamilton's equations from `(x0, p0)` over `[0, t]` with
/// `steps` fixed RK4 steps.
pub fn flow_rk4(h: &HamiltonianSpec, x0: &[f64], p0: &[f64], t: f64, steps: usize) -> Result<Flow> {
    let n = h.dims();
    if x0.len() != n || p0.len() != n {
        return Err(Error::DimensionMismatch {
            left: n,
            right: x0.len().max(p0.len()),
        });
    }
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be at least 1".into()));
    }
    if !t.is_finite() || x0.iter().chain(p0).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { at: 0.0 });
    }
    let mut state: Vec<f64> = x0.iter().chain(p0).copied().chain([0.0]).collect();
    let mut trajectory = Vec::with_capacity(steps + 1);
    trajectory.push(PhasePoint {
        s: 0.0,
        x: x0.to_vec(),
        p: p0.to_vec(),
    });
    Integrator::new(h).run(&mut state, t, steps, |s, st| {
        trajectory.push(PhasePoint {
            s,
            x: st[..n].to_vec(),
            p: st[n..2 * n].to_vec(),
        });
    })?;
    Ok(Flow {
        x: state[..n].to_vec(),
        p: state[n..2 * n].to_vec(),
        action: state[2 * n],
        trajectory,
    })
}

/// Endpoint `(x(t), p(t), S)` without recording the trajectory.
pub(crate) fn endpoint(
    integ: &mut Integrator<'_>,
    x0: &[f64],
    p0: &[f64],
    t: f64,
    steps: usize,
    buf: &mut Vec<f64>,
) -> Result<()> {
    buf.clear();
    buf.extend_from_slice(x0);
    buf.extend_from_slice(p0);
    buf.push(0.0);
    integ.run(buf, t, steps, |_, _| {})
}
