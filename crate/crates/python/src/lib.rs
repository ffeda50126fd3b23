//! Python bindings: exact quantization, two-point actions and short-time
//! propagator studies.

use std::collections::BTreeMap;

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use bornjordan::cli::{parse_observable, potential_from_str};
use bornjordan::convergence::{standard_t_grid, ConvergenceReport};
use bornjordan::hamilton::{self, BvpOptions, HamiltonianSpec};
use bornjordan::opalgebra::OperatorPoly;
use bornjordan::propagators::{self as props, Grid1D, KernelBuilder, MidpointRule, WaveFunction};
use bornjordan::quantizer::{self, ClassicalPoly, Rule};
use bornjordan::Error;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::NonFinite { .. } | Error::BoundaryValue { .. } => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn rule(name: &str) -> PyResult<Rule> {
    Rule::ALL
        .into_iter()
        .find(|r| r.short_name() == name)
        .ok_or_else(|| PyValueError::new_err(format!("unknown rule {name:?}; expected bj, weyl or sym")))
}

/// A classical polynomial observable in `x, y, z, px, py, pz` (or `x1.., p1..`).
#[pyclass(name = "Observable", module = "bornjordan", frozen)]
struct PyObservable {
    poly: ClassicalPoly,
}

#[pymethods]
impl PyObservable {
    #[new]
    fn new(expr: &str) -> PyResult<Self> {
        Ok(PyObservable {
            poly: parse_observable(expr).map_err(to_py)?,
        })
    }

    #[getter]
    fn dims(&self) -> usize {
        self.poly.dims()
    }

    #[pyo3(signature = (rule = "bj"))]
    fn quantize(&self, rule: &str) -> PyResult<PyOperator> {
        Ok(PyOperator {
            op: self::rule(rule)?.quantize(&self.poly),
        })
    }

    fn __str__(&self) -> String {
        self.poly.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Observable({:?})", self.poly.to_string())
    }
}

/// A normal-ordered operator polynomial with exact coefficients in ℚ[i][ħ].
#[pyclass(name = "Operator", module = "bornjordan", frozen)]
struct PyOperator {
    op: OperatorPoly,
}

#[pymethods]
impl PyOperator {
    #[getter]
    fn dims(&self) -> usize {
        self.op.dims()
    }

    fn is_zero(&self) -> bool {
        self.op.is_zero()
    }

    /// The ħ-polynomial as a string when the operator is a multiple of the
    /// identity, else `None`.
    fn scalar(&self) -> Option<String> {
        self.op.as_scalar().map(|c| c.to_string())
    }

    fn adjoint(&self) -> PyOperator {
        PyOperator { op: self.op.adjoint() }
    }

    fn commutator(&self, other: PyRef<'_, PyOperator>) -> PyResult<PyOperator> {
        Ok(PyOperator {
            op: self.op.commutator(&other.op).map_err(to_py)?,
        })
    }

    fn __add__(&self, other: PyRef<'_, PyOperator>) -> PyResult<PyOperator> {
        Ok(PyOperator {
            op: self.op.add(&other.op).map_err(to_py)?,
        })
    }

    fn __sub__(&self, other: PyRef<'_, PyOperator>) -> PyResult<PyOperator> {
        Ok(PyOperator {
            op: self.op.sub(&other.op).map_err(to_py)?,
        })
    }

    fn __mul__(&self, other: PyRef<'_, PyOperator>) -> PyResult<PyOperator> {
        Ok(PyOperator {
            op: self.op.mul(&other.op).map_err(to_py)?,
        })
    }

    fn __eq__(&self, other: PyRef<'_, PyOperator>) -> bool {
        self.op == other.op
    }

    fn __str__(&self) -> String {
        self.op.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Operator({:?})", self.op.to_string())
    }
}

/// Quantizes `expr` under `rule` (`bj`, `weyl` or `sym`).
#[pyfunction]
#[pyo3(signature = (expr, rule = "bj"))]
fn quantize(expr: &str, rule: &str) -> PyResult<PyOperator> {
    PyObservable::new(expr)?.quantize(rule)
}

/// Born–Jordan ordering of `x^m p^l` in one dimension.
#[pyfunction]
fn born_jordan_ordering_sum(m: u32, l: u32) -> PyOperator {
    PyOperator {
        op: quantizer::born_jordan_ordering_sum(m, l),
    }
}

/// Weyl − Born–Jordan for each squared angular-momentum component and for
/// the total, as ħ-polynomial strings.
#[pyfunction]
fn dilemma() -> (Vec<String>, String) {
    let r = quantizer::angular_momentum_report();
    (r.components.iter().map(|c| c.to_string()).collect(), r.total.to_string())
}

fn hamiltonian(potential: Option<&str>, hamiltonian: Option<&str>, mass: f64, hbar: f64) -> PyResult<HamiltonianSpec> {
    let h = match (potential, hamiltonian) {
        (Some(v), None) => {
            let v = potential_from_str(v, mass).map_err(to_py)?;
            let dims = v.dims();
            HamiltonianSpec::kinetic_plus_potential(vec![mass; dims], v).map_err(to_py)?
        }
        (None, Some(h)) => HamiltonianSpec::general(parse_observable(h).map_err(to_py)?),
        _ => return Err(PyValueError::new_err("give exactly one of potential or hamiltonian")),
    };
    h.with_hbar(hbar).map_err(to_py)
}

/// Hamilton's two-point function `S(x, x′; t)` by shooting. Returns
/// `(action, p0, converged)`.
#[pyfunction]
#[pyo3(signature = (x, xp, t, potential = None, hamiltonian = None, mass = 1.0, steps = 1000))]
fn two_point_action(
    x: Vec<f64>,
    xp: Vec<f64>,
    t: f64,
    potential: Option<&str>,
    hamiltonian: Option<&str>,
    mass: f64,
    steps: usize,
) -> PyResult<(f64, Vec<f64>, bool)> {
    let h = self::hamiltonian(potential, hamiltonian, mass, 1.0)?;
    let opts = BvpOptions { steps, ..BvpOptions::default() };
    let r = hamilton::two_point_action(&h, &x, &xp, t, &opts).map_err(to_py)?;
    Ok((r.action, r.p0, r.converged))
}

type Study = BTreeMap<String, (Option<f64>, Vec<(f64, f64)>)>;

fn study(reports: impl IntoIterator<Item = (String, ConvergenceReport)>) -> Study {
    reports
        .into_iter()
        .map(|(k, r)| {
            let pts = r.samples.iter().map(|s| (s.t, s.error)).collect();
            (k, (r.slope(), pts))
        })
        .collect()
}

/// Action-approximation errors over `t_grid`, keyed by approximation label,
/// each value `(slope, [(t, error)])`. With `potential="ho"` the closed-form
/// action is the reference.
#[pyfunction]
#[pyo3(signature = (x, xp, potential = None, hamiltonian = None, t_grid = None, mass = 1.0, hbar = 1.0))]
fn action_study(
    x: Vec<f64>,
    xp: Vec<f64>,
    potential: Option<&str>,
    hamiltonian: Option<&str>,
    t_grid: Option<Vec<f64>>,
    mass: f64,
    hbar: f64,
) -> PyResult<Study> {
    let h = self::hamiltonian(potential, hamiltonian, mass, hbar)?;
    let t_grid = t_grid.unwrap_or_else(standard_t_grid);
    let closed = potential.map(str::trim) == Some("ho") && x.len() == 1 && xp.len() == 1;
    let (x0, xp0) = (x.first().copied().unwrap_or(0.0), xp.first().copied().unwrap_or(0.0));
    let reference = move |t: f64| hamilton::harmonic_action(mass, 1.0, x0, xp0, t);
    let reference: Option<&dyn Fn(f64) -> f64> = if closed { Some(&reference) } else { None };
    let s = hamilton::action_error_study(&h, &x, &xp, &t_grid, &BvpOptions::default(), reference).map_err(to_py)?;
    Ok(study(s.into_iter().map(|(k, r)| (k.label().to_string(), r))))
}

fn builder(
    kind: &str,
    potential: &str,
    x_min: f64,
    x_max: f64,
    points: usize,
    mass: f64,
    hbar: f64,
) -> PyResult<KernelBuilder> {
    let g = Grid1D::new(x_min, x_max, points).map_err(to_py)?;
    let v = potential_from_str(potential, mass).map_err(to_py)?;
    let b = match kind {
        "ks" => KernelBuilder::ks(g, mass, v, hbar),
        "mid1" => KernelBuilder::midpoint(g, mass, v, hbar, MidpointRule::EndpointAverage),
        "mid2" => KernelBuilder::midpoint(g, mass, v, hbar, MidpointRule::Midpoint),
        "exact" => KernelBuilder::exact(g, mass, v, hbar),
        "vv" => HamiltonianSpec::kinetic_plus_potential(vec![mass], v)
            .and_then(|h| h.with_hbar(hbar))
            .and_then(|h| KernelBuilder::van_vleck(h, g)),
        other => return Err(PyValueError::new_err(format!("unknown builder {other:?}"))),
    };
    b.map_err(to_py)
}

/// Grid kernel matrix `K[i][j] ≈ K(xᵢ, xⱼ; t)` for one builder.
#[pyfunction]
#[pyo3(signature = (builder, potential, t, x_min = -8.0, x_max = 8.0, points = 512, mass = 1.0, hbar = 1.0))]
#[allow(clippy::too_many_arguments)]
fn kernel_matrix(
    builder: &str,
    potential: &str,
    t: f64,
    x_min: f64,
    x_max: f64,
    points: usize,
    mass: f64,
    hbar: f64,
) -> PyResult<Vec<Vec<Complex64>>> {
    let b = self::builder(builder, potential, x_min, x_max, points, mass, hbar)?;
    let k = b.build(t).map_err(to_py)?;
    let e = k.entries();
    Ok((0..e.nrows()).map(|i| e.row(i).iter().copied().collect()).collect())
}

/// One-step L² error of a builder against exact evolution of the standard
/// Gaussian, as `{label: (slope, [(t, error)])}`.
#[pyfunction]
#[pyo3(signature = (builder, potential, t_grid = None, x_min = -8.0, x_max = 8.0, points = 512, mass = 1.0, hbar = 1.0))]
#[allow(clippy::too_many_arguments)]
fn propagator_study(
    builder: &str,
    potential: &str,
    t_grid: Option<Vec<f64>>,
    x_min: f64,
    x_max: f64,
    points: usize,
    mass: f64,
    hbar: f64,
) -> PyResult<Study> {
    let b = self::builder(builder, potential, x_min, x_max, points, mass, hbar)?;
    let psi0 = WaveFunction::standard(*b.grid());
    let t_grid = t_grid.unwrap_or_else(standard_t_grid);
    let s = props::wavefunction_error_study(std::slice::from_ref(&b), &psi0, &t_grid).map_err(to_py)?;
    Ok(study(s))
}

/// `steps` applications of the kernel for `t/steps`. Returns
/// `(norm, fidelity, error)` against exact evolution.
#[pyfunction]
#[pyo3(signature = (builder, potential, steps, t = 0.5, x_min = -8.0, x_max = 8.0, points = 512, mass = 1.0, hbar = 1.0))]
#[allow(clippy::too_many_arguments)]
fn compose(
    builder: &str,
    potential: &str,
    steps: usize,
    t: f64,
    x_min: f64,
    x_max: f64,
    points: usize,
    mass: f64,
    hbar: f64,
) -> PyResult<(f64, f64, f64)> {
    let b = self::builder(builder, potential, x_min, x_max, points, mass, hbar)?;
    let psi0 = WaveFunction::standard(*b.grid());
    let psi = props::compose_steps(&b, steps, t, &psi0).map_err(to_py)?;
    let exact = b.reference().and_then(|r| r.evolve(&psi0, t)).map_err(to_py)?;
    let fid = psi.fidelity(&exact).map_err(to_py)?;
    let err = psi.distance(&exact).map_err(to_py)?;
    Ok((psi.norm(), fid, err))
}

#[pymodule(name = "bornjordan")]
fn bornjordan_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyObservable>()?;
    m.add_class::<PyOperator>()?;
    m.add_function(wrap_pyfunction!(quantize, m)?)?;
    m.add_function(wrap_pyfunction!(born_jordan_ordering_sum, m)?)?;
    m.add_function(wrap_pyfunction!(dilemma, m)?)?;
    m.add_function(wrap_pyfunction!(two_point_action, m)?)?;
    m.add_function(wrap_pyfunction!(action_study, m)?)?;
    m.add_function(wrap_pyfunction!(kernel_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(propagator_study, m)?)?;
    m.add_function(wrap_pyfunction!(compose, m)?)?;
    Ok(())
}
