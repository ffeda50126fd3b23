use bornjordan::convergence::{fit_log_log, standard_t_grid, Sample};
use bornjordan::hamilton::harmonic_action;
use bornjordan::potential::Potential;
use bornjordan::propagators::{
    apply_kernel, wavefunction_error_study, ExactEvolver, Grid1D, KernelBuilder, WaveFunction,
};

fn fit(points: &[(f64, f64)]) -> f64 {
    let s: Vec<Sample> = points.iter().map(|&(t, error)| Sample { t, error }).collect();
    fit_log_log(&s).unwrap().slope
}

#[test]
fn ks_norm_drift_shrinks_with_step() {
    let g = Grid1D::standard();
    let b = KernelBuilder::ks(g, 1.0, Potential::harmonic(1.0, 1.0), 1.0).unwrap();
    let psi0 = WaveFunction::standard(g);
    let pts: Vec<(f64, f64)> = standard_t_grid()
        .into_iter()
        .map(|t| (t, (apply_kernel(&b.build(t).unwrap(), &psi0).unwrap().norm() - 1.0).abs()))
        .collect();
    assert!(fit(&pts) >= 1.8, "{pts:?}");
}

#[test]
fn ks_slope_is_stable_under_grid_refinement() {
    let slope = |n| {
        let g = Grid1D::new(-8.0, 8.0, n).unwrap();
        let b = KernelBuilder::ks(g, 1.0, Potential::harmonic(1.0, 1.0), 1.0).unwrap();
        let report = wavefunction_error_study(&[b], &WaveFunction::standard(g), &standard_t_grid()).unwrap();
        report["ks"].slope().unwrap()
    };
    let (coarse, fine) = (slope(256), slope(512));
    assert!((coarse - fine).abs() < 0.05, "{coarse} vs {fine}");
}

#[test]
fn ground_state_picks_up_zero_point_phase() {
    let g = Grid1D::standard();
    let ev = ExactEvolver::new(g, 2.0, &Potential::harmonic(2.0, 1.5), 1.0).unwrap();
    let psi = WaveFunction::ho_ground_state(g, 2.0, 1.5, 1.0);
    let t = 0.8;
    let overlap = psi.inner(&ev.evolve(&psi, t).unwrap()).unwrap();
    assert!((overlap.arg() + 0.75 * t).abs() < 1e-3, "{}", overlap.arg());
    assert!((overlap.norm() - 1.0).abs() < 1e-6);
}

#[test]
fn closed_form_van_vleck_matches_free_evolution_closely() {
    let g = Grid1D::standard();
    let b = KernelBuilder::van_vleck_closed_form(g, 1.0, Potential::zero(1), 1.0, |x, xp, t| {
        (x - xp) * (x - xp) / (2.0 * t)
    })
    .unwrap();
    let psi0 = WaveFunction::standard(g);
    let exact = b.reference().unwrap().evolve(&psi0, 0.2).unwrap();
    let approx = apply_kernel(&b.build(0.2).unwrap(), &psi0).unwrap();
    assert!(approx.distance(&exact).unwrap() < 1e-12);
}

#[test]
fn closed_form_van_vleck_oscillator_beats_ks() {
    let g = Grid1D::standard();
    let v = Potential::harmonic(1.0, 1.0);
    let vv = KernelBuilder::van_vleck_closed_form(g, 1.0, v.clone(), 1.0, |x, xp, t| {
        harmonic_action(1.0, 1.0, x, xp, t)
    })
    .unwrap();
    let ks = KernelBuilder::ks(g, 1.0, v, 1.0).unwrap();
    let psi0 = WaveFunction::gaussian(g, 0.5, 1.0, 0.0);
    let exact = ks.reference().unwrap().evolve(&psi0, 0.1).unwrap();
    let err = |b: &KernelBuilder| apply_kernel(&b.build(0.1).unwrap(), &psi0).unwrap().distance(&exact).unwrap();
    assert!(err(&vv) < 0.01 * err(&ks));
}
