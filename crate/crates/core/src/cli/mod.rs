//! `bjq` command-line front end.
//!
//! Exit codes: 0 success, 2 usage or parse error, 3 numerical failure.

mod parser;

use std::ffi::OsString;
use std::io::Write;

use clap::{Parser, Subcommand, ValueEnum};

pub use parser::{parse_observable, ObservableExpr};

use crate::convergence::{standard_t_grid, ConvergenceReport};
use crate::error::Error;
use crate::hamilton::{action_error_study, harmonic_action, BvpOptions, HamiltonianSpec};
use crate::potential::Potential;
use crate::propagators::{
    compose_steps, wavefunction_error_study, Grid1D, KernelBuilder, MidpointRule, WaveFunction,
};
use crate::quantizer::{angular_momentum_report, Rule};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "bjq", version, about = "Quantization rules and short-time propagator studies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RuleArg {
    Bj,
    Weyl,
    Sym,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum BuilderArg {
    Ks,
    Vv,
    Mid1,
    Mid2,
}

#[derive(clap::Args, Debug, Clone)]
struct Physics {
    #[arg(long, default_value_t = 1.0)]
    mass: f64,
    #[arg(long, default_value_t = 1.0)]
    hbar: f64,
}

#[derive(clap::Args, Debug, Clone)]
struct GridArgs {
    #[arg(long, default_value_t = -8.0, allow_hyphen_values = true)]
    x_min: f64,
    #[arg(long, default_value_t = 8.0, allow_hyphen_values = true)]
    x_max: f64,
    #[arg(long, default_value_t = 512)]
    points: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Quantize a classical observable and print canonical operator text.
    Quantize {
        #[arg(long, value_enum, default_value = "all")]
        rule: RuleArg,
        expr: String,
    },
    /// Weyl minus Born–Jordan quantization of the squared angular momentum.
    Dilemma,
    /// Errors of the approximate actions against the two-point action, as CSV.
    ActionStudy {
        /// Potential expression in x, or one of ho, quartic, free.
        #[arg(long, conflicts_with = "hamiltonian")]
        potential: Option<String>,
        /// A general polynomial Hamiltonian instead of kinetic plus potential.
        #[arg(long)]
        hamiltonian: Option<String>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        xp: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        t_grid: Option<Vec<f64>>,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        #[command(flatten)]
        physics: Physics,
    },
    /// One-step wave-function errors of a kernel against the exact evolution, as CSV.
    PropStudy {
        #[arg(long, value_enum)]
        builder: BuilderArg,
        #[arg(long, default_value = "ho")]
        potential: String,
        #[arg(long, value_delimiter = ',')]
        t_grid: Option<Vec<f64>>,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        physics: Physics,
    },
    /// Compose N short-time steps and compare with the exact evolution.
    Compose {
        #[arg(long, value_enum, default_value = "ks")]
        builder: BuilderArg,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value_t = 0.5)]
        t: f64,
        #[arg(long, default_value = "ho")]
        potential: String,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        physics: Physics,
    },
}

enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BoundaryValue { .. } | Error::NonFinite { .. } => Failure::Numerical(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type CmdResult = std::result::Result<(), Failure>;

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    let result = match cli.command {
        Command::Quantize { rule, expr } => quantize(rule, &expr, out),
        Command::Dilemma => dilemma(out),
        Command::ActionStudy {
            potential,
            hamiltonian,
            x,
            xp,
            t_grid,
            steps,
            physics,
        } => action_study(potential, hamiltonian, &x, &xp, t_grid, steps, &physics, out),
        Command::PropStudy {
            builder,
            potential,
            t_grid,
            grid,
            physics,
        } => prop_study(builder, &potential, t_grid, &grid, &physics, out),
        Command::Compose {
            builder,
            steps,
            t,
            potential,
            grid,
            physics,
        } => compose(builder, steps, t, &potential, &grid, &physics, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Numerical(m)) => {
            let _ = writeln!(err, "numerical failure: {m}");
            EXIT_NUMERICAL
        }
    }
}

fn io(e: std::io::Error) -> Failure {
    Failure::Usage(format!("write failed: {e}"))
}

fn quantize(rule: RuleArg, expr: &str, out: &mut dyn Write) -> CmdResult {
    let h = parse_observable(expr)?;
    let rules: &[Rule] = match rule {
        RuleArg::Bj => &[Rule::BornJordan],
        RuleArg::Weyl => &[Rule::Weyl],
        RuleArg::Sym => &[Rule::Symmetric],
        RuleArg::All => &Rule::ALL,
    };
    let ops: Vec<_> = rules.iter().map(|r| (r.short_name(), r.quantize(&h))).collect();
    for (name, op) in &ops {
        writeln!(out, "{name}: {op}").map_err(io)?;
    }
    for i in 0..ops.len() {
        for j in i + 1..ops.len() {
            let d = ops[j].1.sub(&ops[i].1)?;
            writeln!(out, "{} - {}: {d}", ops[j].0, ops[i].0).map_err(io)?;
        }
    }
    Ok(())
}

fn dilemma(out: &mut dyn Write) -> CmdResult {
    let report = angular_momentum_report();
    for (name, c) in ["lx^2", "ly^2", "lz^2"].iter().zip(&report.components) {
        writeln!(out, "weyl - bj ({name}): {c}").map_err(io)?;
    }
    writeln!(out, "per-component: {}, total: {}", report.per_component(), report.total).map_err(io)?;
    Ok(())
}

/// A named potential (`ho`, `quartic`, `free`) or a position-only expression.
pub fn potential_from_str(text: &str, mass: f64) -> crate::Result<Potential> {
    match text.trim() {
        "ho" => Ok(Potential::harmonic(mass, 1.0)),
        "quartic" => Ok(Potential::quartic()),
        "free" => Ok(Potential::zero(1).with_label("free")),
        other => Potential::polynomial(parse_observable(other)?),
    }
}

fn potential_arg(text: &str, mass: f64) -> std::result::Result<Potential, Failure> {
    Ok(potential_from_str(text, mass)?)
}

fn fmt_f(v: f64) -> String {
    format!("{v:.16e}")
}

fn join(v: &[f64]) -> String {
    v.iter().map(|&x| fmt_f(x)).collect::<Vec<_>>().join(";")
}

fn write_reports<'a>(
    out: &mut dyn Write,
    reports: impl IntoIterator<Item = (&'a str, &'a ConvergenceReport)>,
    key: &str,
    header: &[(&str, String)],
) -> CmdResult {
    for (i, (label, report)) in reports.into_iter().enumerate() {
        if i > 0 {
            writeln!(out).map_err(io)?;
        }
        let mut h = vec![(key, label.to_string())];
        h.extend(header.iter().cloned());
        write!(out, "{}", report.to_csv(&h)).map_err(io)?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn action_study(
    potential: Option<String>,
    hamiltonian: Option<String>,
    x: &[f64],
    xp: &[f64],
    t_grid: Option<Vec<f64>>,
    steps: usize,
    physics: &Physics,
    out: &mut dyn Write,
) -> CmdResult {
    let t_grid = t_grid.unwrap_or_else(standard_t_grid);
    let opts = BvpOptions {
        steps,
        ..BvpOptions::default()
    };
    let (h, label, closed_form) = match (&potential, &hamiltonian) {
        (_, Some(text)) => (HamiltonianSpec::general(parse_observable(text)?), text.clone(), false),
        (p, None) => {
            let name = p.clone().unwrap_or_else(|| "ho".into());
            let v = potential_arg(&name, physics.mass)?;
            let dims = v.dims();
            let closed = name.trim() == "ho";
            (HamiltonianSpec::kinetic_plus_potential(vec![physics.mass; dims], v)?, name, closed)
        }
    };
    let h = h.with_hbar(physics.hbar)?;
    if x.len() != h.dims() || xp.len() != h.dims() {
        return Err(Failure::Usage(format!(
            "--x and --xp need {} component(s) each",
            h.dims()
        )));
    }
    let mass = physics.mass;
    let (x0, xp0) = (x[0], xp[0]);
    let reference = move |t: f64| harmonic_action(mass, 1.0, x0, xp0, t);
    let study = action_error_study(
        &h,
        x,
        xp,
        &t_grid,
        &opts,
        if closed_form { Some(&reference) } else { None },
    )?;
    let header = [
        ("potential", label),
        ("x", join(x)),
        ("xp", join(xp)),
        ("hbar", fmt_f(physics.hbar)),
        ("m", fmt_f(physics.mass)),
        ("reference", if closed_form { "closed-form" } else { "shooting" }.to_string()),
    ];
    write_reports(out, study.iter().map(|(a, r)| (a.label(), r)), "approximation", &header)?;
    let failed = |r: &ConvergenceReport| r.skipped.iter().any(|s| !s.reason.contains("round-off"));
    if study.values().all(|r| r.samples.is_empty() && failed(r)) {
        return Err(Failure::Numerical("every boundary-value solve failed".into()));
    }
    Ok(())
}

fn builder_for(kind: BuilderArg, potential: &str, grid: &GridArgs, physics: &Physics) -> std::result::Result<KernelBuilder, Failure> {
    let g = Grid1D::new(grid.x_min, grid.x_max, grid.points)?;
    let v = potential_arg(potential, physics.mass)?;
    let b = match kind {
        BuilderArg::Ks => KernelBuilder::ks(g, physics.mass, v, physics.hbar)?,
        BuilderArg::Mid1 => KernelBuilder::midpoint(g, physics.mass, v, physics.hbar, MidpointRule::EndpointAverage)?,
        BuilderArg::Mid2 => KernelBuilder::midpoint(g, physics.mass, v, physics.hbar, MidpointRule::Midpoint)?,
        BuilderArg::Vv => {
            let h = HamiltonianSpec::kinetic_plus_potential(vec![physics.mass], v)?.with_hbar(physics.hbar)?;
            KernelBuilder::van_vleck(h, g)?
        }
    };
    Ok(b)
}

fn grid_label(g: &GridArgs) -> String {
    format!("[{},{}]x{}", fmt_f(g.x_min), fmt_f(g.x_max), g.points)
}

fn prop_study(
    kind: BuilderArg,
    potential: &str,
    t_grid: Option<Vec<f64>>,
    grid: &GridArgs,
    physics: &Physics,
    out: &mut dyn Write,
) -> CmdResult {
    let b = builder_for(kind, potential, grid, physics)?;
    let psi0 = WaveFunction::standard(*b.grid());
    let t_grid = t_grid.unwrap_or_else(standard_t_grid);
    let study = wavefunction_error_study(std::slice::from_ref(&b), &psi0, &t_grid)?;
    let header = [
        ("potential", potential.trim().to_string()),
        ("grid", grid_label(grid)),
        ("hbar", fmt_f(physics.hbar)),
        ("m", fmt_f(physics.mass)),
    ];
    write_reports(out, study.iter().map(|(k, r)| (k.as_str(), r)), "builder", &header)?;
    if study.values().all(|r| r.samples.is_empty() && !r.skipped.is_empty()) {
        return Err(Failure::Numerical("no kernel could be built on the t grid".into()));
    }
    Ok(())
}

fn compose(
    kind: BuilderArg,
    steps: usize,
    t: f64,
    potential: &str,
    grid: &GridArgs,
    physics: &Physics,
    out: &mut dyn Write,
) -> CmdResult {
    let b = builder_for(kind, potential, grid, physics)?;
    let psi0 = WaveFunction::standard(*b.grid());
    let psi = compose_steps(&b, steps, t, &psi0)?;
    let exact = b.reference()?.evolve(&psi0, t)?;
    writeln!(out, "builder={}", b.label()).map_err(io)?;
    writeln!(out, "steps={steps}").map_err(io)?;
    writeln!(out, "t={}", fmt_f(t)).map_err(io)?;
    writeln!(out, "norm={}", fmt_f(psi.norm())).map_err(io)?;
    writeln!(out, "fidelity={}", fmt_f(psi.fidelity(&exact)?)).map_err(io)?;
    writeln!(out, "error={}", fmt_f(psi.distance(&exact)?)).map_err(io)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("bjq").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn quantize_all_prints_three_rules_and_differences() {
        let (code, out, _) = run_str(&["quantize", "--rule", "all", "x^2*p^2"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 6);
        assert!(lines[0].starts_with("bj: "));
        assert!(lines[1].starts_with("weyl: "));
        assert!(lines[2].starts_with("sym: "));
        assert_eq!(lines[3], "weyl - bj: (1/6)*hbar^2");
    }

    #[test]
    fn quantize_single_rule() {
        let (code, out, _) = run_str(&["quantize", "--rule", "weyl", "x*p"]);
        assert_eq!(code, 0);
        assert_eq!(out, "weyl: (-1/2*i)*hbar^1 + (1)*x*p\n");
    }

    #[test]
    fn parse_errors_exit_two() {
        let (code, _, err) = run_str(&["quantize", "(y*pz - z*py)^2"]);
        assert_eq!(code, 2);
        assert!(err.contains("column 14"), "{err}");
        assert_eq!(run_str(&["frobnicate"]).0, 2);
        assert_eq!(run_str(&["prop-study", "--builder", "ks", "--potential", "p^2"]).0, 2);
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_str(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("quantize"));
    }

    #[test]
    fn dilemma_reports_scalars() {
        let (code, out, _) = run_str(&["dilemma"]);
        assert_eq!(code, 0);
        let last = out.lines().last().unwrap();
        assert!(last.starts_with("per-component: "));
        assert!(last.contains(", total: "));
    }

    #[test]
    fn action_study_is_deterministic_csv() {
        let args = ["action-study", "--potential", "quartic", "--x", "1", "--xp", "0.5", "--t-grid", "0.05,0.025,0.0125"];
        let (code, a, _) = run_str(&args);
        assert_eq!(code, 0);
        let (_, b, _) = run_str(&args);
        assert_eq!(a, b);
        assert!(a.starts_with("# approximation=sbar\n# potential=quartic\n"));
        assert_eq!(a.matches("t,error").count(), 3);
    }

    #[test]
    fn action_study_checks_dimensions() {
        let (code, _, _) = run_str(&["action-study", "--potential", "ho", "--x", "1,2", "--xp", "0"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn action_study_nonconvergence_exits_three() {
        // beyond the caustic the shooting cannot reach the target
        let (code, _, err) = run_str(&[
            "action-study", "--hamiltonian", "1/2*p^2*x^2", "--x", "2", "--xp", "-1", "--t-grid", "0.1,0.05",
        ]);
        assert_eq!(code, 3, "{err}");
    }

    #[test]
    fn compose_prints_norm_and_fidelity() {
        let (code, out, _) = run_str(&["compose", "--steps", "4", "--points", "128"]);
        assert_eq!(code, 0);
        assert!(out.contains("norm="));
        assert!(out.contains("fidelity="));
    }
}
