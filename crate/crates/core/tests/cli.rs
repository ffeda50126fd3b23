use bornjordan::cli::run;

fn bjq(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("bjq").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn slope_of(csv: &str) -> f64 {
    let line = csv.lines().find(|l| l.starts_with("# slope=")).expect("slope line");
    line["# slope=".len()..].split_whitespace().next().unwrap().parse().unwrap()
}

#[test]
fn quantize_reports_sym_difference() {
    let (code, out, _) = bjq(&["quantize", "--rule", "all", "x^2*p^2"]);
    assert_eq!(code, 0);
    assert!(out.contains("weyl - bj: (1/6)*hbar^2"), "{out}");
    assert!(out.lines().any(|l| l.starts_with("sym - bj: ")));
}

#[test]
fn rules_agree_on_quadratic_forms() {
    let (code, out, _) = bjq(&["quantize", "--rule", "all", "p^2 + x*p + x^2"]);
    assert_eq!(code, 0);
    assert!(out.contains("weyl - bj: 0"), "{out}");
}

#[test]
fn dilemma_line_shape() {
    let (_, out, _) = bjq(&["dilemma"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[3], "per-component: (-1/6)*hbar^2, total: (-1/2)*hbar^2");
}

#[test]
fn ks_oscillator_study_has_second_order_slope() {
    let (code, out, err) = bjq(&["prop-study", "--builder", "ks", "--potential", "ho"]);
    assert_eq!(code, 0, "{err}");
    let s = slope_of(&out);
    assert!((1.85..=2.15).contains(&s), "{s}");
}

#[test]
fn identical_argv_gives_identical_bytes() {
    let args = ["prop-study", "--builder", "mid1", "--potential", "quartic", "--points", "64", "--t-grid", "0.1,0.05"];
    let (a, b) = (bjq(&args), bjq(&args));
    assert_eq!(a.0, 0);
    assert_eq!(a.1, b.1);
}

#[test]
fn action_study_with_closed_form_reference() {
    let (code, out, err) = bjq(&["action-study", "--potential", "ho", "--x", "1", "--xp", "0"]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("# reference=closed-form"), "{out}");
    let slopes: Vec<f64> = out
        .split("# approximation=")
        .skip(1)
        .map(slope_of)
        .collect();
    assert_eq!(slopes.len(), 3);
    assert!(slopes[0] >= 1.85);
    assert!((slopes[1] - 1.0).abs() < 0.15 && (slopes[2] - 1.0).abs() < 0.15);
}

#[test]
fn bad_numbers_are_usage_errors() {
    assert_eq!(bjq(&["compose", "--steps", "0"]).0, 2);
    assert_eq!(bjq(&["prop-study", "--builder", "ks", "--potential", "ho", "--t-grid", "0.1,-1"]).0, 2);
    assert_eq!(bjq(&["quantize", "x^"]).0, 2);
}
