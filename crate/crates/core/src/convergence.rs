//! `(t, error)` sample sets with least-squares log-log slope fits and CSV export.

use std::fmt::Write as _;

/// Standard geometric time grid `0.2 · 2⁻ᵏ`, `k = 0..7`.
pub fn standard_t_grid() -> Vec<f64> {
    geometric_t_grid(0.2, 0.5, 8)
}

pub fn geometric_t_grid(t0: f64, ratio: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| t0 * ratio.powi(k as i32)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SkippedSample {
    pub t: f64,
    pub reason: String,
}

/// `log error ≈ intercept + slope · log t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Least squares on `(ln t, ln error)`. `None` with fewer than two points or
/// no spread in `t`.
pub fn fit_log_log(samples: &[Sample]) -> Option<LogLogFit> {
    if samples.len() < 2 {
        return None;
    }
    let n = samples.len() as f64;
    let pts: Vec<(f64, f64)> = samples.iter().map(|s| (s.t.ln(), s.error.ln())).collect();
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    Some(LogLogFit {
        slope,
        intercept,
        r_squared,
    })
}

/// Error samples of one approximation against a reference, with its fit.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub label: String,
    /// Included samples, sorted by `t`; every error is positive.
    pub samples: Vec<Sample>,
    pub skipped: Vec<SkippedSample>,
    /// `None` when fewer than two samples survive (e.g. the approximation is
    /// exact to round-off).
    pub fit: Option<LogLogFit>,
}

impl ConvergenceReport {
    /// Builds a report. Samples whose error is not finite or does not exceed
    /// `noise_floor` are moved to `skipped`; `failures` are recorded as given.
    pub fn new(
        label: impl Into<String>,
        raw: impl IntoIterator<Item = Sample>,
        failures: Vec<SkippedSample>,
        noise_floor: f64,
    ) -> Self {
        let mut samples = Vec::new();
        let mut skipped = failures;
        for s in raw {
            if !s.error.is_finite() {
                skipped.push(SkippedSample {
                    t: s.t,
                    reason: "non-finite error".into(),
                });
            } else if s.error <= noise_floor {
                skipped.push(SkippedSample {
                    t: s.t,
                    reason: format!("error {:e} at or below round-off floor {:e}", s.error, noise_floor),
                });
            } else {
                samples.push(s);
            }
        }
        samples.sort_by(|a, b| a.t.total_cmp(&b.t));
        skipped.sort_by(|a, b| a.t.total_cmp(&b.t));
        let fit = fit_log_log(&samples);
        ConvergenceReport {
            label: label.into(),
            samples,
            skipped,
            fit,
        }
    }

    pub fn slope(&self) -> Option<f64> {
        self.fit.map(|f| f.slope)
    }

    /// True when no fit could be made.
    pub fn is_degenerate(&self) -> bool {
        self.fit.is_none()
    }

    /// CSV: `# key=value` header lines, `t,error` rows, then
    /// `# slope=<v> r2=<v>`. Numbers use 17 significant digits.
    pub fn to_csv(&self, header: &[(&str, String)]) -> String {
        let mut out = String::new();
        for (k, v) in header {
            let _ = writeln!(out, "# {k}={v}");
        }
        out.push_str("t,error\n");
        for s in &self.samples {
            let _ = writeln!(out, "{:.16e},{:.16e}", s.t, s.error);
        }
        for s in &self.skipped {
            let _ = writeln!(out, "# skipped t={:.16e}: {}", s.t, s.reason);
        }
        match self.fit {
            Some(f) => {
                let _ = writeln!(out, "# slope={:.16e} r2={:.16e}", f.slope, f.r_squared);
            }
            None => out.push_str("# slope=NaN r2=NaN\n"),
        }
        out
    }
}
