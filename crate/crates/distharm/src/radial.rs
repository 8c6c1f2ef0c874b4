use distharm_core::conformal::conformal_metric;
use distharm_core::geometry::PointGeometry;
use distharm_core::radial::{self, Branch, RadialRow};
use distharm_core::scene::builtin;
use serde::Serialize;

use crate::error::{CliError, Result};

/// Radii at which the curvature of the deformed metric is sampled.
const CURVATURE_SAMPLES: usize = 11;

/// `a:b` with `0 < a < b`.
pub fn parse_range(spec: &str) -> Result<(f64, f64)> {
    let bad = || CliError::Usage(format!("radius range `{spec}` must look like r0:r1"));
    let (a, b) = spec.split_once(':').ok_or_else(bad)?;
    let r0: f64 = a.trim().parse().map_err(|_| bad())?;
    let r1: f64 = b.trim().parse().map_err(|_| bad())?;
    if !(r0 > 0.0) {
        return Err(CliError::Usage(format!("r0 must be > 0, got {r0}")));
    }
    if !(r1 > r0 && r1.is_finite()) {
        return Err(CliError::Usage(format!("need r0 < r1, got {r0}:{r1}")));
    }
    Ok((r0, r1))
}

#[derive(Debug, Clone, Serialize)]
pub struct RadialSummary {
    pub max_abs_error: f64,
    pub max_residual: f64,
    /// Largest `|ODE residual|` of the singular branch over the same radii.
    pub max_singular_residual: f64,
    /// Largest `|K̃|` of `e^{2μ}g` sampled along the positive x axis.
    pub max_curvature: f64,
    /// Largest `|g̃_ij − δ_ij|` at the same radii.
    pub max_metric_deviation: f64,
    /// Whether `g̃` is the Euclidean metric there.
    pub euclidean: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RadialOutcome {
    pub c: f64,
    pub d: f64,
    pub r0: f64,
    pub r1: f64,
    pub steps: usize,
    pub summary: RadialSummary,
    pub rows: Vec<RadialRow>,
}

/// Gaussian curvature of `e^{2μ}g` on the spherical chart at `(r, 0)`,
/// and its largest deviation from `δ`.
fn deformed_metric(c: f64, d: f64, r: f64) -> Result<(f64, f64)> {
    let scene = builtin("sphere-chart")?;
    let mu = radial::mu_family_field(c, d, &scene.coordinates)?;
    let tilde = conformal_metric(&scene.metric, &mu)?;
    let x = [r, 0.0];
    let geo = PointGeometry::new(&tilde, &x)?;
    let (ex, ey) = ([1.0, 0.0], [0.0, 1.0]);
    let g = geo.metric_values();
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    let mut deviation = 0.0f64;
    for (i, row) in g.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            deviation = deviation.max((v - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    Ok((geo.inner(&geo.curvature(&ex, &ey, &ey), &ex) / det, deviation))
}

pub fn run_radial(c: f64, d: f64, r0: f64, r1: f64, steps: usize) -> Result<RadialOutcome> {
    if !(d > 0.0 && d.is_finite()) {
        return Err(CliError::Usage(format!("D must be positive, got {d}")));
    }
    if !c.is_finite() {
        return Err(CliError::Usage(format!("C must be finite, got {c}")));
    }
    if steps == 0 {
        return Err(CliError::Usage("--steps must be at least 1".into()));
    }
    let rows = radial::integrate_radial_steps(c, r0, r1, steps)?;
    let mut max_singular_residual = 0.0f64;
    for row in &rows {
        let f = radial::closed_form_f(Branch::Singular, 0.0, row.r)?;
        let df = radial::closed_form_df(Branch::Singular, 0.0, row.r)?;
        max_singular_residual = max_singular_residual.max(radial::ode_residual(row.r, f, df)?.abs());
    }
    let (mut max_curvature, mut max_metric_deviation) = (0.0f64, 0.0f64);
    for k in 0..CURVATURE_SAMPLES {
        let r = r0 + (r1 - r0) * k as f64 / (CURVATURE_SAMPLES - 1) as f64;
        let (curvature, deviation) = deformed_metric(c, d, r)?;
        max_curvature = max_curvature.max(curvature.abs());
        max_metric_deviation = max_metric_deviation.max(deviation);
    }
    let summary = RadialSummary {
        max_abs_error: rows.iter().map(|r| r.abs_error).fold(0.0, f64::max),
        max_residual: rows.iter().map(|r| r.residual.abs()).fold(0.0, f64::max),
        max_singular_residual,
        max_curvature,
        max_metric_deviation,
        euclidean: max_metric_deviation <= 1e-10,
    };
    Ok(RadialOutcome {
        c,
        d,
        r0,
        r1,
        steps,
        summary,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("0.5:3").unwrap(), (0.5, 3.0));
        assert!(parse_range("0:2").is_err());
        assert!(parse_range("2:1").is_err());
        assert!(parse_range("2").is_err());
    }

    #[test]
    fn euclidean_member() {
        let out = run_radial(1.0, 0.5, 1.0, 2.0, 1000).unwrap();
        assert!(out.summary.max_abs_error <= 1e-6);
        assert!(out.summary.euclidean);
        assert!(out.summary.max_curvature <= 1e-7);
        // 4D²r^{4(C−1)}δ: flat, but not the identity
        let other = run_radial(2.0, 1.0, 1.0, 2.0, 100).unwrap();
        assert!(!other.summary.euclidean);
        assert!(other.summary.max_curvature <= 1e-7);
    }

    #[test]
    fn singular_branch_is_a_numerical_error() {
        let err = run_radial(0.5, 1.0, 1.0, 2.0, 100).unwrap_err();
        assert_eq!(err.exit_code(), crate::error::EXIT_NUMERICAL);
    }
}
