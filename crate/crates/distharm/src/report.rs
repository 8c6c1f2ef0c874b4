use std::path::Path;

use distharm_core::check::compare;
use distharm_core::expr::ScalarField;
use distharm_core::scene::Scene;
use distharm_core::tension::TensionReport;
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::verify::{map_points, parse_point};

/// Conformal tensions at a point for one factor. Both sides carry the
/// normalizing factors `e^{4μ}` and `e^{2μ}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConformalEntry {
    pub mu: String,
    pub direct_tau_h: Vec<f64>,
    pub predicted_tau_h: Vec<f64>,
    pub tau_h_residual: f64,
    pub direct_tau_v: Vec<Vec<f64>>,
    pub predicted_tau_v: Vec<Vec<f64>>,
    pub tau_v_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointReport {
    #[serde(flatten)]
    pub tension: TensionReport,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub conformal: Vec<ConformalEntry>,
}

pub enum PointSource {
    /// `k` points per axis spanning the box; inadmissible nodes are
    /// skipped.
    Grid(usize),
    /// Every point must lie in the domain.
    Explicit(Vec<Vec<f64>>),
}

pub fn grid(scene: &Scene, k: usize) -> Result<Vec<Vec<f64>>> {
    if k == 0 {
        return Err(CliError::Usage("--grid must be at least 1".into()));
    }
    let d = &scene.domain;
    let n = scene.dim();
    let axis = |i: usize, j: usize| -> f64 {
        if k == 1 {
            0.5 * (d.lower[i] + d.upper[i])
        } else {
            d.lower[i] + (d.upper[i] - d.lower[i]) * j as f64 / (k - 1) as f64
        }
    };
    let total = k.checked_pow(n as u32).ok_or_else(|| CliError::Usage("grid too large".into()))?;
    let mut out = Vec::new();
    for mut idx in 0..total {
        let mut x = vec![0.0; n];
        for (i, xi) in x.iter_mut().enumerate().rev() {
            *xi = axis(i, idx % k);
            idx /= k;
        }
        if scene.contains(&x) {
            out.push(x);
        }
    }
    Ok(out)
}

/// One point per non-empty line, coordinates separated by commas; `#`
/// starts a comment.
pub fn read_points(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(parse_point)
        .collect()
}

pub fn run_report(scene: &Scene, source: PointSource, mus: &[ScalarField], threads: usize) -> Result<Vec<PointReport>> {
    let points = match source {
        PointSource::Grid(k) => grid(scene, k)?,
        PointSource::Explicit(points) => {
            for x in &points {
                scene.check_point(x)?;
            }
            points
        }
    };
    let mus: Vec<ScalarField> = if mus.is_empty() {
        scene.mu.iter().cloned().collect()
    } else {
        mus.to_vec()
    };
    let conformal = mus.iter().map(|m| scene.conformal(m.clone())).collect::<Result<Vec<_>, _>>()?;
    map_points(&points, threads, |_, x| {
        let tension = scene.framed_at(x)?.report();
        let mut entries = Vec::new();
        for (cs, mu) in conformal.iter().zip(&mus) {
            let cp = cs.at(&scene.distribution, x)?;
            let (direct_tau_h, predicted_tau_h) = (cp.direct_tau_h(), cp.predicted_tau_h());
            let (direct_tau_v, predicted_tau_v) = (cp.direct_tau_v(), cp.predicted_tau_v());
            let flat = |m: &[Vec<f64>]| m.iter().flatten().copied().collect::<Vec<f64>>();
            entries.push(ConformalEntry {
                mu: mu.to_string(),
                tau_h_residual: compare(&direct_tau_h, &predicted_tau_h).2,
                tau_v_residual: compare(&flat(&direct_tau_v), &flat(&predicted_tau_v)).2,
                direct_tau_h,
                predicted_tau_h,
                direct_tau_v,
                predicted_tau_v,
            });
        }
        Ok(PointReport {
            tension,
            conformal: entries,
        })
    })
}
