use distharm_core::check::{self, CheckKind, CheckResult, Selection, Tolerances, Verifier};
use distharm_core::expr::ScalarField;
use distharm_core::scene::Scene;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CliError, Result, EXIT_FAIL, EXIT_OK};

/// `all`, or a comma-separated list of check names.
pub fn parse_checks(spec: &str) -> Result<Selection> {
    if spec.trim() == "all" {
        return Ok(Selection::All);
    }
    let kinds = spec
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(CheckKind::from_name)
        .collect::<Result<Vec<_>, _>>()?;
    if kinds.is_empty() {
        return Err(CliError::Usage("no checks selected".into()));
    }
    Ok(Selection::Only(kinds))
}

/// `1e-6` sets every check; `halfdim=1e-6` sets one.
pub fn parse_tolerances(specs: &[String]) -> Result<Tolerances> {
    let mut tol = Tolerances::default();
    for spec in specs {
        let (kind, value) = match spec.split_once('=') {
            Some((name, value)) => (Some(CheckKind::from_name(name.trim())?), value),
            None => (None, spec.as_str()),
        };
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("tolerance `{spec}` is not a number")))?;
        if !(value > 0.0 && value.is_finite()) {
            return Err(CliError::Usage(format!("tolerance `{spec}` must be positive")));
        }
        match kind {
            Some(k) => tol.per_check.push((k, value)),
            None => tol.global = Some(value),
        }
    }
    Ok(tol)
}

pub fn parse_mus(scene: &Scene, sources: &[String]) -> Result<Vec<ScalarField>> {
    sources
        .iter()
        .map(|s| scene.parse_field(s).map_err(|e| CliError::Usage(format!("--mu `{s}`: {e}"))))
        .collect()
}

/// `x,y,...` as a point.
pub fn parse_point(spec: &str) -> Result<Vec<f64>> {
    spec.split(',')
        .map(|c| {
            c.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("bad point `{spec}`")))
        })
        .collect()
}

/// Maps `f` over indexed items, serially for one thread and on a rayon
/// pool otherwise (`0` means rayon's default size). Output order is the
/// input order, and the first error in that order wins.
pub fn map_points<T, F>(points: &[Vec<f64>], threads: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize, &[f64]) -> Result<T> + Sync,
{
    let outputs: Vec<Result<T>> = if threads == 1 {
        points.iter().enumerate().map(|(i, x)| f(i, x)).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
        pool.install(|| points.par_iter().enumerate().map(|(i, x)| f(i, x)).collect())
    };
    outputs.into_iter().collect()
}

pub struct VerifyRequest {
    pub scene: Scene,
    pub selection: Selection,
    pub mus: Vec<ScalarField>,
    pub samples: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
    /// Explicit points replace the seeded sample.
    pub points: Option<Vec<Vec<f64>>>,
    pub threads: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyOutcome {
    pub scene: String,
    pub seed: u64,
    pub samples: usize,
    pub checks: Vec<CheckKind>,
    pub mus: Vec<String>,
    pub summary: Summary,
    pub results: Vec<CheckResult>,
}

impl VerifyOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.summary.failed == 0 {
            EXIT_OK
        } else {
            EXIT_FAIL
        }
    }
}

pub fn run_verify(req: VerifyRequest) -> Result<VerifyOutcome> {
    if req.points.is_none() && req.samples == 0 {
        return Err(CliError::Usage("--samples must be at least 1".into()));
    }
    let verifier = Verifier::new(req.scene, req.selection, req.mus, req.tolerances, req.seed)?;
    let points = match req.points {
        Some(p) => p,
        None => verifier.points(req.samples)?,
    };
    let per_point = map_points(&points, req.threads, |i, x| Ok(verifier.run_point(i, x)?))?;
    let results = check::group(per_point);
    let passed = results.iter().filter(|r| r.pass).count();
    Ok(VerifyOutcome {
        scene: verifier.scene().name.clone(),
        seed: verifier.seed(),
        samples: points.len(),
        checks: verifier.kinds().to_vec(),
        mus: verifier.mus().iter().map(ToString::to_string).collect(),
        summary: Summary {
            total: results.len(),
            passed,
            failed: results.len() - passed,
        },
        results,
    })
}
