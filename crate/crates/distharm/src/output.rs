//! Text, JSON and CSV renderings. All three are pure functions of their
//! input, so equal results give byte-identical output.

use std::io::Write;

use distharm_core::check::{CheckKind, CheckResult};
use serde::Serialize;

use crate::error::Result;
use crate::radial::RadialOutcome;
use crate::report::PointReport;
use crate::verify::VerifyOutcome;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

/// Column order of `verify --format csv`.
pub const VERIFY_COLUMNS: [&str; 10] = [
    "check",
    "case",
    "scene",
    "point",
    "lhs_norm",
    "rhs_norm",
    "abs_error",
    "rel_error",
    "tolerance",
    "pass",
];

/// Column order of `report --format csv`.
pub const REPORT_COLUMNS: [&str; 18] = [
    "point",
    "h_sigma",
    "h_sigma_perp",
    "h",
    "tau_h",
    "tau_v",
    "h_sigma_norm",
    "h_sigma_perp_norm",
    "h_norm",
    "tau_h_norm",
    "tau_v_norm",
    "mu",
    "direct_tau_h",
    "predicted_tau_h",
    "tau_h_residual",
    "direct_tau_v",
    "predicted_tau_v",
    "tau_v_residual",
];

/// Column order of `radial --format csv`.
pub const RADIAL_COLUMNS: [&str; 5] = ["r", "f_numeric", "f_closed", "abs_error", "residual"];

/// Shortest round-trip form; scientific notation outside `[1e-4, 1e15)`.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) || !x.is_finite() {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

/// Vector components joined by `;`.
pub fn join(v: &[f64]) -> String {
    v.iter().map(|x| num(*x)).collect::<Vec<_>>().join(";")
}

/// Matrix rows joined by `|`.
pub fn join_matrix(m: &[Vec<f64>]) -> String {
    m.iter().map(|r| join(r)).collect::<Vec<_>>().join("|")
}

fn tuple(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
    format!("({})", parts.join(", "))
}

fn json<W: Write, T: Serialize>(out: &mut W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out)
}

fn csv_error(e: csv::Error) -> crate::error::CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => io.into(),
        other => std::io::Error::other(format!("{other:?}")).into(),
    }
}

pub fn write_verify<W: Write>(out: &mut W, outcome: &VerifyOutcome, format: Format) -> Result<()> {
    match format {
        Format::Json => json(out, outcome),
        Format::Csv => {
            let mut w = csv_writer(&mut *out);
            w.write_record(VERIFY_COLUMNS).map_err(csv_error)?;
            for r in &outcome.results {
                w.write_record([
                    r.check.name().to_string(),
                    r.case.clone(),
                    r.scene.clone(),
                    join(&r.point),
                    num(r.lhs_norm),
                    num(r.rhs_norm),
                    num(r.abs_error),
                    num(r.rel_error),
                    num(r.tolerance),
                    r.pass.to_string(),
                ])
                .map_err(csv_error)?;
            }
            w.flush()?;
            Ok(())
        }
        Format::Text => write_verify_text(out, outcome),
    }
}

struct CaseSummary<'a> {
    check: CheckKind,
    case: &'a str,
    total: usize,
    failed: Vec<&'a CheckResult>,
    max_rel: f64,
    tolerance: f64,
}

fn write_verify_text<W: Write>(out: &mut W, outcome: &VerifyOutcome) -> Result<()> {
    writeln!(
        out,
        "scene {}  seed {}  points {}  checks {}",
        outcome.scene,
        outcome.seed,
        outcome.samples,
        outcome.checks.len()
    )?;
    if !outcome.mus.is_empty() {
        writeln!(out, "conformal factors: {}", outcome.mus.join("  "))?;
    }
    let mut cases: Vec<CaseSummary> = Vec::new();
    for r in &outcome.results {
        let pos = cases.iter().position(|c| c.check == r.check && c.case == r.case);
        let entry = match pos {
            Some(i) => &mut cases[i],
            None => {
                cases.push(CaseSummary {
                    check: r.check,
                    case: &r.case,
                    total: 0,
                    failed: Vec::new(),
                    max_rel: 0.0,
                    tolerance: r.tolerance,
                });
                cases.last_mut().unwrap()
            }
        };
        entry.total += 1;
        entry.max_rel = entry.max_rel.max(r.rel_error);
        if !r.pass {
            entry.failed.push(r);
        }
    }
    for c in &cases {
        let status = if c.failed.is_empty() { "PASS" } else { "FAIL" };
        writeln!(
            out,
            "{status} {:<27} {:<40} {:>4}/{:<4} max_rel {:.3e}  tol {:.0e}",
            c.check.name(),
            c.case,
            c.total - c.failed.len(),
            c.total,
            c.max_rel,
            c.tolerance
        )?;
        for f in &c.failed {
            writeln!(
                out,
                "     at {}  lhs {:.6e}  rhs {:.6e}  abs {:.3e}  rel {:.3e}",
                tuple(&f.point),
                f.lhs_norm,
                f.rhs_norm,
                f.abs_error,
                f.rel_error
            )?;
        }
    }
    let s = &outcome.summary;
    writeln!(out, "{} passed, {} failed, {} total", s.passed, s.failed, s.total)?;
    Ok(())
}

pub fn write_reports<W: Write>(out: &mut W, scene: &str, reports: &[PointReport], format: Format) -> Result<()> {
    match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                scene: &'a str,
                points: &'a [PointReport],
            }
            json(out, &Doc { scene, points: reports })
        }
        Format::Csv => {
            let mut w = csv_writer(&mut *out);
            w.write_record(REPORT_COLUMNS).map_err(csv_error)?;
            for p in reports {
                let t = &p.tension;
                let base = [
                    join(&t.point),
                    join(&t.h_sigma),
                    join(&t.h_sigma_perp),
                    join(&t.h),
                    join(&t.tau_h),
                    join_matrix(&t.tau_v),
                    num(t.h_sigma_norm),
                    num(t.h_sigma_perp_norm),
                    num(t.h_norm),
                    num(t.tau_h_norm),
                    num(t.tau_v_norm),
                ];
                if p.conformal.is_empty() {
                    let row: Vec<String> = base.iter().cloned().chain((0..7).map(|_| String::new())).collect();
                    w.write_record(row).map_err(csv_error)?;
                }
                for c in &p.conformal {
                    let extra = [
                        c.mu.clone(),
                        join(&c.direct_tau_h),
                        join(&c.predicted_tau_h),
                        num(c.tau_h_residual),
                        join_matrix(&c.direct_tau_v),
                        join_matrix(&c.predicted_tau_v),
                        num(c.tau_v_residual),
                    ];
                    w.write_record(base.iter().chain(extra.iter())).map_err(csv_error)?;
                }
            }
            w.flush()?;
            Ok(())
        }
        Format::Text => {
            writeln!(out, "scene {scene}  points {}", reports.len())?;
            for p in reports {
                let t = &p.tension;
                writeln!(out, "point {}", tuple(&t.point))?;
                writeln!(out, "  H_sigma      {}  norm {:.6e}", tuple(&t.h_sigma), t.h_sigma_norm)?;
                writeln!(out, "  H_sigma_perp {}  norm {:.6e}", tuple(&t.h_sigma_perp), t.h_sigma_perp_norm)?;
                writeln!(out, "  H            {}  norm {:.6e}", tuple(&t.h), t.h_norm)?;
                writeln!(out, "  tau_h        {}  norm {:.6e}", tuple(&t.tau_h), t.tau_h_norm)?;
                let rows: Vec<String> = t.tau_v.iter().map(|r| tuple(r)).collect();
                writeln!(out, "  tau_v        [{}]  norm {:.6e}", rows.join(", "), t.tau_v_norm)?;
                for c in &p.conformal {
                    writeln!(out, "  mu = {}", c.mu)?;
                    writeln!(
                        out,
                        "    e^(4mu) tau_h(g~) {}  predicted {}  residual {:.3e}",
                        tuple(&c.direct_tau_h),
                        tuple(&c.predicted_tau_h),
                        c.tau_h_residual
                    )?;
                    let d: Vec<String> = c.direct_tau_v.iter().map(|r| tuple(r)).collect();
                    let q: Vec<String> = c.predicted_tau_v.iter().map(|r| tuple(r)).collect();
                    writeln!(
                        out,
                        "    e^(2mu) tau_v(g~) [{}]  predicted [{}]  residual {:.3e}",
                        d.join(", "),
                        q.join(", "),
                        c.tau_v_residual
                    )?;
                }
            }
            Ok(())
        }
    }
}

pub fn write_radial<W: Write>(out: &mut W, outcome: &RadialOutcome, format: Format) -> Result<()> {
    let s = &outcome.summary;
    match format {
        Format::Json => json(out, outcome),
        Format::Csv => {
            let mut w = csv_writer(&mut *out);
            w.write_record(RADIAL_COLUMNS).map_err(csv_error)?;
            for r in &outcome.rows {
                w.write_record([
                    num(r.r),
                    num(r.f_numeric),
                    num(r.f_closed),
                    num(r.abs_error),
                    num(r.residual),
                ])
                .map_err(csv_error)?;
            }
            w.flush()?;
            Ok(())
        }
        Format::Text => {
            writeln!(
                out,
                "C = {}  D = {}  r in [{}, {}]  steps {}",
                outcome.c, outcome.d, outcome.r0, outcome.r1, outcome.steps
            )?;
            writeln!(out, "{:>12} {:>16} {:>16} {:>12} {:>12}", "r", "f_numeric", "f_closed", "abs_error", "residual")?;
            for r in &outcome.rows {
                writeln!(
                    out,
                    "{:>12.6} {:>16.10} {:>16.10} {:>12.3e} {:>12.3e}",
                    r.r, r.f_numeric, r.f_closed, r.abs_error, r.residual
                )?;
            }
            writeln!(out, "{}", radial_summary_line(outcome))?;
            let note = if s.euclidean {
                "the deformed metric is Euclidean on this range".to_string()
            } else {
                format!(
                    "the deformed metric differs from the Euclidean one by up to {:.3e}",
                    s.max_metric_deviation
                )
            };
            writeln!(out, "note: {note}; max |curvature| {:.3e}", s.max_curvature)?;
            Ok(())
        }
    }
}

/// One-line summary; also printed on stderr for the machine formats.
pub fn radial_summary_line(outcome: &RadialOutcome) -> String {
    let s = &outcome.summary;
    format!(
        "max abs error {:.3e}  max residual {:.3e}  singular-branch residual {:.3e}",
        s.max_abs_error, s.max_residual, s.max_singular_residual
    )
}
