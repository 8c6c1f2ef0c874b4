//! Radial conformal factors on the punctured plane with the spherical
//! metric `4/(1+r²)² δ`.
//!
//! For `μ = μ(r)` put `f = Yμ` with `Y = ((r²+1)/2) d/dr`. Horizontal
//! harmonicity of the circle foliation under `e^{2μ} g` reduces to
//!
//! ```text
//! 0 = 2r(r²−1)(1−f²) + ((r²−1)² − 4r²) f − r(r⁴−1) f' + 2r²(r²+1) f f'
//! ```
//!
//! whose solutions are the singular branch `f = (r²−1)/(2r)` and the family
//! `f = (C(r²+1) − 1)/r`, i.e. `μ = log(D (r²+1) r^{2(C−1)})`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::expr::ScalarField;
use crate::jet::Scalar;

/// `|f'`-coefficient`|` below which the ODE is treated as singular.
pub const DENOMINATOR_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `f = (r²−1)/(2r)`, the vanishing locus of the `f'` coefficient.
    Singular,
    /// `f = (C(r²+1) − 1)/r`.
    Family,
}

fn positive_radius(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("radius must be positive, got {r}")))
    }
}

/// Right-hand side of the ODE with `f` and `f'` substituted.
pub fn ode_residual(r: f64, f: f64, fprime: f64) -> Result<f64> {
    positive_radius(r)?;
    let r2 = r * r;
    Ok(2.0 * r * (r2 - 1.0) * (1.0 - f * f) + ((r2 - 1.0) * (r2 - 1.0) - 4.0 * r2) * f
        - r * (r2 * r2 - 1.0) * fprime
        + 2.0 * r2 * (r2 + 1.0) * f * fprime)
}

/// `A(r) = (r²−1)/(2r)`, the mean-curvature coefficient of the circles.
pub fn mean_curvature_coefficient(r: f64) -> f64 {
    (r * r - 1.0) / (2.0 * r)
}

pub fn closed_form_f(branch: Branch, c: f64, r: f64) -> Result<f64> {
    positive_radius(r)?;
    Ok(match branch {
        Branch::Singular => mean_curvature_coefficient(r),
        Branch::Family => (c * (r * r + 1.0) - 1.0) / r,
    })
}

/// `df/dr` of the closed forms.
pub fn closed_form_df(branch: Branch, c: f64, r: f64) -> Result<f64> {
    positive_radius(r)?;
    let r2 = r * r;
    Ok(match branch {
        Branch::Singular => (r2 + 1.0) / (2.0 * r2),
        Branch::Family => c * (1.0 - 1.0 / r2) + 1.0 / r2,
    })
}

/// `log(D (r²+1) r^{2(C−1)})` in any scalar type, so it can be
/// differentiated through jets. No domain checks.
pub fn mu_family_generic<T: Scalar>(c: f64, d: f64, r: T) -> T {
    let r2 = r * r;
    (r2 + T::constant(1.0)).ln() + r2.ln().scale(c - 1.0) + T::constant(libm::log(d))
}

pub fn mu_family(c: f64, d: f64, r: f64) -> Result<f64> {
    positive_radius(r)?;
    if !(d > 0.0) {
        return Err(Error::InvalidArgument(format!("D must be positive, got {d}")));
    }
    Ok(mu_family_generic(c, d, r))
}

/// The family as a chart field over the first two coordinates.
pub fn mu_family_field(c: f64, d: f64, coordinates: &[String]) -> Result<ScalarField> {
    if !(d > 0.0) {
        return Err(Error::InvalidArgument(format!("D must be positive, got {d}")));
    }
    if coordinates.len() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "radial family lives on a 2-dimensional chart, got {} coordinates",
            coordinates.len()
        )));
    }
    let (x, y) = (&coordinates[0], &coordinates[1]);
    let src = format!("log({d}*(1+{x}^2+{y}^2)*({x}^2+{y}^2)^({c}-1))");
    ScalarField::parse(&src, coordinates)
}

/// One member of either solution branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialSolution {
    pub branch: Branch,
    pub c: f64,
    pub d: f64,
}

impl RadialSolution {
    pub fn family(c: f64, d: f64) -> RadialSolution {
        RadialSolution {
            branch: Branch::Family,
            c,
            d,
        }
    }

    pub fn f(&self, r: f64) -> Result<f64> {
        closed_form_f(self.branch, self.c, r)
    }

    pub fn df(&self, r: f64) -> Result<f64> {
        closed_form_df(self.branch, self.c, r)
    }

    /// The family's conformal factor. The singular branch coincides with
    /// the family at `C = 1/2`.
    pub fn mu(&self, r: f64) -> Result<f64> {
        let c = match self.branch {
            Branch::Family => self.c,
            Branch::Singular => 0.5,
        };
        mu_family(c, self.d, r)
    }

    pub fn a(&self, r: f64) -> f64 {
        mean_curvature_coefficient(r)
    }
}

/// Explicit form `f' = N(r, f) / D(r, f)` of the ODE.
pub fn slope(r: f64, f: f64) -> Result<f64> {
    positive_radius(r)?;
    let r2 = r * r;
    let num = 2.0 * r * (r2 - 1.0) * (1.0 - f * f) + ((r2 - 1.0) * (r2 - 1.0) - 4.0 * r2) * f;
    let den = r * (r2 * r2 - 1.0) - 2.0 * r2 * (r2 + 1.0) * f;
    if libm::fabs(den) < DENOMINATOR_THRESHOLD {
        return Err(Error::SingularBranch { r });
    }
    Ok(num / den)
}

/// One row of the integration table. `residual` is the ODE residual of
/// the closed form at `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RadialRow {
    pub r: f64,
    pub f_numeric: f64,
    pub f_closed: f64,
    pub abs_error: f64,
    pub residual: f64,
}

/// Classical RK4 from `f(r0) = f0` to `r1` in `ceil(|r1−r0|/step)` equal
/// steps, compared against the family member with parameter `c`.
pub fn integrate_radial_from(c: f64, r0: f64, f0: f64, r1: f64, step: f64) -> Result<Vec<RadialRow>> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {step}")));
    }
    let steps = libm::ceil(libm::fabs(r1 - r0) / step).max(1.0) as usize;
    rk4(c, r0, f0, r1, steps)
}

/// RK4 in exactly `steps` equal steps.
pub fn rk4(c: f64, r0: f64, f0: f64, r1: f64, steps: usize) -> Result<Vec<RadialRow>> {
    positive_radius(r0)?;
    positive_radius(r1)?;
    if steps == 0 {
        return Err(Error::InvalidArgument("at least one step is needed".into()));
    }
    if !f0.is_finite() {
        return Err(Error::InvalidArgument(format!("initial value {f0}")));
    }
    let h = (r1 - r0) / steps as f64;
    let row = |r: f64, f: f64| -> Result<RadialRow> {
        let closed = closed_form_f(Branch::Family, c, r)?;
        let residual = ode_residual(r, closed, closed_form_df(Branch::Family, c, r)?)?;
        Ok(RadialRow {
            r,
            f_numeric: f,
            f_closed: closed,
            abs_error: libm::fabs(f - closed),
            residual,
        })
    };
    let mut rows = Vec::with_capacity(steps + 1);
    let mut f = f0;
    rows.push(row(r0, f)?);
    for k in 0..steps {
        let r = r0 + h * k as f64;
        let k1 = slope(r, f)?;
        let k2 = slope(r + 0.5 * h, f + 0.5 * h * k1)?;
        let k3 = slope(r + 0.5 * h, f + 0.5 * h * k2)?;
        let k4 = slope(r + h, f + h * k3)?;
        f += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        let r_next = if k + 1 == steps { r1 } else { r0 + h * (k + 1) as f64 };
        rows.push(row(r_next, f)?);
    }
    Ok(rows)
}

/// RK4 started on the family member `c` at `r0`, in `steps` steps.
pub fn integrate_radial_steps(c: f64, r0: f64, r1: f64, steps: usize) -> Result<Vec<RadialRow>> {
    let f0 = closed_form_f(Branch::Family, c, r0)?;
    rk4(c, r0, f0, r1, steps)
}

/// RK4 started on the family member `c` at `r0`.
pub fn integrate_radial(c: f64, r0: f64, r1: f64, step: f64) -> Result<Vec<RadialRow>> {
    let f0 = closed_form_f(Branch::Family, c, r0)?;
    integrate_radial_from(c, r0, f0, r1, step)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::Jet2;

    #[test]
    fn residual_examples() {
        assert!(ode_residual(2.0, 0.75, 0.625).unwrap().abs() < 1e-12);
        assert!(ode_residual(2.0, -0.5, 0.25).unwrap().abs() < 1e-12);
        assert_eq!(ode_residual(1.0, 0.0, 0.0).unwrap(), 0.0);
        assert!(ode_residual(0.0, 0.0, 0.0).is_err());
        assert!(ode_residual(-1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn closed_forms() {
        assert_eq!(closed_form_f(Branch::Family, 1.0, 2.0).unwrap(), 2.0);
        assert_eq!(closed_form_f(Branch::Singular, 0.0, 1.0).unwrap(), 0.0);
        assert_eq!(closed_form_f(Branch::Family, 0.0, 2.0).unwrap(), -0.5);
        assert!(closed_form_f(Branch::Family, 0.0, 0.0).is_err());
        assert_eq!(closed_form_df(Branch::Singular, 0.0, 2.0).unwrap(), 0.625);
        assert_eq!(closed_form_df(Branch::Family, 0.0, 2.0).unwrap(), 0.25);
    }

    #[test]
    fn branches_solve_the_ode() {
        for k in 0..100 {
            let r = 0.5 + 2.5 * k as f64 / 99.0;
            for (branch, c) in [(Branch::Singular, 0.0), (Branch::Family, 0.0), (Branch::Family, 1.0), (Branch::Family, 2.0), (Branch::Family, -0.7)] {
                let f = closed_form_f(branch, c, r).unwrap();
                let df = closed_form_df(branch, c, r).unwrap();
                assert!(ode_residual(r, f, df).unwrap().abs() <= 1e-9, "{branch:?} {c} {r}");
            }
        }
    }

    #[test]
    fn family_values() {
        assert!((mu_family(1.0, 1.0, 1.0).unwrap() - libm::log(2.0)).abs() < 1e-15);
        for r in [0.3, 1.0, 2.7] {
            let want = libm::log((r * r + 1.0) / 2.0);
            assert!((mu_family(1.0, 0.5, r).unwrap() - want).abs() < 1e-15);
        }
        assert!(mu_family(1.0, 0.0, 1.0).is_err());
        assert!(mu_family(1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn family_derivative_matches_f() {
        // Y μ = ((r²+1)/2) μ'(r)
        for (c, d) in [(0.0, 0.5), (1.0, 1.0), (2.0, 0.5), (-1.3, 3.0)] {
            for k in 0..100 {
                let r = 0.3 + 2.7 * k as f64 / 99.0;
                let jet = mu_family_generic(c, d, Jet2::seed(&[r], 0).unwrap());
                let y_mu = 0.5 * (r * r + 1.0) * jet.grad[0];
                let f = closed_form_f(Branch::Family, c, r).unwrap();
                assert!((y_mu - f).abs() <= 1e-9 * (1.0 + f.abs()));
            }
        }
    }

    #[test]
    fn family_field_matches_radial_function() {
        let coords = crate::expr::default_coordinates(2);
        let field = mu_family_field(2.0, 0.5, &coords).unwrap();
        for x in [[0.6, 0.8], [-1.5, 0.2]] {
            let r = libm::hypot(x[0], x[1]);
            let v = field.eval_value(&x).unwrap();
            assert!((v - mu_family(2.0, 0.5, r).unwrap()).abs() < 1e-14);
        }
        let negative = mu_family_field(-0.5, 1.0, &coords).unwrap();
        assert!(negative.eval(&[1.0, 1.0]).is_ok());
    }

    #[test]
    fn rk4_tracks_the_family() {
        for (c, r0, r1) in [(1.0, 1.0, 2.0), (0.0, 0.5, 3.0), (2.0, 0.4, 2.5)] {
            let rows = integrate_radial(c, r0, r1, 1e-3).unwrap();
            assert_eq!(rows.first().unwrap().r, r0);
            assert_eq!(rows.last().unwrap().r, r1);
            let worst = rows.iter().map(|r| r.abs_error).fold(0.0, f64::max);
            assert!(worst <= 1e-6, "{c}: {worst}");
            assert!(rows.iter().all(|r| r.residual.abs() <= 1e-9));
        }
    }

    #[test]
    fn singular_start_is_rejected() {
        let f0 = closed_form_f(Branch::Singular, 0.0, 1.5).unwrap();
        assert!(matches!(
            integrate_radial_from(1.0, 1.5, f0, 2.0, 1e-3),
            Err(Error::SingularBranch { .. })
        ));
        // C = 1/2 is the singular branch itself
        assert!(matches!(
            integrate_radial(0.5, 1.0, 2.0, 1e-3),
            Err(Error::SingularBranch { .. })
        ));
        assert!(integrate_radial(1.0, 1.0, 2.0, 0.0).is_err());
        assert!(integrate_radial(1.0, 0.0, 2.0, 1e-3).is_err());
        assert!(integrate_radial_steps(1.0, 1.0, 2.0, 0).is_err());
        assert_eq!(integrate_radial_steps(1.0, 1.0, 2.0, 1000).unwrap().len(), 1001);
    }
}
