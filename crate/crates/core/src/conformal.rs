//! Conformal change `g̃ = e^{2μ} g`: predicted connection, curvature,
//! rescaled-frame coefficients and tension fields, each next to its
//! direct computation under `g̃`.
//!
//! Throughout, `T = (∇μ)^⊤` and `N = (∇μ)^⊥` are the parts of the
//! g-gradient of `μ` along `σ` and `σ⊥`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::expr::{Ast, BinaryOp, Function, ScalarField};
use crate::geometry::{Distribution, MetricField, Part, ScalarCalculus};
use crate::jet::Jet1;
use crate::linalg;
use crate::tension::{FramedPoint, Form};

/// `e^{2μ} g` as composed component fields `exp(2*μ)*g_ij`.
pub fn conformal_metric(g: &MetricField, mu: &ScalarField) -> Result<MetricField> {
    let n = g.dim();
    if mu.coordinates() != g.coordinates() {
        return Err(Error::DimensionMismatch(alloc::format!(
            "conformal factor over {:?}, metric over {:?}",
            mu.coordinates(),
            g.coordinates()
        )));
    }
    let factor = Ast::call(
        Function::Exp,
        vec![Ast::binary(BinaryOp::Mul, Ast::number(2.0), mu.ast().clone())],
    );
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            let entry = Ast::binary(BinaryOp::Mul, factor.clone(), g.component(i, j).ast().clone());
            row.push(ScalarField::from_ast(entry, g.coordinates())?);
        }
        rows.push(row);
    }
    MetricField::new(rows)
}

/// A metric together with a conformal factor and the deformed metric.
#[derive(Debug, Clone)]
pub struct ConformalScene {
    pub base: MetricField,
    pub mu: ScalarField,
    pub tilde: MetricField,
}

impl ConformalScene {
    pub fn new(base: MetricField, mu: ScalarField) -> Result<ConformalScene> {
        let tilde = conformal_metric(&base, &mu)?;
        Ok(ConformalScene { base, mu, tilde })
    }

    pub fn at(&self, dist: &Distribution, x: &[f64]) -> Result<ConformalPoint> {
        let base = FramedPoint::new(&self.base, dist, x)?;
        let tilde = FramedPoint::new(&self.tilde, dist, x)?;
        let calc = ScalarCalculus::eval(base.geometry(), &self.mu)?;
        Ok(ConformalPoint::new(base, tilde, calc))
    }
}

/// Everything needed to compare predictions with direct computation at a
/// point.
#[derive(Debug, Clone)]
pub struct ConformalPoint {
    base: FramedPoint,
    tilde: FramedPoint,
    calc: ScalarCalculus,
    /// `T = (∇μ)^⊤` as a first-order field.
    t_field: Vec<Jet1>,
    /// `N = (∇μ)^⊥` as a first-order field.
    n_field: Vec<Jet1>,
}

impl ConformalPoint {
    pub fn new(base: FramedPoint, tilde: FramedPoint, calc: ScalarCalculus) -> ConformalPoint {
        let geo = base.geometry();
        let t_field = base.frame().project(geo, calc.gradient(), Part::Tangent);
        let n_field = base.frame().project(geo, calc.gradient(), Part::Normal);
        ConformalPoint {
            base,
            tilde,
            calc,
            t_field,
            n_field,
        }
    }

    pub fn base(&self) -> &FramedPoint {
        &self.base
    }

    pub fn tilde(&self) -> &FramedPoint {
        &self.tilde
    }

    pub fn calculus(&self) -> &ScalarCalculus {
        &self.calc
    }

    pub fn mu(&self) -> f64 {
        self.calc.value()
    }

    fn values(v: &[Jet1]) -> Vec<f64> {
        v.iter().map(|c| c.value).collect()
    }

    fn hess(&self, v: &[f64]) -> Vec<f64> {
        self.calc.hess_apply(self.base.geometry(), v)
    }

    /// `∇_X Y + (Yμ)X + (Xμ)Y − g(X,Y)∇μ`.
    pub fn predicted_connection(&self, x: &[f64], y: &[Jet1]) -> Vec<f64> {
        let yv = Self::values(y);
        let mut out = self.base.covariant(x, y);
        linalg::axpy(&mut out, self.calc.derivative(&yv), x);
        linalg::axpy(&mut out, self.calc.derivative(x), &yv);
        linalg::axpy(&mut out, -self.base.inner(x, &yv), &self.calc.gradient_values());
        out
    }

    /// `∇̃_X Y` from the Christoffel symbols of `g̃`.
    pub fn direct_connection(&self, x: &[f64], y: &[Jet1]) -> Vec<f64> {
        self.tilde.covariant(x, y)
    }

    /// Curvature of `g̃` expressed through `g`, `Hess_μ` and `∇μ`.
    pub fn predicted_curvature(&self, x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
        let b = &self.base;
        let c = &self.calc;
        let geo = b.geometry();
        let grad = c.gradient_values();
        let grad_sq = c.gradient_norm_sq(geo);
        let (xm, ym, zm) = (c.derivative(x), c.derivative(y), c.derivative(z));
        let (gyz, gxz) = (b.inner(y, z), b.inner(x, z));
        let mut out = b.curvature(x, y, z);
        linalg::axpy(&mut out, -gyz, &self.hess(x));
        linalg::axpy(&mut out, gxz, &self.hess(y));
        linalg::axpy(&mut out, ym * zm - gyz * grad_sq - c.hess_form(geo, y, z), x);
        linalg::axpy(&mut out, -(xm * zm - gxz * grad_sq - c.hess_form(geo, x, z)), y);
        linalg::axpy(&mut out, xm * gyz - ym * gxz, &grad);
        out
    }

    pub fn direct_curvature(&self, x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
        self.tilde.curvature(x, y, z)
    }

    /// `g̃(∇̃_{f_β} f_γ, f_α)` for the `g̃`-frame `f`, computed directly and
    /// predicted as `e^{−μ}(g(∇_{e_β}e_γ, e_α) + μ_γ δ_αβ − μ_α δ_βγ)`.
    pub fn frame_coefficient(&self, beta: usize, gamma: usize, alpha: usize) -> (f64, f64) {
        let t = &self.tilde;
        let direct = t.inner(&t.nabla(beta, gamma), &t.e(alpha));
        let b = &self.base;
        let mu_g = self.calc.derivative(&b.e(gamma));
        let mu_a = self.calc.derivative(&b.e(alpha));
        let mut predicted = b.inner(&b.nabla(beta, gamma), &b.e(alpha));
        if alpha == beta {
            predicted += mu_g;
        }
        if beta == gamma {
            predicted -= mu_a;
        }
        (direct, libm::exp(-self.mu()) * predicted)
    }

    /// Largest coefficient residuals over the two blocks with `β, γ` in
    /// `σ`: first with `α` in `σ`, then with `α` in `σ⊥`.
    pub fn frame_coefficient_residuals(&self) -> (f64, f64) {
        let frame = self.base.frame();
        let mut worst = (0.0f64, 0.0f64);
        for b in frame.tangent_range() {
            for c in frame.tangent_range() {
                for a in 0..frame.dim() {
                    let (d, p) = self.frame_coefficient(b, c, a);
                    let r = libm::fabs(d - p);
                    if a < frame.rank() {
                        worst.0 = worst.0.max(r);
                    } else {
                        worst.1 = worst.1.max(r);
                    }
                }
            }
        }
        worst
    }

    /// `(∇_X P^⊥)V = −Σ_a [g(V, ∇_X e_a) e_a + g(V, e_a) ∇_X e_a]` with
    /// `X = e_α`.
    fn projector_derivative(&self, alpha: usize, v: &[f64]) -> Vec<f64> {
        let b = &self.base;
        let mut out = vec![0.0; b.dim()];
        for a in b.frame().tangent_range() {
            let ea = b.e(a);
            let dea = b.nabla(alpha, a);
            linalg::axpy(&mut out, -b.inner(v, &dea), &ea);
            linalg::axpy(&mut out, -b.inner(v, &ea), &dea);
        }
        out
    }

    /// The two trace terms `Σ_α (∇_{e_α}(Hess_μ e_α)^⊥)^⊤` and
    /// `Σ_α (∇_{e_α}(Hess_μ e_α)^⊤)^⊥`, written through the derivative of
    /// the projector so that only second derivatives of `μ` enter.
    pub fn mixed_projection_trace(&self) -> (Vec<f64>, Vec<f64>) {
        let b = &self.base;
        let n = b.dim();
        let mut tr1 = vec![0.0; n];
        let mut tr2 = vec![0.0; n];
        for alpha in 0..n {
            let d = self.projector_derivative(alpha, &self.hess(&b.e(alpha)));
            linalg::axpy(&mut tr1, 1.0, &b.tangent(&d));
            linalg::axpy(&mut tr2, -1.0, &b.normal(&d));
        }
        (tr1, tr2)
    }

    fn t(&self) -> Vec<f64> {
        Self::values(&self.t_field)
    }

    fn n(&self) -> Vec<f64> {
        Self::values(&self.n_field)
    }

    /// `e^{4μ} τ^h_{g̃}` predicted from `g`-quantities.
    pub fn predicted_tau_h(&self) -> Vec<f64> {
        let b = &self.base;
        let geo = b.geometry();
        let c = &self.calc;
        let p = b.rank() as f64;
        let q = b.corank() as f64;
        let (t, nv) = (self.t(), self.n());
        let grad = c.gradient_values();
        let (_, _, h) = b.mean_curvatures();
        let frame = b.frame();

        let mut out = b.tau_h(Form::Primed);
        linalg::axpy(&mut out, -1.0, &b.ricci_along(&nv, Part::Tangent));
        linalg::axpy(&mut out, -1.0, &b.ricci_along(&t, Part::Normal));
        linalg::axpy(&mut out, -1.0, &self.hess(&h));
        linalg::axpy(&mut out, -c.gradient_norm_sq(geo), &h);
        linalg::axpy(&mut out, b.inner(&grad, &h), &grad);
        let lap_s = c.laplacian_along(geo, frame, Part::Tangent);
        let lap_p = c.laplacian_along(geo, frame, Part::Normal);
        linalg::axpy(&mut out, (p - q) * b.inner(&t, &t) + lap_s, &nv);
        linalg::axpy(&mut out, (q - p) * b.inner(&nv, &nv) + lap_p, &t);
        linalg::axpy(&mut out, p, &self.hess(&nv));
        linalg::axpy(&mut out, q, &self.hess(&t));
        let t_n = b.covariant(&t, &self.n_field);
        let n_t = b.covariant(&nv, &self.t_field);
        linalg::axpy(&mut out, 1.0, &b.tangent(&t_n));
        linalg::axpy(&mut out, -1.0, &b.tangent(&n_t));
        linalg::axpy(&mut out, 1.0, &b.normal(&n_t));
        linalg::axpy(&mut out, -1.0, &b.normal(&t_n));
        let (tr1, tr2) = self.mixed_projection_trace();
        linalg::axpy(&mut out, -1.0, &tr1);
        linalg::axpy(&mut out, -1.0, &tr2);
        out
    }

    /// `e^{4μ} τ^h_{g̃}` computed under `g̃`.
    pub fn direct_tau_h(&self) -> Vec<f64> {
        linalg::scaled(libm::exp(4.0 * self.mu()), &self.tilde.tau_h(Form::Primed))
    }

    /// `e^{2μ} τ^v_{g̃}` predicted from `g`-quantities, entries against the
    /// `g`-frame.
    pub fn predicted_tau_v(&self) -> Vec<Vec<f64>> {
        let b = &self.base;
        let n = b.dim();
        let p = b.rank();
        let c = &self.calc;
        let grad = c.gradient_values();
        let (h_sigma, h_perp, _) = b.mean_curvatures();
        let mut out = b.tau_v(Form::Primed);
        for a in 0..p {
            let ea = b.e(a);
            let mu_a = c.derivative(&ea);
            let t_along_a = b.covariant(&ea, &self.t_field);
            let grad_ea = b.covariant(&grad, &b.e_field(a));
            for i in p..n {
                let ei = b.e(i);
                let mu_i = c.derivative(&ei);
                let n_along_i = b.covariant(&ei, &self.n_field);
                let mut s = (p as f64 - (n - p) as f64) * mu_a * mu_i;
                s -= 2.0 * mu_a * b.inner(&h_sigma, &ei);
                s += 2.0 * mu_i * b.inner(&h_perp, &ea);
                s -= 2.0 * b.inner(&n_along_i, &ea);
                s += 2.0 * b.inner(&t_along_a, &ei);
                s += (n as f64 - 2.0) * b.inner(&grad_ea, &ei);
                out[a][i - p] += s;
            }
        }
        out
    }

    /// `e^{2μ} τ^v_{g̃}` computed under `g̃` with its own adapted frame.
    pub fn direct_tau_v(&self) -> Vec<Vec<f64>> {
        let k = libm::exp(2.0 * self.mu());
        self.tilde
            .tau_v(Form::Primed)
            .into_iter()
            .map(|row| linalg::scaled(k, &row))
            .collect()
    }

    /// Specialization of [`predicted_tau_h`](Self::predicted_tau_h) to
    /// constant curvature `κ` and `p = q`:
    ///
    /// ```text
    /// (κ − |∇μ|²)H + (g(∇μ,H) − nκ/2)∇μ + Δ_σμ N + Δ_{σ⊥}μ T
    ///   − Hess_μ(H − n∇μ/2) + W([T, N]) − tr₁ − tr₂
    /// ```
    pub fn predicted_tau_h_halfdim(&self, kappa: f64) -> Result<Vec<f64>> {
        let b = &self.base;
        if b.rank() != b.corank() {
            return Err(Error::DimensionMismatch(alloc::format!(
                "half-dimensional formula needs p = q, got p = {}, q = {}",
                b.rank(),
                b.corank()
            )));
        }
        let geo = b.geometry();
        let c = &self.calc;
        let half_n = b.dim() as f64 / 2.0;
        let grad = c.gradient_values();
        let (_, _, h) = b.mean_curvatures();
        let frame = b.frame();
        let mut out = linalg::scaled(kappa - c.gradient_norm_sq(geo), &h);
        linalg::axpy(&mut out, b.inner(&grad, &h) - half_n * kappa, &grad);
        linalg::axpy(&mut out, c.laplacian_along(geo, frame, Part::Tangent), &self.n());
        linalg::axpy(&mut out, c.laplacian_along(geo, frame, Part::Normal), &self.t());
        let mut shifted = h.clone();
        linalg::axpy(&mut shifted, -half_n, &grad);
        linalg::axpy(&mut out, -1.0, &self.hess(&shifted));
        let br = crate::geometry::bracket(&self.t_field, &self.n_field);
        linalg::axpy(&mut out, 1.0, &b.w_reflect(&br));
        let (tr1, tr2) = self.mixed_projection_trace();
        linalg::axpy(&mut out, -1.0, &tr1);
        linalg::axpy(&mut out, -1.0, &tr2);
        Ok(out)
    }
}
