//! Second fundamental forms, mean curvatures and the tension fields of a
//! distribution at a point.
//!
//! Frame indices follow one convention throughout: `a, b, c` run over the
//! first `p` frame vectors (spanning `σ`), `i, j, k` over the remaining `q`
//! (spanning `σ⊥`), `α, β` over all `n`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::{adapted_frame, Distribution, Frame, MetricField, Part, PointGeometry};
use crate::jet::{Differentiable, Jet1, Jet2};
use crate::linalg;

/// Tangency tolerance for arguments of the second fundamental form.
pub const TANGENCY_TOLERANCE: f64 = 1e-8;

/// Which algebraic form of a tension field to evaluate. Both describe the
/// same quantity; their agreement is one of the verified identities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Form {
    /// Split by blocks: sums over `a, b` in `σ` and `i, j` in `σ⊥`.
    Primed,
    /// Sums over the full frame index `α`.
    Original,
}

/// Geometry, adapted frame and all `∇_{e_α} e_β` at one point.
#[derive(Debug, Clone)]
pub struct FramedPoint {
    geo: PointGeometry,
    frame: Frame,
    /// `nabla[α][β] = ∇_{e_α} e_β` with one derivative order.
    nabla: Vec<Vec<Vec<Jet1>>>,
}

impl FramedPoint {
    pub fn new(metric: &MetricField, dist: &Distribution, x: &[f64]) -> Result<FramedPoint> {
        let geo = PointGeometry::new(metric, x)?;
        let frame = adapted_frame(&geo, dist)?;
        Ok(FramedPoint::from_parts(geo, frame))
    }

    pub fn from_parts(geo: PointGeometry, frame: Frame) -> FramedPoint {
        let first = frame.at::<Jet1>();
        let nabla = first
            .iter()
            .map(|ea| {
                frame
                    .jets()
                    .iter()
                    .map(|eb| geo.covariant::<Jet2>(ea, eb))
                    .collect()
            })
            .collect();
        FramedPoint { geo, frame, nabla }
    }

    /// The same point seen from `σ⊥`.
    pub fn swapped(&self) -> FramedPoint {
        let n = self.frame.dim();
        let p = self.frame.rank();
        let order: Vec<usize> = (p..n).chain(0..p).collect();
        let nabla = order
            .iter()
            .map(|&a| order.iter().map(|&b| self.nabla[a][b].clone()).collect())
            .collect();
        FramedPoint {
            geo: self.geo.clone(),
            frame: self.frame.swapped(),
            nabla,
        }
    }

    pub fn geometry(&self) -> &PointGeometry {
        &self.geo
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn dim(&self) -> usize {
        self.frame.dim()
    }

    pub fn rank(&self) -> usize {
        self.frame.rank()
    }

    pub fn corank(&self) -> usize {
        self.dim() - self.rank()
    }

    /// Frame vector `e_α` as plain components.
    pub fn e(&self, alpha: usize) -> Vec<f64> {
        self.frame.vector(alpha).iter().map(|c| c.value).collect()
    }

    /// Frame vector `e_α` as a first-order field.
    pub fn e_field(&self, alpha: usize) -> Vec<Jet1> {
        self.frame.vector(alpha).iter().map(Jet2::lower).collect()
    }

    /// `∇_{e_α} e_β` as a first-order field.
    pub fn nabla_field(&self, alpha: usize, beta: usize) -> &[Jet1] {
        &self.nabla[alpha][beta]
    }

    /// `∇_{e_α} e_β` as plain components.
    pub fn nabla(&self, alpha: usize, beta: usize) -> Vec<f64> {
        self.nabla[alpha][beta].iter().map(|c| c.value).collect()
    }

    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        self.geo.inner(u, v)
    }

    pub fn norm(&self, v: &[f64]) -> f64 {
        self.geo.norm(v)
    }

    pub fn tangent(&self, v: &[f64]) -> Vec<f64> {
        self.frame.tangent(&self.geo, v)
    }

    pub fn normal(&self, v: &[f64]) -> Vec<f64> {
        self.frame.normal(&self.geo, v)
    }

    /// `∇_X V` for a first-order field `V`.
    pub fn covariant(&self, dir: &[f64], field: &[Jet1]) -> Vec<f64> {
        self.geo.covariant::<Jet1>(dir, field)
    }

    pub fn curvature(&self, x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
        self.geo.curvature(x, y, z)
    }

    /// `W(X) = X^⊤ − X^⊥`.
    pub fn w_reflect(&self, v: &[f64]) -> Vec<f64> {
        let t = self.tangent(v);
        let nrm = linalg::sub(v, &t);
        linalg::sub(&t, &nrm)
    }

    fn zero(&self) -> Vec<f64> {
        vec![0.0; self.dim()]
    }

    /// `A^σ_X Y = (∇_X Y)^⊥`, or `B^σ(X, Y)` when `symmetrized`. `X` and
    /// `Y` are first-order fields that must be tangent to `σ` at the point.
    pub fn second_fundamental(&self, x: &[Jet1], y: &[Jet1], symmetrized: bool) -> Result<Vec<f64>> {
        let xv: Vec<f64> = x.iter().map(|c| c.value).collect();
        let yv: Vec<f64> = y.iter().map(|c| c.value).collect();
        for v in [&xv, &yv] {
            let residual = self.norm(&self.normal(v));
            if residual > TANGENCY_TOLERANCE * (1.0 + self.norm(v)) {
                return Err(Error::NotTangent(residual));
            }
        }
        let a_xy = self.normal(&self.covariant(&xv, y));
        if !symmetrized {
            return Ok(a_xy);
        }
        let a_yx = self.normal(&self.covariant(&yv, x));
        Ok(linalg::scaled(0.5, &linalg::add(&a_xy, &a_yx)))
    }

    /// `(H^σ, H^{σ⊥}, H)`.
    pub fn mean_curvatures(&self) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let mut h_sigma = self.zero();
        for a in self.frame.tangent_range() {
            linalg::axpy(&mut h_sigma, 1.0, &self.normal(&self.nabla(a, a)));
        }
        let mut h_perp = self.zero();
        for i in self.frame.normal_range() {
            linalg::axpy(&mut h_perp, 1.0, &self.tangent(&self.nabla(i, i)));
        }
        let h = linalg::add(&h_sigma, &h_perp);
        (h_sigma, h_perp, h)
    }

    /// `Ric_σ(X) = Σ_a R(X, e_a) e_a` (or the sum over `σ⊥`).
    pub fn ricci_along(&self, x: &[f64], part: Part) -> Vec<f64> {
        let mut out = self.zero();
        for alpha in self.frame.range(part) {
            let e = self.e(alpha);
            linalg::axpy(&mut out, 1.0, &self.curvature(x, &e, &e));
        }
        out
    }

    /// Horizontal tension field.
    pub fn tau_h(&self, form: Form) -> Vec<f64> {
        let mut out = self.zero();
        match form {
            Form::Primed => {
                for a in self.frame.tangent_range() {
                    let ea = self.e(a);
                    for b in self.frame.tangent_range() {
                        let v = self.normal(&self.nabla(b, a));
                        linalg::axpy(&mut out, 1.0, &self.curvature(&v, &ea, &self.e(b)));
                    }
                }
                for j in self.frame.normal_range() {
                    let ej = self.e(j);
                    for i in self.frame.normal_range() {
                        let v = self.tangent(&self.nabla(i, j));
                        linalg::axpy(&mut out, 1.0, &self.curvature(&v, &ej, &self.e(i)));
                    }
                }
            }
            Form::Original => {
                for a in self.frame.tangent_range() {
                    let ea = self.e(a);
                    for alpha in 0..self.dim() {
                        let v = self.normal(&self.nabla(alpha, a));
                        linalg::axpy(&mut out, 1.0, &self.curvature(&v, &ea, &self.e(alpha)));
                    }
                }
            }
        }
        out
    }

    /// `(∇²e_γ)(e_δ, e_δ) = ∇_{e_δ}∇_{e_δ} e_γ − ∇_{∇_{e_δ} e_δ} e_γ`.
    fn second_covariant(&self, gamma: usize, delta: usize) -> Vec<f64> {
        let ed = self.e(delta);
        let first = self.covariant(&ed, &self.nabla[delta][gamma]);
        let second = self.covariant(&self.nabla(delta, delta), &self.e_field(gamma));
        linalg::sub(&first, &second)
    }

    /// Vertical tension field, a `p × q` matrix indexed by `(a, i)`.
    pub fn tau_v(&self, form: Form) -> Vec<Vec<f64>> {
        let p = self.rank();
        let n = self.dim();
        let frame: Vec<Vec<f64>> = (0..n).map(|alpha| self.e(alpha)).collect();
        let mut out = vec![vec![0.0; n - p]; p];
        match form {
            Form::Primed => {
                let second: Vec<Vec<Vec<f64>>> = (0..n)
                    .map(|g| (0..n).map(|d| self.second_covariant(g, d)).collect())
                    .collect();
                let nabla: Vec<Vec<Vec<f64>>> = (0..n)
                    .map(|s| (0..n).map(|t| self.nabla(s, t)).collect())
                    .collect();
                for a in 0..p {
                    for i in p..n {
                        let (ea, ei) = (&frame[a], &frame[i]);
                        let mut s = 0.0;
                        for b in 0..p {
                            s += self.inner(&second[a][b], ei);
                        }
                        for j in p..n {
                            s -= self.inner(&second[i][j], ea);
                        }
                        for b in 0..p {
                            for c in 0..p {
                                let v = &nabla[b][c];
                                s += 2.0 * self.inner(ea, v) * self.inner(v, ei);
                            }
                        }
                        for j in p..n {
                            for k in p..n {
                                let v = &nabla[j][k];
                                s -= 2.0 * self.inner(ea, v) * self.inner(v, ei);
                            }
                        }
                        out[a][i - p] = s;
                    }
                }
            }
            Form::Original => {
                for a in 0..p {
                    let mut v = self.zero();
                    for (alpha, e_alpha) in frame.iter().enumerate() {
                        let field = &self.nabla[alpha][a];
                        let nrm = self.frame.normal(&self.geo, field);
                        let tan = self.frame.tangent(&self.geo, field);
                        linalg::axpy(&mut v, 1.0, &self.covariant(e_alpha, &nrm));
                        linalg::axpy(&mut v, -1.0, &self.covariant(e_alpha, &tan));
                        let along = self.nabla(alpha, alpha);
                        linalg::axpy(&mut v, -1.0, &self.covariant(&along, &self.e_field(a)));
                    }
                    for i in p..n {
                        out[a][i - p] = self.inner(&v, &frame[i]);
                    }
                }
            }
        }
        out
    }

    pub fn report(&self) -> TensionReport {
        let (h_sigma, h_sigma_perp, h) = self.mean_curvatures();
        let tau_h = self.tau_h(Form::Primed);
        let tau_v = self.tau_v(Form::Primed);
        TensionReport {
            point: self.geo.point().to_vec(),
            h_sigma_norm: self.norm(&h_sigma),
            h_sigma_perp_norm: self.norm(&h_sigma_perp),
            h_norm: self.norm(&h),
            tau_h_norm: self.norm(&tau_h),
            tau_v_norm: frobenius(&tau_v),
            h_sigma,
            h_sigma_perp,
            h,
            tau_h,
            tau_v,
        }
    }
}

/// Frobenius norm of a matrix.
pub fn frobenius(m: &[Vec<f64>]) -> f64 {
    libm::sqrt(m.iter().flatten().map(|v| v * v).sum())
}

/// Tension data at one point. Vector norms are taken in the metric `g`;
/// the `τ^v` norm is the Frobenius norm of its entries.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TensionReport {
    pub point: Vec<f64>,
    pub h_sigma: Vec<f64>,
    pub h_sigma_perp: Vec<f64>,
    pub h: Vec<f64>,
    pub tau_h: Vec<f64>,
    pub tau_v: Vec<Vec<f64>>,
    pub h_sigma_norm: f64,
    pub h_sigma_perp_norm: f64,
    pub h_norm: f64,
    pub tau_h_norm: f64,
    pub tau_v_norm: f64,
}

/// Convenience wrappers keyed by metric and distribution.
pub fn mean_curvatures(
    metric: &MetricField,
    dist: &Distribution,
    x: &[f64],
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    Ok(FramedPoint::new(metric, dist, x)?.mean_curvatures())
}

pub fn tau_h(metric: &MetricField, dist: &Distribution, x: &[f64], form: Form) -> Result<Vec<f64>> {
    Ok(FramedPoint::new(metric, dist, x)?.tau_h(form))
}

pub fn tau_v(
    metric: &MetricField,
    dist: &Distribution,
    x: &[f64],
    form: Form,
) -> Result<Vec<Vec<f64>>> {
    Ok(FramedPoint::new(metric, dist, x)?.tau_v(form))
}
