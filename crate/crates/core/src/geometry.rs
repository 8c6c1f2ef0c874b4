//! Riemannian calculus on a coordinate chart, evaluated at one point.
//!
//! [`PointGeometry`] holds the metric and its inverse as second-order jets,
//! the Christoffel symbols with one derivative, and the curvature tensor.
//! Vector fields are passed around as component slices of jets; a
//! `&[Jet2]` field can be differentiated twice, a `&[Jet1]` field once.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::error::{Error, Result};
use crate::expr::ScalarField;
use crate::jet::{Differentiable, FromJet1, Jet1, Jet2, Scalar, MAX_DIM};
use crate::linalg::{self, Matrix};

/// Residual g-norm below which a Gram–Schmidt candidate counts as dependent.
pub const RANK_THRESHOLD: f64 = 1e-8;

/// Tolerance for the numerical symmetry check of metric entries that are
/// written differently.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Symmetric matrix of scalar fields.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricField {
    components: Vec<Vec<ScalarField>>,
    /// Off-diagonal pairs whose printed forms differ; checked numerically.
    unequal_pairs: Vec<(usize, usize)>,
}

impl MetricField {
    pub fn new(components: Vec<Vec<ScalarField>>) -> Result<MetricField> {
        let n = components.len();
        if n == 0 || n > MAX_DIM {
            return Err(Error::UnsupportedDimension(n));
        }
        for (i, row) in components.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "metric row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for f in row {
                if f.dim() != n {
                    return Err(Error::DimensionMismatch(format!(
                        "metric entry over {} coordinates in dimension {n}",
                        f.dim()
                    )));
                }
            }
        }
        let mut unequal_pairs = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if components[i][j].ast().kind != components[j][i].ast().kind {
                    unequal_pairs.push((i, j));
                }
            }
        }
        Ok(MetricField {
            components,
            unequal_pairs,
        })
    }

    /// Parse a full `n × n` array of entry expressions.
    pub fn parse(rows: &[Vec<String>], coordinates: &[String]) -> Result<MetricField> {
        let components = rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|s| ScalarField::parse(s, coordinates))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        MetricField::new(components)
    }

    /// `factor · δ_ij`.
    pub fn conformally_flat(factor: ScalarField) -> Result<MetricField> {
        let coords = factor.coordinates().to_vec();
        let n = coords.len();
        let zero = ScalarField::constant(0.0, &coords)?;
        let components = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { factor.clone() } else { zero.clone() })
                    .collect()
            })
            .collect();
        MetricField::new(components)
    }

    pub fn euclidean(coordinates: &[String]) -> Result<MetricField> {
        MetricField::conformally_flat(ScalarField::constant(1.0, coordinates)?)
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn coordinates(&self) -> &[String] {
        self.components[0][0].coordinates()
    }

    pub fn component(&self, i: usize, j: usize) -> &ScalarField {
        &self.components[i][j]
    }

    /// Metric matrix at `x` with two derivative orders. The upper triangle
    /// is evaluated and mirrored so the result is exactly symmetric.
    pub fn at(&self, x: &[f64]) -> Result<Matrix<Jet2>> {
        let n = self.dim();
        if x.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "point has {} coordinates, metric has dimension {n}",
                x.len()
            )));
        }
        let mut g = vec![vec![Jet2::constant(0.0); n]; n];
        for i in 0..n {
            for j in i..n {
                g[i][j] = self.components[i][j].eval(x)?;
                g[j][i] = g[i][j];
            }
        }
        for &(i, j) in &self.unequal_pairs {
            let a = g[i][j].value;
            let b = self.components[j][i].eval_value(x)?;
            if libm::fabs(a - b) > SYMMETRY_TOLERANCE * (1.0 + libm::fmax(libm::fabs(a), libm::fabs(b))) {
                return Err(Error::AsymmetricMetric {
                    i,
                    j,
                    point: x.to_vec(),
                });
            }
        }
        let values: Vec<Vec<f64>> = g.iter().map(|r| r.iter().map(|e| e.value).collect()).collect();
        if !linalg::is_positive_definite(&values) {
            return Err(Error::NotPositiveDefinite { point: x.to_vec() });
        }
        Ok(g)
    }
}

/// A vector field given by component expressions.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorFieldSpec {
    pub components: Vec<ScalarField>,
}

impl VectorFieldSpec {
    pub fn new(components: Vec<ScalarField>) -> Result<VectorFieldSpec> {
        let n = components.len();
        if n == 0 || n > MAX_DIM {
            return Err(Error::UnsupportedDimension(n));
        }
        if let Some(f) = components.iter().find(|f| f.dim() != n) {
            return Err(Error::DimensionMismatch(format!(
                "vector field with {n} components over {} coordinates",
                f.dim()
            )));
        }
        Ok(VectorFieldSpec { components })
    }

    pub fn parse<S: AsRef<str>>(components: &[S], coordinates: &[String]) -> Result<VectorFieldSpec> {
        if components.len() != coordinates.len() {
            return Err(Error::DimensionMismatch(format!(
                "vector field has {} components, chart has {} coordinates",
                components.len(),
                coordinates.len()
            )));
        }
        VectorFieldSpec::new(
            components
                .iter()
                .map(|s| ScalarField::parse(s.as_ref(), coordinates))
                .collect::<Result<_>>()?,
        )
    }

    /// Coordinate field `∂_i`.
    pub fn axis(i: usize, coordinates: &[String]) -> Result<VectorFieldSpec> {
        let n = coordinates.len();
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, dim: n });
        }
        VectorFieldSpec::new(
            (0..n)
                .map(|k| ScalarField::constant(if k == i { 1.0 } else { 0.0 }, coordinates))
                .collect::<Result<_>>()?,
        )
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<Jet2>> {
        self.components.iter().map(|f| f.eval(x)).collect()
    }

    /// `f · V` as a composed field.
    pub fn scaled_by(&self, f: &ScalarField) -> Result<VectorFieldSpec> {
        VectorFieldSpec::new(
            self.components
                .iter()
                .map(|c| f.mul(c))
                .collect::<Result<_>>()?,
        )
    }
}

/// Which half of the orthogonal splitting `TM = σ ⊕ σ⊥`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    Tangent,
    Normal,
}

/// A distribution `σ` given by spanning fields, with an optional list of
/// fields spanning a complement (only their span modulo `σ` matters).
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    pub spanning: Vec<VectorFieldSpec>,
    pub complement: Option<Vec<VectorFieldSpec>>,
}

impl Distribution {
    pub fn new(
        spanning: Vec<VectorFieldSpec>,
        complement: Option<Vec<VectorFieldSpec>>,
    ) -> Result<Distribution> {
        let n = match spanning.first() {
            Some(v) => v.dim(),
            None => return Err(Error::InvalidScene("distribution has no spanning fields".into())),
        };
        if spanning.len() >= n {
            return Err(Error::InvalidScene(format!(
                "distribution of rank {} in dimension {n} leaves an empty orthogonal complement",
                spanning.len()
            )));
        }
        let all = spanning.iter().chain(complement.iter().flatten());
        if let Some(v) = all.clone().find(|v| v.dim() != n) {
            return Err(Error::DimensionMismatch(format!(
                "vector field of dimension {} in a distribution of dimension {n}",
                v.dim()
            )));
        }
        if let Some(c) = &complement {
            if c.len() + spanning.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "{} spanning plus {} complement fields in dimension {n}",
                    spanning.len(),
                    c.len()
                )));
            }
        }
        Ok(Distribution {
            spanning,
            complement,
        })
    }

    pub fn rank(&self) -> usize {
        self.spanning.len()
    }

    pub fn dim(&self) -> usize {
        self.spanning[0].dim()
    }

    /// Replace a missing complement by coordinate axes chosen at `x`, so
    /// the frame stays smooth wherever the same axes remain admissible.
    pub fn with_frozen_complement(&self, metric: &MetricField, x: &[f64]) -> Result<Distribution> {
        if self.complement.is_some() {
            return Ok(self.clone());
        }
        let g = metric.at(x)?;
        let values = |v: &[Jet2]| v.iter().map(|c| c.value).collect::<Vec<f64>>();
        let mut basis: Vec<Vec<f64>> = Vec::new();
        for v in &self.spanning {
            basis.push(values(&v.eval(x)?));
        }
        let axes = complement_axes(&g, basis, self.dim())?;
        let coords = metric.coordinates();
        let complement = axes
            .into_iter()
            .map(|i| VectorFieldSpec::axis(i, coords))
            .collect::<Result<Vec<_>>>()?;
        Distribution::new(self.spanning.clone(), Some(complement))
    }
}

/// Greedy choice of coordinate axes completing `basis` (plain values):
/// at every step take the axis with the largest residual after projecting
/// out everything chosen so far. Ties go to the lower index.
fn complement_axes(g: &[Vec<Jet2>], basis: Vec<Vec<f64>>, n: usize) -> Result<Vec<usize>> {
    let inner = |u: &[f64], v: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += g[i][j].value * u[i] * v[j];
            }
        }
        s
    };
    let mut ortho: Vec<Vec<f64>> = Vec::new();
    let orthonormalize = |v: Vec<f64>, ortho: &mut Vec<Vec<f64>>| -> f64 {
        let mut u = v;
        for e in ortho.iter() {
            let c = inner(&u, e);
            linalg::axpy(&mut u, -c, e);
        }
        let r = libm::sqrt(inner(&u, &u));
        if r > 0.0 {
            ortho.push(linalg::scaled(1.0 / r, &u));
        }
        r
    };
    for (k, v) in basis.into_iter().enumerate() {
        let r = orthonormalize(v, &mut ortho);
        if r < RANK_THRESHOLD {
            return Err(Error::RankDeficient {
                what: "spanning",
                index: k,
                residual: r,
            });
        }
    }
    let mut chosen = Vec::new();
    while ortho.len() < n {
        let mut best: Option<(usize, f64)> = None;
        for i in (0..n).filter(|i| !chosen.contains(i)) {
            let mut u = vec![0.0; n];
            u[i] = 1.0;
            for e in &ortho {
                let c = inner(&u, e);
                linalg::axpy(&mut u, -c, e);
            }
            let r = libm::sqrt(inner(&u, &u));
            if best.is_none_or(|(_, b)| r > b) {
                best = Some((i, r));
            }
        }
        let (i, r) = best.expect("fewer than n vectors chosen");
        if r < RANK_THRESHOLD {
            return Err(Error::RankDeficient {
                what: "complement",
                index: chosen.len(),
                residual: r,
            });
        }
        let mut u = vec![0.0; n];
        u[i] = 1.0;
        orthonormalize(u, &mut ortho);
        chosen.push(i);
    }
    Ok(chosen)
}

/// Metric, connection and curvature at one point of the chart.
#[derive(Debug, Clone)]
pub struct PointGeometry {
    point: Vec<f64>,
    metric: Matrix<Jet2>,
    inverse: Matrix<Jet2>,
    /// `christoffel[k][i][j] = Γ^k_ij`.
    christoffel: Vec<Matrix<Jet1>>,
    /// `riemann[l][k][i][j] = R^l_kij`, so `R(∂_i, ∂_j)∂_k = R^l_kij ∂_l`.
    riemann: Vec<Vec<Matrix<f64>>>,
}

impl PointGeometry {
    pub fn new(metric: &MetricField, x: &[f64]) -> Result<PointGeometry> {
        let g = metric.at(x)?;
        PointGeometry::from_matrix(g, x)
    }

    pub fn from_matrix(g: Matrix<Jet2>, x: &[f64]) -> Result<PointGeometry> {
        let n = g.len();
        let inverse =
            linalg::invert_symmetric(&g).ok_or(Error::NotPositiveDefinite { point: x.to_vec() })?;
        let mut christoffel = vec![vec![vec![Jet1::constant(0.0); n]; n]; n];
        for k in 0..n {
            for i in 0..n {
                for j in i..n {
                    let mut s = Jet1::constant(0.0);
                    for l in 0..n {
                        let d = g[j][l].partial(i) + g[i][l].partial(j) - g[i][j].partial(l);
                        s = s + inverse[k][l].lower() * d;
                    }
                    christoffel[k][i][j] = s.scale(0.5);
                    christoffel[k][j][i] = christoffel[k][i][j];
                }
            }
        }
        let gam = &christoffel;
        let mut riemann = vec![vec![vec![vec![0.0; n]; n]; n]; n];
        for l in 0..n {
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let mut r = gam[l][j][k].grad[i] - gam[l][i][k].grad[j];
                        for m in 0..n {
                            r += gam[l][i][m].value * gam[m][j][k].value
                                - gam[l][j][m].value * gam[m][i][k].value;
                        }
                        riemann[l][k][i][j] = r;
                    }
                }
            }
        }
        Ok(PointGeometry {
            point: x.to_vec(),
            metric: g,
            inverse,
            christoffel,
            riemann,
        })
    }

    pub fn dim(&self) -> usize {
        self.metric.len()
    }

    pub fn point(&self) -> &[f64] {
        &self.point
    }

    pub fn metric_jets(&self) -> &Matrix<Jet2> {
        &self.metric
    }

    pub fn metric_values(&self) -> Matrix<f64> {
        self.metric
            .iter()
            .map(|r| r.iter().map(|e| e.value).collect())
            .collect()
    }

    pub fn christoffel(&self, k: usize, i: usize, j: usize) -> Jet1 {
        self.christoffel[k][i][j]
    }

    pub fn riemann(&self, l: usize, k: usize, i: usize, j: usize) -> f64 {
        self.riemann[l][k][i][j]
    }

    /// `g(u, v)` at the order of `T`.
    pub fn inner<T: Scalar>(&self, u: &[T], v: &[T]) -> T {
        let n = self.dim();
        let mut s = T::zero();
        for i in 0..n {
            let mut row = T::zero();
            for j in 0..n {
                row = row + T::from_jet2(&self.metric[i][j]) * v[j];
            }
            s = s + u[i] * row;
        }
        s
    }

    pub fn norm(&self, v: &[f64]) -> f64 {
        libm::sqrt(libm::fmax(self.inner(v, v), 0.0))
    }

    /// Index raising of a covector.
    pub fn raise<T: Scalar>(&self, w: &[T]) -> Vec<T> {
        let n = self.dim();
        (0..n)
            .map(|k| {
                (0..n).fold(T::zero(), |s, l| s + T::from_jet2(&self.inverse[k][l]) * w[l])
            })
            .collect()
    }

    /// `∇_X V` with `(∇_X V)^k = X^i (∂_i V^k + Γ^k_ij V^j)`; the result
    /// carries one derivative order less than `V`.
    pub fn covariant<T: Differentiable>(&self, dir: &[T::Lower], field: &[T]) -> Vec<T::Lower> {
        let n = self.dim();
        let lowered: Vec<T::Lower> = field.iter().map(|f| f.lower()).collect();
        (0..n)
            .map(|k| {
                let mut s = T::Lower::zero();
                for i in 0..n {
                    let mut d = field[k].partial(i);
                    for j in 0..n {
                        d = d + T::Lower::from_jet1(&self.christoffel[k][i][j]) * lowered[j];
                    }
                    s = s + dir[i] * d;
                }
                s
            })
            .collect()
    }

    /// `R(X, Y)Z`.
    pub fn curvature(&self, x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|l| {
                let mut s = 0.0;
                for k in 0..n {
                    for i in 0..n {
                        for j in 0..n {
                            s += self.riemann[l][k][i][j] * x[i] * y[j] * z[k];
                        }
                    }
                }
                s
            })
            .collect()
    }
}

/// Lie bracket `[X, Y]^k = X^i ∂_i Y^k − Y^i ∂_i X^k` of two first-order
/// fields.
pub fn bracket(x: &[Jet1], y: &[Jet1]) -> Vec<f64> {
    let xv: Vec<f64> = x.iter().map(|c| c.value).collect();
    let yv: Vec<f64> = y.iter().map(|c| c.value).collect();
    x.iter()
        .zip(y)
        .map(|(xk, yk)| yk.directional(&xv) - xk.directional(&yv))
        .collect()
}

/// Adapted g-orthonormal frame: `e_0 … e_{p-1}` span `σ`, the rest `σ⊥`.
/// Components are jets, so frame fields can be differentiated twice.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    vectors: Vec<Vec<Jet2>>,
    rank: usize,
}

impl Frame {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    /// `p = dim σ`.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn tangent_range(&self) -> Range<usize> {
        0..self.rank
    }

    pub fn normal_range(&self) -> Range<usize> {
        self.rank..self.dim()
    }

    pub fn range(&self, part: Part) -> Range<usize> {
        match part {
            Part::Tangent => self.tangent_range(),
            Part::Normal => self.normal_range(),
        }
    }

    pub fn vector(&self, alpha: usize) -> &[Jet2] {
        &self.vectors[alpha]
    }

    pub fn jets(&self) -> &[Vec<Jet2>] {
        &self.vectors
    }

    /// Frame components truncated to the order of `T`.
    pub fn at<T: Scalar>(&self) -> Vec<Vec<T>> {
        self.vectors
            .iter()
            .map(|v| v.iter().map(T::from_jet2).collect())
            .collect()
    }

    pub fn values(&self) -> Vec<Vec<f64>> {
        self.at::<f64>()
    }

    /// Frame adapted to `σ⊥` instead: the complement vectors come first.
    pub fn swapped(&self) -> Frame {
        let mut vectors = self.vectors[self.rank..].to_vec();
        vectors.extend_from_slice(&self.vectors[..self.rank]);
        Frame {
            rank: self.dim() - self.rank,
            vectors,
        }
    }

    /// `v^⊤ = Σ_a g(v, e_a) e_a` or `v^⊥ = v − v^⊤`, at the order of `T`.
    pub fn project<T: Scalar>(&self, geo: &PointGeometry, v: &[T], part: Part) -> Vec<T> {
        let frame = self.at::<T>();
        let mut tangent = vec![T::zero(); v.len()];
        for e in &frame[..self.rank] {
            let c = geo.inner(v, e);
            for (t, ek) in tangent.iter_mut().zip(e) {
                *t = *t + c * *ek;
            }
        }
        match part {
            Part::Tangent => tangent,
            Part::Normal => v.iter().zip(&tangent).map(|(a, b)| *a - *b).collect(),
        }
    }

    pub fn tangent<T: Scalar>(&self, geo: &PointGeometry, v: &[T]) -> Vec<T> {
        self.project(geo, v, Part::Tangent)
    }

    pub fn normal<T: Scalar>(&self, geo: &PointGeometry, v: &[T]) -> Vec<T> {
        self.project(geo, v, Part::Normal)
    }

    /// Largest `|g(e_α, e_β) − δ_αβ|`.
    pub fn orthonormality_defect(&self, geo: &PointGeometry) -> f64 {
        let vals = self.values();
        let mut worst: f64 = 0.0;
        for (a, u) in vals.iter().enumerate() {
            for (b, v) in vals.iter().enumerate() {
                let target = if a == b { 1.0 } else { 0.0 };
                worst = libm::fmax(worst, libm::fabs(geo.inner(u, v) - target));
            }
        }
        worst
    }
}

/// Gram–Schmidt in a fixed order, no pivoting: first `σ`'s spanning fields,
/// then the complement fields (or coordinate axes picked at `x` when the
/// distribution declares none).
pub fn adapted_frame(geo: &PointGeometry, dist: &Distribution) -> Result<Frame> {
    let x = geo.point();
    let n = geo.dim();
    if dist.dim() != n {
        return Err(Error::DimensionMismatch(format!(
            "distribution of dimension {} on a chart of dimension {n}",
            dist.dim()
        )));
    }
    let mut vectors: Vec<Vec<Jet2>> = Vec::with_capacity(n);
    for (k, v) in dist.spanning.iter().enumerate() {
        gram_schmidt_step(geo, &mut vectors, v.eval(x)?, "spanning", k)?;
    }
    match &dist.complement {
        Some(fields) => {
            for (k, v) in fields.iter().enumerate() {
                gram_schmidt_step(geo, &mut vectors, v.eval(x)?, "complement", k)?;
            }
        }
        None => {
            let values = vectors
                .iter()
                .map(|v| v.iter().map(|c| c.value).collect())
                .collect();
            for (k, i) in complement_axes(geo.metric_jets(), values, n)?.into_iter().enumerate() {
                let mut axis = vec![Jet2::constant(0.0); n];
                axis[i] = Jet2::constant(1.0);
                gram_schmidt_step(geo, &mut vectors, axis, "complement", k)?;
            }
        }
    }
    Ok(Frame {
        vectors,
        rank: dist.rank(),
    })
}

fn gram_schmidt_step(
    geo: &PointGeometry,
    basis: &mut Vec<Vec<Jet2>>,
    v: Vec<Jet2>,
    what: &'static str,
    index: usize,
) -> Result<()> {
    let mut u = v;
    for e in basis.iter() {
        let c = geo.inner(&u, e);
        for (uk, ek) in u.iter_mut().zip(e) {
            *uk = *uk - c * *ek;
        }
    }
    let nn = geo.inner(&u, &u);
    let residual = libm::sqrt(libm::fmax(nn.value, 0.0));
    if residual < RANK_THRESHOLD {
        return Err(Error::RankDeficient {
            what,
            index,
            residual,
        });
    }
    let inv = Jet2::constant(1.0) / nn.sqrt();
    basis.push(u.into_iter().map(|c| c * inv).collect());
    Ok(())
}

/// Gradient, Hessian and Laplacians of a scalar field at a point.
#[derive(Debug, Clone)]
pub struct ScalarCalculus {
    mu: Jet2,
    /// `∇μ` with one derivative order.
    gradient: Vec<Jet1>,
}

impl ScalarCalculus {
    pub fn new(geo: &PointGeometry, mu: Jet2) -> ScalarCalculus {
        let n = geo.dim();
        let dmu: Vec<Jet1> = (0..n).map(|i| mu.partial(i)).collect();
        ScalarCalculus {
            mu,
            gradient: geo.raise(&dmu),
        }
    }

    pub fn eval(geo: &PointGeometry, mu: &ScalarField) -> Result<ScalarCalculus> {
        Ok(ScalarCalculus::new(geo, mu.eval(geo.point())?))
    }

    pub fn value(&self) -> f64 {
        self.mu.value
    }

    pub fn jet(&self) -> &Jet2 {
        &self.mu
    }

    pub fn gradient(&self) -> &[Jet1] {
        &self.gradient
    }

    pub fn gradient_values(&self) -> Vec<f64> {
        self.gradient.iter().map(|c| c.value).collect()
    }

    /// `Xμ = dμ(X)`.
    pub fn derivative(&self, v: &[f64]) -> f64 {
        v.iter().zip(self.mu.grad.iter()).map(|(a, b)| a * b).sum()
    }

    /// `|∇μ|²`.
    pub fn gradient_norm_sq(&self, geo: &PointGeometry) -> f64 {
        let g = self.gradient_values();
        geo.inner(&g, &g)
    }

    /// `Hess_μ(X) = ∇_X ∇μ`.
    pub fn hess_apply(&self, geo: &PointGeometry, v: &[f64]) -> Vec<f64> {
        geo.covariant::<Jet1>(v, &self.gradient)
    }

    /// `hess_μ(X, Y) = g(Hess_μ(X), Y)`.
    pub fn hess_form(&self, geo: &PointGeometry, u: &[f64], v: &[f64]) -> f64 {
        geo.inner(&self.hess_apply(geo, u), v)
    }

    /// `Δμ = g^ij (∂_i ∂_j μ − Γ^k_ij ∂_k μ)`.
    pub fn laplacian(&self, geo: &PointGeometry) -> f64 {
        let n = geo.dim();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut h = self.mu.hess[i][j];
                for k in 0..n {
                    h -= geo.christoffel(k, i, j).value * self.mu.grad[k];
                }
                s += geo.inverse[i][j].value * h;
            }
        }
        s
    }

    /// Partial trace of `Hess_μ` over one block of the frame.
    pub fn laplacian_along(&self, geo: &PointGeometry, frame: &Frame, part: Part) -> f64 {
        let vals = frame.values();
        frame
            .range(part)
            .map(|a| self.hess_form(geo, &vals[a], &vals[a]))
            .sum()
    }
}

/// `∇μ` as plain components.
pub fn grad_scalar(metric: &MetricField, mu: &ScalarField, x: &[f64]) -> Result<Vec<f64>> {
    let geo = PointGeometry::new(metric, x)?;
    Ok(ScalarCalculus::eval(&geo, mu)?.gradient_values())
}

/// `Hess_μ(v)`.
pub fn hess_operator(metric: &MetricField, mu: &ScalarField, x: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    let geo = PointGeometry::new(metric, x)?;
    Ok(ScalarCalculus::eval(&geo, mu)?.hess_apply(&geo, v))
}

pub fn laplacian(metric: &MetricField, mu: &ScalarField, x: &[f64]) -> Result<f64> {
    let geo = PointGeometry::new(metric, x)?;
    Ok(ScalarCalculus::eval(&geo, mu)?.laplacian(&geo))
}

/// `Δ_σ μ` (tangent part) or `Δ_{σ⊥} μ` (normal part).
pub fn laplacian_along(
    metric: &MetricField,
    dist: &Distribution,
    mu: &ScalarField,
    x: &[f64],
    part: Part,
) -> Result<f64> {
    let geo = PointGeometry::new(metric, x)?;
    let frame = adapted_frame(&geo, dist)?;
    Ok(ScalarCalculus::eval(&geo, mu)?.laplacian_along(&geo, &frame, part))
}
