//! Registry of pointwise identity checks and the verifier that runs them
//! on a scene.
//!
//! Every check compares a left and a right side, both flattened to chart
//! component vectors, and passes when
//!
//! ```text
//! |lhs − rhs| ≤ tol · (1 + max(|lhs|, |rhs|))
//! ```
//!
//! with Euclidean norms of the components. `rel_error` in a
//! [`CheckResult`] is the left side divided by `1 + max(|lhs|, |rhs|)`, so
//! a check passes exactly when `rel_error ≤ tolerance`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::conformal::{ConformalPoint, ConformalScene};
use crate::error::{Error, Result};
use crate::expr::random::random_field;
use crate::expr::{BinaryOp, Function, ScalarField};
use crate::geometry::{bracket, Distribution, VectorFieldSpec};
use crate::jet::{Differentiable, Jet1, Scalar};
use crate::linalg::{self, euclid};
use crate::rng::SplitMix64;
use crate::scene::Scene;
use crate::tension::{Form, FramedPoint};

/// Tolerance used when a check declares none of its own.
pub const DEFAULT_TOLERANCE: f64 = 1e-7;

/// Second fundamental forms below this count as zero when deciding
/// whether a scene is totally geodesic.
pub const GEODESIC_THRESHOLD: f64 = 1e-9;

const FD_GRADIENT_STEP: f64 = 1e-5;
const FD_HESSIAN_STEP: f64 = 1e-4;
const FD_GRADIENT_TOLERANCE: f64 = 1e-5;
const FD_HESSIAN_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum CheckKind {
    /// `τ^h` in the reworked form equals the original form.
    Harm1Equivalence,
    /// Same for `τ^v`.
    Harm2Equivalence,
    /// `τ^h(σ⊥) = τ^h(σ)` and `τ^v(σ⊥)ᵀ = −τ^v(σ)`.
    TensionDuality,
    /// `τ^h = κH`, and the curvature tensor has the constant-curvature form.
    ConstantCurvatureTension,
    /// Both tension fields vanish when `σ` and `σ⊥` are totally geodesic.
    TotallyGeodesic,
    ConformalConnection,
    ConformalCurvature,
    /// Connection coefficients of the rescaled frame `e^{−μ}e_α`.
    ConformalFrame,
    ConformalTauH,
    ConformalTauV,
    /// In dimension 2, `e^{2μ}τ^v(g̃) = τ^v(g)`.
    ConformalDim2,
    /// `τ^v(g̃) = 0` when `σ`, `σ⊥` are totally geodesic and `p = q`.
    ConformalTg,
    /// Constant curvature, `p = q`: specialized `τ^h(g̃)` formula.
    Halfdim,
    /// Metricity and vanishing torsion.
    LeviCivita,
    CurvatureSymmetries,
    JetsVsFd,
    /// Independence of `τ^h` and `A^σ` from the choice of spanning fields.
    Tensoriality,
}

impl CheckKind {
    pub const ALL: [CheckKind; 17] = [
        CheckKind::Harm1Equivalence,
        CheckKind::Harm2Equivalence,
        CheckKind::TensionDuality,
        CheckKind::ConstantCurvatureTension,
        CheckKind::TotallyGeodesic,
        CheckKind::ConformalConnection,
        CheckKind::ConformalCurvature,
        CheckKind::ConformalFrame,
        CheckKind::ConformalTauH,
        CheckKind::ConformalTauV,
        CheckKind::ConformalDim2,
        CheckKind::ConformalTg,
        CheckKind::Halfdim,
        CheckKind::LeviCivita,
        CheckKind::CurvatureSymmetries,
        CheckKind::JetsVsFd,
        CheckKind::Tensoriality,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Harm1Equivalence => "harm1-equivalence",
            CheckKind::Harm2Equivalence => "harm2-equivalence",
            CheckKind::TensionDuality => "tension-duality",
            CheckKind::ConstantCurvatureTension => "constant-curvature-tension",
            CheckKind::TotallyGeodesic => "totally-geodesic",
            CheckKind::ConformalConnection => "conformal-connection",
            CheckKind::ConformalCurvature => "conformal-curvature",
            CheckKind::ConformalFrame => "conformal-frame",
            CheckKind::ConformalTauH => "conformal-tau-h",
            CheckKind::ConformalTauV => "conformal-tau-v",
            CheckKind::ConformalDim2 => "conformal-dim2",
            CheckKind::ConformalTg => "conformal-tg",
            CheckKind::Halfdim => "halfdim",
            CheckKind::LeviCivita => "levi-civita",
            CheckKind::CurvatureSymmetries => "curvature-symmetries",
            CheckKind::JetsVsFd => "jets-vs-fd",
            CheckKind::Tensoriality => "tensoriality",
        }
    }

    pub fn from_name(name: &str) -> Result<CheckKind> {
        CheckKind::ALL
            .into_iter()
            .find(|k| k.name() == name)
            .ok_or_else(|| Error::UnknownCheck(name.into()))
    }

    pub fn default_tolerance(self) -> f64 {
        match self {
            CheckKind::ConformalTauH | CheckKind::ConformalTauV => 1e-6,
            CheckKind::ConformalConnection
            | CheckKind::ConformalFrame
            | CheckKind::ConformalTg
            | CheckKind::LeviCivita
            | CheckKind::CurvatureSymmetries
            | CheckKind::Tensoriality => 1e-8,
            CheckKind::TotallyGeodesic => 1e-9,
            CheckKind::JetsVsFd => FD_GRADIENT_TOLERANCE,
            _ => DEFAULT_TOLERANCE,
        }
    }

    fn is_conformal(self) -> bool {
        matches!(
            self,
            CheckKind::ConformalConnection
                | CheckKind::ConformalCurvature
                | CheckKind::ConformalFrame
                | CheckKind::ConformalTauH
                | CheckKind::ConformalTauV
                | CheckKind::ConformalDim2
                | CheckKind::ConformalTg
                | CheckKind::Halfdim
        )
    }

    fn stream(self) -> u64 {
        CheckKind::ALL.iter().position(|k| *k == self).unwrap_or(0) as u64
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Outcome of one comparison at one point.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CheckResult {
    pub check: CheckKind,
    /// Which variant of the identity (a conformal factor, a sub-identity).
    pub case: String,
    pub scene: String,
    pub point: Vec<f64>,
    pub lhs_norm: f64,
    pub rhs_norm: f64,
    pub abs_error: f64,
    pub rel_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Norms and errors of `lhs` against `rhs`: `(lhs_norm, rhs_norm,
/// abs_error, rel_error)`.
pub fn compare(lhs: &[f64], rhs: &[f64]) -> (f64, f64, f64, f64) {
    let l = euclid(lhs);
    let r = euclid(rhs);
    let abs = euclid(&linalg::sub(lhs, rhs));
    (l, r, abs, abs / (1.0 + l.max(r)))
}

/// Pass rule shared by every check.
pub fn within(abs_error: f64, lhs_norm: f64, rhs_norm: f64, tol: f64) -> bool {
    abs_error <= tol * (1.0 + lhs_norm.max(rhs_norm))
}

/// Global and per-check tolerance overrides.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Tolerances {
    pub global: Option<f64>,
    pub per_check: Vec<(CheckKind, f64)>,
}

impl Tolerances {
    pub fn get(&self, kind: CheckKind) -> Option<f64> {
        self.per_check
            .iter()
            .rev()
            .find(|(k, _)| *k == kind)
            .map(|(_, t)| *t)
            .or(self.global)
    }

    fn for_case(&self, kind: CheckKind, default: f64) -> f64 {
        self.get(kind).unwrap_or(default)
    }
}

/// Which checks to run.
#[derive(Debug, Clone, PartialEq)]
pub enum Selection {
    /// Every check applicable to the scene; the rest are skipped.
    All,
    /// Exactly these; an inapplicable one is an error.
    Only(Vec<CheckKind>),
}

/// The default conformal factors over the first two coordinates.
pub fn default_mus(coordinates: &[String]) -> Result<Vec<ScalarField>> {
    if coordinates.len() < 2 {
        return Err(Error::DimensionMismatch("default conformal factors need two coordinates".into()));
    }
    let (x, y) = (&coordinates[0], &coordinates[1]);
    [format!("{x}/5"), format!("{x}*{y}/10"), format!("log(1+{x}^2+{y}^2)")]
        .iter()
        .map(|s| ScalarField::parse(s, coordinates))
        .collect()
}

/// Whether `σ` and `σ⊥` both have vanishing second fundamental form at
/// the point.
pub fn totally_geodesic(fp: &FramedPoint) -> bool {
    let f = fp.frame();
    let small = |v: Vec<f64>| euclid(&v) <= GEODESIC_THRESHOLD;
    let tangent = f.tangent_range();
    let normal = f.normal_range();
    tangent.clone().all(|a| tangent.clone().all(|b| small(fp.normal(&fp.nabla(a, b)))))
        && normal.clone().all(|i| normal.clone().all(|j| small(fp.tangent(&fp.nabla(i, j)))))
}

struct Emit<'a> {
    scene: &'a str,
    point: &'a [f64],
    out: Vec<CheckResult>,
}

impl Emit<'_> {
    fn push(&mut self, check: CheckKind, case: impl Into<String>, lhs: &[f64], rhs: &[f64], tolerance: f64) {
        let (lhs_norm, rhs_norm, abs_error, rel_error) = compare(lhs, rhs);
        self.out.push(CheckResult {
            check,
            case: case.into(),
            scene: self.scene.into(),
            point: self.point.to_vec(),
            lhs_norm,
            rhs_norm,
            abs_error,
            rel_error,
            tolerance,
            pass: within(abs_error, lhs_norm, rhs_norm, tolerance),
        });
    }
}

fn flatten(m: &[Vec<f64>]) -> Vec<f64> {
    m.iter().flatten().copied().collect()
}

fn transpose(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let cols = m.first().map_or(0, Vec::len);
    (0..cols).map(|j| m.iter().map(|row| row[j]).collect()).collect()
}

fn random_vector(rng: &mut SplitMix64, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.uniform(-1.0, 1.0)).collect()
}

fn random_vector_field(rng: &mut SplitMix64, coordinates: &[String], x: &[f64]) -> Result<Vec<Jet1>> {
    (0..coordinates.len())
        .map(|_| Ok(random_field(rng, coordinates, 2).eval(x)?.lower()))
        .collect()
}

/// `Σ_α c_α e_α` over the given frame indices, as a first-order field.
fn frame_combination(fp: &FramedPoint, range: core::ops::Range<usize>, coeffs: &[f64]) -> Vec<Jet1> {
    let mut out = vec![Jet1::zero(); fp.dim()];
    for (alpha, c) in range.zip(coeffs) {
        for (o, e) in out.iter_mut().zip(fp.e_field(alpha)) {
            *o = *o + e.scale(*c);
        }
    }
    out
}

fn values(v: &[Jet1]) -> Vec<f64> {
    v.iter().map(|c| c.value).collect()
}

fn scale_field(f: Jet1, v: &[Jet1]) -> Vec<Jet1> {
    v.iter().map(|c| f * *c).collect()
}

/// Spanning fields rescaled by `1 + x²` and, when `p ≥ 2`, the first two
/// rotated by the angle `x/3`.
fn reshaped_distribution(scene: &Scene) -> Result<Distribution> {
    let coords = &scene.coordinates;
    let x = &coords[0];
    let factor = ScalarField::parse(&format!("1+{x}^2"), coords)?;
    let mut spanning = scene.distribution.spanning.clone();
    if spanning.len() >= 2 {
        let theta = ScalarField::parse(&format!("{x}/3"), coords)?;
        let (c, s) = (theta.apply(Function::Cos), theta.apply(Function::Sin));
        let (u, v) = (&spanning[0], &spanning[1]);
        let mut first = Vec::new();
        let mut second = Vec::new();
        for k in 0..scene.dim() {
            let (uk, vk) = (&u.components[k], &v.components[k]);
            first.push(c.mul(uk)?.combine(BinaryOp::Add, &s.mul(vk)?)?);
            second.push(c.mul(vk)?.combine(BinaryOp::Sub, &s.mul(uk)?)?);
        }
        spanning[0] = VectorFieldSpec::new(first)?;
        spanning[1] = VectorFieldSpec::new(second)?;
    }
    let spanning = spanning
        .iter()
        .map(|v| v.scaled_by(&factor))
        .collect::<Result<Vec<_>>>()?;
    Distribution::new(spanning, scene.distribution.complement.clone())
}

/// Runs the selected checks of one scene at arbitrary points.
#[derive(Debug, Clone)]
pub struct Verifier {
    scene: Scene,
    kinds: Vec<CheckKind>,
    mus: Vec<ScalarField>,
    conformal: Vec<ConformalScene>,
    tolerances: Tolerances,
    seed: u64,
    reshaped: Option<Scene>,
    /// Flat, two-dimensional, with totally geodesic `σ` and `σ⊥`: the
    /// conformal `τ^h` has the closed form `Δμ ∇μ`.
    flat_axis: bool,
}

impl Verifier {
    /// `mus` empty means the scene's own factor, or the defaults when the
    /// scene has none.
    pub fn new(
        scene: Scene,
        selection: Selection,
        mus: Vec<ScalarField>,
        tolerances: Tolerances,
        seed: u64,
    ) -> Result<Verifier> {
        let reference = scene.framed_at(scene.reference_point())?;
        let geodesic = totally_geodesic(&reference);
        let kappa = scene.constant_curvature;
        let (n, p) = (scene.dim(), scene.rank());
        let applicability = |kind: CheckKind| -> core::result::Result<(), String> {
            match kind {
                CheckKind::ConstantCurvatureTension if kappa.is_none() => {
                    Err("the scene declares no constant curvature".into())
                }
                CheckKind::TotallyGeodesic if !geodesic => {
                    Err("σ or σ⊥ is not totally geodesic at the reference point".into())
                }
                CheckKind::ConformalDim2 if n != 2 => Err(format!("dimension is {n}, not 2")),
                CheckKind::ConformalTg if !geodesic || 2 * p != n => {
                    Err("needs totally geodesic σ and σ⊥ with p = q".into())
                }
                CheckKind::Halfdim if kappa.is_none() => Err("the scene declares no constant curvature".into()),
                CheckKind::Halfdim if 2 * p != n => Err(format!("needs p = q, got p = {p}, q = {}", n - p)),
                _ => Ok(()),
            }
        };
        let kinds = match selection {
            Selection::All => CheckKind::ALL.into_iter().filter(|k| applicability(*k).is_ok()).collect(),
            Selection::Only(list) => {
                let mut kinds = Vec::new();
                for kind in list {
                    if let Err(reason) = applicability(kind) {
                        return Err(Error::NotApplicable {
                            check: kind.name(),
                            scene: scene.name.clone(),
                            reason,
                        });
                    }
                    if !kinds.contains(&kind) {
                        kinds.push(kind);
                    }
                }
                kinds.sort();
                kinds
            }
        };
        let mus = if !mus.is_empty() {
            mus
        } else if let Some(mu) = &scene.mu {
            vec![mu.clone()]
        } else {
            default_mus(&scene.coordinates)?
        };
        let conformal = if kinds.iter().any(|k| k.is_conformal()) {
            mus.iter().map(|m| scene.conformal(m.clone())).collect::<Result<Vec<_>>>()?
        } else {
            Vec::new()
        };
        let reshaped = if kinds.contains(&CheckKind::Tensoriality) {
            Some(scene.with_distribution(reshaped_distribution(&scene)?)?)
        } else {
            None
        };
        let flat_axis = n == 2 && kappa == Some(0.0) && geodesic;
        Ok(Verifier {
            scene,
            kinds,
            mus,
            conformal,
            tolerances,
            seed,
            reshaped,
            flat_axis,
        })
    }

    pub fn scene(&self) -> &Scene {
        &self.scene
    }

    pub fn kinds(&self) -> &[CheckKind] {
        &self.kinds
    }

    pub fn mus(&self) -> &[ScalarField] {
        &self.mus
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Sample points for this verifier's seed.
    pub fn points(&self, count: usize) -> Result<Vec<Vec<f64>>> {
        self.scene.sample_points(count, self.seed)
    }

    fn tol(&self, kind: CheckKind) -> f64 {
        self.tolerances.for_case(kind, kind.default_tolerance())
    }

    fn rng(&self, kind: CheckKind, index: usize) -> SplitMix64 {
        let mut outer = SplitMix64::derive(self.seed, kind.stream());
        SplitMix64::derive(outer.next_u64(), index as u64)
    }

    /// All selected checks at one point. `index` picks the random streams,
    /// so results do not depend on which other points are evaluated.
    pub fn run_point(&self, index: usize, x: &[f64]) -> Result<Vec<CheckResult>> {
        self.scene.check_point(x)?;
        let fp = self.scene.framed_at(x)?;
        let mut emit = Emit {
            scene: &self.scene.name,
            point: x,
            out: Vec::new(),
        };
        let mut conformal: Vec<Option<ConformalPoint>> = vec![None; self.conformal.len()];
        for &kind in &self.kinds {
            if kind.is_conformal() {
                for (slot, cs) in conformal.iter_mut().zip(&self.conformal) {
                    if slot.is_none() {
                        *slot = Some(cs.at(&self.scene.distribution, x)?);
                    }
                }
            }
            let mut rng = self.rng(kind, index);
            self.run_kind(kind, &fp, &conformal, &mut rng, &mut emit)?;
        }
        Ok(emit.out)
    }

    /// Runs every point serially; results grouped by check, then point.
    pub fn run(&self, points: &[Vec<f64>]) -> Result<Vec<CheckResult>> {
        let per_point = points
            .iter()
            .enumerate()
            .map(|(i, x)| self.run_point(i, x))
            .collect::<Result<Vec<_>>>()?;
        Ok(group(per_point))
    }

    fn run_kind(
        &self,
        kind: CheckKind,
        fp: &FramedPoint,
        conformal: &[Option<ConformalPoint>],
        rng: &mut SplitMix64,
        emit: &mut Emit<'_>,
    ) -> Result<()> {
        let tol = self.tol(kind);
        let n = fp.dim();
        let x = emit.point.to_vec();
        let points = || conformal.iter().flatten().zip(&self.mus);
        match kind {
            CheckKind::Harm1Equivalence => {
                emit.push(kind, "primed-vs-original", &fp.tau_h(Form::Primed), &fp.tau_h(Form::Original), tol);
            }
            CheckKind::Harm2Equivalence => {
                let primed = flatten(&fp.tau_v(Form::Primed));
                let original = flatten(&fp.tau_v(Form::Original));
                emit.push(kind, "primed-vs-original", &primed, &original, tol);
            }
            CheckKind::TensionDuality => {
                let dual = fp.swapped();
                emit.push(kind, "tau-h", &dual.tau_h(Form::Primed), &fp.tau_h(Form::Primed), tol);
                let lhs = flatten(&transpose(&dual.tau_v(Form::Primed)));
                let rhs = linalg::scaled(-1.0, &flatten(&fp.tau_v(Form::Primed)));
                emit.push(kind, "tau-v", &lhs, &rhs, tol);
            }
            CheckKind::ConstantCurvatureTension => {
                let kappa = self.scene.constant_curvature.unwrap_or(0.0);
                let (_, _, h) = fp.mean_curvatures();
                emit.push(kind, "tau-h", &fp.tau_h(Form::Primed), &linalg::scaled(kappa, &h), tol);
                let (u, v, w) = (random_vector(rng, n), random_vector(rng, n), random_vector(rng, n));
                let mut model = linalg::scaled(kappa * fp.inner(&v, &w), &u);
                linalg::axpy(&mut model, -kappa * fp.inner(&u, &w), &v);
                emit.push(kind, "curvature", &fp.curvature(&u, &v, &w), &model, tol);
            }
            CheckKind::TotallyGeodesic => {
                let zero_h = vec![0.0; n];
                emit.push(kind, "tau-h", &fp.tau_h(Form::Primed), &zero_h, tol);
                let tv = flatten(&fp.tau_v(Form::Primed));
                emit.push(kind, "tau-v", &tv, &vec![0.0; tv.len()], tol);
            }
            CheckKind::ConformalConnection => {
                for (cp, mu) in points() {
                    let u = random_vector(rng, n);
                    let field = frame_combination(cp.base(), 0..n, &random_vector(rng, n));
                    let lhs = cp.direct_connection(&u, &field);
                    emit.push(kind, format!("mu={mu}"), &lhs, &cp.predicted_connection(&u, &field), tol);
                }
            }
            CheckKind::ConformalCurvature => {
                for (cp, mu) in points() {
                    let (u, v, w) = (random_vector(rng, n), random_vector(rng, n), random_vector(rng, n));
                    let lhs = cp.direct_curvature(&u, &v, &w);
                    emit.push(kind, format!("mu={mu}"), &lhs, &cp.predicted_curvature(&u, &v, &w), tol);
                }
            }
            CheckKind::ConformalFrame => {
                let frame = fp.frame();
                for (cp, mu) in points() {
                    for (label, alphas) in [("tangent", frame.tangent_range()), ("normal", frame.normal_range())] {
                        let (mut direct, mut predicted) = (Vec::new(), Vec::new());
                        for b in frame.tangent_range() {
                            for c in frame.tangent_range() {
                                for a in alphas.clone() {
                                    let (d, p) = cp.frame_coefficient(b, c, a);
                                    direct.push(d);
                                    predicted.push(p);
                                }
                            }
                        }
                        emit.push(kind, format!("mu={mu};{label}"), &direct, &predicted, tol);
                    }
                }
            }
            CheckKind::ConformalTauH => {
                for (cp, mu) in points() {
                    let direct = cp.direct_tau_h();
                    emit.push(kind, format!("mu={mu}"), &direct, &cp.predicted_tau_h(), tol);
                    if self.flat_axis {
                        let c = cp.calculus();
                        let geo = cp.base().geometry();
                        let closed = linalg::scaled(c.laplacian(geo), &c.gradient_values());
                        emit.push(kind, format!("mu={mu};laplacian-gradient"), &direct, &closed, tol);
                    }
                }
            }
            CheckKind::ConformalTauV => {
                for (cp, mu) in points() {
                    let direct = flatten(&cp.direct_tau_v());
                    emit.push(kind, format!("mu={mu}"), &direct, &flatten(&cp.predicted_tau_v()), tol);
                }
            }
            CheckKind::ConformalDim2 => {
                let base = flatten(&fp.tau_v(Form::Primed));
                for (cp, mu) in points() {
                    emit.push(kind, format!("mu={mu}"), &flatten(&cp.direct_tau_v()), &base, tol);
                }
            }
            CheckKind::ConformalTg => {
                for (cp, mu) in points() {
                    let tv = flatten(&cp.tilde().tau_v(Form::Primed));
                    emit.push(kind, format!("mu={mu}"), &tv, &vec![0.0; tv.len()], tol);
                }
            }
            CheckKind::Halfdim => {
                let kappa = self.scene.constant_curvature.unwrap_or(0.0);
                for (cp, mu) in points() {
                    let lhs = cp.predicted_tau_h_halfdim(kappa)?;
                    emit.push(kind, format!("mu={mu}"), &lhs, &cp.predicted_tau_h(), tol);
                }
            }
            CheckKind::LeviCivita => {
                let geo = fp.geometry();
                let coords = &self.scene.coordinates;
                let u = random_vector_field(rng, coords, &x)?;
                let v = random_vector_field(rng, coords, &x)?;
                let w = random_vector_field(rng, coords, &x)?;
                let (uv, vv, wv) = (values(&u), values(&v), values(&w));
                let lhs = geo.inner::<Jet1>(&v, &w).directional(&uv);
                let rhs = geo.inner(&geo.covariant::<Jet1>(&uv, &v), &wv) + geo.inner(&vv, &geo.covariant::<Jet1>(&uv, &w));
                emit.push(kind, "metricity", &[lhs], &[rhs], tol);
                let torsion = linalg::sub(&geo.covariant::<Jet1>(&uv, &v), &geo.covariant::<Jet1>(&vv, &u));
                emit.push(kind, "torsion", &torsion, &bracket(&u, &v), tol);
            }
            CheckKind::CurvatureSymmetries => {
                let [u, v, w, z] = [(); 4].map(|_| random_vector(rng, n));
                let r_uvw = fp.curvature(&u, &v, &w);
                emit.push(kind, "antisymmetry-xy", &r_uvw, &linalg::scaled(-1.0, &fp.curvature(&v, &u, &w)), tol);
                let lhs = fp.inner(&r_uvw, &z);
                let rhs = -fp.inner(&fp.curvature(&u, &v, &z), &w);
                emit.push(kind, "antisymmetry-zw", &[lhs], &[rhs], tol);
                let mut cyclic = r_uvw.clone();
                linalg::axpy(&mut cyclic, 1.0, &fp.curvature(&v, &w, &u));
                linalg::axpy(&mut cyclic, 1.0, &fp.curvature(&w, &u, &v));
                emit.push(kind, "bianchi", &cyclic, &vec![0.0; n], tol);
            }
            CheckKind::JetsVsFd => {
                let field = random_field(rng, &self.scene.coordinates, 3);
                let (grad, hess) = jets_and_differences(&field, &x)?;
                let g_tol = self.tolerances.for_case(kind, FD_GRADIENT_TOLERANCE);
                let h_tol = self.tolerances.for_case(kind, FD_HESSIAN_TOLERANCE);
                emit.push(kind, "gradient", &grad.0, &grad.1, g_tol);
                emit.push(kind, "hessian", &hess.0, &hess.1, h_tol);
            }
            CheckKind::Tensoriality => {
                if let Some(reshaped) = &self.reshaped {
                    let other = reshaped.framed_at(&x)?;
                    emit.push(kind, "tau-h-spanning-fields", &other.tau_h(Form::Primed), &fp.tau_h(Form::Primed), tol);
                }
                let p = fp.rank();
                let f = ScalarField::parse(&format!("1+{}^2", self.scene.coordinates[0]), &self.scene.coordinates)?
                    .eval(&x)?
                    .lower();
                let u = frame_combination(fp, 0..p, &random_vector(rng, p));
                let v = frame_combination(fp, 0..p, &random_vector(rng, p));
                let a_uv = linalg::scaled(f.value, &fp.second_fundamental(&u, &v, false)?);
                let a_fu = fp.second_fundamental(&scale_field(f, &u), &v, false)?;
                emit.push(kind, "a-direction", &a_fu, &a_uv, tol);
                let a_fv = fp.second_fundamental(&u, &scale_field(f, &v), false)?;
                emit.push(kind, "a-field", &a_fv, &a_uv, tol);
            }
        }
        Ok(())
    }
}

/// A jet-computed quantity and its central-difference counterpart.
pub type JetAndDifference = (Vec<f64>, Vec<f64>);

/// Gradient and Hessian pairs, Hessians flattened row-major.
pub fn jets_and_differences(field: &ScalarField, x: &[f64]) -> Result<(JetAndDifference, JetAndDifference)> {
    let n = x.len();
    let jet = field.eval(x)?;
    let at = |shift: &[(usize, f64)]| -> Result<f64> {
        let mut y = x.to_vec();
        for &(i, d) in shift {
            y[i] += d;
        }
        field.eval_value(&y)
    };
    let h = FD_GRADIENT_STEP;
    let mut fd_grad = Vec::with_capacity(n);
    for i in 0..n {
        fd_grad.push((at(&[(i, h)])? - at(&[(i, -h)])?) / (2.0 * h));
    }
    let h = FD_HESSIAN_STEP;
    let centre = jet.value;
    let mut fd_hess = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let v = if i == j {
                (at(&[(i, h)])? - 2.0 * centre + at(&[(i, -h)])?) / (h * h)
            } else {
                (at(&[(i, h), (j, h)])? - at(&[(i, h), (j, -h)])? - at(&[(i, -h), (j, h)])?
                    + at(&[(i, -h), (j, -h)])?)
                    / (4.0 * h * h)
            };
            fd_hess.push(v);
        }
    }
    let grad = jet.grad[..n].to_vec();
    let hess = (0..n).flat_map(|i| jet.hess[i][..n].to_vec()).collect();
    Ok(((grad, fd_grad), (hess, fd_hess)))
}

/// Flattens per-point result lists into check order, keeping point order
/// and case order within each check.
pub fn group(per_point: Vec<Vec<CheckResult>>) -> Vec<CheckResult> {
    let mut all: Vec<CheckResult> = per_point.into_iter().flatten().collect();
    all.sort_by_key(|r| r.check);
    all
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::builtin;

    fn verifier(name: &str, selection: Selection) -> Verifier {
        Verifier::new(builtin(name).unwrap(), selection, Vec::new(), Tolerances::default(), 7).unwrap()
    }

    #[test]
    fn registry_round_trip() {
        for k in CheckKind::ALL {
            assert_eq!(CheckKind::from_name(k.name()).unwrap(), k);
        }
        assert!(matches!(CheckKind::from_name("nope"), Err(Error::UnknownCheck(_))));
        assert_eq!(CheckKind::ConformalTauV.default_tolerance(), 1e-6);
        assert_eq!(CheckKind::Harm1Equivalence.default_tolerance(), 1e-7);
    }

    #[test]
    fn compare_and_pass_rule() {
        let (l, r, a, rel) = compare(&[3.0, 4.0], &[3.0, 4.0 + 1e-8]);
        assert_eq!(l, 5.0);
        assert!((r - 5.0).abs() < 1e-8);
        assert!((a - 1e-8).abs() < 1e-15);
        assert!((rel - a / (1.0 + r)).abs() < 1e-20);
        assert!(within(a, l, r, 1e-8));
        assert!(!within(a, l, r, 1e-10));
        assert!(within(0.5e-9, 0.0, 0.0, 1e-9));
    }

    #[test]
    fn tolerance_overrides() {
        let t = Tolerances {
            global: Some(1e-5),
            per_check: vec![(CheckKind::Halfdim, 1e-3)],
        };
        assert_eq!(t.get(CheckKind::Halfdim), Some(1e-3));
        assert_eq!(t.get(CheckKind::LeviCivita), Some(1e-5));
        assert_eq!(Tolerances::default().get(CheckKind::LeviCivita), None);
    }

    #[test]
    fn applicability() {
        let sphere = verifier("sphere-chart", Selection::All);
        assert!(sphere.kinds().contains(&CheckKind::Halfdim));
        assert!(!sphere.kinds().contains(&CheckKind::TotallyGeodesic));
        assert!(!sphere.kinds().contains(&CheckKind::ConformalTg));
        let flat = verifier("flat-product-22", Selection::All);
        assert!(flat.kinds().contains(&CheckKind::ConformalTg));
        assert!(!flat.kinds().contains(&CheckKind::ConformalDim2));
        let err = Verifier::new(
            builtin("flat-product-22").unwrap(),
            Selection::Only(vec![CheckKind::ConformalDim2]),
            Vec::new(),
            Tolerances::default(),
            0,
        )
        .unwrap_err();
        assert!(matches!(err, Error::NotApplicable { .. }));
    }

    #[test]
    fn default_factors_follow_coordinates() {
        let coords: Vec<String> = ["u", "v"].iter().map(|s| String::from(*s)).collect();
        let mus = default_mus(&coords).unwrap();
        assert_eq!(mus.len(), 3);
        assert!((mus[1].eval_value(&[2.0, 5.0]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn every_builtin_passes_a_short_run() {
        for name in crate::scene::BUILTIN_NAMES {
            let v = verifier(name, Selection::All);
            let points = v.points(4).unwrap();
            for r in v.run(&points).unwrap() {
                assert!(r.pass, "{name}: {r:?}");
            }
        }
    }

    #[test]
    fn results_independent_of_point_subset() {
        let v = verifier("sphere-chart", Selection::Only(vec![CheckKind::LeviCivita, CheckKind::JetsVsFd]));
        let points = v.points(3).unwrap();
        let all = v.run(&points).unwrap();
        let single = v.run_point(2, &points[2]).unwrap();
        let from_all: Vec<_> = all.iter().filter(|r| r.point == points[2]).cloned().collect();
        assert_eq!(from_all, single);
    }

    #[test]
    fn plane_axis_laplacian_case() {
        let mu = ScalarField::parse("x^2+y^2", &crate::expr::default_coordinates(2)).unwrap();
        let v = Verifier::new(
            builtin("plane-axis").unwrap(),
            Selection::Only(vec![CheckKind::ConformalTauH]),
            vec![mu],
            Tolerances::default(),
            0,
        )
        .unwrap();
        let results = v.run_point(0, &[1.0, 1.0]).unwrap();
        let closed = results.iter().find(|r| r.case.ends_with("laplacian-gradient")).unwrap();
        assert!(closed.pass);
        assert!((closed.rhs_norm - 8.0 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn out_of_domain_point() {
        let v = verifier("sphere-chart", Selection::All);
        assert!(matches!(v.run_point(0, &[0.0, 0.0]), Err(Error::OutOfDomain { .. })));
    }
}
