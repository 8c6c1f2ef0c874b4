//! Scenes: a chart with metric, distribution, optional conformal factor
//! and curvature constant, and a sampling domain.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::conformal::ConformalScene;
use crate::error::{Error, Result};
use crate::expr::{default_coordinates, ScalarField};
use crate::geometry::{Distribution, MetricField, VectorFieldSpec};
use crate::rng::SplitMix64;
use crate::tension::FramedPoint;

/// A disc (ball) removed from the sampling box.
#[derive(Debug, Clone, PartialEq)]
pub struct Exclusion {
    pub center: Vec<f64>,
    pub radius: f64,
}

/// Axis-aligned box minus exclusion balls.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub exclusions: Vec<Exclusion>,
}

impl Domain {
    pub fn new(bounds: Vec<(f64, f64)>, exclusions: Vec<Exclusion>) -> Result<Domain> {
        for (k, (lo, hi)) in bounds.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidScene(format!(
                    "box side {k} is [{lo}, {hi}]; need finite lower < upper"
                )));
            }
        }
        for e in &exclusions {
            if e.center.len() != bounds.len() {
                return Err(Error::DimensionMismatch(format!(
                    "exclusion center has {} coordinates, box has {}",
                    e.center.len(),
                    bounds.len()
                )));
            }
            if !(e.radius >= 0.0) {
                return Err(Error::InvalidScene(format!("exclusion radius {}", e.radius)));
            }
        }
        Ok(Domain {
            lower: bounds.iter().map(|b| b.0).collect(),
            upper: bounds.iter().map(|b| b.1).collect(),
            exclusions,
        })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn center(&self) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(a, b)| 0.5 * (a + b))
            .collect()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        if x.len() != self.dim() {
            return false;
        }
        let in_box = x
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(v, (lo, hi))| *lo <= *v && *v <= *hi);
        in_box
            && self.exclusions.iter().all(|e| {
                let d2: f64 = x.iter().zip(&e.center).map(|(a, b)| (a - b) * (a - b)).sum();
                libm::sqrt(d2) >= e.radius
            })
    }

    /// `count` points uniform in the box with excluded points rejected,
    /// drawn from `SplitMix64::new(seed)` one coordinate at a time.
    pub fn sample(&self, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
        if count == 0 {
            return Err(Error::InvalidArgument("sample count must be at least 1".into()));
        }
        let attempts = count.saturating_mul(10);
        let mut rng = SplitMix64::new(seed);
        let mut out = Vec::with_capacity(count);
        for _ in 0..attempts {
            let x: Vec<f64> = self
                .lower
                .iter()
                .zip(&self.upper)
                .map(|(lo, hi)| rng.uniform(*lo, *hi))
                .collect();
            if self.contains(&x) {
                out.push(x);
                if out.len() == count {
                    return Ok(out);
                }
            }
        }
        Err(Error::NoAdmissiblePoints {
            count,
            found: out.len(),
            attempts,
        })
    }
}

#[derive(Debug, Clone)]
pub struct Scene {
    pub name: String,
    pub coordinates: Vec<String>,
    pub metric: MetricField,
    /// Spanning fields of `σ`; the complement is always present (frozen
    /// coordinate axes when none was declared).
    pub distribution: Distribution,
    /// Whether the complement was given explicitly.
    pub declared_complement: bool,
    pub mu: Option<ScalarField>,
    pub constant_curvature: Option<f64>,
    pub domain: Domain,
    reference: Vec<f64>,
}

impl Scene {
    /// Assemble and validate a scene. Validation happens at a reference
    /// point: the box center when it is admissible, otherwise the first
    /// admissible point of the seed-0 sample sequence.
    pub fn new(
        name: impl Into<String>,
        metric: MetricField,
        distribution: Distribution,
        mu: Option<ScalarField>,
        constant_curvature: Option<f64>,
        domain: Domain,
    ) -> Result<Scene> {
        let n = metric.dim();
        let coordinates = metric.coordinates().to_vec();
        if distribution.dim() != n || domain.dim() != n {
            return Err(Error::DimensionMismatch(format!(
                "metric dimension {n}, distribution dimension {}, box dimension {}",
                distribution.dim(),
                domain.dim()
            )));
        }
        if let Some(m) = &mu {
            if m.coordinates() != coordinates.as_slice() {
                return Err(Error::DimensionMismatch("conformal factor coordinates differ from the chart".into()));
            }
        }
        let center = domain.center();
        let reference = if domain.contains(&center) {
            center
        } else {
            domain.sample(1, 0)?.remove(0)
        };
        let declared_complement = distribution.complement.is_some();
        let distribution = distribution.with_frozen_complement(&metric, &reference)?;
        let scene = Scene {
            name: name.into(),
            coordinates,
            metric,
            distribution,
            declared_complement,
            mu,
            constant_curvature,
            domain,
            reference,
        };
        scene.framed_at(&scene.reference)?;
        if let Some(m) = &scene.mu {
            m.eval(&scene.reference)?;
        }
        Ok(scene)
    }

    pub fn dim(&self) -> usize {
        self.coordinates.len()
    }

    pub fn rank(&self) -> usize {
        self.distribution.rank()
    }

    pub fn reference_point(&self) -> &[f64] {
        &self.reference
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.domain.contains(x)
    }

    pub fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "point has {} coordinates, scene `{}` has dimension {}",
                x.len(),
                self.name,
                self.dim()
            )));
        }
        if !self.contains(x) {
            return Err(Error::OutOfDomain { point: x.to_vec() });
        }
        Ok(())
    }

    pub fn sample_points(&self, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
        self.domain.sample(count, seed)
    }

    pub fn framed_at(&self, x: &[f64]) -> Result<FramedPoint> {
        FramedPoint::new(&self.metric, &self.distribution, x)
    }

    pub fn conformal(&self, mu: ScalarField) -> Result<ConformalScene> {
        ConformalScene::new(self.metric.clone(), mu)
    }

    pub fn parse_field(&self, src: &str) -> Result<ScalarField> {
        ScalarField::parse(src, &self.coordinates)
    }

    /// Same scene with another distribution (used for rescaled or rotated
    /// spanning fields).
    pub fn with_distribution(&self, distribution: Distribution) -> Result<Scene> {
        Scene::new(
            self.name.clone(),
            self.metric.clone(),
            distribution,
            self.mu.clone(),
            self.constant_curvature,
            self.domain.clone(),
        )
    }
}

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: [&str; 5] = [
    "plane-axis",
    "sphere-chart",
    "hyperbolic-horocycle",
    "flat-product-22",
    "flat-product-11",
];

/// Norm prefactor of the circle and ray fields on the spherical chart.
const SPHERE_FACTOR: &str = "(1+x^2+y^2)/(2*sqrt(x^2+y^2))";

fn fields(list: &[&[&str]], coords: &[String]) -> Result<Vec<VectorFieldSpec>> {
    list.iter().map(|v| VectorFieldSpec::parse(v, coords)).collect()
}

fn square(side: (f64, f64), n: usize) -> Vec<(f64, f64)> {
    vec![side; n]
}

pub fn builtin(name: &str) -> Result<Scene> {
    let c2 = default_coordinates(2);
    match name {
        "plane-axis" | "flat-product-11" => {
            // plane-axis leaves the complement to the frozen axis choice
            let complement = match name {
                "plane-axis" => None,
                _ => Some(fields(&[&["0", "1"]], &c2)?),
            };
            let d = Distribution::new(fields(&[&["1", "0"]], &c2)?, complement)?;
            Scene::new(
                name,
                MetricField::euclidean(&c2)?,
                d,
                None,
                Some(0.0),
                Domain::new(square((-2.0, 2.0), 2), vec![])?,
            )
        }
        "sphere-chart" => {
            let k = SPHERE_FACTOR;
            let circle = [format!("{k}*(-y)"), format!("{k}*x")];
            let ray = [format!("{k}*x"), format!("{k}*y")];
            let d = Distribution::new(
                vec![VectorFieldSpec::parse(&circle, &c2)?],
                Some(vec![VectorFieldSpec::parse(&ray, &c2)?]),
            )?;
            let metric = MetricField::conformally_flat(ScalarField::parse("4/(1+x^2+y^2)^2", &c2)?)?;
            let domain = Domain::new(
                square((-2.5, 2.5), 2),
                vec![Exclusion {
                    center: vec![0.0, 0.0],
                    radius: 0.3,
                }],
            )?;
            Scene::new(name, metric, d, None, Some(1.0), domain)
        }
        "hyperbolic-horocycle" => {
            let d = Distribution::new(fields(&[&["1", "0"]], &c2)?, Some(fields(&[&["0", "1"]], &c2)?))?;
            let metric = MetricField::conformally_flat(ScalarField::parse("1/y^2", &c2)?)?;
            Scene::new(
                name,
                metric,
                d,
                None,
                Some(-1.0),
                Domain::new(vec![(-1.0, 1.0), (0.5, 2.0)], vec![])?,
            )
        }
        "flat-product-22" => {
            let c4 = default_coordinates(4);
            let d = Distribution::new(
                fields(&[&["1", "0", "0", "0"], &["0", "1", "0", "0"]], &c4)?,
                Some(fields(&[&["0", "0", "1", "0"], &["0", "0", "0", "1"]], &c4)?),
            )?;
            Scene::new(
                name,
                MetricField::euclidean(&c4)?,
                d,
                None,
                Some(0.0),
                Domain::new(square((-1.0, 1.0), 4), vec![])?,
            )
        }
        other => Err(Error::UnknownScene(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::{Jet2, Scalar};

    #[test]
    fn registry() {
        for name in BUILTIN_NAMES {
            let s = builtin(name).unwrap();
            assert_eq!(s.name, name);
            assert!(s.contains(s.reference_point()));
        }
        assert_eq!(builtin("nope").unwrap_err(), Error::UnknownScene("nope".into()));
    }

    #[test]
    fn sphere_chart_metric_at_unit_circle() {
        let s = builtin("sphere-chart").unwrap();
        let g = s.metric.at(&[1.0, 0.0]).unwrap();
        assert_eq!(g[0][0].value, 1.0);
        assert_eq!(g[1][1].value, 1.0);
        assert_eq!(g[0][1], Jet2::constant(0.0));
        assert!(s.contains(&[2.0, 0.0]));
        assert!(matches!(s.check_point(&[0.0, 0.0]), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn sampling() {
        let s = builtin("sphere-chart").unwrap();
        let a = s.sample_points(100, 7).unwrap();
        assert_eq!(a, s.sample_points(100, 7).unwrap());
        assert_ne!(a, s.sample_points(100, 8).unwrap());
        assert!(a.iter().all(|x| libm::hypot(x[0], x[1]) >= 0.3));
        assert!(matches!(s.sample_points(0, 7), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn sampling_gives_up_on_empty_domains() {
        let d = Domain::new(
            square((-1.0, 1.0), 2),
            vec![Exclusion {
                center: vec![0.0, 0.0],
                radius: 5.0,
            }],
        )
        .unwrap();
        assert_eq!(
            d.sample(4, 1),
            Err(Error::NoAdmissiblePoints {
                count: 4,
                found: 0,
                attempts: 40
            })
        );
    }

    #[test]
    fn sphere_frame_is_the_circle_ray_pair() {
        let s = builtin("sphere-chart").unwrap();
        for x in s.sample_points(20, 3).unwrap() {
            let fp = s.framed_at(&x).unwrap();
            let r2 = x[0] * x[0] + x[1] * x[1];
            let k = (1.0 + r2) / (2.0 * libm::sqrt(r2));
            let want = [[-k * x[1], k * x[0]], [k * x[0], k * x[1]]];
            for (a, w) in want.iter().enumerate() {
                let e = fp.e(a);
                for (u, v) in e.iter().zip(w) {
                    assert!((u - v).abs() <= 1e-10 * (1.0 + v.abs()));
                }
            }
        }
    }
}
