//! JSON scene files.
//!
//! ```json
//! {
//!   "name": "sphere-chart",
//!   "dimension": 2,
//!   "coordinates": ["x", "y"],
//!   "metric": [["4/(1+x^2+y^2)^2", "0"], ["0", "4/(1+x^2+y^2)^2"]],
//!   "distribution": [["-y", "x"]],
//!   "complement": [["x", "y"]],
//!   "mu": null,
//!   "constant_curvature": 1,
//!   "domain": { "box": [[-2.5, 2.5], [-2.5, 2.5]] },
//!   "exclusions": [{ "center": [0, 0], "radius": 0.3 }]
//! }
//! ```
//!
//! `name`, `coordinates`, `complement`, `mu`, `constant_curvature` and
//! `exclusions` may be omitted.

use std::path::Path;

use distharm_core::expr::{default_coordinates, ScalarField};
use distharm_core::geometry::{Distribution, MetricField, VectorFieldSpec};
use distharm_core::scene::{builtin, Domain, Exclusion, Scene, BUILTIN_NAMES};
use distharm_core::Error as CoreError;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub dimension: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coordinates: Option<Vec<String>>,
    pub metric: Vec<Vec<String>>,
    pub distribution: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complement: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant_curvature: Option<f64>,
    pub domain: DomainFile,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub exclusions: Vec<ExclusionFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainFile {
    #[serde(rename = "box")]
    pub bounds: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExclusionFile {
    pub center: Vec<f64>,
    pub radius: f64,
}

fn fields(list: &[Vec<String>], coordinates: &[String]) -> Result<Vec<VectorFieldSpec>, CoreError> {
    list.iter().map(|v| VectorFieldSpec::parse(v, coordinates)).collect()
}

fn strings(v: &VectorFieldSpec) -> Vec<String> {
    v.components.iter().map(ToString::to_string).collect()
}

impl SceneFile {
    /// Build and validate the scene.
    pub fn to_scene(&self, fallback_name: &str) -> Result<Scene, CoreError> {
        let n = self.dimension;
        let coordinates = match &self.coordinates {
            Some(c) => c.clone(),
            None => default_coordinates(n),
        };
        if coordinates.len() != n {
            return Err(CoreError::DimensionMismatch(format!(
                "dimension {n} but {} coordinate names",
                coordinates.len()
            )));
        }
        if self.metric.len() != n || self.metric.iter().any(|row| row.len() != n) {
            let shape: Vec<usize> = self.metric.iter().map(Vec::len).collect();
            return Err(CoreError::DimensionMismatch(format!(
                "metric must be {n}×{n}, got row lengths {shape:?}"
            )));
        }
        if self.domain.bounds.len() != n {
            return Err(CoreError::DimensionMismatch(format!(
                "domain box has {} sides, dimension is {n}",
                self.domain.bounds.len()
            )));
        }
        let metric = MetricField::parse(&self.metric, &coordinates)?;
        let spanning = fields(&self.distribution, &coordinates)?;
        let complement = match &self.complement {
            Some(c) => Some(fields(c, &coordinates)?),
            None => None,
        };
        let distribution = Distribution::new(spanning, complement)?;
        let mu = match &self.mu {
            Some(src) => Some(ScalarField::parse(src, &coordinates)?),
            None => None,
        };
        let exclusions = self
            .exclusions
            .iter()
            .map(|e| Exclusion {
                center: e.center.clone(),
                radius: e.radius,
            })
            .collect();
        let domain = Domain::new(self.domain.bounds.iter().map(|b| (b[0], b[1])).collect(), exclusions)?;
        let name = self.name.clone().unwrap_or_else(|| fallback_name.to_string());
        Scene::new(name, metric, distribution, mu, self.constant_curvature, domain)
    }

    /// The file form of a scene; a complement chosen automatically is not
    /// written out.
    pub fn from_scene(scene: &Scene) -> SceneFile {
        let n = scene.dim();
        let metric = (0..n)
            .map(|i| (0..n).map(|j| scene.metric.component(i, j).to_string()).collect())
            .collect();
        let complement = match (&scene.distribution.complement, scene.declared_complement) {
            (Some(c), true) => Some(c.iter().map(strings).collect()),
            _ => None,
        };
        SceneFile {
            name: Some(scene.name.clone()),
            dimension: n,
            coordinates: Some(scene.coordinates.clone()),
            metric,
            distribution: scene.distribution.spanning.iter().map(strings).collect(),
            complement,
            mu: scene.mu.as_ref().map(ToString::to_string),
            constant_curvature: scene.constant_curvature,
            domain: DomainFile {
                bounds: scene
                    .domain
                    .lower
                    .iter()
                    .zip(&scene.domain.upper)
                    .map(|(lo, hi)| [*lo, *hi])
                    .collect(),
            },
            exclusions: scene
                .domain
                .exclusions
                .iter()
                .map(|e| ExclusionFile {
                    center: e.center.clone(),
                    radius: e.radius,
                })
                .collect(),
        }
    }
}

pub fn parse(text: &str, origin: &str) -> Result<Scene> {
    let file: SceneFile = serde_json::from_str(text).map_err(|source| CliError::SceneJson {
        path: origin.into(),
        source,
    })?;
    file.to_scene(origin).map_err(|source| CliError::Scene {
        origin: origin.to_string(),
        source,
    })
}

pub fn load(path: &Path) -> Result<Scene> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("scene");
    let file: SceneFile = serde_json::from_str(&text).map_err(|source| CliError::SceneJson {
        path: path.to_path_buf(),
        source,
    })?;
    file.to_scene(stem).map_err(|source| CliError::Scene {
        origin: path.display().to_string(),
        source,
    })
}

/// A builtin name, or else a path to a scene file.
pub fn resolve(spec: &str) -> Result<Scene> {
    if BUILTIN_NAMES.contains(&spec) {
        return builtin(spec).map_err(|source| CliError::Scene {
            origin: spec.to_string(),
            source,
        });
    }
    let path = Path::new(spec);
    if !path.exists() {
        return Err(CliError::Usage(format!(
            "`{spec}` is neither a builtin scene ({}) nor an existing file",
            BUILTIN_NAMES.join(", ")
        )));
    }
    load(path)
}
