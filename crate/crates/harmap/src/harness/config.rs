//! Versioned JSON experiment configuration.
//!
//! Unknown fields are rejected, named components are resolved at load time,
//! and the ball radius bound tau < pi/4 is enforced with an error naming
//! the violated bound.

use serde::{Deserialize, Serialize};

use crate::domain::{
    build_book, build_cone_domain, product_with_interval, LocalModel, MetricField,
};
use crate::error::{Error, Result};
use crate::target::{BallConstraint, MetricTree, TargetSpace};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub name: String,
    pub domain: DomainSpec,
    pub metric: MetricSpec,
    pub target: TargetSpec,
    pub ball: BallSpec,
    pub trace: TraceSpec,
    #[serde(default)]
    pub solver: SolverSpec,
    pub analytics: AnalyticsSpec,
    pub seed: u64,
    #[serde(default)]
    pub acceptance: AcceptanceBands,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    /// "disk", "cone" or "book".
    pub kind: String,
    /// Cone total angle as a multiple of pi (cone/disk kinds).
    #[serde(default)]
    pub angle_over_pi: Option<f64>,
    #[serde(default)]
    pub pages: Option<usize>,
    /// Take the product with an interval (dimension 3).
    #[serde(default)]
    pub product_with_interval: bool,
    pub radius: f64,
    pub h: f64,
    pub grading: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricSpec {
    pub name: String,
    #[serde(default)]
    pub params: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSpec {
    /// "euclidean", "arc", "sphere" or "tree".
    pub kind: String,
    #[serde(default)]
    pub dim: Option<usize>,
    #[serde(default)]
    pub length: Option<f64>,
    #[serde(default)]
    pub tree_vertices: Option<usize>,
    #[serde(default)]
    pub tree_edges: Option<Vec<(usize, usize, f64)>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallSpec {
    /// Flat coordinates of the center (see target coordinate encodings).
    pub center: Vec<f64>,
    pub radius: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceSpec {
    pub name: String,
    #[serde(default)]
    pub params: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    pub tol: f64,
    pub max_sweeps: usize,
    pub relaxation: f64,
}

impl Default for SolverSpec {
    fn default() -> Self {
        SolverSpec {
            tol: 1e-9,
            max_sweeps: 100_000,
            relaxation: 1.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyticsSpec {
    #[serde(default)]
    pub profile: Option<ProfileSpec>,
    #[serde(default)]
    pub holder: Option<HolderSpec>,
    #[serde(default)]
    pub blowup: Option<BlowupSpec>,
    #[serde(default)]
    pub link: Option<LinkSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub per_octave: usize,
    pub angular: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HolderSpec {
    pub inner: f64,
    pub outer: f64,
    pub pairs: usize,
    pub bins: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlowupSpec {
    pub lambdas: Vec<f64>,
    pub radial: usize,
    pub angular: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkSpec {
    pub subdivision: usize,
    /// "real" and/or "tripod".
    pub targets: Vec<String>,
}

/// Declared pass bands the summary is judged against.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AcceptanceBands {
    /// Expected order as (value, absolute tolerance).
    #[serde(default)]
    pub alpha: Option<(f64, f64)>,
    /// Expected Hölder exponent range [lo, hi].
    #[serde(default)]
    pub gamma_range: Option<(f64, f64)>,
    /// Expected real-valued link eigenvalue (value, absolute tolerance).
    #[serde(default)]
    pub lambda1: Option<(f64, f64)>,
    /// Relative tolerance for measured order vs predicted exponent.
    #[serde(default)]
    pub prediction_rel_tol: Option<f64>,
    /// Per-octave monotonicity tolerance (default 3%).
    #[serde(default = "default_monotonicity_tol")]
    pub monotonicity_tol: f64,
}

fn default_monotonicity_tol() -> f64 {
    0.03
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(Error::Config(format!(
                "config version {} unsupported (expected {CONFIG_VERSION})",
                self.version
            )));
        }
        if !(self.ball.radius > 0.0 && self.ball.radius < std::f64::consts::FRAC_PI_4) {
            return Err(Error::Config(format!(
                "ball radius {} violates the bound 0 < tau < pi/4",
                self.ball.radius
            )));
        }
        self.build_model()?;
        let space = self.build_target()?;
        space.point_from_coords(&self.ball.center)?;
        MetricField::by_name(&self.metric.name, &self.metric.params, self.dimension())?;
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        if self.domain.product_with_interval {
            3
        } else {
            2
        }
    }

    pub fn build_model(&self) -> Result<LocalModel> {
        let base = match self.domain.kind.as_str() {
            "disk" => build_cone_domain(2.0 * std::f64::consts::PI)?,
            "cone" => {
                let a = self.domain.angle_over_pi.ok_or_else(|| {
                    Error::Config("cone domain needs angle_over_pi".into())
                })?;
                build_cone_domain(a * std::f64::consts::PI)?
            }
            "book" => build_book(
                self.domain
                    .pages
                    .ok_or_else(|| Error::Config("book domain needs pages".into()))?,
            )?,
            other => return Err(Error::Config(format!("unknown domain kind '{other}'"))),
        };
        if self.domain.product_with_interval {
            product_with_interval(&base)
        } else {
            Ok(base)
        }
    }

    pub fn build_metric(&self) -> Result<MetricField> {
        MetricField::by_name(&self.metric.name, &self.metric.params, self.dimension())
    }

    pub fn build_target(&self) -> Result<TargetSpace> {
        match self.target.kind.as_str() {
            "euclidean" => Ok(TargetSpace::Euclidean {
                dim: self
                    .target
                    .dim
                    .ok_or_else(|| Error::Config("euclidean target needs dim".into()))?,
            }),
            "sphere" => Ok(TargetSpace::Sphere {
                dim: self
                    .target
                    .dim
                    .ok_or_else(|| Error::Config("sphere target needs dim".into()))?,
            }),
            "arc" => {
                let length = self
                    .target
                    .length
                    .ok_or_else(|| Error::Config("arc target needs length".into()))?;
                if !(length > 0.0 && length < std::f64::consts::PI) {
                    return Err(Error::Config(format!(
                        "arc length {length} violates 0 < L < pi"
                    )));
                }
                Ok(TargetSpace::Arc { length })
            }
            "tree" => {
                let nv = self
                    .target
                    .tree_vertices
                    .ok_or_else(|| Error::Config("tree target needs tree_vertices".into()))?;
                let edges = self
                    .target
                    .tree_edges
                    .clone()
                    .ok_or_else(|| Error::Config("tree target needs tree_edges".into()))?;
                Ok(TargetSpace::Tree(MetricTree::new(nv, edges)?))
            }
            other => Err(Error::Config(format!("unknown target kind '{other}'"))),
        }
    }

    pub fn build_ball(&self) -> Result<BallConstraint> {
        let space = self.build_target()?;
        let center = space.point_from_coords(&self.ball.center)?;
        BallConstraint::new(center, self.ball.radius)
    }
}
