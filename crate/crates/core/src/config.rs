//! JSON run configuration.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::engine::InitialData;
use crate::error::{Error, Result};
use crate::gas::SimilarityParams;
use crate::geometry::{BoundaryPolyline, BoundarySpec, WingGeometry};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSpec {
    pub gamma: f64,
    pub a_inf: f64,
    #[serde(default)]
    pub tau: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    #[default]
    Scaled,
    SmallDisturbance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeometrySpec {
    PiecewiseLinear {
        breakpoints: Vec<f64>,
        slopes: Vec<f64>,
    },
    Samples {
        x: Vec<f64>,
        y: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        far_slope: Option<f64>,
    },
    Cauchy,
    Wing {
        chord: f64,
        upper: BoundarySpec,
        lower: BoundarySpec,
    },
}

impl GeometrySpec {
    pub fn boundary(&self) -> Option<BoundarySpec> {
        match self {
            GeometrySpec::PiecewiseLinear { breakpoints, slopes } => Some(BoundarySpec::PiecewiseLinear {
                breakpoints: breakpoints.clone(),
                slopes: slopes.clone(),
            }),
            GeometrySpec::Samples { x, y, far_slope } => Some(BoundarySpec::Samples {
                x: x.clone(),
                y: y.clone(),
                far_slope: *far_slope,
            }),
            _ => None,
        }
    }

    pub fn wing(&self) -> Option<WingGeometry> {
        match self {
            GeometrySpec::Wing { chord, upper, lower } => Some(WingGeometry {
                chord: *chord,
                upper: upper.clone(),
                lower: lower.clone(),
            }),
            _ => None,
        }
    }
}

fn default_tail() -> f64 {
    0.5
}
fn default_budget() -> f64 {
    0.25
}
fn default_true() -> bool {
    true
}
fn default_max_fronts() -> usize {
    200_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub params: ParamsSpec,
    #[serde(default)]
    pub regime: Regime,
    pub geometry: GeometrySpec,
    pub initial_data: InitialData,
    pub h: f64,
    pub nu: u32,
    pub x_end: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub query_xs: Vec<f64>,
    #[serde(default)]
    pub taus: Vec<f64>,
    /// `c` in the wing tail horizon `c / τ`.
    #[serde(default = "default_tail")]
    pub tail_constant: f64,
    #[serde(default = "default_budget")]
    pub smallness_budget: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub neighborhood_radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_hat: Option<f64>,
    #[serde(default = "default_true")]
    pub jitter: bool,
    #[serde(default = "default_max_fronts")]
    pub max_fronts: usize,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Parameters at the configured τ (zero in the small-disturbance regime).
    pub fn params(&self) -> Result<SimilarityParams<f64>> {
        let tau = match self.regime {
            Regime::Scaled => self.params.tau,
            Regime::SmallDisturbance => 0.0,
        };
        self.params_at(tau)
    }

    pub fn params_at(&self, tau: f64) -> Result<SimilarityParams<f64>> {
        let ParamsSpec { gamma, a_inf, .. } = self.params;
        match self.neighborhood_radius {
            Some(r) => SimilarityParams::with_radius(gamma, a_inf, tau, r),
            None => SimilarityParams::new(gamma, a_inf, tau),
        }
    }

    pub fn wall(&self) -> Result<Option<BoundaryPolyline>> {
        self.geometry
            .boundary()
            .map(|b| BoundaryPolyline::build(&b, self.h, None))
            .transpose()
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!(
                "schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        if !(self.h > 0.0 && self.h.is_finite()) {
            return bad(format!("h = {} must be positive", self.h));
        }
        if self.nu < 4 || self.nu > 40 {
            return bad(format!("nu = {} must lie in [4, 40]", self.nu));
        }
        if !(self.x_end > 0.0 && self.x_end.is_finite()) {
            return bad(format!("x_end = {} must be positive", self.x_end));
        }
        if self.query_xs.iter().any(|&x| !(x >= 0.0 && x <= self.x_end)) {
            return bad("query_xs must lie in [0, x_end]".into());
        }
        if self.taus.iter().any(|&t| !(t > 0.0)) {
            return bad("taus must be positive".into());
        }
        if !(self.tail_constant > 0.0) || !(self.smallness_budget > 0.0) {
            return bad("tail_constant and smallness_budget must be positive".into());
        }
        if self.max_fronts == 0 {
            return bad("max_fronts must be positive".into());
        }
        let p = self.params().map_err(|e| Error::Config(e.to_string()))?;
        for &t in &self.taus {
            self.params_at(t).map_err(|e| Error::Config(e.to_string()))?;
        }
        crate::engine::sample_initial_data(&self.initial_data, self.nu, None, &p)
            .map_err(|e| Error::Config(e.to_string()))?;

        let budget_used = match &self.geometry {
            GeometrySpec::Cauchy => self.initial_data.total_variation(None),
            GeometrySpec::Wing { .. } => {
                let w = self.geometry.wing().unwrap();
                crate::geometry::wing_to_half_problems(&w, self.h).map_err(|e| Error::Config(e.to_string()))?;
                let lower = self.initial_data.total_variation(Some(0.0))
                    + w.lower.slope(0.0, self.h).abs()
                    + w.lower.slope_variation(self.h);
                let upper = self.initial_data.mirrored().total_variation(Some(0.0))
                    + w.upper.slope(0.0, self.h).abs()
                    + w.upper.slope_variation(self.h);
                lower.max(upper)
            }
            _ => {
                let b = self.geometry.boundary().unwrap();
                self.wall().map_err(|e| Error::Config(e.to_string()))?;
                self.initial_data.total_variation(Some(0.0)) + b.slope(0.0, self.h).abs() + b.slope_variation(self.h)
            }
        };
        if !(budget_used < self.smallness_budget) {
            return bad(format!(
                "smallness budget exceeded: TV(U0) + |b'(0)| + TV(b') = {budget_used} >= {}",
                self.smallness_budget
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const WEDGE: &str = r#"{
        "schema_version": 1,
        "params": {"gamma": 1.4, "a_inf": 0.5, "tau": 0.1},
        "geometry": {"kind": "piecewise_linear", "breakpoints": [1.0], "slopes": [-0.05, -0.07]},
        "initial_data": {"kind": "bump", "center": -1.0, "width": 1.0, "amplitude": [0.01, 0.0]},
        "h": 0.05, "nu": 12, "x_end": 2.0, "query_xs": [0.5, 1.0, 2.0]
    }"#;

    #[test]
    fn parses_reference_shape() {
        let c = RunConfig::from_json(WEDGE).unwrap();
        assert_eq!(c.regime, Regime::Scaled);
        assert_eq!(c.tail_constant, 0.5);
        assert!(c.jitter);
        assert_eq!(c.wall().unwrap().unwrap().corner_schedule().len(), 2);
    }

    #[test]
    fn unknown_keys_rejected() {
        let t = WEDGE.replace("\"h\": 0.05", "\"h\": 0.05, \"mesh\": 1");
        assert!(matches!(RunConfig::from_json(&t), Err(Error::Config(_))));
        let t = WEDGE.replace("\"tau\": 0.1", "\"tau\": 0.1, \"mach\": 5");
        assert!(RunConfig::from_json(&t).is_err());
    }

    #[test]
    fn hypotheses_checked_at_load() {
        assert!(RunConfig::from_json(&WEDGE.replace("\"nu\": 12", "\"nu\": 3")).is_err());
        assert!(RunConfig::from_json(&WEDGE.replace("\"h\": 0.05", "\"h\": 0.0")).is_err());
        assert!(RunConfig::from_json(&WEDGE.replace("[0.01, 0.0]", "[0.2, 0.0]")).is_err());
        assert!(RunConfig::from_json(&WEDGE.replace("\"schema_version\": 1", "\"schema_version\": 2")).is_err());
        let steep = WEDGE.replace("[-0.05, -0.07]", "[-0.05, -0.3]");
        let e = RunConfig::from_json(&steep).unwrap_err();
        assert!(e.to_string().contains("smallness"), "{e}");
    }

    #[test]
    fn small_disturbance_regime_zeroes_tau() {
        let t = WEDGE.replace("\"geometry\"", "\"regime\": \"small_disturbance\", \"geometry\"");
        let c = RunConfig::from_json(&t).unwrap();
        assert_eq!(c.params().unwrap().tau, 0.0);
    }
}
