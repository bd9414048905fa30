//! Scenario files. Every section is optional; missing keys take the defaults
//! below, unknown keys are rejected.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use squeezed_discord::bath::{
    DephasingProfile, Method, SqueezedBathSpec, DEFAULT_QUAD_ABS_TOL, DEFAULT_QUAD_REL_TOL,
};
use squeezed_discord::dynamics::{linspace, Convention, DEFAULT_HORIZON};
use squeezed_discord::states::XStateParams;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub state: XStateParams,
    pub bath: SqueezedBathSpec,
    pub method: MethodConfig,
    pub grid: GridConfig,
    pub output: OutputConfig,
    pub convention: Convention,
    /// Window of the amplification rate.
    pub horizon: f64,
    /// Evolution time for the speed limit.
    pub drive_time: f64,
    /// Qubit frequency; drops out of every result and is carried only for
    /// bookkeeping.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_0: Option<f64>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            state: XStateParams::new(0.5, 0.0, 0.3).expect("valid default state"),
            bath: SqueezedBathSpec::vacuum(0.0, 0.0).expect("valid default bath"),
            method: MethodConfig::default(),
            grid: GridConfig::default(),
            output: OutputConfig::default(),
            convention: Convention::TimeAverage,
            horizon: DEFAULT_HORIZON,
            drive_time: 1.0,
            omega_0: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MethodConfig {
    pub kind: Method,
    pub quad_rel_tol: f64,
    pub quad_abs_tol: f64,
}

impl Default for MethodConfig {
    fn default() -> Self {
        Self {
            kind: Method::AnalyticZeroT,
            quad_rel_tol: DEFAULT_QUAD_REL_TOL,
            quad_abs_tol: DEFAULT_QUAD_ABS_TOL,
        }
    }
}

/// `points` evenly spaced values on `[min, max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Range {
    pub fn new(min: f64, max: f64, points: usize) -> Self {
        Self { min, max, points }
    }

    fn check(&self, name: &str) -> CliResult<()> {
        if !(self.min.is_finite() && self.max.is_finite()) || self.max < self.min || self.points == 0 {
            return Err(CliError::Config(format!(
                "grid.{name}: need finite min <= max and points >= 1, got {self:?}"
            )));
        }
        if self.points > 1 && self.max == self.min {
            return Err(CliError::Config(format!("grid.{name}: several points on an empty range")));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        linspace(self.min, self.max, self.points)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub tau: Range,
    /// Sweep of c1 (c2, c3 come from `state`); absent means `state.c1` only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c1: Option<Range>,
    /// Squeezing phases; combined with `r` as a Cartesian product.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<Vec<f64>>,
    /// Explicit `[r, theta]` pairs; replaces `r` × `theta` when present.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<[f64; 2]>>,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            tau: Range::new(0.0, 10.0, 201),
            c1: None,
            theta: None,
            r: None,
            pairs: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

/// One reservoir setting of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Squeezing {
    pub r: f64,
    pub theta: f64,
    pub profile: DephasingProfile,
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Checks everything that serde cannot.
    pub fn validate(&self) -> CliResult<()> {
        self.grid.tau.check("tau")?;
        if self.grid.tau.min < 0.0 {
            return Err(CliError::Config(format!("grid.tau.min = {} < 0", self.grid.tau.min)));
        }
        if let Some(c1) = &self.grid.c1 {
            c1.check("c1")?;
        }
        for (name, list) in [("theta", &self.grid.theta), ("r", &self.grid.r)] {
            if list.as_ref().is_some_and(|l| l.is_empty()) {
                return Err(CliError::Config(format!("grid.{name} is empty")));
            }
        }
        if self.grid.pairs.as_ref().is_some_and(|l| l.is_empty()) {
            return Err(CliError::Config("grid.pairs is empty".into()));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(CliError::Config(format!("horizon = {} must be > 0", self.horizon)));
        }
        if !(self.drive_time > 0.0 && self.drive_time.is_finite()) {
            return Err(CliError::Config(format!("drive_time = {} must be > 0", self.drive_time)));
        }
        self.squeezings()?;
        Ok(())
    }

    pub fn base_profile(&self) -> CliResult<DephasingProfile> {
        Ok(DephasingProfile::new(self.bath, self.method.kind)?
            .with_tolerances(self.method.quad_rel_tol, self.method.quad_abs_tol)?)
    }

    /// Reservoir settings to sweep, in output order.
    pub fn squeezings(&self) -> CliResult<Vec<Squeezing>> {
        let pairs: Vec<(f64, f64)> = match &self.grid.pairs {
            Some(p) => p.iter().map(|&[r, t]| (r, t)).collect(),
            None => {
                let rs = self.grid.r.clone().unwrap_or_else(|| vec![self.bath.r()]);
                let ts = self.grid.theta.clone().unwrap_or_else(|| vec![self.bath.theta()]);
                rs.iter().flat_map(|&r| ts.iter().map(move |&t| (r, t))).collect()
            }
        };
        let base = self.base_profile()?;
        pairs
            .into_iter()
            .map(|(r, theta)| {
                let profile = base.with_bath(self.bath.with_squeezing(r, theta)?)?;
                Ok(Squeezing {
                    r: profile.bath.r(),
                    theta: profile.bath.theta(),
                    profile,
                })
            })
            .collect()
    }

    pub fn c1_values(&self) -> Vec<f64> {
        match &self.grid.c1 {
            Some(r) => r.values(),
            None => vec![self.state.c1()],
        }
    }

    /// Canonical serialization; the manifest hash is taken over these bytes.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// SHA-256 of the canonical JSON with `output.path` cleared, so the same
    /// scenario written to two places hashes the same.
    pub fn hash(&self) -> String {
        let mut scenario = self.clone();
        scenario.output.path = None;
        hex::encode(Sha256::digest(scenario.canonical_json().as_bytes()))
    }
}
