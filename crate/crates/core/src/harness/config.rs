//! Sectioned TOML configuration for runs and sweeps.

use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::kinetic::Physics;
use crate::spectral::{Discretization, SpatialField};
use crate::vpfp::{GridConfig, Scheme, SolverConfig};

/// Zero-mean initial density shapes with unit wavenumber on the box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    /// `cos(2πx₁/L)`
    Cos,
    /// `sin(2πx₁/L)`
    Sin,
    /// `Σ_i cos(2πx_i/L)`
    CosSum,
}

impl Profile {
    pub fn field(self, space: &Arc<Discretization>) -> SpatialField {
        let w = 2.0 * std::f64::consts::PI / space.grid().length();
        match self {
            Profile::Cos => SpatialField::from_fn(space, |x| (w * x[0]).cos()),
            Profile::Sin => SpatialField::from_fn(space, |x| (w * x[0]).sin()),
            Profile::CosSum => SpatialField::from_fn(space, |x| x.iter().map(|&xi| (w * xi).cos()).sum()),
        }
    }
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cos" => Ok(Profile::Cos),
            "sin" => Ok(Profile::Sin),
            "cos_sum" => Ok(Profile::CosSum),
            _ => Err(Error::config(format!("unknown profile `{s}` (expected cos, sin or cos_sum)"))),
        }
    }
}

/// Solver settings shared by every run of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub scheme: Scheme,
    pub dt_max: f64,
    pub cfl_scale: f64,
    pub t_final: f64,
    pub field_correction: bool,
    /// Used by single runs; sweeps take their values from `[sweep]`.
    pub epsilon: Option<f64>,
    pub physics: Physics,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            scheme: Scheme::ImexEuler,
            dt_max: 0.01,
            cfl_scale: 0.5,
            t_final: 1.0,
            field_correction: false,
            epsilon: None,
            physics: Physics::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    /// Strictly decreasing, in `(0, 1]`.
    pub epsilons: Vec<f64>,
    pub ddp_dt: f64,
    pub amplitude: f64,
    pub profile: Profile,
    /// Common sampling cadence of the kinetic and fluid runs.
    pub sample_interval: f64,
    pub out_dir: Option<PathBuf>,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            epsilons: vec![0.2, 0.1, 0.05, 0.025],
            ddp_dt: 1e-3,
            amplitude: 0.01,
            profile: Profile::Cos,
            sample_interval: 0.05,
            out_dir: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiagnosticsSection {
    /// Sobolev order of the energy functionals and the micro metric.
    pub k: usize,
}

impl Default for DiagnosticsSection {
    fn default() -> Self {
        Self { k: 2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub grid: GridConfig,
    pub solver: SolverSection,
    pub sweep: SweepSection,
    pub diagnostics: DiagnosticsSection,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            grid: GridConfig::new(1, 64, 64),
            solver: SolverSection::default(),
            sweep: SweepSection::default(),
            diagnostics: DiagnosticsSection::default(),
        }
    }
}

impl SweepConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration always serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let eps = &self.sweep.epsilons;
        if eps.len() < 2 {
            return Err(Error::config(format!("a sweep needs at least 2 epsilons, got {}", eps.len())));
        }
        if let Some(e) = eps.iter().find(|e| !(e.is_finite() && **e > 0.0 && **e <= 1.0)) {
            return Err(Error::config(format!("epsilons must lie in (0, 1], got {e}")));
        }
        if eps.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::config("epsilons must be strictly decreasing"));
        }
        let s = &self.sweep;
        for (name, v) in [("ddp_dt", s.ddp_dt), ("sample_interval", s.sample_interval)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(format!("{name} must be positive, got {v}")));
            }
        }
        if !s.amplitude.is_finite() {
            return Err(Error::config("amplitude must be finite"));
        }
        for &e in eps {
            self.solver_config(e)?.time_grid()?;
        }
        if let Some(e) = self.solver.epsilon {
            self.solver_config(e)?;
        }
        self.ddp_config().time_grid()?;
        self.grid.build()?;
        Ok(())
    }

    pub fn solver_config(&self, epsilon: f64) -> Result<SolverConfig> {
        let s = &self.solver;
        let cfg = SolverConfig {
            epsilon,
            dt_max: s.dt_max,
            cfl_scale: s.cfl_scale,
            t_final: s.t_final,
            scheme: s.scheme,
            grid: self.grid,
            sample_interval: Some(self.sweep.sample_interval),
            field_correction: s.field_correction,
            physics: s.physics,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn ddp_config(&self) -> crate::ddp::DdpConfig {
        crate::ddp::DdpConfig {
            dt: self.sweep.ddp_dt,
            t_final: self.solver.t_final,
            sample_interval: Some(self.sweep.sample_interval),
            drift: true,
        }
    }

    /// Hex SHA-256 of the canonical JSON form of the configuration.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("configuration always serializes");
        hex::encode(Sha256::digest(&json))
    }
}
