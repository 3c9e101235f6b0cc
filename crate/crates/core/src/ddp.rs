//! Drift–diffusion–Poisson limit in shifted variables:
//! `∂_t ρ₀ = Δρ₀ + div[(ρ₀ + 1)∇φ₀]`, `-Δφ₀ = ρ₀`.
//!
//! Semi-implicit Euler: diffusion through its Fourier symbol, drift explicit
//! and dealiased.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinetic::{solve_poisson, Potential};
use crate::spectral::{Complex64, Discretization, SpatialField};
use crate::vpfp::{time_grid, TimeGrid};

#[derive(Debug, Clone)]
pub struct DdpState {
    time: f64,
    step: usize,
    rho0: SpatialField,
    phi0: SpatialField,
    grad_phi0: Vec<SpatialField>,
}

impl DdpState {
    pub fn new(time: f64, rho0: SpatialField) -> Result<Self> {
        let Potential { phi, grad_phi } = solve_poisson(&rho0)?;
        Ok(Self {
            time,
            step: 0,
            rho0,
            phi0: phi,
            grad_phi0: grad_phi,
        })
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn rho0(&self) -> &SpatialField {
        &self.rho0
    }

    pub fn phi0(&self) -> &SpatialField {
        &self.phi0
    }

    pub fn grad_phi0(&self) -> &[SpatialField] {
        &self.grad_phi0
    }

    pub fn space(&self) -> &Arc<Discretization> {
        self.rho0.space()
    }

    /// `min_x (1 + ρ₀)` over collocation points.
    pub fn min_density(&self) -> f64 {
        self.rho0.values().into_iter().fold(f64::INFINITY, f64::min) + 1.0
    }

    pub fn same_as(&self, other: &Self) -> bool {
        self.time.to_bits() == other.time.to_bits() && self.rho0.coeffs() == other.rho0.coeffs()
    }
}

/// `ρ₀ ← (ρ₀ + dt·div[(ρ₀+1)∇φ₀]) / (1 + dt|k|²)` mode by mode.
pub fn ddp_step(state: &DdpState, dt: f64, drift: bool) -> Result<DdpState> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::config(format!("time step must be positive, got {dt}")));
    }
    let space = state.space();
    let mut rhs = state.rho0.coeffs().clone();
    if drift {
        for (i, dphi) in state.grad_phi0.iter().enumerate() {
            let flux = dphi.add(&state.rho0.product(dphi));
            rhs = rhs + flux.derivative(i).coeffs() * dt;
        }
    }
    for (m, c) in rhs.iter_mut().enumerate() {
        *c /= 1.0 + dt * space.k_squared(m);
    }
    let time = (state.step + 1) as f64 * dt;
    if rhs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
        return Err(Error::NonFinite { time });
    }
    // Mode zero is untouched by the divergence and the diffusion symbol.
    debug_assert_eq!(rhs[0], state.rho0.coeffs()[0]);
    let rho0 = SpatialField::from_coeffs(space, rhs)?;
    let mut next = DdpState::new(time, rho0)?;
    next.step = state.step + 1;
    Ok(next)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DdpConfig {
    /// Largest step; shrunk so samples land on the grid.
    pub dt: f64,
    pub t_final: f64,
    pub sample_interval: Option<f64>,
    #[serde(default = "yes")]
    pub drift: bool,
}

fn yes() -> bool {
    true
}

impl DdpConfig {
    pub fn time_grid(&self) -> Result<TimeGrid> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::config(format!("fluid time step must be positive, got {}", self.dt)));
        }
        if !(self.t_final.is_finite() && self.t_final >= 0.0) {
            return Err(Error::config(format!("t_final must be non-negative, got {}", self.t_final)));
        }
        time_grid(self.dt, self.t_final, self.sample_interval)
    }
}

#[derive(Debug, Clone)]
pub struct DdpTrajectory {
    pub time_grid: TimeGrid,
    samples: Vec<DdpState>,
    /// Smallest `1 + ρ₀` seen at any step.
    pub min_density: f64,
}

impl DdpTrajectory {
    pub fn samples(&self) -> &[DdpState] {
        &self.samples
    }

    pub fn last(&self) -> &DdpState {
        self.samples.last().expect("a trajectory always holds the initial sample")
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(DdpState::time).collect()
    }

    pub fn same_as(&self, other: &Self) -> bool {
        self.samples.len() == other.samples.len()
            && self.samples.iter().zip(&other.samples).all(|(a, b)| a.same_as(b))
    }

    /// True when the density stayed positive at every node.
    pub fn density_positive(&self) -> bool {
        self.min_density > 0.0
    }
}

/// Integrate from the zero-mean profile `rho0`.
pub fn ddp_run(rho0: &SpatialField, cfg: &DdpConfig) -> Result<DdpTrajectory> {
    let grid = cfg.time_grid()?;
    let mut rho = rho0.clone();
    let mean = rho.mean();
    if mean.abs() > crate::kinetic::NEUTRALITY_TOL {
        return Err(Error::NonzeroMean { mean });
    }
    rho.coeffs_mut()[0] = Complex64::new(0.0, 0.0);
    let mut state = DdpState::new(0.0, rho)?;
    let mut min_density = state.min_density();
    let mut samples = vec![state.clone()];
    for n in 1..=grid.n_steps {
        state = ddp_step(&state, grid.dt, cfg.drift)?;
        min_density = min_density.min(state.min_density());
        if grid.is_sample(n) {
            samples.push(state.clone());
        }
    }
    Ok(DdpTrajectory {
        time_grid: grid,
        samples,
        min_density,
    })
}
