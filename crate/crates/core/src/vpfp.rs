//! Asymptotic-preserving IMEX integration of the scaled kinetic system.
//!
//! Per Fourier mode `m` the stiff linear block
//! `A_m = (i k_m/ε)·V + Λ/ε²` (`V` the Hermite matrix of `v·`, `Λ = diag|n|`)
//! is implicit; the field coupling `-(1/ε)∇φ·(v/2 - ∂_v)(√M + g)` is
//! explicit with the potential of the beginning of the step.

use std::sync::Arc;

use nalgebra::DMatrix;
use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagnostics::energy_functionals;
use crate::error::{Error, Result};
use crate::kinetic::{
    check_epsilon, field_coupling, project_macro, DistributionField, MacroFields, Physics, NEUTRALITY_TOL,
};
use crate::linalg::{DenseLu, ModeSolver, TridiagonalLu};
use crate::spectral::{sqrt_maxwellian, Complex64, Discretization, SpatialField, SpectralField};

/// Grid sizes shared by the kinetic and fluid solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_dim")]
    pub dim: usize,
    pub n_x: usize,
    pub n_v: usize,
    #[serde(default = "default_length")]
    pub length: f64,
}

fn default_dim() -> usize {
    1
}

fn default_length() -> f64 {
    2.0 * std::f64::consts::PI
}

impl GridConfig {
    pub fn new(dim: usize, n_x: usize, n_v: usize) -> Self {
        Self {
            dim,
            n_x,
            n_v,
            length: default_length(),
        }
    }

    pub fn build(&self) -> Result<Arc<Discretization>> {
        Discretization::build(self.dim, self.n_x, self.n_v, self.length)
    }

    fn matches(&self, space: &Discretization) -> bool {
        space.dim() == self.dim
            && space.grid().n() == self.n_x
            && space.basis().n_v() == self.n_v
            && space.grid().length() == self.length
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    ImexEuler,
    ImexBdf2,
}

impl Scheme {
    pub fn order(self) -> usize {
        match self {
            Self::ImexEuler => 1,
            Self::ImexBdf2 => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub epsilon: f64,
    pub dt_max: f64,
    /// `c` in `dt = min(dt_max, c·ε)`.
    pub cfl_scale: f64,
    pub t_final: f64,
    pub scheme: Scheme,
    pub grid: GridConfig,
    /// Time between stored samples; `None` keeps only the endpoints.
    pub sample_interval: Option<f64>,
    /// Re-solve Poisson after a predictor and redo the explicit terms once.
    pub field_correction: bool,
    pub physics: Physics,
}

impl SolverConfig {
    pub fn new(epsilon: f64, grid: GridConfig) -> Self {
        Self {
            epsilon,
            dt_max: 0.1,
            cfl_scale: 0.5,
            t_final: 1.0,
            scheme: Scheme::ImexEuler,
            grid,
            sample_interval: None,
            field_correction: false,
            physics: Physics::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_epsilon(self.epsilon)?;
        if self.epsilon > 1.0 {
            return Err(Error::config(format!("epsilon must lie in (0, 1], got {}", self.epsilon)));
        }
        for (name, v) in [("dt_max", self.dt_max), ("cfl_scale", self.cfl_scale)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.t_final.is_finite() && self.t_final >= 0.0) {
            return Err(Error::config(format!("t_final must be non-negative, got {}", self.t_final)));
        }
        if let Some(s) = self.sample_interval {
            if !(s.is_finite() && s > 0.0) {
                return Err(Error::config(format!("sample interval must be positive, got {s}")));
            }
        }
        Ok(())
    }

    /// Step size, step count and sampling stride (in steps).
    pub fn time_grid(&self) -> Result<TimeGrid> {
        self.validate()?;
        let target = self.dt_max.min(self.cfl_scale * self.epsilon);
        time_grid(target, self.t_final, self.sample_interval)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub dt: f64,
    pub n_steps: usize,
    /// Steps between samples; the final step is always sampled.
    pub stride: usize,
}

impl TimeGrid {
    pub fn time(&self, step: usize) -> f64 {
        step as f64 * self.dt
    }

    pub fn is_sample(&self, step: usize) -> bool {
        step.is_multiple_of(self.stride) || step == self.n_steps
    }
}

/// `ceil` that ignores rounding noise just above an integer.
fn ceil_tol(x: f64) -> usize {
    (x - 1e-9).ceil().max(1.0) as usize
}

/// Largest step `≤ target` that lands exactly on every sample time.
pub(crate) fn time_grid(target: f64, t_final: f64, sample_interval: Option<f64>) -> Result<TimeGrid> {
    if t_final == 0.0 {
        return Ok(TimeGrid {
            dt: target,
            n_steps: 0,
            stride: 1,
        });
    }
    match sample_interval {
        Some(s) if s < t_final => {
            let samples = (t_final / s).round();
            if (samples * s - t_final).abs() > 1e-9 * t_final {
                return Err(Error::config(format!(
                    "final time {t_final} is not a multiple of the sample interval {s}"
                )));
            }
            let per_sample = ceil_tol(s / target);
            Ok(TimeGrid {
                dt: s / per_sample as f64,
                n_steps: samples as usize * per_sample,
                stride: per_sample,
            })
        }
        _ => {
            let n_steps = ceil_tol(t_final / target);
            Ok(TimeGrid {
                dt: t_final / n_steps as f64,
                n_steps,
                stride: n_steps,
            })
        }
    }
}

/// Previous level and explicit term kept by the two-step scheme.
#[derive(Debug, Clone)]
struct History {
    coeffs: Array2<Complex64>,
    explicit: Array2<Complex64>,
}

/// Time, perturbation and its Poisson-consistent macroscopic fields.
#[derive(Debug, Clone)]
pub struct KineticState {
    time: f64,
    step: usize,
    g: DistributionField,
    fields: MacroFields,
    history: Option<Arc<History>>,
}

impl KineticState {
    pub fn new(time: f64, g: DistributionField) -> Result<Self> {
        let fields = MacroFields::from_distribution(&g)?;
        Ok(Self {
            time,
            step: 0,
            g,
            fields,
            history: None,
        })
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn step_index(&self) -> usize {
        self.step
    }

    pub fn g(&self) -> &DistributionField {
        &self.g
    }

    pub fn fields(&self) -> &MacroFields {
        &self.fields
    }

    pub fn space(&self) -> &Arc<Discretization> {
        self.g.space()
    }

    /// Exact coefficient equality (bitwise on finite values).
    pub fn same_as(&self, other: &Self) -> bool {
        self.time.to_bits() == other.time.to_bits() && self.g.coeffs() == other.g.coeffs()
    }

    /// `f = M + g√M` at every (collocation point, velocity node).
    pub fn distribution_values(&self) -> Array2<f64> {
        let basis = self.space().basis();
        let sqrt_m: Vec<f64> = (0..basis.node_count())
            .map(|q| basis.node(q).iter().map(|&v| sqrt_maxwellian(v)).product())
            .collect();
        let mut vals = self.g.inverse_transform();
        for mut row in vals.rows_mut() {
            for (q, v) in row.iter_mut().enumerate() {
                *v = sqrt_m[q] * (sqrt_m[q] + *v);
            }
        }
        vals
    }
}

/// Well-prepared initial data: `amplitude·profile(x)·√M + micro`.
#[derive(Debug, Clone)]
pub struct InitialDataParams {
    pub profile: SpatialField,
    pub amplitude: f64,
    pub micro: Option<DistributionField>,
}

#[derive(Debug, Clone)]
pub struct InitialData {
    pub state: KineticState,
    /// `𝔼_k(0)`, the quantity whose smallness the global theory requires.
    pub energy: f64,
    pub k: usize,
    /// Smallest value of the reconstructed distribution over all nodes.
    pub min_distribution: f64,
}

pub fn make_initial_data(params: &InitialDataParams, k: usize) -> Result<InitialData> {
    let space = params.profile.space();
    let mean = params.profile.mean();
    if mean.abs() > NEUTRALITY_TOL {
        return Err(Error::NonzeroMean { mean });
    }
    let mut density = params.profile.scaled(params.amplitude);
    density.coeffs_mut()[0] = Complex64::new(0.0, 0.0);
    let mut g = SpectralField::from_slices(space, &[(0, &density)]);
    if let Some(micro) = &params.micro {
        let macro_part = project_macro(micro).norm_sq();
        if macro_part > 1e-24 * micro.norm_sq().max(f64::MIN_POSITIVE) {
            return Err(Error::config(
                "micro perturbation has density or momentum content; project it with (I - P) first",
            ));
        }
        g = g.add(micro);
    }
    let state = KineticState::new(0.0, g)?;
    let values = state.distribution_values();
    let (mut min, mut at) = (f64::INFINITY, (0, 0));
    for ((j, q), &v) in values.indexed_iter() {
        if v < min {
            min = v;
            at = (j, q);
        }
    }
    if min < 0.0 {
        return Err(Error::NegativeDistribution {
            min,
            x_node: at.0,
            v_node: at.1,
        });
    }
    let energy = energy_functionals(&state, k, 1.0)?.e_k;
    Ok(InitialData {
        state,
        energy,
        k,
        min_distribution: min,
    })
}

/// Implicit-explicit stepper with per-mode factorizations cached for the
/// configured `(ε, dt)`.
#[derive(Debug)]
pub struct Stepper {
    cfg: SolverConfig,
    grid: TimeGrid,
    space: Arc<Discretization>,
    euler: Vec<ModeSolver>,
    bdf2: Vec<ModeSolver>,
}

impl Stepper {
    pub fn new(cfg: &SolverConfig, space: &Arc<Discretization>) -> Result<Self> {
        let grid = cfg.time_grid()?;
        if !cfg.grid.matches(space) {
            return Err(Error::config("solver grid settings do not match the state discretization"));
        }
        let euler = factor_all(space, cfg, grid.dt, 1.0)?;
        let bdf2 = match cfg.scheme {
            Scheme::ImexBdf2 => factor_all(space, cfg, grid.dt, 1.5)?,
            Scheme::ImexEuler => Vec::new(),
        };
        Ok(Self {
            cfg: cfg.clone(),
            grid,
            space: Arc::clone(space),
            euler,
            bdf2,
        })
    }

    pub fn dt(&self) -> f64 {
        self.grid.dt
    }

    pub fn time_grid(&self) -> TimeGrid {
        self.grid
    }

    /// `-(1/ε)∇φ·(v/2 - ∂_v)(√M + g)`, or zero with the field disabled.
    fn explicit(&self, g: &DistributionField, fields: &MacroFields) -> Result<Array2<Complex64>> {
        if !self.cfg.physics.field {
            return Ok(Array2::zeros(g.coeffs().dim()));
        }
        Ok(field_coupling(g, &fields.grad_phi)?.into_coeffs() / -self.cfg.epsilon)
    }

    fn solve(&self, solvers: &[ModeSolver], mut rhs: Array2<Complex64>) -> Array2<Complex64> {
        let nv = rhs.ncols();
        rhs.as_slice_mut()
            .expect("standard layout")
            .par_chunks_mut(nv)
            .zip(solvers.par_iter())
            .for_each(|(row, solver)| solver.solve_in_place(row));
        rhs
    }

    pub fn step(&self, state: &KineticState) -> Result<KineticState> {
        let dt = self.grid.dt;
        let c = state.g.coeffs();
        let s_now = self.explicit(&state.g, &state.fields)?;
        let (solvers, base, explicit_combo) = match (&state.history, self.cfg.scheme) {
            (Some(h), Scheme::ImexBdf2) => (
                &self.bdf2,
                c * 2.0 - &h.coeffs * 0.5,
                &s_now * 2.0 - &h.explicit,
            ),
            _ => (&self.euler, c.clone(), s_now.clone()),
        };
        let mut next = self.solve(solvers, &base + &(&explicit_combo * dt));
        if self.cfg.field_correction && self.cfg.physics.field {
            let predicted = SpectralField::from_coeffs_unchecked(&self.space, next);
            let fields = MacroFields::from_distribution(&predicted)?;
            let corrected = self.explicit(&predicted, &fields)?;
            next = self.solve(solvers, &base + &(&corrected * dt));
        }
        let time = self.grid.time(state.step + 1);
        if next.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite { time });
        }
        let (before, after) = (c[[0, 0]].re, next[[0, 0]].re);
        if (after - before).abs() > 1e-15 || next[[0, 0]].im != 0.0 {
            return Err(Error::Conservation { time, before, after });
        }
        let g = SpectralField::from_coeffs_unchecked(&self.space, next);
        let fields = MacroFields::from_distribution(&g)?;
        let history = (self.cfg.scheme == Scheme::ImexBdf2).then(|| {
            Arc::new(History {
                coeffs: c.clone(),
                explicit: s_now,
            })
        });
        Ok(KineticState {
            time,
            step: state.step + 1,
            g,
            fields,
            history,
        })
    }
}

/// Factor `shift·I + dt·A_m` for every Fourier mode.
fn factor_all(space: &Arc<Discretization>, cfg: &SolverConfig, dt: f64, shift: f64) -> Result<Vec<ModeSolver>> {
    let eps = cfg.epsilon;
    let basis = space.basis();
    let degrees = basis.degrees();
    let d = space.dim();
    let nv = basis.n_v();
    (0..space.grid().len())
        .map(|m| {
            let coupling = |axis: usize| -> Complex64 {
                if cfg.physics.transport {
                    Complex64::new(0.0, dt * space.k(m, axis) / eps)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            };
            let diag: Vec<Complex64> = degrees
                .iter()
                .map(|&n| Complex64::new(shift + dt * n as f64 / (eps * eps), 0.0))
                .collect();
            if d == 1 {
                let ik = coupling(0);
                let off: Vec<Complex64> = (0..nv - 1).map(|n| ik * ((n + 1) as f64).sqrt()).collect();
                return Ok(ModeSolver::Tridiagonal(TridiagonalLu::factor(&off, &diag, &off, m)?));
            }
            let size = basis.len();
            let mut a = DMatrix::<Complex64>::from_diagonal(&nalgebra::DVector::from_vec(diag));
            for col in 0..size {
                let idx = basis.multi_index(col);
                for axis in 0..d {
                    let ik = coupling(axis);
                    let n = idx[axis];
                    let mut up = idx.clone();
                    if n + 1 < nv {
                        up[axis] = n + 1;
                        a[(basis.flat_index(&up), col)] += ik * ((n + 1) as f64).sqrt();
                    }
                    if n > 0 {
                        up[axis] = n - 1;
                        a[(basis.flat_index(&up), col)] += ik * (n as f64).sqrt();
                    }
                }
            }
            Ok(ModeSolver::Dense(DenseLu::factor(a, m)?))
        })
        .collect()
}

/// One step with a freshly built stepper.
pub fn step(state: &KineticState, cfg: &SolverConfig) -> Result<KineticState> {
    Stepper::new(cfg, state.space())?.step(state)
}

/// Sampled states of one run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub epsilon: f64,
    pub time_grid: TimeGrid,
    samples: Vec<KineticState>,
}

impl Trajectory {
    pub fn samples(&self) -> &[KineticState] {
        &self.samples
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(KineticState::time).collect()
    }

    pub fn last(&self) -> &KineticState {
        self.samples.last().expect("a trajectory always holds the initial sample")
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn same_as(&self, other: &Self) -> bool {
        self.samples.len() == other.samples.len()
            && self.samples.iter().zip(&other.samples).all(|(a, b)| a.same_as(b))
    }
}

pub type Observer<'a> = &'a mut dyn FnMut(&KineticState);

/// Integrate to `t_final`, storing and observing each sample.
pub fn run(initial: &KineticState, cfg: &SolverConfig, observers: &mut [Observer<'_>]) -> Result<Trajectory> {
    run_with(initial, cfg, observers, |_, _| Ok(()))
}

/// As [`run`], with a hook called after every step (sampled or not).
pub fn run_with(
    initial: &KineticState,
    cfg: &SolverConfig,
    observers: &mut [Observer<'_>],
    mut each_step: impl FnMut(&KineticState, &KineticState) -> Result<()>,
) -> Result<Trajectory> {
    let stepper = Stepper::new(cfg, initial.space())?;
    let grid = stepper.time_grid();
    let mut state = KineticState {
        time: 0.0,
        step: 0,
        history: None,
        ..initial.clone()
    };
    let mut samples = vec![state.clone()];
    observers.iter_mut().for_each(|o| o(&state));
    for n in 1..=grid.n_steps {
        let next = stepper.step(&state)?;
        each_step(&state, &next)?;
        state = next;
        if grid.is_sample(n) {
            observers.iter_mut().for_each(|o| o(&state));
            samples.push(state.clone());
        }
    }
    Ok(Trajectory {
        epsilon: cfg.epsilon,
        time_grid: grid,
        samples,
    })
}
