//! The ε-sweep: one fluid reference, one kinetic run per ε, distances to
//! the reference, rates between adjacent ε.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::SweepConfig;
use crate::ddp::{ddp_run, DdpState, DdpTrajectory};
use crate::diagnostics::energy::fmt_float;
use crate::diagnostics::{energy_functionals, l2_energy, limit_error, EnergyReport, LimitError, CSV_HEADER};
use crate::error::{Error, Result};
use crate::vpfp::{make_initial_data, run_with, GridConfig, InitialDataParams, KineticState};

/// Errors at or below this are reported as below floor rather than given a rate.
pub const RATE_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonRecord {
    pub epsilon: f64,
    pub dt: f64,
    pub n_steps: usize,
    /// Sup over sample times, not over all of `[0, T]`.
    pub moment_error: f64,
    /// Sup over sample times, not over all of `[0, T]`.
    pub field_error: f64,
    /// Sup over sample times and collocation nodes.
    pub pointwise_error: f64,
    pub micro_integral: f64,
    pub final_energy: f64,
    pub dissipation_integral: f64,
    /// Largest per-step increase of `½(‖g‖² + ‖∇φ‖²)` relative to its initial value.
    pub max_l2_energy_increase: f64,
    pub min_distribution: f64,
}

impl EpsilonRecord {
    pub fn metric(&self, m: Metric) -> f64 {
        match m {
            Metric::Moment => self.moment_error,
            Metric::Field => self.field_error,
            Metric::Pointwise => self.pointwise_error,
            Metric::Micro => self.micro_integral,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Moment,
    Field,
    Pointwise,
    Micro,
}

impl Metric {
    pub const ALL: [Metric; 4] = [Metric::Moment, Metric::Field, Metric::Pointwise, Metric::Micro];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Moment => "moment",
            Metric::Field => "field",
            Metric::Pointwise => "pointwise",
            Metric::Micro => "micro",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rate {
    Value(f64),
    BelowFloor,
}

impl Rate {
    /// `log(e₁/e₂) / log(ε₁/ε₂)`.
    pub fn between(eps: (f64, f64), err: (f64, f64)) -> Rate {
        let ok = |e: f64| e.is_finite() && e > RATE_FLOOR;
        if !(ok(err.0) && ok(err.1)) {
            return Rate::BelowFloor;
        }
        Rate::Value((err.0 / err.1).ln() / (eps.0 / eps.1).ln())
    }

    pub fn value(self) -> Option<f64> {
        match self {
            Rate::Value(r) => Some(r),
            Rate::BelowFloor => None,
        }
    }
}

impl std::fmt::Display for Rate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Rate::Value(r) => write!(f, "{r:.4}"),
            Rate::BelowFloor => f.write_str("below floor"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatePair {
    pub eps_coarse: f64,
    pub eps_fine: f64,
    pub moment: Rate,
    pub field: Rate,
    pub pointwise: Rate,
    pub micro: Rate,
}

impl RatePair {
    pub fn get(&self, m: Metric) -> Rate {
        match m {
            Metric::Moment => self.moment,
            Metric::Field => self.field,
            Metric::Pointwise => self.pointwise,
            Metric::Micro => self.micro,
        }
    }
}

/// Rates between adjacent records only.
pub fn estimate_rates(records: &[EpsilonRecord]) -> Vec<RatePair> {
    records
        .windows(2)
        .map(|w| {
            let eps = (w[0].epsilon, w[1].epsilon);
            let r = |m| Rate::between(eps, (w[0].metric(m), w[1].metric(m)));
            RatePair {
                eps_coarse: eps.0,
                eps_fine: eps.1,
                moment: r(Metric::Moment),
                field: r(Metric::Field),
                pointwise: r(Metric::Pointwise),
                micro: r(Metric::Micro),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluidRecord {
    pub dt: f64,
    pub n_steps: usize,
    pub min_density: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepCounts {
    pub fluid_steps: usize,
    pub kinetic_steps: Vec<usize>,
    /// Wall-clock seconds are written here, outside the summary.
    pub wall_clock_file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub config_hash: String,
    pub grid: GridConfig,
    /// Metrics over sample times; the time-sup is taken on the sampled set.
    pub time_sup: String,
    pub fluid: Option<FluidRecord>,
    pub per_epsilon: Vec<EpsilonRecord>,
    pub rates: Vec<RatePair>,
    /// Epsilons whose run did not complete.
    pub incomplete: Vec<f64>,
    pub failure: Option<String>,
    pub timings: StepCounts,
}

impl SweepResult {
    pub fn is_complete(&self) -> bool {
        self.incomplete.is_empty() && self.failure.is_none()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("results always serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Serde(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub fluid_seconds: f64,
    pub kinetic_seconds: Vec<f64>,
    pub total_seconds: f64,
}

/// Everything a sweep writes to disk.
#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub result: SweepResult,
    /// `(file name, contents)` per run.
    pub csv: Vec<(String, String)>,
    pub timings: Timings,
}

pub const SUMMARY_FILE: &str = "summary.json";
pub const TIMINGS_FILE: &str = "timings.json";

impl SweepOutput {
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let put = |name: &str, text: &str| {
            let p = dir.join(name);
            std::fs::write(&p, text).map_err(|e| Error::io(&p, e))
        };
        for (name, text) in &self.csv {
            put(name, text)?;
        }
        put(SUMMARY_FILE, &self.result.to_json())?;
        let mut t = serde_json::to_string_pretty(&self.timings).expect("timings always serialize");
        t.push('\n');
        put(TIMINGS_FILE, &t)
    }
}

pub const RUN_CSV_HEADER_EXTRA: &str = "moment_error,field_error,pointwise_error";

pub fn run_file_name(index: usize, epsilon: f64) -> String {
    format!("vpfp_{index:02}_eps_{epsilon}.csv")
}

pub const FLUID_FILE: &str = "ddp.csv";

pub(crate) fn fluid_csv(traj: &DdpTrajectory) -> String {
    let mut s = String::from("time,rho_l2,grad_phi_l2,min_density\n");
    for st in traj.samples() {
        let g: f64 = st.grad_phi0().iter().map(|f| f.norm_sq()).sum();
        let _ = writeln!(
            s,
            "{},{},{},{}",
            fmt_float(st.time()),
            fmt_float(st.rho0().norm()),
            fmt_float(g.sqrt()),
            fmt_float(st.min_density())
        );
    }
    s
}

/// Integrate one kinetic run and compare it with the fluid samples.
fn run_one(
    cfg: &SweepConfig,
    epsilon: f64,
    initial: &KineticState,
    fluid: &[DdpState],
) -> Result<(EpsilonRecord, String)> {
    let k = cfg.diagnostics.k;
    let solver = cfg.solver_config(epsilon)?;
    let e0 = l2_energy(initial.g(), initial.fields());
    let mut worst = f64::NEG_INFINITY;
    let mut min_distribution = f64::INFINITY;
    let mut reports: Vec<Result<EnergyReport>> = Vec::new();
    let mut observe = |s: &KineticState| {
        reports.push(energy_functionals(s, k, epsilon));
        min_distribution = min_distribution.min(s.distribution_values().iter().copied().fold(f64::INFINITY, f64::min));
    };
    let traj = run_with(initial, &solver, &mut [&mut observe], |prev, next| {
        let (a, b) = (l2_energy(prev.g(), prev.fields()), l2_energy(next.g(), next.fields()));
        worst = worst.max((b - a) / e0.max(f64::MIN_POSITIVE));
        Ok(())
    })?;
    let reports = reports.into_iter().collect::<Result<Vec<_>>>()?;
    let err: LimitError = limit_error(traj.samples(), fluid, k)?;

    let mut csv = format!("{CSV_HEADER},{RUN_CSV_HEADER_EXTRA}\n");
    for ((r, ks), fs) in reports.iter().zip(traj.samples()).zip(fluid) {
        let here = limit_error(std::slice::from_ref(ks), std::slice::from_ref(fs), k)?;
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            r.csv_row(),
            fmt_float(here.moment),
            fmt_float(here.field),
            fmt_float(here.pointwise)
        );
    }
    let mut dissipation = 0.0;
    for w in reports.windows(2) {
        dissipation += 0.5 * (w[1].time - w[0].time) * (w[0].d_k + w[1].d_k);
    }
    let record = EpsilonRecord {
        epsilon,
        dt: traj.time_grid.dt,
        n_steps: traj.time_grid.n_steps,
        moment_error: err.moment,
        field_error: err.field,
        pointwise_error: err.pointwise,
        micro_integral: err.micro,
        final_energy: reports.last().map_or(0.0, |r| r.e_k),
        dissipation_integral: dissipation,
        max_l2_energy_increase: if traj.time_grid.n_steps == 0 { 0.0 } else { worst },
        min_distribution,
    };
    Ok((record, csv))
}

/// Run the whole sweep. Configuration problems are errors; a failing run
/// stops the sweep and is reported through `incomplete` and `failure`.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutput> {
    run_sweep_using(cfg, run_one)
}

type Runner = fn(&SweepConfig, f64, &KineticState, &[DdpState]) -> Result<(EpsilonRecord, String)>;

fn run_sweep_using(cfg: &SweepConfig, runner: Runner) -> Result<SweepOutput> {
    cfg.validate()?;
    let start = Instant::now();
    let space = cfg.grid.build()?;
    let profile = cfg.sweep.profile.field(&space);
    let initial = make_initial_data(
        &InitialDataParams {
            profile: profile.clone(),
            amplitude: cfg.sweep.amplitude,
            micro: None,
        },
        cfg.diagnostics.k,
    )?;
    let mut result = SweepResult {
        config: cfg.clone(),
        config_hash: cfg.hash(),
        grid: cfg.grid,
        time_sup: "max over sample times".into(),
        fluid: None,
        per_epsilon: Vec::new(),
        rates: Vec::new(),
        incomplete: Vec::new(),
        failure: None,
        timings: StepCounts {
            fluid_steps: 0,
            kinetic_steps: Vec::new(),
            wall_clock_file: TIMINGS_FILE.into(),
        },
    };
    let mut timings = Timings {
        fluid_seconds: 0.0,
        kinetic_seconds: Vec::new(),
        total_seconds: 0.0,
    };
    let mut csv = Vec::new();

    let t0 = Instant::now();
    let fluid = match ddp_run(&profile.scaled(cfg.sweep.amplitude), &cfg.ddp_config()) {
        Ok(f) => f,
        Err(e) => {
            result.failure = Some(format!("fluid reference: {e}"));
            result.incomplete = cfg.sweep.epsilons.clone();
            timings.total_seconds = start.elapsed().as_secs_f64();
            return Ok(SweepOutput { result, csv, timings });
        }
    };
    timings.fluid_seconds = t0.elapsed().as_secs_f64();
    result.fluid = Some(FluidRecord {
        dt: fluid.time_grid.dt,
        n_steps: fluid.time_grid.n_steps,
        min_density: fluid.min_density,
    });
    result.timings.fluid_steps = fluid.time_grid.n_steps;
    csv.push((FLUID_FILE.to_string(), fluid_csv(&fluid)));

    for (i, &eps) in cfg.sweep.epsilons.iter().enumerate() {
        if result.failure.is_some() {
            result.incomplete.push(eps);
            continue;
        }
        let t = Instant::now();
        match runner(cfg, eps, &initial.state, fluid.samples()) {
            Ok((record, text)) => {
                result.timings.kinetic_steps.push(record.n_steps);
                result.per_epsilon.push(record);
                csv.push((run_file_name(i, eps), text));
            }
            Err(e) => {
                result.failure = Some(format!("epsilon {eps}: {e}"));
                result.incomplete.push(eps);
            }
        }
        timings.kinetic_seconds.push(t.elapsed().as_secs_f64());
    }
    result.rates = estimate_rates(&result.per_epsilon);
    timings.total_seconds = start.elapsed().as_secs_f64();
    Ok(SweepOutput { result, csv, timings })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(epsilon: f64, err: f64) -> EpsilonRecord {
        EpsilonRecord {
            epsilon,
            dt: 0.1,
            n_steps: 10,
            moment_error: err,
            field_error: err,
            pointwise_error: err,
            micro_integral: err,
            final_energy: 0.0,
            dissipation_integral: 0.0,
            max_l2_energy_increase: 0.0,
            min_distribution: 0.0,
        }
    }

    #[test]
    fn rate_arithmetic() {
        let r = estimate_rates(&[record(0.2, 0.4), record(0.1, 0.2)]);
        assert_eq!(r.len(), 1);
        assert!((r[0].moment.value().unwrap() - 1.0).abs() < 1e-15);
        let r = estimate_rates(&[record(0.2, 0.3), record(0.1, 0.3)]);
        assert_eq!(r[0].micro, Rate::Value(0.0));
        let r = estimate_rates(&[record(0.2, 0.3), record(0.1, 0.0), record(0.05, f64::NAN)]);
        assert_eq!(r.len(), 2);
        assert!(r.iter().all(|p| p.field == Rate::BelowFloor));
        assert_eq!(Rate::BelowFloor.to_string(), "below floor");
    }

    fn small() -> SweepConfig {
        SweepConfig::from_toml(
            r#"
            [grid]
            n_x = 16
            n_v = 12
            [solver]
            dt_max = 0.05
            t_final = 0.2
            [sweep]
            epsilons = [0.2, 0.1]
            ddp_dt = 0.01
            sample_interval = 0.05
            "#,
        )
        .unwrap()
    }

    #[test]
    fn small_sweep_is_complete_and_deterministic() {
        let cfg = small();
        let out = run_sweep(&cfg).unwrap();
        let r = &out.result;
        assert!(r.is_complete(), "{:?}", r.failure);
        assert_eq!(r.per_epsilon.len(), 2);
        assert_eq!(r.rates.len(), 1);
        assert_eq!(out.csv.len(), 3);
        let lines = out.csv[1].1.lines().count();
        assert_eq!(lines, 1 + 5);
        let again = run_sweep(&cfg).unwrap();
        assert_eq!(again.result.to_json(), r.to_json());
        assert_eq!(again.csv, out.csv);
        assert_eq!(SweepResult::from_json(&r.to_json()).unwrap(), *r);
    }

    #[test]
    fn zero_horizon_has_zero_moment_error() {
        let mut cfg = small();
        cfg.solver.t_final = 0.0;
        let out = run_sweep(&cfg).unwrap();
        for rec in &out.result.per_epsilon {
            assert_eq!(rec.moment_error, 0.0);
            assert_eq!(rec.field_error, 0.0);
            assert_eq!(rec.micro_integral, 0.0);
        }
    }

    #[test]
    fn negative_initial_distribution_is_rejected() {
        let mut cfg = small();
        cfg.sweep.amplitude = 1e6;
        let err = run_sweep(&cfg).unwrap_err();
        assert!(matches!(err, Error::NegativeDistribution { .. }));
    }

    #[test]
    fn failing_run_marks_the_rest_incomplete() {
        let mut cfg = small();
        cfg.sweep.epsilons = vec![0.4, 0.2, 0.1];
        let out = run_sweep_using(&cfg, |c, eps, init, fluid| {
            if eps < 0.3 {
                return Err(Error::NonFinite { time: 0.05 });
            }
            run_one(c, eps, init, fluid)
        })
        .unwrap();
        let r = &out.result;
        assert!(!r.is_complete());
        assert_eq!(r.per_epsilon.len(), 1);
        assert_eq!(r.incomplete, vec![0.2, 0.1]);
        assert!(r.rates.is_empty());
        assert!(r.failure.as_deref().unwrap().contains("0.2"));
    }

    #[test]
    fn outputs_are_written() {
        let dir = tempfile::tempdir().unwrap();
        let out = run_sweep(&small()).unwrap();
        out.write(dir.path()).unwrap();
        let back = SweepResult::load(dir.path().join(SUMMARY_FILE)).unwrap();
        assert_eq!(back, out.result);
        assert!(dir.path().join(TIMINGS_FILE).exists());
        assert!(dir.path().join(FLUID_FILE).exists());
        assert!(dir.path().join(run_file_name(1, 0.1)).exists());
    }
}
