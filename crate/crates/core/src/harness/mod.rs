//! Experiment orchestration: configuration, single runs, ε-sweeps, rates,
//! reports and the self-test battery.

pub mod check;
pub mod config;
pub mod report;
pub mod sweep;

use std::fmt::Write as _;

pub use check::{run_checks, CheckOutcome};
pub use config::{DiagnosticsSection, Profile, SolverSection, SweepConfig, SweepSection};
pub use report::{render_csv, render_text};
pub use sweep::{
    estimate_rates, run_sweep, EpsilonRecord, Metric, Rate, RatePair, SweepOutput, SweepResult, SUMMARY_FILE,
    TIMINGS_FILE,
};

use crate::ddp::ddp_run;
use crate::diagnostics::{energy_functionals, CSV_HEADER};
use crate::error::{Error, Result};
use crate::vpfp::{make_initial_data, run, InitialDataParams, KineticState};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Kinetic,
    Fluid,
}

/// CSV time series of one run and the file name it belongs in.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub file_name: String,
    pub csv: String,
}

/// Single kinetic run at `epsilon` (default: `[solver] epsilon`, then the
/// first sweep value), or the fluid reference.
pub fn run_single(cfg: &SweepConfig, model: Model, epsilon: Option<f64>) -> Result<RunOutput> {
    cfg.validate()?;
    let space = cfg.grid.build()?;
    let profile = cfg.sweep.profile.field(&space);
    match model {
        Model::Fluid => {
            let traj = ddp_run(&profile.scaled(cfg.sweep.amplitude), &cfg.ddp_config())?;
            Ok(RunOutput {
                file_name: sweep::FLUID_FILE.into(),
                csv: sweep::fluid_csv(&traj),
            })
        }
        Model::Kinetic => {
            let eps = epsilon
                .or(cfg.solver.epsilon)
                .or_else(|| cfg.sweep.epsilons.first().copied())
                .ok_or_else(|| Error::config("no epsilon given"))?;
            let solver = cfg.solver_config(eps)?;
            let k = cfg.diagnostics.k;
            let init = make_initial_data(
                &InitialDataParams {
                    profile,
                    amplitude: cfg.sweep.amplitude,
                    micro: None,
                },
                k,
            )?;
            let mut rows = Vec::new();
            let mut observe = |s: &KineticState| rows.push(energy_functionals(s, k, eps));
            run(&init.state, &solver, &mut [&mut observe])?;
            let mut csv = format!("{CSV_HEADER}\n");
            for r in rows {
                let _ = writeln!(csv, "{}", r?.csv_row());
            }
            Ok(RunOutput {
                file_name: format!("vpfp_eps_{eps}.csv"),
                csv,
            })
        }
    }
}
