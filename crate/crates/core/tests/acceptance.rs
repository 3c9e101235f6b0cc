//! Acceptance battery. Runs without the libtest harness so that every
//! criterion prints one PASS/FAIL line; exits non-zero if any fails.

use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use vpfp::ddp::{ddp_run, DdpConfig};
use vpfp::diagnostics::moment_residuals;
use vpfp::harness::check;
use vpfp::harness::{run_sweep, EpsilonRecord, Metric, SweepConfig, SweepOutput, TIMINGS_FILE};
use vpfp::spectral::{SpatialField, SpectralField};
use vpfp::vpfp::{make_initial_data, run, GridConfig, InitialDataParams, Scheme, SolverConfig, Trajectory};
use vpfp::Result;

const SEED: u64 = 20_241_015;

struct Line {
    id: usize,
    passed: bool,
    detail: String,
}

fn within(t: Instant, limit: Duration) -> (bool, String) {
    let e = t.elapsed();
    (e < limit, format!("{:.2}s (limit {}s)", e.as_secs_f64(), limit.as_secs_f64()))
}

fn operator_exactness() -> (bool, String) {
    let t = Instant::now();
    let op = check::operator_errors();
    let (fast, time) = within(t, Duration::from_secs(1));
    let oracle_ok = (0..=5).all(|n| (check::dirichlet_oracle(n) - n as f64).abs() <= 1e-8);
    (
        op.momentum_mode <= 1e-12 && op.dirichlet_vs_integer <= 1e-8 && op.dirichlet_vs_oracle <= 1e-8 && oracle_ok && fast,
        format!(
            "L(v sqrt M) relative error {:.2e}; max |<L psi_n,psi_n> - n| {:.2e}, vs oracle {:.2e}; {time}",
            op.momentum_mode, op.dirichlet_vs_integer, op.dirichlet_vs_oracle
        ),
    )
}

fn projection_algebra() -> (bool, String) {
    let t = Instant::now();
    let d = check::projection_defect(SEED);
    let (fast, time) = within(t, Duration::from_secs(1));
    (d == 0.0 && fast, format!("{} random fields, max coefficient defect {d:e}; {time}", check::SAMPLES))
}

fn coercivity() -> (bool, String) {
    let t = Instant::now();
    let c = check::coercivity_stats(SEED);
    let (fast, time) = within(t, Duration::from_secs(1));
    (
        c.min_relative_margin >= -1e-12 && c.nu_constant > 0.0 && fast,
        format!(
            "{} random fields, min relative margin {:.3e}, measured C0 = {:.6}; {time}",
            check::SAMPLES,
            c.min_relative_margin,
            c.nu_constant
        ),
    )
}

fn poisson() -> Result<(bool, String)> {
    let t = Instant::now();
    let p = check::poisson_stats(SEED)?;
    let (fast, time) = within(t, Duration::from_secs(1));
    Ok((
        p.eigen_error <= 1e-12 && p.poincare_gap >= 0.0 && fast,
        format!(
            "eigenfunction error {:.2e}; min (|d_x a| - |a|) over {} fields {:.3e}; {time}",
            p.eigen_error,
            check::SAMPLES,
            p.poincare_gap
        ),
    ))
}

fn conservation() -> Result<(bool, String)> {
    let t = Instant::now();
    let c = check::conservation_stats(1000, 0.1)?;
    let (fast, time) = within(t, Duration::from_secs(10));
    Ok((
        c.steps == 1000 && c.max_mean_density <= 1e-12 && c.zero_state_drift == 0.0 && fast,
        format!(
            "{} steps at eps 0.1: max |mean a| {:.2e}, zero-state drift {:.1e}; {time}",
            c.steps, c.max_mean_density, c.zero_state_drift
        ),
    ))
}

fn energy_dissipation(sweep: &SweepOutput, elapsed: Duration) -> (bool, String) {
    let recs = &sweep.result.per_epsilon;
    let worst = recs.iter().map(|r| r.max_l2_energy_increase).fold(f64::NEG_INFINITY, f64::max);
    let all = recs.len() == sweep.result.config.sweep.epsilons.len();
    (
        all && worst <= 1e-8 && elapsed < Duration::from_secs(60),
        format!(
            "largest per-step relative increase {worst:.3e} over {} runs; sweep {:.2}s",
            recs.len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn ratios(recs: &[EpsilonRecord], m: Metric) -> Vec<f64> {
    recs.windows(2).map(|w| w[0].metric(m) / w[1].metric(m)).collect()
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>().join(", ")
}

fn micro_scaling(sweep: &SweepOutput) -> (bool, String) {
    let r = ratios(&sweep.result.per_epsilon, Metric::Micro);
    (
        !r.is_empty() && r.iter().all(|x| (2.8..=5.5).contains(x)),
        format!("adjacent ratios of the integrated micro norm [{}]", fmt_list(&r)),
    )
}

fn hydrodynamic_limit(sweep: &SweepOutput, elapsed: Duration) -> (bool, String) {
    let res = &sweep.result;
    let mut ok = res.is_complete() && elapsed < Duration::from_secs(120);
    let mut parts = Vec::new();
    for m in [Metric::Moment, Metric::Field, Metric::Pointwise] {
        let r = ratios(&res.per_epsilon, m);
        ok &= !r.is_empty() && r.iter().all(|&x| x >= 1.5);
        let rates: Vec<String> = res.rates.iter().map(|p| p.get(m).to_string()).collect();
        parts.push(format!("{} ratios [{}] rates [{}]", m.name(), fmt_list(&r), rates.join(", ")));
    }
    let eps: Vec<f64> = res.per_epsilon.iter().map(|r| r.epsilon).collect();
    (ok, format!("eps [{}]: {}", fmt_list(&eps), parts.join("; ")))
}

fn kinetic_run(eps: f64, dt: f64, t_final: f64, scheme: Scheme, every_step: bool) -> Result<Trajectory> {
    let grid = GridConfig::new(1, 16, 16);
    let space = grid.build()?;
    let profile = SpatialField::from_fn(&space, |x| x[0].cos());
    let init = make_initial_data(
        &InitialDataParams {
            profile,
            amplitude: 0.01,
            micro: None,
        },
        2,
    )?;
    let mut cfg = SolverConfig::new(eps, grid);
    cfg.dt_max = dt;
    cfg.cfl_scale = 1.0 / eps;
    cfg.t_final = t_final;
    cfg.scheme = scheme;
    cfg.sample_interval = every_step.then_some(dt);
    run(&init.state, &cfg, &mut [])
}

/// `log₂(‖u_h - u_{h/2}‖ / ‖u_{h/2} - u_{h/4}‖)` on the finest three levels.
fn self_convergence_order(levels: &[SpectralField]) -> f64 {
    let n = levels.len();
    let d = |a: &SpectralField, b: &SpectralField| a.sub(b).norm_sq().sqrt();
    (d(&levels[n - 3], &levels[n - 2]) / d(&levels[n - 2], &levels[n - 1])).log2()
}

fn temporal_convergence() -> Result<(bool, String)> {
    let t = Instant::now();
    let (dt0, t_final) = (0.02, 0.5);
    let mut orders = Vec::new();
    for scheme in [Scheme::ImexEuler, Scheme::ImexBdf2] {
        let levels = (0..4)
            .map(|l| Ok(kinetic_run(0.1, dt0 / 2f64.powi(l), t_final, scheme, false)?.last().g().clone()))
            .collect::<Result<Vec<_>>>()?;
        orders.push(self_convergence_order(&levels));
    }
    let space = GridConfig::new(1, 32, 4).build()?;
    let rho = SpatialField::from_fn(&space, |x| 0.05 * (2.0 * x[0]).cos() + 0.05 * x[0].sin());
    let levels = (0..4)
        .map(|l| {
            let cfg = DdpConfig {
                dt: dt0 / 2f64.powi(l),
                t_final,
                sample_interval: None,
                drift: true,
            };
            let traj = ddp_run(&rho, &cfg)?;
            Ok(vpfp::kinetic::single_mode(&space, &[0], traj.last().rho0()))
        })
        .collect::<Result<Vec<_>>>()?;
    orders.push(self_convergence_order(&levels));
    let (fast, time) = within(t, Duration::from_secs(60));
    let ok = (orders[0] - 1.0).abs() <= 0.3 && (orders[1] - 2.0).abs() <= 0.3 && (orders[2] - 1.0).abs() <= 0.3;
    Ok((
        ok && fast,
        format!(
            "orders at eps 0.1: imex_euler {:.3}, imex_bdf2 {:.3}; fluid {:.3}; {time}",
            orders[0], orders[1], orders[2]
        ),
    ))
}

fn slope(coarse: (f64, f64), fine: (f64, f64)) -> f64 {
    (coarse.1 / fine.1).ln() / (coarse.0 / fine.0).ln()
}

fn moment_residual_slopes() -> Result<(bool, String)> {
    let t = Instant::now();
    let (eps, t_final, skip) = (0.5, 0.5, 0.1);
    let dts = [0.01, 0.005];
    let mut cont = Vec::new();
    let mut mom = Vec::new();
    let mut stress = Vec::new();
    for &dt in &dts {
        let bdf2 = kinetic_run(eps, dt, t_final, Scheme::ImexBdf2, true)?;
        cont.push((dt, moment_residuals(bdf2.samples(), eps)?.max_continuity(skip)));
        let euler = kinetic_run(eps, dt, t_final, Scheme::ImexEuler, true)?;
        let r = moment_residuals(euler.samples(), eps)?;
        mom.push((dt, r.max_momentum(skip)));
        stress.push((dt, r.max_stress(skip)));
    }
    let s1 = slope(cont[0], cont[1]);
    let s2 = slope(mom[0], mom[1]);
    let s3 = slope(stress[0], stress[1]);
    let (fast, time) = within(t, Duration::from_secs(30));
    Ok((
        (s1 - 2.0).abs() <= 0.3 && s2 >= 0.7 && s3 >= 0.7 && fast,
        format!(
            "slopes in dt: continuity {s1:.3} (imex_bdf2), momentum {s2:.3}, stress {s3:.3} (imex_euler); \
             residuals at dt {}: {:.2e}, {:.2e}, {:.2e}; {time}",
            dts[1], cont[1].1, mom[1].1, stress[1].1
        ),
    ))
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = std::fs::read_dir(dir)
        .expect("sweep directory exists")
        .map(|e| {
            let e = e.expect("readable entry");
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).expect("readable file"))
        })
        .filter(|(n, _)| n != TIMINGS_FILE)
        .collect();
    out.sort();
    out
}

fn determinism(cfg: &SweepConfig, first: &SweepOutput) -> Result<(bool, String)> {
    let a = tempfile::tempdir().expect("temporary directory");
    let b = tempfile::tempdir().expect("temporary directory");
    first.write(a.path())?;
    run_sweep(cfg)?.write(b.path())?;
    let (fa, fb) = (files(a.path()), files(b.path()));
    Ok((
        !fa.is_empty() && fa == fb,
        format!("{} output files compared byte for byte", fa.len()),
    ))
}

fn main() -> ExitCode {
    let mut lines: Vec<Line> = Vec::new();
    let mut record = |id: usize, r: std::result::Result<(bool, String), String>| {
        let (passed, detail) = r.unwrap_or_else(|e| (false, format!("error: {e}")));
        let status = if passed { "PASS" } else { "FAIL" };
        println!("{status} criterion {id:>2}: {detail}");
        lines.push(Line { id, passed, detail });
    };
    record(1, Ok(operator_exactness()));
    record(2, Ok(projection_algebra()));
    record(3, Ok(coercivity()));
    record(4, poisson().map_err(|e| e.to_string()));
    record(5, conservation().map_err(|e| e.to_string()));

    let cfg = SweepConfig::default();
    let t = Instant::now();
    let sweep = run_sweep(&cfg);
    let elapsed = t.elapsed();
    match &sweep {
        Ok(s) => {
            record(6, Ok(energy_dissipation(s, elapsed)));
            record(7, Ok(micro_scaling(s)));
            record(8, Ok(hydrodynamic_limit(s, elapsed)));
        }
        Err(e) => {
            for id in 6..=8 {
                record(id, Err(e.to_string()));
            }
        }
    }
    record(9, temporal_convergence().map_err(|e| e.to_string()));
    record(10, moment_residual_slopes().map_err(|e| e.to_string()));
    match &sweep {
        Ok(s) => record(11, determinism(&cfg, s).map_err(|e| e.to_string())),
        Err(e) => record(11, Err(e.to_string())),
    }

    let failed: Vec<&Line> = lines.iter().filter(|l| !l.passed).collect();
    println!("{} of {} criteria passed", lines.len() - failed.len(), lines.len());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        for l in failed {
            eprintln!("criterion {} failed: {}", l.id, l.detail);
        }
        ExitCode::FAILURE
    }
}
