//! Self-test battery of operator identities and solver invariants, run
//! against the built library on seeded random fields.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::kinetic::{
    apply_l, coercivity_gap, density, project_macro, project_micro, project_non_density, single_mode, solve_poisson,
};
use crate::spectral::{Complex64, Discretization, GaussHermite, SpatialField, SpectralField};
use crate::vpfp::{run, GridConfig, KineticState, SolverConfig};

/// Random fields per property.
pub const SAMPLES: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn space(dim: usize, n_x: usize, n_v: usize) -> Arc<Discretization> {
    GridConfig::new(dim, n_x, n_v).build().expect("fixed check grid is valid")
}

fn max_coeff_diff(a: &SpectralField, b: &SpectralField) -> f64 {
    (a.coeffs() - b.coeffs()).iter().map(|c| c.norm()).fold(0.0, f64::max)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `∫ M |∂_v(ψ_n/√M)|² dv` with `ψ_n/√M` differentiated by five-point
/// differences and integrated by Gauss–Hermite quadrature.
pub fn dirichlet_oracle(n: usize) -> f64 {
    let he = |v: f64| {
        let psi = crate::spectral::hermite_functions(v, n + 1)[n];
        psi / crate::spectral::sqrt_maxwellian(v)
    };
    let h = 1e-3;
    let rule = GaussHermite::new(n + 4);
    rule.nodes()
        .iter()
        .zip(rule.weights())
        .map(|(&v, &w)| {
            let d = (-he(v + 2.0 * h) + 8.0 * he(v + h) - 8.0 * he(v - h) + he(v - 2.0 * h)) / (12.0 * h);
            w * d * d
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorErrors {
    /// `‖L(v√M) - v√M‖ / ‖v√M‖`
    pub momentum_mode: f64,
    /// `max_{n ≤ 5} |⟨Lψ_n, ψ_n⟩ - n|`
    pub dirichlet_vs_integer: f64,
    /// `max_{n ≤ 5} |⟨Lψ_n, ψ_n⟩ - oracle_n|`
    pub dirichlet_vs_oracle: f64,
}

pub fn operator_errors() -> OperatorErrors {
    let s = space(1, 8, 8);
    let one = SpatialField::from_fn(&s, |_| 1.0);
    let vm = single_mode(&s, &[1], &one);
    let momentum_mode = (apply_l(&vm).sub(&vm).norm_sq() / vm.norm_sq()).sqrt();
    let (mut vs_int, mut vs_oracle) = (0.0f64, 0.0f64);
    for n in 0..=5 {
        let psi = single_mode(&s, &[n], &one);
        let q = apply_l(&psi).inner(&psi) / s.grid().volume();
        vs_int = vs_int.max((q - n as f64).abs());
        vs_oracle = vs_oracle.max((q - dirichlet_oracle(n)).abs());
    }
    OperatorErrors {
        momentum_mode,
        dirichlet_vs_integer: vs_int,
        dirichlet_vs_oracle: vs_oracle,
    }
}

/// Largest coefficient defect of `P² = P`, `(I-P)² = I-P`, `(I-P₀)(I-P) = I-P`
/// and `P + (I-P) = I` over random fields in one and two dimensions.
pub fn projection_defect(seed: u64) -> f64 {
    let mut r = rng(seed);
    let mut worst = 0.0f64;
    for s in &[space(1, 16, 8), space(2, 8, 5)] {
        for _ in 0..SAMPLES / 2 {
            let g = SpectralField::random(s, &mut r, 5);
            let p = project_macro(&g);
            let q = project_micro(&g);
            worst = worst
                .max(max_coeff_diff(&project_macro(&p), &p))
                .max(max_coeff_diff(&project_micro(&q), &q))
                .max(max_coeff_diff(&project_non_density(&q), &q))
                .max(max_coeff_diff(&p.add(&q), &g));
        }
    }
    worst
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoercivityStats {
    /// `min (⟨Lg,g⟩ - ‖(I-P)g‖² - ‖b‖²) / ⟨Lg,g⟩`
    pub min_relative_margin: f64,
    /// Smallest measured constant in the weighted-norm estimate.
    pub nu_constant: f64,
}

pub fn coercivity_stats(seed: u64) -> CoercivityStats {
    let s = space(1, 16, 12);
    let mut r = rng(seed);
    let mut margin = f64::INFINITY;
    let mut c0 = f64::INFINITY;
    for _ in 0..SAMPLES {
        let g = SpectralField::random(&s, &mut r, 5);
        let c = coercivity_gap(&g);
        margin = margin.min(c.l2_margin() / c.dirichlet.max(f64::MIN_POSITIVE));
        if let Some(k) = c.nu_constant() {
            c0 = c0.min(k);
        }
    }
    CoercivityStats {
        min_relative_margin: margin,
        nu_constant: c0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonStats {
    /// `max_m ‖φ - cos(mx)/m²‖_∞` for `a = cos(mx)`, `m = 1..4`.
    pub eigen_error: f64,
    /// `min (‖∂_x a‖ - ‖a‖)` over random zero-mean `a`.
    pub poincare_gap: f64,
}

pub fn poisson_stats(seed: u64) -> Result<PoissonStats> {
    let s = space(1, 32, 4);
    let mut eigen = 0.0f64;
    for m in 1..=4 {
        let mf = m as f64;
        let a = SpatialField::from_fn(&s, |x| (mf * x[0]).cos());
        let phi = solve_poisson(&a)?.phi;
        for (j, v) in phi.values().iter().enumerate() {
            eigen = eigen.max((v - (mf * s.grid().point(j)[0]).cos() / (mf * mf)).abs());
        }
    }
    let mut r = rng(seed);
    let mut gap = f64::INFINITY;
    for _ in 0..SAMPLES {
        let mut a = density(&SpectralField::random(&s, &mut r, 8));
        a.coeffs_mut()[0] = Complex64::new(0.0, 0.0);
        gap = gap.min(a.derivative(0).norm() - a.norm());
    }
    Ok(PoissonStats {
        eigen_error: eigen,
        poincare_gap: gap,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservationStats {
    pub steps: usize,
    /// `max_t |mean a|`
    pub max_mean_density: f64,
    /// `max |coefficient|` after evolving the zero state.
    pub zero_state_drift: f64,
}

pub fn conservation_stats(steps: usize, epsilon: f64) -> Result<ConservationStats> {
    let grid = GridConfig::new(1, 32, 16);
    let s = grid.build()?;
    let mut cfg = SolverConfig::new(epsilon, grid);
    cfg.dt_max = 1e-3;
    cfg.cfl_scale = 1.0;
    cfg.t_final = steps as f64 * 1e-3;
    cfg.sample_interval = None;
    let g = single_mode(&s, &[0], &SpatialField::from_fn(&s, |x| 0.01 * x[0].cos() + 0.005 * (2.0 * x[0]).sin()));
    let mut max_mean = 0.0f64;
    let mut observe = |st: &KineticState| max_mean = max_mean.max(st.fields().a.mean().abs());
    let traj = run(&KineticState::new(0.0, g)?, &cfg, &mut [&mut observe])?;
    debug_assert_eq!(traj.time_grid.n_steps, steps);
    let zero = run(&KineticState::new(0.0, SpectralField::zeros(&s))?, &cfg, &mut [])?;
    let drift = zero.last().g().coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
    Ok(ConservationStats {
        steps: traj.time_grid.n_steps,
        max_mean_density: max_mean,
        zero_state_drift: drift,
    })
}

fn outcome(name: &'static str, passed: bool, detail: String) -> CheckOutcome {
    CheckOutcome { name, passed, detail }
}

/// Every property with its pass threshold.
pub fn run_checks(seed: u64) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    let op = operator_errors();
    out.push(outcome(
        "L fixes the momentum mode",
        op.momentum_mode <= 1e-12,
        format!("relative error {:.3e}", op.momentum_mode),
    ));
    out.push(outcome(
        "<L psi_n, psi_n> = n for n <= 5",
        op.dirichlet_vs_integer <= 1e-8 && op.dirichlet_vs_oracle <= 1e-8,
        format!(
            "max error {:.3e}, vs quadrature oracle {:.3e}",
            op.dirichlet_vs_integer, op.dirichlet_vs_oracle
        ),
    ));
    let p = projection_defect(seed);
    out.push(outcome("projection algebra", p == 0.0, format!("max defect {p:.3e}")));
    let c = coercivity_stats(seed);
    out.push(outcome(
        "L2 coercivity",
        c.min_relative_margin >= -1e-12 && c.nu_constant > 0.0,
        format!("min relative margin {:.3e}, measured C0 {:.6}", c.min_relative_margin, c.nu_constant),
    ));
    match poisson_stats(seed) {
        Ok(ps) => out.push(outcome(
            "Poisson eigenfunctions and Poincare",
            ps.eigen_error <= 1e-12 && ps.poincare_gap >= 0.0,
            format!("eigen error {:.3e}, min Poincare gap {:.3e}", ps.eigen_error, ps.poincare_gap),
        )),
        Err(e) => out.push(outcome("Poisson eigenfunctions and Poincare", false, e.to_string())),
    }
    match conservation_stats(1000, 0.1) {
        Ok(cs) => out.push(outcome(
            "mass conservation and equilibrium",
            cs.max_mean_density <= 1e-12 && cs.zero_state_drift == 0.0,
            format!(
                "{} steps, max |mean a| {:.3e}, zero-state drift {:.3e}",
                cs.steps, cs.max_mean_density, cs.zero_state_drift
            ),
        )),
        Err(e) => out.push(outcome("mass conservation and equilibrium", false, e.to_string())),
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_values() {
        for n in 0..=5 {
            assert!((dirichlet_oracle(n) - n as f64).abs() < 1e-8);
        }
    }

    #[test]
    fn battery_passes() {
        for c in run_checks(7) {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
