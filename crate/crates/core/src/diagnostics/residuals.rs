//! Residuals of the density–momentum–stress moment hierarchy along a
//! sampled kinetic trajectory.

use crate::error::{Error, Result};
use crate::kinetic::{check_epsilon, gamma_moment, momentum, project_micro, transport};
use crate::spectral::SpatialField;
use crate::vpfp::KineticState;

/// Per-sample `L²_x` norms of the three moment-equation residuals:
///
/// 1. `∂_t a + (1/ε) div b`
/// 2. `∂_t b_i + (1/ε)(∂_i a + ∂_i φ + a ∂_i φ + Σ_k ∂_k Γ_ik[(I-P)g]) + b_i/ε²`
/// 3. `(1/ε)(∂_i b_j + ∂_j b_i + b_j ∂_i φ + b_i ∂_j φ) + ∂_t Γ_ij + (2/ε²)Γ_ij + (1/ε)Γ_ij[v·∇_x(I-P)g]`
///
/// with `Γ_ij = Γ_ij[(I-P)g]`. Time derivatives are centered at interior
/// samples and one-sided at the two endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentResiduals {
    pub times: Vec<f64>,
    pub continuity: Vec<f64>,
    pub momentum: Vec<f64>,
    pub stress: Vec<f64>,
}

impl MomentResiduals {
    /// Largest residual over interior samples with `t ≥ t_min`.
    pub fn interior_max(series: &[f64], times: &[f64], t_min: f64) -> f64 {
        let n = series.len();
        (1..n.saturating_sub(1))
            .filter(|&i| times[i] >= t_min)
            .map(|i| series[i])
            .fold(0.0, f64::max)
    }

    pub fn max_continuity(&self, t_min: f64) -> f64 {
        Self::interior_max(&self.continuity, &self.times, t_min)
    }

    pub fn max_momentum(&self, t_min: f64) -> f64 {
        Self::interior_max(&self.momentum, &self.times, t_min)
    }

    pub fn max_stress(&self, t_min: f64) -> f64 {
        Self::interior_max(&self.stress, &self.times, t_min)
    }
}

struct Moments {
    a: SpatialField,
    b: Vec<SpatialField>,
    /// `Γ_ij[(I-P)g]`, row-major in `(i, j)`.
    gamma: Vec<SpatialField>,
    /// `Γ_ij[v·∇_x (I-P)g]`
    gamma_flux: Vec<SpatialField>,
}

fn collect(state: &KineticState) -> Result<Moments> {
    let g = state.g();
    let d = g.space().dim();
    let micro = project_micro(g);
    let flux = transport(&micro)?;
    let mut gamma = Vec::with_capacity(d * d);
    let mut gamma_flux = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            gamma.push(gamma_moment(&micro, i, j)?);
            gamma_flux.push(gamma_moment(&flux, i, j)?);
        }
    }
    Ok(Moments {
        a: state.fields().a.clone(),
        b: momentum(g),
        gamma,
        gamma_flux,
    })
}

fn time_derivative(series: &[&SpatialField], times: &[f64], i: usize) -> SpatialField {
    let n = series.len();
    let (lo, hi) = if i == 0 {
        (0, 1)
    } else if i == n - 1 {
        (n - 2, n - 1)
    } else {
        (i - 1, i + 1)
    };
    series[hi].sub(series[lo]).scaled(1.0 / (times[hi] - times[lo]))
}

pub fn moment_residuals(samples: &[KineticState], eps: f64) -> Result<MomentResiduals> {
    check_epsilon(eps)?;
    if samples.len() < 3 {
        return Err(Error::InsufficientSamples {
            needed: 3,
            got: samples.len(),
        });
    }
    let times: Vec<f64> = samples.iter().map(KineticState::time).collect();
    let moments = samples.iter().map(collect).collect::<Result<Vec<_>>>()?;
    let d = samples[0].space().dim();
    let inv = 1.0 / eps;
    let inv2 = inv * inv;

    let mut out = MomentResiduals {
        times: times.clone(),
        continuity: Vec::new(),
        momentum: Vec::new(),
        stress: Vec::new(),
    };
    let a_series: Vec<&SpatialField> = moments.iter().map(|x| &x.a).collect();
    for i in 0..samples.len() {
        let m = &moments[i];
        let grad_phi = &samples[i].fields().grad_phi;

        let mut div_b = SpatialField::zeros(m.a.space());
        for (k, bk) in m.b.iter().enumerate() {
            div_b = div_b.add(&bk.derivative(k));
        }
        let r1 = time_derivative(&a_series, &times, i).add(&div_b.scaled(inv));
        out.continuity.push(r1.norm());

        let mut r2_sq = 0.0;
        for c in 0..d {
            let b_series: Vec<&SpatialField> = moments.iter().map(|x| &x.b[c]).collect();
            let mut stress_div = SpatialField::zeros(m.a.space());
            for k in 0..d {
                stress_div = stress_div.add(&m.gamma[c * d + k].derivative(k));
            }
            let flux = m
                .a
                .derivative(c)
                .add(&grad_phi[c])
                .add(&m.a.product(&grad_phi[c]))
                .add(&stress_div);
            let r2 = time_derivative(&b_series, &times, i)
                .add(&flux.scaled(inv))
                .add(&m.b[c].scaled(inv2));
            r2_sq += r2.norm_sq();
        }
        out.momentum.push(r2_sq.sqrt());

        let mut r3_sq = 0.0;
        for p in 0..d {
            for q in 0..d {
                let g_series: Vec<&SpatialField> = moments.iter().map(|x| &x.gamma[p * d + q]).collect();
                let sym = m.b[q]
                    .derivative(p)
                    .add(&m.b[p].derivative(q))
                    .add(&m.b[q].product(&grad_phi[p]))
                    .add(&m.b[p].product(&grad_phi[q]));
                let r3 = sym
                    .scaled(inv)
                    .add(&time_derivative(&g_series, &times, i))
                    .add(&m.gamma[p * d + q].scaled(2.0 * inv2))
                    .add(&m.gamma_flux[p * d + q].scaled(inv));
                r3_sq += r3.norm_sq();
            }
        }
        out.stress.push(r3_sq.sqrt());
    }
    Ok(out)
}
