//! Distance between a kinetic trajectory and the fluid limit sampled at
//! the same times.

use serde::{Deserialize, Serialize};

use super::norms::{derivative_sum_sq, Orders, VelocityWeight};
use crate::ddp::DdpState;
use crate::error::{Error, Result};
use crate::kinetic::project_non_density;
use crate::spectral::{check_compatible, sqrt_maxwellian};
use crate::vpfp::KineticState;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitError {
    /// `max_t ‖a^ε - ρ₀‖_{L²_x}` over sample times.
    pub moment: f64,
    /// `max_t ‖∇φ^ε - ∇φ₀‖_{L²_x}` over sample times.
    pub field: f64,
    /// `∫ ‖(I - P₀)g^ε‖²_{𝓗^k_{x,v}} dt` by the trapezoid rule on samples.
    pub micro: f64,
    /// `max_t max_{nodes} |f^ε - (1 + ρ₀)M|`.
    pub pointwise: f64,
}

/// Relative tolerance for matching sample times.
const TIME_TOL: f64 = 1e-9;

pub fn limit_error(kinetic: &[KineticState], fluid: &[DdpState], k: usize) -> Result<LimitError> {
    if kinetic.len() != fluid.len() {
        return Err(Error::TimeGridMismatch(format!(
            "{} kinetic samples vs {} fluid samples",
            kinetic.len(),
            fluid.len()
        )));
    }
    if kinetic.is_empty() {
        return Err(Error::InsufficientSamples { needed: 1, got: 0 });
    }
    let mut out = LimitError {
        moment: 0.0,
        field: 0.0,
        micro: 0.0,
        pointwise: 0.0,
    };
    let mut micro_series = Vec::with_capacity(kinetic.len());
    for (ks, fs) in kinetic.iter().zip(fluid) {
        let (t, s) = (ks.time(), fs.time());
        if (t - s).abs() > TIME_TOL * t.abs().max(1.0) {
            return Err(Error::TimeGridMismatch(format!("kinetic sample at t = {t}, fluid at t = {s}")));
        }
        check_compatible(ks.space(), fs.space())?;
        let fields = ks.fields();
        out.moment = out.moment.max(fields.a.sub(fs.rho0()).norm());
        let field_sq: f64 = fields
            .grad_phi
            .iter()
            .zip(fs.grad_phi0())
            .map(|(p, q)| p.sub(q).norm_sq())
            .sum();
        out.field = out.field.max(field_sq.sqrt());

        let space = ks.space();
        let nd = project_non_density(ks.g());
        micro_series.push(derivative_sum_sq(
            space,
            nd.coeffs(),
            space.basis().n_v(),
            Orders::Total(k),
            VelocityWeight::Nu,
        ));

        // f - (1+ρ₀)M = √M (g - ρ₀√M)
        let mut diff = ks.g().clone();
        {
            let mut col = diff.coeffs_mut().column_mut(0);
            col -= fs.rho0().coeffs();
        }
        let values = diff.inverse_transform();
        let basis = space.basis();
        for ((_, q), v) in values.indexed_iter() {
            let w: f64 = basis.node(q).iter().map(|&x| sqrt_maxwellian(x)).product();
            out.pointwise = out.pointwise.max((w * v).abs());
        }
    }
    let times: Vec<f64> = kinetic.iter().map(KineticState::time).collect();
    for i in 1..times.len() {
        out.micro += 0.5 * (times[i] - times[i - 1]) * (micro_series[i] + micro_series[i - 1]);
    }
    Ok(out)
}
