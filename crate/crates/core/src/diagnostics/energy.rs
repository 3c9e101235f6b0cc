//! Energy and dissipation functionals of the kinetic state.

use serde::{Deserialize, Serialize};

use super::norms::{derivative_sum_sq, spatial_sobolev_norm_sq, velocity_gradient, Orders, VelocityWeight};
use crate::error::Result;
use crate::kinetic::{check_epsilon, gamma_moment, project_micro, DistributionField, MacroFields};
use crate::spectral::SpatialField;
use crate::vpfp::KineticState;

/// Labeled pieces of `𝔼_k` and `𝔻_k`. Dissipation pieces already carry
/// their `1/ε²` or `1/ε` prefactors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyComponents {
    /// `‖g‖²_{H^k_x L²_v}`
    pub g_hk: f64,
    /// `‖∇_v (I-P)g‖²_{H^{k-1}_{x,v}}`
    pub grad_v_micro: f64,
    /// `‖(a, b)‖²_{H^{k-1}_x}`
    pub macro_ab: f64,
    /// `ε⁻² ‖(I-P)g‖²_{𝓗^k_{x,v}}`
    pub micro_nu: f64,
    /// `ε⁻² ‖b‖²_{H^k_x}`
    pub b_hk: f64,
    /// `ε⁻¹ ‖(∇_x b, div_x b)‖²_{H^{k-1}_x}`
    pub grad_b: f64,
    /// `‖∇_x a‖²_{H^{k-1}_x}`
    pub grad_a: f64,
    /// `‖∇_x φ‖²_{H^k_x}`
    pub grad_phi: f64,
}

impl EnergyComponents {
    pub fn energy(&self) -> f64 {
        self.g_hk + self.grad_v_micro + self.macro_ab
    }

    pub fn dissipation(&self) -> f64 {
        self.micro_nu + self.b_hk + self.grad_b + self.grad_a + self.grad_phi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub time: f64,
    pub k: usize,
    pub e_k: f64,
    pub d_k: f64,
    pub components: EnergyComponents,
    /// `|∫ a dx|`
    pub mass_residual: f64,
    /// `‖Δφ + a‖ / ‖a‖`
    pub poisson_residual: f64,
}

/// Column order of [`EnergyReport::csv_row`].
pub const CSV_HEADER: &str = "time,E_k,D_k,g_hk,grad_v_micro,macro_ab,micro_nu,b_hk,grad_b,grad_a,grad_phi,mass_residual,poisson_residual";

/// Floats with 17 significant digits.
pub(crate) fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

impl EnergyReport {
    pub fn csv_row(&self) -> String {
        let c = &self.components;
        [
            self.time,
            self.e_k,
            self.d_k,
            c.g_hk,
            c.grad_v_micro,
            c.macro_ab,
            c.micro_nu,
            c.b_hk,
            c.grad_b,
            c.grad_a,
            c.grad_phi,
            self.mass_residual,
            self.poisson_residual,
        ]
        .iter()
        .map(|&x| fmt_float(x))
        .collect::<Vec<_>>()
        .join(",")
    }
}

/// `Σ_{|α|≤order} ‖∂^α u‖²`, zero for a negative order.
fn hk(u: &SpatialField, order: isize) -> f64 {
    if order < 0 {
        0.0
    } else {
        spatial_sobolev_norm_sq(u, order as usize)
    }
}

fn grad_v_sq(micro: &DistributionField, order: isize) -> f64 {
    if order < 0 {
        return 0.0;
    }
    let space = micro.space();
    let ext = space.basis().n_v() + 1;
    (0..space.dim())
        .map(|i| {
            derivative_sum_sq(
                space,
                &velocity_gradient(micro, i),
                ext,
                Orders::Total(order as usize),
                VelocityWeight::L2,
            )
        })
        .sum()
}

/// `‖(∇_x b, div_x b)‖²_{H^order_x}`.
fn grad_b_sq(b: &[SpatialField], order: isize) -> f64 {
    let mut total = 0.0;
    let mut div = SpatialField::zeros(b[0].space());
    for (j, bj) in b.iter().enumerate() {
        for i in 0..b.len() {
            total += hk(&bj.derivative(i), order);
        }
        div = div.add(&bj.derivative(j));
    }
    total + hk(&div, order)
}

/// `𝔼_k` and `𝔻_k` with their labeled components.
pub fn energy_functionals(state: &KineticState, k: usize, eps: f64) -> Result<EnergyReport> {
    check_epsilon(eps)?;
    let g = state.g();
    let fields = state.fields();
    let ki = k as isize;
    let micro = project_micro(g);
    let space = g.space();
    let nv = space.basis().n_v();
    let b_lower = fields.b.iter().map(|b| hk(b, ki - 1)).sum::<f64>();
    let components = EnergyComponents {
        g_hk: derivative_sum_sq(space, g.coeffs(), nv, Orders::Separate { x: k, v: 0 }, VelocityWeight::L2),
        grad_v_micro: grad_v_sq(&micro, ki - 1),
        macro_ab: hk(&fields.a, ki - 1) + b_lower,
        micro_nu: derivative_sum_sq(space, micro.coeffs(), nv, Orders::Total(k), VelocityWeight::Nu) / (eps * eps),
        b_hk: fields.b.iter().map(|b| hk(b, ki)).sum::<f64>() / (eps * eps),
        grad_b: grad_b_sq(&fields.b, ki - 1) / eps,
        grad_a: (0..space.dim()).map(|i| hk(&fields.a.derivative(i), ki - 1)).sum(),
        grad_phi: fields.grad_phi.iter().map(|p| hk(p, ki)).sum(),
    };
    Ok(EnergyReport {
        time: state.time(),
        k,
        e_k: components.energy(),
        d_k: components.dissipation(),
        components,
        mass_residual: fields.a.mean().abs() * space.grid().volume(),
        poisson_residual: fields.poisson_residual(),
    })
}

/// `½(‖g‖²_{L²_{x,v}} + ‖∇φ‖²_{L²_x})`, the quantity the linear dynamics dissipate.
pub fn l2_energy(g: &DistributionField, fields: &MacroFields) -> f64 {
    0.5 * (g.norm_sq() + fields.grad_phi.iter().map(SpatialField::norm_sq).sum::<f64>())
}

/// Weights of the alternative functionals; all default to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LegacyWeights {
    /// Uniform `C_{α,β}`.
    pub c_alpha_beta: f64,
    pub lambda: [f64; 3],
}

impl Default for LegacyWeights {
    fn default() -> Self {
        Self {
            c_alpha_beta: 1.0,
            lambda: [1.0; 3],
        }
    }
}

/// The kinetic/fluid split energy and dissipation functionals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LegacyFunctionals {
    pub e_k_k1: f64,
    pub e_k_k2: f64,
    pub e_k_f: f64,
    /// Stress pairing `2Σ⟨∂^α(∂_i b_j + ∂_j b_i), ∂^α Γ_ij[(I-P)g]⟩`.
    pub stress_cross: f64,
    /// `ε Σ⟨∂^α ∇a, ∂^α b⟩`
    pub ab_cross: f64,
    pub d_k_k1: f64,
    pub d_k_k2: f64,
    pub d_k_f: f64,
    pub e_total: f64,
    pub d_total: f64,
}

fn inner_hk(u: &SpatialField, w: &SpatialField, order: isize) -> f64 {
    if order < 0 {
        return 0.0;
    }
    let weights = super::norms::spatial_weights(u.space(), order as usize);
    u.coeffs()
        .iter()
        .zip(w.coeffs())
        .zip(&weights)
        .map(|((a, b), w)| (a.re * b.re + a.im * b.im) * w)
        .sum::<f64>()
        * u.space().grid().volume()
}

pub fn legacy_functionals(state: &KineticState, k: usize, eps: f64, weights: &LegacyWeights) -> Result<LegacyFunctionals> {
    check_epsilon(eps)?;
    let g = state.g();
    let fields = state.fields();
    let space = g.space();
    let nv = space.basis().n_v();
    let ki = k as isize;
    let d = space.dim();
    let micro = project_micro(g);
    let grad_phi_k = fields.grad_phi.iter().map(|p| hk(p, ki)).sum::<f64>();

    let e_k_k1 = derivative_sum_sq(space, g.coeffs(), nv, Orders::Separate { x: k, v: 0 }, VelocityWeight::L2)
        + grad_phi_k;
    let e_k_k2 = weights.c_alpha_beta * grad_v_sq(&micro, ki - 1);

    let mut stress_cross = 0.0;
    for i in 0..d {
        for j in 0..d {
            let sym = fields.b[j].derivative(i).add(&fields.b[i].derivative(j));
            stress_cross += 2.0 * inner_hk(&sym, &gamma_moment(&micro, i, j)?, ki - 1);
        }
    }
    let ab_cross = eps
        * (0..d)
            .map(|i| inner_hk(&fields.a.derivative(i), &fields.b[i], ki - 1))
            .sum::<f64>();
    let abphi = hk(&fields.a, ki - 1)
        + fields.b.iter().map(|b| hk(b, ki - 1)).sum::<f64>()
        + fields.grad_phi.iter().map(|p| hk(p, ki - 1)).sum::<f64>();
    let e_k_f = abphi + stress_cross + ab_cross;

    let e2 = eps * eps;
    let d_k_k1 = (derivative_sum_sq(space, micro.coeffs(), nv, Orders::Separate { x: k, v: 0 }, VelocityWeight::Nu)
        + fields.b.iter().map(|b| hk(b, ki)).sum::<f64>())
        / e2;
    let d_k_k2 = if k == 0 {
        0.0
    } else {
        let ext = nv + 1;
        weights.c_alpha_beta
            * (0..d)
                .map(|i| {
                    derivative_sum_sq(space, &velocity_gradient(&micro, i), ext, Orders::Total(k - 1), VelocityWeight::Nu)
                })
                .sum::<f64>()
            / e2
    };
    let d_k_f = grad_b_sq(&fields.b, ki - 1) / eps
        + (0..d).map(|i| hk(&fields.a.derivative(i), ki - 1)).sum::<f64>()
        + grad_phi_k;
    let [l1, l2, l3] = weights.lambda;
    Ok(LegacyFunctionals {
        e_k_k1,
        e_k_k2,
        e_k_f,
        stress_cross,
        ab_cross,
        d_k_k1,
        d_k_k2,
        d_k_f,
        e_total: l1 * e_k_k1 + l2 * e_k_k2 + l3 * e_k_f,
        d_total: d_k_k1 + d_k_k2 + d_k_f,
    })
}
