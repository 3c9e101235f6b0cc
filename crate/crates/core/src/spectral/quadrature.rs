//! Gauss–Hermite quadrature for the unit Gaussian `M(v) = (2π)^{-1/2} e^{-v²/2}`.
//!
//! Nodes are the roots of the probabilists' Hermite polynomial of the rule's
//! order, obtained from the Jacobi matrix eigenvalues and polished by Newton
//! steps on the normalized Hermite functions. Weights come from the
//! Christoffel function, which stays finite for large node magnitudes.

use nalgebra::DMatrix;
use std::f64::consts::PI;

/// Values `ψ_0(v) .. ψ_{count-1}(v)` of the normalized Hermite functions
/// `ψ_n = H̃_n √M`, where `∫ H̃_j H̃_k M dv = δ_jk`.
pub fn hermite_functions(v: f64, count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    let psi0 = (2.0 * PI).powf(-0.25) * (-0.25 * v * v).exp();
    out.push(psi0);
    if count == 1 {
        return out;
    }
    out.push(v * psi0);
    for n in 1..count - 1 {
        let next = (v * out[n] - (n as f64).sqrt() * out[n - 1]) / ((n + 1) as f64).sqrt();
        out.push(next);
    }
    out
}

/// `√M(v)`.
pub fn sqrt_maxwellian(v: f64) -> f64 {
    (2.0 * PI).powf(-0.25) * (-0.25 * v * v).exp()
}

/// `M(v)` in one velocity dimension.
pub fn maxwellian(v: f64) -> f64 {
    (2.0 * PI).powf(-0.5) * (-0.5 * v * v).exp()
}

#[derive(Debug, Clone)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    /// Weights against `M dv` (they sum to one).
    weights: Vec<f64>,
    /// Weights against plain `dv`: `∫ F dv ≈ Σ W_q F(v_q)` for `F = poly · M`.
    function_weights: Vec<f64>,
}

impl GaussHermite {
    /// Rule with `order` nodes; exact for polynomials of degree `< 2·order`
    /// against `M`.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "quadrature order must be positive");
        let mut jacobi = DMatrix::<f64>::zeros(order, order);
        for n in 1..order {
            let off = (n as f64).sqrt();
            jacobi[(n - 1, n)] = off;
            jacobi[(n, n - 1)] = off;
        }
        let eig = jacobi.symmetric_eigen();
        let mut nodes: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());

        for v in nodes.iter_mut() {
            for _ in 0..4 {
                let psi = hermite_functions(*v, order + 1);
                let denom = (order as f64).sqrt() * psi[order - 1];
                if denom == 0.0 {
                    break;
                }
                let delta = psi[order] / denom;
                *v -= delta;
                if delta.abs() <= 1e-16 * v.abs().max(1.0) {
                    break;
                }
            }
        }
        // exact symmetry about zero
        for q in 0..order / 2 {
            let avg = 0.5 * (nodes[order - 1 - q] - nodes[q]);
            nodes[q] = -avg;
            nodes[order - 1 - q] = avg;
        }
        if order % 2 == 1 {
            nodes[order / 2] = 0.0;
        }

        let function_weights: Vec<f64> = nodes
            .iter()
            .map(|&v| {
                let s: f64 = hermite_functions(v, order).iter().map(|p| p * p).sum();
                1.0 / s
            })
            .collect();
        let weights = nodes
            .iter()
            .zip(&function_weights)
            .map(|(&v, &w)| w * maxwellian(v))
            .collect();
        Self {
            nodes,
            weights,
            function_weights,
        }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn function_weights(&self) -> &[f64] {
        &self.function_weights
    }
}
