//! Spectral Sobolev and ν-weighted norms.
//!
//! `x`-derivatives are Fourier multipliers, so a sum over `|α| ≤ j` becomes a
//! per-mode weight `Σ_{|α|≤j} Π_i k_i^{2α_i}`. `v`-derivatives use the `∂_v`
//! recurrence on a Hermite extent large enough that nothing is truncated.

use ndarray::Array2;

use crate::spectral::{resize, shift_axis, Complex64, Discretization, ShiftKind, SpatialField, SpectralField};

/// Velocity weighting of the base norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VelocityWeight {
    /// `‖f‖²_{L²_{x,v}}`
    L2,
    /// `‖∇_v f‖² + ‖(1+|v|²)^{1/2} f‖²`
    Nu,
}

/// Which derivative orders enter the sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orders {
    /// `|α| ≤ x` and `|β| ≤ v` independently.
    Separate { x: usize, v: usize },
    /// `|α| + |β| ≤ total`.
    Total(usize),
}

impl Orders {
    fn max_v(self) -> usize {
        match self {
            Self::Separate { v, .. } => v,
            Self::Total(t) => t,
        }
    }

    /// Highest `|α|` allowed alongside a given `|β|`.
    fn max_x(self, beta: usize) -> usize {
        match self {
            Self::Separate { x, .. } => x,
            Self::Total(t) => t - beta,
        }
    }
}

/// Every multi-index in `dim` variables with `|α| ≤ order`.
pub(crate) fn multi_indices(dim: usize, order: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..dim {
        let mut next = Vec::new();
        for prefix in &out {
            let used: usize = prefix.iter().sum();
            for j in 0..=order - used {
                let mut p = prefix.clone();
                p.push(j);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// `Σ_{|α|≤order} |k^α|²` for every Fourier mode.
pub(crate) fn spatial_weights(space: &Discretization, order: usize) -> Vec<f64> {
    let d = space.dim();
    let alphas = multi_indices(d, order);
    (0..space.grid().len())
        .map(|m| {
            alphas
                .iter()
                .map(|a| {
                    a.iter()
                        .enumerate()
                        .map(|(i, &p)| space.k(m, i).powi(2 * p as i32))
                        .product::<f64>()
                })
                .sum()
        })
        .collect()
}

/// Per-Fourier-mode squared velocity norm of a coefficient row block.
fn row_norms(coeffs: &Array2<Complex64>, dim: usize, ext: usize, weight: VelocityWeight) -> Vec<f64> {
    let plain = |c: &Array2<Complex64>| -> Vec<f64> {
        c.rows().into_iter().map(|r| r.iter().map(|z| z.norm_sqr()).sum()).collect()
    };
    let mut total = plain(coeffs);
    if weight == VelocityWeight::Nu {
        for axis in 0..dim {
            for kind in [ShiftKind::Ddv, ShiftKind::MultiplyByV] {
                let shifted = shift_axis(coeffs, dim, ext, ext, axis, kind);
                for (t, s) in total.iter_mut().zip(plain(&shifted)) {
                    *t += s;
                }
            }
        }
    }
    total
}

/// `Σ ‖∂_x^α ∂_v^β f‖²` over the selected orders, where `coeffs` holds the
/// Hermite coefficients of `f` with per-axis extent `ext`.
pub(crate) fn derivative_sum_sq(
    space: &Discretization,
    coeffs: &Array2<Complex64>,
    ext: usize,
    orders: Orders,
    weight: VelocityWeight,
) -> f64 {
    let dim = space.dim();
    let kv = orders.max_v();
    let work_ext = ext + kv + 2;
    let base = resize(coeffs, dim, ext, work_ext);
    let mut total = 0.0;
    for beta in multi_indices(dim, kv) {
        let order_v: usize = beta.iter().sum();
        let mut c = base.clone();
        for (axis, &p) in beta.iter().enumerate() {
            for _ in 0..p {
                c = shift_axis(&c, dim, work_ext, work_ext, axis, ShiftKind::Ddv);
            }
        }
        let w = spatial_weights(space, orders.max_x(order_v));
        let rows = row_norms(&c, dim, work_ext, weight);
        total += rows.iter().zip(&w).map(|(r, w)| r * w).sum::<f64>();
    }
    total * space.grid().volume()
}

/// `‖f‖_{H^{k_x}_x H^{k_v}_v}` with full mixed sums.
pub fn sobolev_norm(f: &SpectralField, k_x: usize, k_v: usize) -> f64 {
    sobolev_norm_sq(f, Orders::Separate { x: k_x, v: k_v }, VelocityWeight::L2).sqrt()
}

pub fn sobolev_norm_sq(f: &SpectralField, orders: Orders, weight: VelocityWeight) -> f64 {
    derivative_sum_sq(f.space(), f.coeffs(), f.space().basis().n_v(), orders, weight)
}

/// `‖u‖²_{H^k_x}`.
pub fn spatial_sobolev_norm_sq(u: &SpatialField, k: usize) -> f64 {
    let w = spatial_weights(u.space(), k);
    u.coeffs().iter().zip(&w).map(|(c, w)| c.norm_sqr() * w).sum::<f64>() * u.space().grid().volume()
}

pub fn spatial_sobolev_norm(u: &SpatialField, k: usize) -> f64 {
    spatial_sobolev_norm_sq(u, k).sqrt()
}

/// `‖f‖²_ν`.
pub fn nu_norm_sq(f: &SpectralField) -> f64 {
    sobolev_norm_sq(f, Orders::Total(0), VelocityWeight::Nu)
}

pub fn nu_norm(f: &SpectralField) -> f64 {
    nu_norm_sq(f).sqrt()
}

/// Coefficients of `∂_{v_axis} f` on Hermite extent `n_v + 1` (no truncation).
pub(crate) fn velocity_gradient(f: &SpectralField, axis: usize) -> Array2<Complex64> {
    let dim = f.space().dim();
    let nv = f.space().basis().n_v();
    let ext = resize(f.coeffs(), dim, nv, nv + 1);
    shift_axis(&ext, dim, nv + 1, nv + 1, axis, ShiftKind::Ddv)
}
