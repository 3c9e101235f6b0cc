use std::str::FromStr;

use ndarray::{Array2, Axis};
use rustfft::num_complex::Complex64;

use super::grid::{flatten, unflatten};
use super::quadrature::{hermite_functions, GaussHermite};
use crate::error::{Error, Result};

/// Tensor-product Hermite-function basis in `dim` velocity dimensions with
/// `n_v` retained modes per dimension, plus the Gauss–Hermite rule of order
/// `2·n_v` used to move between nodal values and coefficients.
#[derive(Debug, Clone)]
pub struct HermiteBasis {
    dim: usize,
    n_v: usize,
    rule: GaussHermite,
    /// `ψ_n(v_q)` laid out `[q][n]`.
    psi_at_nodes: Vec<Vec<f64>>,
}

impl HermiteBasis {
    pub fn new(dim: usize, n_v: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::config("velocity dimension must be at least 1"));
        }
        if n_v < 3 {
            return Err(Error::config(format!(
                "need at least 3 Hermite modes (density, momentum, stress), got {n_v}"
            )));
        }
        let rule = GaussHermite::new(2 * n_v);
        let psi_at_nodes = rule
            .nodes()
            .iter()
            .map(|&v| hermite_functions(v, n_v))
            .collect();
        Ok(Self {
            dim,
            n_v,
            rule,
            psi_at_nodes,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Retained modes per velocity dimension.
    pub fn n_v(&self) -> usize {
        self.n_v
    }

    /// Total number of tensor modes, `n_v^dim`.
    pub fn len(&self) -> usize {
        self.n_v.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn rule(&self) -> &GaussHermite {
        &self.rule
    }

    /// Nodes per velocity dimension.
    pub fn nodes_per_dim(&self) -> usize {
        self.rule.order()
    }

    /// Total number of tensor quadrature nodes.
    pub fn node_count(&self) -> usize {
        self.rule.order().pow(self.dim as u32)
    }

    /// Velocity coordinates of a flat tensor node.
    pub fn node(&self, flat: usize) -> Vec<f64> {
        unflatten(flat, self.rule.order(), self.dim)
            .into_iter()
            .map(|q| self.rule.nodes()[q])
            .collect()
    }

    /// `dv`-quadrature weight of a flat tensor node.
    pub fn node_weight(&self, flat: usize) -> f64 {
        unflatten(flat, self.rule.order(), self.dim)
            .into_iter()
            .map(|q| self.rule.function_weights()[q])
            .product()
    }

    pub fn psi_at_node(&self, q: usize, n: usize) -> f64 {
        self.psi_at_nodes[q][n]
    }

    /// Multi-index of a flat mode.
    pub fn multi_index(&self, flat: usize) -> Vec<usize> {
        unflatten(flat, self.n_v, self.dim)
    }

    pub fn flat_index(&self, multi: &[usize]) -> usize {
        flatten(multi, self.n_v)
    }

    /// Flat index of the unit multi-index `e_axis`.
    pub fn unit(&self, axis: usize) -> usize {
        let mut m = vec![0; self.dim];
        m[axis] = 1;
        self.flat_index(&m)
    }

    /// Total degree `|n|` of each flat mode (the Fokker–Planck eigenvalue).
    pub fn degrees(&self) -> Vec<usize> {
        (0..self.len())
            .map(|f| self.multi_index(f).iter().sum())
            .collect()
    }
}

/// Three-term recurrences of `v·`, `∂_v` and `(v/2 - ∂_v)` on the ψ basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftKind {
    /// `ψ_n ↦ √(n+1) ψ_{n+1} + √n ψ_{n-1}`
    MultiplyByV,
    /// `ψ_n ↦ (√n/2) ψ_{n-1} - (√(n+1)/2) ψ_{n+1}`
    Ddv,
    /// `ψ_n ↦ √(n+1) ψ_{n+1}`
    Raising,
}

impl FromStr for ShiftKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "multiply_by_v" => Ok(Self::MultiplyByV),
            "d_dv" => Ok(Self::Ddv),
            "raising" => Ok(Self::Raising),
            other => Err(Error::config(format!("unknown Hermite shift kind '{other}'"))),
        }
    }
}

impl ShiftKind {
    /// Coefficient picked up by output index `n` from input index `n - 1`
    /// and from input index `n + 1`.
    fn weights(self, n: usize) -> (f64, f64) {
        let below = (n as f64).sqrt();
        let above = ((n + 1) as f64).sqrt();
        match self {
            Self::MultiplyByV => (below, above),
            Self::Ddv => (-0.5 * below, 0.5 * above),
            Self::Raising => (below, 0.0),
        }
    }
}

/// Apply a recurrence along velocity `axis` to every row of `coeffs`, whose
/// columns are tensor Hermite modes of per-axis extent `ext_in`. The output
/// has per-axis extent `ext_out`; components beyond it are dropped.
pub fn shift_axis(
    coeffs: &Array2<Complex64>,
    dim: usize,
    ext_in: usize,
    ext_out: usize,
    axis: usize,
    kind: ShiftKind,
) -> Array2<Complex64> {
    debug_assert_eq!(coeffs.ncols(), ext_in.pow(dim as u32));
    let n_out = ext_out.pow(dim as u32);
    let mut taps: Vec<(usize, usize, f64)> = Vec::new();
    for out in 0..n_out {
        let mut idx = unflatten(out, ext_out, dim);
        if idx.iter().any(|&j| j > ext_in) {
            continue;
        }
        let n = idx[axis];
        let (w_below, w_above) = kind.weights(n);
        let others_fit = idx
            .iter()
            .enumerate()
            .all(|(a, &j)| a == axis || j < ext_in);
        if !others_fit {
            continue;
        }
        if n >= 1 && n - 1 < ext_in && w_below != 0.0 {
            idx[axis] = n - 1;
            taps.push((out, flatten(&idx, ext_in), w_below));
        }
        if n + 1 < ext_in && w_above != 0.0 {
            idx[axis] = n + 1;
            taps.push((out, flatten(&idx, ext_in), w_above));
        }
    }
    let mut result = Array2::<Complex64>::zeros((coeffs.nrows(), n_out));
    for (row_in, mut row_out) in coeffs
        .axis_iter(Axis(0))
        .zip(result.axis_iter_mut(Axis(0)))
    {
        for &(o, i, w) in &taps {
            row_out[o] += row_in[i] * w;
        }
    }
    result
}

/// Copy tensor Hermite coefficients between per-axis extents (zero-extend or truncate).
pub fn resize(coeffs: &Array2<Complex64>, dim: usize, ext_in: usize, ext_out: usize) -> Array2<Complex64> {
    if ext_in == ext_out {
        return coeffs.clone();
    }
    let n_out = ext_out.pow(dim as u32);
    let mut out = Array2::<Complex64>::zeros((coeffs.nrows(), n_out));
    for col in 0..coeffs.ncols() {
        let idx = unflatten(col, ext_in, dim);
        if idx.iter().all(|&j| j < ext_out) {
            let dst = flatten(&idx, ext_out);
            out.column_mut(dst).assign(&coeffs.column(col));
        }
    }
    out
}
