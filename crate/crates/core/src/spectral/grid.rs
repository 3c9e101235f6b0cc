use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Uniform periodic grid on the torus `[0, length)^dim` with `n` points per axis.
///
/// Fourier modes use FFT ordering along every axis: index `j < n/2` is the
/// wavenumber `j`, index `j >= n/2` is `j - n`. The Nyquist index `n/2` is
/// carried by transforms but treated as unresolved by derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialGrid {
    dim: usize,
    n: usize,
    length: f64,
}

impl SpatialGrid {
    pub fn new(dim: usize, n: usize, length: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::config("spatial dimension must be at least 1"));
        }
        if n < 4 || !n.is_multiple_of(2) {
            return Err(Error::config(format!(
                "modes per dimension must be even and >= 4, got {n}"
            )));
        }
        if !n.is_power_of_two() {
            return Err(Error::config(format!(
                "modes per dimension must be a power of two, got {n}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::config(format!("domain period must be positive, got {length}")));
        }
        Ok(Self { dim, n, length })
    }

    /// Grid on the 2π-periodic torus.
    pub fn periodic(dim: usize, n: usize) -> Result<Self> {
        Self::new(dim, n, 2.0 * PI)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Points (and modes) per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Total number of collocation points, `n^dim`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Measure of the torus, `length^dim`.
    pub fn volume(&self) -> f64 {
        self.length.powi(self.dim as i32)
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Signed integer wavenumber of FFT index `j` along one axis.
    pub fn signed_index(&self, j: usize) -> i64 {
        if j < self.n / 2 {
            j as i64
        } else {
            j as i64 - self.n as i64
        }
    }

    pub fn is_nyquist(&self, j: usize) -> bool {
        j == self.n / 2
    }

    /// Physical wavenumber `2π m / length` of FFT index `j`.
    pub fn wavenumber(&self, j: usize) -> f64 {
        2.0 * PI * self.signed_index(j) as f64 / self.length
    }

    /// Symbol of `d/dx` divided by `i`; zero at the Nyquist index.
    pub fn derivative_symbol(&self, j: usize) -> f64 {
        if self.is_nyquist(j) {
            0.0
        } else {
            self.wavenumber(j)
        }
    }

    /// Per-axis indices of a flat (row-major) index.
    pub fn unflatten(&self, flat: usize) -> Vec<usize> {
        unflatten(flat, self.n, self.dim)
    }

    /// Flat index of the mode `-m` given the flat index of `m`.
    pub fn negated(&self, flat: usize) -> usize {
        let mut out = 0;
        for j in self.unflatten(flat) {
            out = out * self.n + (self.n - j) % self.n;
        }
        out
    }

    /// Derivative symbols `k_m` for every flat mode, laid out `[mode][axis]`.
    pub fn derivative_symbols(&self) -> Vec<Vec<f64>> {
        (0..self.len())
            .map(|flat| {
                self.unflatten(flat)
                    .into_iter()
                    .map(|j| self.derivative_symbol(j))
                    .collect()
            })
            .collect()
    }

    /// `|k_m|^2` for every flat mode (true wavenumbers, Nyquist included).
    pub fn laplacian_symbols(&self) -> Vec<f64> {
        (0..self.len())
            .map(|flat| {
                self.unflatten(flat)
                    .into_iter()
                    .map(|j| self.wavenumber(j).powi(2))
                    .sum()
            })
            .collect()
    }

    /// True if the flat mode touches the Nyquist index along any axis.
    pub fn touches_nyquist(&self, flat: usize) -> bool {
        self.unflatten(flat).into_iter().any(|j| self.is_nyquist(j))
    }

    /// Collocation coordinates of a flat point index.
    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.unflatten(flat)
            .into_iter()
            .map(|j| j as f64 * self.spacing())
            .collect()
    }

    /// Largest retained `|m|` along any axis of the flat mode (in integer units).
    pub fn max_abs_index(&self, flat: usize) -> usize {
        self.unflatten(flat)
            .into_iter()
            .map(|j| self.signed_index(j).unsigned_abs() as usize)
            .max()
            .unwrap_or(0)
    }
}

/// Row-major decomposition of `flat` over `dim` axes of equal `extent`.
pub fn unflatten(mut flat: usize, extent: usize, dim: usize) -> Vec<usize> {
    let mut idx = vec![0; dim];
    for axis in (0..dim).rev() {
        idx[axis] = flat % extent;
        flat /= extent;
    }
    idx
}

pub fn flatten(idx: &[usize], extent: usize) -> usize {
    idx.iter().fold(0, |acc, &j| acc * extent + j)
}
