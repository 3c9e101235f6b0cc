//! Multi-dimensional FFTs on the periodic grid and the 3/2-padded grid used
//! for dealiased pointwise products.

use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::{flatten, SpatialGrid};

#[derive(Clone)]
struct Plans {
    extent: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Plans {
    fn new(planner: &mut FftPlanner<f64>, extent: usize) -> Self {
        Self {
            extent,
            forward: planner.plan_fft_forward(extent),
            inverse: planner.plan_fft_inverse(extent),
        }
    }
}

#[derive(Clone)]
pub struct FourierTransform {
    dim: usize,
    base: Plans,
    padded: Plans,
    /// Padded flat index for every base flat mode (`None` for Nyquist modes).
    pad_map: Vec<Option<usize>>,
}

impl fmt::Debug for FourierTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FourierTransform")
            .field("dim", &self.dim)
            .field("n", &self.base.extent)
            .field("padded", &self.padded.extent)
            .finish()
    }
}

impl FourierTransform {
    pub fn new(grid: &SpatialGrid) -> Self {
        let mut planner = FftPlanner::new();
        let n = grid.n();
        let m = 3 * n / 2;
        let base = Plans::new(&mut planner, n);
        let padded = Plans::new(&mut planner, m);
        let pad_map = (0..grid.len())
            .map(|flat| {
                if grid.touches_nyquist(flat) {
                    return None;
                }
                let idx: Vec<usize> = grid
                    .unflatten(flat)
                    .into_iter()
                    .map(|j| grid.signed_index(j).rem_euclid(m as i64) as usize)
                    .collect();
                Some(flatten(&idx, m))
            })
            .collect();
        Self {
            dim: grid.dim(),
            base,
            padded,
            pad_map,
        }
    }

    pub fn padded_extent(&self) -> usize {
        self.padded.extent
    }

    pub fn padded_len(&self) -> usize {
        self.padded.extent.pow(self.dim as u32)
    }

    /// Physical values → coefficients, `u(x) = Σ_m û_m e^{i k_m·x}`.
    pub fn forward(&self, data: &mut [Complex64]) {
        transform_axes(data, self.dim, &self.base, true);
        let scale = 1.0 / data.len() as f64;
        data.iter_mut().for_each(|c| *c *= scale);
    }

    /// Coefficients → physical values.
    pub fn inverse(&self, data: &mut [Complex64]) {
        transform_axes(data, self.dim, &self.base, false);
    }

    /// Zero-pad base coefficients onto the 3/2 grid and return physical values there.
    pub fn to_padded_values(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.padded_len()];
        for (c, slot) in coeffs.iter().zip(&self.pad_map) {
            if let Some(p) = slot {
                out[*p] = *c;
            }
        }
        transform_axes(&mut out, self.dim, &self.padded, false);
        out
    }

    /// Padded physical values → base coefficients (Nyquist modes zeroed).
    pub fn from_padded_values(&self, mut values: Vec<Complex64>) -> Vec<Complex64> {
        transform_axes(&mut values, self.dim, &self.padded, true);
        let scale = 1.0 / values.len() as f64;
        self.pad_map
            .iter()
            .map(|slot| match slot {
                Some(p) => values[*p] * scale,
                None => Complex64::new(0.0, 0.0),
            })
            .collect()
    }

    /// Dealiased coefficients of the pointwise product `u·w`.
    pub fn product(&self, u: &[Complex64], w: &[Complex64]) -> Vec<Complex64> {
        let pu = self.to_padded_values(u);
        let pw = self.to_padded_values(w);
        let prod = pu
            .iter()
            .zip(&pw)
            .map(|(a, b)| Complex64::new(a.re * b.re, 0.0))
            .collect();
        self.from_padded_values(prod)
    }
}

fn transform_axes(data: &mut [Complex64], dim: usize, plans: &Plans, forward: bool) {
    let e = plans.extent;
    let fft = if forward { &plans.forward } else { &plans.inverse };
    if dim == 1 {
        fft.process(data);
        return;
    }
    let mut lane = vec![Complex64::new(0.0, 0.0); e];
    for axis in 0..dim {
        let stride = e.pow((dim - 1 - axis) as u32);
        let outer = e.pow(axis as u32);
        for o in 0..outer {
            for i in 0..stride {
                let base = o * e * stride + i;
                for (j, slot) in lane.iter_mut().enumerate() {
                    *slot = data[base + j * stride];
                }
                fft.process(&mut lane);
                for (j, val) in lane.iter().enumerate() {
                    data[base + j * stride] = *val;
                }
            }
        }
    }
}
