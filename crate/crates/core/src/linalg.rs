//! Per-Fourier-mode linear solves for the implicit kinetic block.

use nalgebra::{DMatrix, DVector};
use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};

const PIVOT_FLOOR: f64 = 1e-300;

/// Thomas factorization of a complex tridiagonal matrix with sub-diagonal
/// `lower[n]` (row `n+1`, column `n`), diagonal `diag` and super-diagonal
/// `upper[n]` (row `n`, column `n+1`). No pivoting: callers supply matrices
/// whose Hermitian part is positive definite.
#[derive(Debug, Clone)]
pub struct TridiagonalLu {
    lower: Vec<Complex64>,
    /// Modified super-diagonal `c'_n`.
    upper: Vec<Complex64>,
    /// Pivots of the forward sweep.
    pivots: Vec<Complex64>,
}

impl TridiagonalLu {
    pub fn factor(lower: &[Complex64], diag: &[Complex64], upper: &[Complex64], mode: usize) -> Result<Self> {
        let n = diag.len();
        assert!(lower.len() + 1 == n && upper.len() + 1 == n, "band lengths");
        let mut pivots = Vec::with_capacity(n);
        let mut cprime = Vec::with_capacity(n.saturating_sub(1));
        for i in 0..n {
            let p = if i == 0 {
                diag[0]
            } else {
                diag[i] - lower[i - 1] * cprime[i - 1]
            };
            if !(p.norm() > PIVOT_FLOOR) {
                return Err(Error::ZeroPivot { mode });
            }
            pivots.push(p);
            if i + 1 < n {
                cprime.push(upper[i] / p);
            }
        }
        Ok(Self {
            lower: lower.to_vec(),
            upper: cprime,
            pivots,
        })
    }

    pub fn len(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pivots.is_empty()
    }

    /// Overwrite `rhs` with the solution.
    pub fn solve_in_place(&self, rhs: &mut [Complex64]) {
        let n = self.pivots.len();
        rhs[0] /= self.pivots[0];
        for i in 1..n {
            rhs[i] = (rhs[i] - self.lower[i - 1] * rhs[i - 1]) / self.pivots[i];
        }
        for i in (0..n - 1).rev() {
            rhs[i] -= self.upper[i] * rhs[i + 1];
        }
    }
}

/// Dense LU with partial pivoting, used when the implicit block is not
/// tridiagonal (more than one velocity dimension).
#[derive(Debug, Clone)]
pub struct DenseLu {
    lu: nalgebra::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl DenseLu {
    pub fn factor(matrix: DMatrix<Complex64>, mode: usize) -> Result<Self> {
        let lu = matrix.lu();
        let u = lu.u();
        if u.diagonal().iter().any(|p| !(p.norm() > PIVOT_FLOOR)) {
            return Err(Error::ZeroPivot { mode });
        }
        Ok(Self { lu })
    }

    pub fn solve_in_place(&self, rhs: &mut [Complex64]) {
        let mut b = DVector::from_column_slice(rhs);
        self.lu.solve_mut(&mut b);
        rhs.copy_from_slice(b.as_slice());
    }
}

#[derive(Debug, Clone)]
pub enum ModeSolver {
    Tridiagonal(TridiagonalLu),
    Dense(DenseLu),
}

impl ModeSolver {
    pub fn solve_in_place(&self, rhs: &mut [Complex64]) {
        match self {
            Self::Tridiagonal(t) => t.solve_in_place(rhs),
            Self::Dense(d) => d.solve_in_place(rhs),
        }
    }
}
