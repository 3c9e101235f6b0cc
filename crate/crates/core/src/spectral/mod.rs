//! Periodic grids, Fourier transforms, Hermite-function calculus and
//! quadrature oracles.

mod field;
mod fourier;
mod grid;
mod hermite;
mod quadrature;

pub use field::{quadrature_oracle_moment, Discretization, SpatialField, SpectralField};
pub(crate) use field::check_compatible;
pub use fourier::FourierTransform;
pub use grid::{flatten, unflatten, SpatialGrid};
pub use hermite::{resize, shift_axis, HermiteBasis, ShiftKind};
pub use quadrature::{hermite_functions, maxwellian, sqrt_maxwellian, GaussHermite};
pub use rustfft::num_complex::Complex64;
