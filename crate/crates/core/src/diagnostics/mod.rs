//! Norms, energy functionals, moment-system residuals and limit errors.

pub mod energy;
pub mod limit;
pub mod norms;
pub mod residuals;

pub use energy::{energy_functionals, l2_energy, legacy_functionals, EnergyComponents, EnergyReport, LegacyFunctionals, LegacyWeights, CSV_HEADER};
pub use limit::{limit_error, LimitError};
pub use norms::{nu_norm, nu_norm_sq, sobolev_norm, sobolev_norm_sq, spatial_sobolev_norm, Orders, VelocityWeight};
pub use residuals::{moment_residuals, MomentResiduals};
