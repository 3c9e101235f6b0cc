pub mod ddp;
pub mod diagnostics;
pub mod error;
pub mod harness;
pub mod kinetic;
pub mod linalg;
pub mod spectral;
pub mod vpfp;

pub use error::{Error, Result};
