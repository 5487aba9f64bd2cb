//! Numerical laboratory for weighted Bergman projection estimates on the unit
//! disk and on conformal images of it.

pub mod conformal;
pub mod domain;
pub mod dyadic;
pub mod error;
pub mod experiments;
pub mod operators;
pub mod weights;

pub use error::{LabError, Result};
