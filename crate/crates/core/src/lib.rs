//! Random motions on the line and in the plane whose speed depends on the
//! position, together with the explicit laws they follow and the numerical
//! checks used to validate them.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod cli;
pub mod config;
pub mod error;
pub mod fracepd;
pub mod harness;
pub mod io;
pub mod planar;
pub mod quad;
pub mod rates;
pub mod rng;
pub mod special;
pub mod suite;
pub mod telegraph1d;
pub mod velocity;

pub use error::{Error, Result};
pub use rates::{RateFunction, RateKind};
pub use telegraph1d::{DensityModel1D, PathBatch};
pub use velocity::VelocityProfile;
