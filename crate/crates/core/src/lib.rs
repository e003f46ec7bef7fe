// `!(x > y)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod approximations;
pub mod bounds;
pub mod catalog;
pub mod config;
pub mod engine;
pub mod error;
pub mod parametric;
pub mod potentials;
pub mod quadrature;
pub mod random;
pub mod spline;
pub mod sweep;
pub mod units;
pub mod verify;

pub use error::{Result, ScatterError};
pub use potentials::{DeltaSpike, ExtremaProfile, Extremum, ExtremumKind, Potential};
pub use units::UnitsConfig;
