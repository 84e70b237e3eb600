//! Weighted, converse and weak Cheeger and Poincaré inequalities for
//! heavy-tailed laws on the line and on ℝⁿ.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod duality;
pub mod error;
pub mod isoperimetry;
pub mod lyapunov;
pub mod measures;
pub mod numeric;
pub mod spherical;
pub mod verify;
pub mod weak;
pub mod weighted;

pub use error::{Error, Result};
pub use measures::{Family, Measure1D, Phi, Potential, QuadratureSpec, RadialMeasure};
