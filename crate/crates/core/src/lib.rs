//! Numerical laboratory for the vectorial Allen-Cahn equation and its
//! sharp-interface limit, multiphase mean curvature flow.
//!
//! The crate builds the three ingredients of the relative-entropy framework —
//! a strongly coercive N-well potential on the unit-edge simplex, approximate
//! phase indicator functions, and gradient-flow calibration fields for model
//! strong solutions — and couples them to a periodic 2D solver plus a
//! diagnostics/sweep harness that measures entropy decay, coercivity
//! functionals and convergence rates.

pub mod error;
pub mod util;

pub mod simplex;
pub mod potential;
pub mod indicators;
pub mod profiles;
pub mod geometry2d;
pub mod calibration;
pub mod initdata;
pub mod solver;
pub mod diagnostics;
pub mod harness;

pub use error::{Error, Result};
