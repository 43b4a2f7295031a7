// NaN-rejecting `!(x > 0.0)` checks throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bvp;
pub mod central_force;
pub mod cli;
pub mod closed;
pub mod dynamics;
pub mod error;
pub mod flat_torus;
mod ode;
pub mod quadrature;
pub mod reduced;
pub mod roots;
pub mod surface;

pub use error::{Error, ErrorKind, Result};
