//! Numerical kernel: adaptive quadrature and the special functions used by
//! the analytic engine. Everything here is a pure function.

mod beta;
mod erf;
pub(crate) mod gamma;
mod interference;
mod quadrature;

use thiserror::Error;

pub use beta::reg_incomplete_beta;
pub use erf::{erf, erfc, erfcx, probability_integral};
pub use gamma::{gamma_fn, ln_binomial, ln_gamma};
pub use interference::{interference_integral_l, interference_integral_l_complete};
pub use quadrature::{quad_finite, quad_semi_infinite, quad_semi_infinite_scaled, Integral, QuadratureSpec};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecialError {
    #[error("quadrature spec needs rel_tol > 0, abs_tol >= 0 and at least one subdivision")]
    InvalidQuadratureSpec,
    #[error("invalid integration bounds [{a}, {b}]")]
    InvalidBounds { a: f64, b: f64 },
    #[error("{function}: argument {arg} outside the domain")]
    Domain { function: &'static str, arg: f64 },
}
