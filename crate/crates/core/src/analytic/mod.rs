//! Closed forms and numerical integrals for association, coverage, Laplace
//! transforms of interference, average rates and sum throughput.
//!
//! Every function is pure. Quadrature tolerances and the formula variants
//! that have more than one reasonable reading are carried by
//! [`AnalyticOptions`].

mod association;
mod coverage;
mod laplace;
mod pdf;
mod rate;
mod throughput;

use serde::Serialize;
use thiserror::Error;

use crate::model::{Mode, ModelError};
use crate::real::Real;
use crate::special::{Integral, QuadratureSpec, SpecialError};

pub use association::{association_probability, association_probability_closed_alpha4};
pub use coverage::{cellular_coverage, cellular_coverage_closed_alpha4, d2d_coverage};
pub use laplace::{
    laplace_fd_on_hd, laplace_general_nth, laplace_hd_on_fd, laplace_nearest, laplace_nearest_alpha4,
    laplace_nearest_direct, laplace_unconditioned, Alpha4Arctan, FiniteInterference,
};
pub use pdf::{nearest_bs_pdf, nth_neighbor_pdf, serving_bs_distance_pdf};
pub use rate::{cellular_rate, d2d_rate};
pub use throughput::{sum_throughput, Throughput};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Special(#[from] SpecialError),
    #[error("{quantity}: quadrature did not converge (best estimate {value}, error bound {error})")]
    NoConvergence { quantity: &'static str, value: f64, error: f64 },
    #[error("{what} needs alpha = 4, got {alpha}")]
    NeedsAlpha4 { what: &'static str, alpha: f64 },
    #[error("{what}: singular argument")]
    Singular { what: &'static str },
    #[error("association probability is zero; there is no cellular user to condition on")]
    NoCellularUsers,
    #[error("{mode} density is zero; no {mode} pairs exist")]
    NoPairs { mode: Mode },
    #[error("{what} = {value} is outside its domain")]
    Domain { what: &'static str, value: f64 },
    #[error("population {population} does not exceed the pairing order {n}")]
    PopulationTooSmall { population: u32, n: u32 },
    #[error("n = {n} needs w_total and m_bar for the finite-population model")]
    MissingGeneralParams { n: u32 },
    #[error("query mode {got} is not valid here")]
    WrongMode { got: Mode },
}

/// SINR threshold and mode of a coverage evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoverageQuery<T> {
    /// Linear SINR threshold.
    pub beta: T,
    pub mode: Mode,
}

impl<T: Real> CoverageQuery<T> {
    pub fn new(beta: T, mode: Mode) -> Result<Self, AnalyticError> {
        let q = Self { beta, mode };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<(), AnalyticError> {
        if !(self.beta > T::zero()) || !self.beta.is_finite() {
            return Err(AnalyticError::Domain { what: "beta", value: self.beta.to_f64_lossy() });
        }
        Ok(())
    }
}

/// Average rate in nats with the accumulated quadrature error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateResult<T> {
    pub rate_nats: T,
    pub quadrature_error: T,
}

/// Evaluation of the probability integral inside the α = 4 closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ClosedFormPhi {
    /// `1 - Φ(x)` with Φ = erf/(2√2) as normalised in [`crate::special::probability_integral`].
    Footnote,
    /// `erfc(x)`, which makes the closed form equal the integral it came from.
    Erf,
}

/// Gamma-function product in the unconditioned Laplace transform
/// exp(-πλ(sP)^{2/α} Γ(1+δ)Γ(1-δ)).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GammaProduct {
    /// δ = 2/α, the value of the PPP Laplace functional.
    TwoOverAlpha,
    /// δ = 1/α.
    OneOverAlpha,
}

/// Power of the outside-ball factor in the finite-population transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BallExponent {
    /// `k - l`: inside and outside powers add up to the number of interferers.
    KMinusL,
    /// `n - l`.
    NMinusL,
}

/// Population bound of the Poisson normaliser ξ in the finite-population
/// transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum XiPopulation {
    /// Sum up to the class population `M` used by the enclosing sum.
    Class,
    /// Sum up to the total population `W`.
    Total,
}

/// Tolerances and formula variants for the analytic engine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalyticOptions<T> {
    pub quadrature: QuadratureSpec<T>,
    pub gamma_product: GammaProduct,
    pub exponent: BallExponent,
    pub xi_population: XiPopulation,
    /// Count an FD link's rate twice in the D2D mixture.
    pub fd_per_pair: bool,
}

impl<T: Real> Default for AnalyticOptions<T> {
    fn default() -> Self {
        Self {
            quadrature: QuadratureSpec::default(),
            gamma_product: GammaProduct::TwoOverAlpha,
            exponent: BallExponent::KMinusL,
            xi_population: XiPopulation::Class,
            fd_per_pair: false,
        }
    }
}

pub(crate) fn converged<T: Real>(quantity: &'static str, i: Integral<T>) -> Result<Integral<T>, AnalyticError> {
    if i.converged {
        Ok(i)
    } else {
        Err(AnalyticError::NoConvergence { quantity, value: i.value.to_f64_lossy(), error: i.error.to_f64_lossy() })
    }
}

pub(crate) fn clamp_unit<T: Real>(x: T) -> T {
    x.max(T::zero()).min(T::one())
}
