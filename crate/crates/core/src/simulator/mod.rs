//! Monte Carlo engine: PPP deployments around a typical UE at the origin,
//! biased mode selection, n-th nearest pairing and SINR estimation.
//!
//! The simulator works in `f64`. Trials run in blocks on the rayon pool and
//! block results are combined in trial order, so every estimate is
//! bit-identical for a given seed regardless of the thread count.

mod assumption;
mod drop;
mod estimate;
mod ppp;
pub mod rng;

use serde::Serialize;
use thiserror::Error;

use crate::analytic::AnalyticError;
use crate::model::{Mode, ModelError};

pub use assumption::{validate_independence_assumption, AssumptionReport, GapRow};
pub use drop::{d2d_link, run_drop, sample_ues, DropOutcome, Ue, UeRole, Windows};
pub use estimate::{
    collect_sinr, estimate_association, estimate_coverage, estimate_coverage_curve, estimate_rate,
    window_truncation_gaps, Budget, Estimate, SinrSample,
};
pub use ppp::{sample_ppp, PointField};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
    #[error("{what} = {value} is invalid")]
    InvalidArgument { what: &'static str, value: f64 },
    #[error("at least {min} trials are needed, got {got}")]
    TooFewTrials { min: u64, got: u64 },
    #[error("no drop ended in {mode} mode")]
    NoDropsOfMode { mode: Mode },
    #[error("no {mode} partner found after {attempts} UE fields")]
    NoPartner { mode: Mode, attempts: u32 },
    #[error("drop budget of {max} exhausted with {got} of {wanted} {mode} drops")]
    BudgetExhausted { mode: Mode, max: u64, got: u64, wanted: u64 },
}

/// Window sizes and execution limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimOptions {
    /// BS window radius in units of 1/√(πλ_b).
    pub bs_sigmas: f64,
    /// UE window radius in units of 1/√(πλ) for the sparsest D2D class.
    pub ue_sigmas: f64,
    /// Minimum UE window radius in expected pairing distances.
    pub ue_pairing_factor: f64,
    pub block_size: u64,
    /// Hard cap on drops when collecting a conditioned sample.
    pub max_drops: u64,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self { bs_sigmas: 5.0, ue_sigmas: 5.0, ue_pairing_factor: 20.0, block_size: 1024, max_drops: 50_000_000 }
    }
}
