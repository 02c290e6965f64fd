//! Stochastic-geometry models of a cellular network overlaid with
//! device-to-device links whose radios are either half- or full-duplex.
//!
//! [`analytic`] evaluates association, coverage, rate and sum throughput
//! from closed forms and adaptive quadrature; [`simulator`] estimates the
//! same quantities by Monte Carlo over Poisson deployments; [`validate`]
//! runs the two against each other.
//!
//! The numerical kernel and the analytic engine are generic over
//! [`real::Real`] (`f32` or `f64`). The simulator and the validation battery
//! work in `f64`.

pub mod analytic;
pub mod model;
pub mod real;
pub mod simulator;
pub mod special;
pub mod validate;

pub use real::Real;

pub type Scenario = model::Scenario<f64>;
pub type ScenarioF32 = model::Scenario<f32>;
pub type Densities = model::Densities<f64>;
pub type DensitiesF32 = model::Densities<f32>;
pub type AnalyticOptions = analytic::AnalyticOptions<f64>;
pub type AnalyticOptionsF32 = analytic::AnalyticOptions<f32>;
pub type CoverageQuery = analytic::CoverageQuery<f64>;
pub type CoverageQueryF32 = analytic::CoverageQuery<f32>;
pub type GeneralLaplaceParams = model::GeneralLaplaceParams<f64>;
pub type Throughput = analytic::Throughput<f64>;
pub type QuadratureSpec = special::QuadratureSpec<f64>;
