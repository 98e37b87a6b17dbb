//! Randomized Galerkin finite element schemes for semilinear stochastic
//! heat equations on (0, 1) with additive Q-Wiener noise.
//!
//! The numerical core is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the precision used by the CLI and the experiments.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod experiment;
pub mod noise;
pub mod problem;
pub mod rng;
pub mod scalar;
pub mod scheme;
pub mod spatial;

pub use error::{Error, Result};
pub use scalar::Scalar;
pub use spatial::{Discretization, FemSpace, GridFunction, InitialCondition, SpaceKind, SpectralSpace};

pub type SpectralSpace64 = spatial::SpectralSpace<f64>;
pub type SpectralSpace32 = spatial::SpectralSpace<f32>;
pub type FemSpace64 = spatial::FemSpace<f64>;
pub type FemSpace32 = spatial::FemSpace<f32>;
pub type GridFunction64 = spatial::GridFunction<f64>;
pub type GridFunction32 = spatial::GridFunction<f32>;
pub type CovarianceSpec64 = noise::CovarianceSpec<f64>;
pub type CovarianceSpec32 = noise::CovarianceSpec<f32>;
pub type ProblemSpec64 = problem::ProblemSpec<f64>;
pub type ProblemSpec32 = problem::ProblemSpec<f32>;
pub type SchemeConfig64 = scheme::SchemeConfig<f64>;
pub type SchemeConfig32 = scheme::SchemeConfig<f32>;
