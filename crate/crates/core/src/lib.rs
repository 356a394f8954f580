//! Acquisition-time model for lidar-assisted FSO terminal acquisition.
//!
//! A ground station splits a fixed energy budget between a lidar, which
//! locates the UAV, and a pulsed FSO beam fired at the lidar estimate. The
//! crate computes how long acquisition takes as a function of that split
//! (`alpha`) and of the pulse budget per attempt (`N₀`), checks the analytic
//! answer with a Monte Carlo simulator, and optimizes both knobs.
//!
//! The analytic modules are generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix `f64`, which is what the simulator and optimizer use.

// `!(x > 0)` is used deliberately so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acqstats;
pub mod error;
pub mod estimation;
pub mod linkbudget;
pub mod model;
pub mod optimizer;
pub mod scalar;
pub mod simulator;
pub mod specfun;

pub use error::{Error, Result};
pub use model::{EnergyModel, HoytShape, NormalizationMode, SphereShape};
pub use scalar::Scalar;

/// System parameters in `f64`.
pub type Params = model::SystemParams<f64>;
/// Link budget in `f64`.
pub type LinkBudget = linkbudget::LinkBudget<f64>;
/// Uncertainty region in `f64`.
pub type UncertaintySphere = estimation::UncertaintySphere<f64>;
/// Pulse and attempt probabilities in `f64`.
pub type AcqProbabilities = acqstats::AcqProbabilities<f64>;
/// Acquisition-time model in `f64`.
pub type AcqTimeModel = acqstats::AcqTimeModel<f64>;
/// Hoyt parameters in `f64`.
pub type HoytParams = acqstats::HoytParams<f64>;
/// Quadrature stopping rule in `f64`.
pub type QuadratureSpec = specfun::QuadratureSpec<f64>;
