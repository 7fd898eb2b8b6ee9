//! Finite-blocklength URLLC design toolkit.
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`); the aliases below
//! fix the scalar to `f64`.

pub mod battery_sim;
pub mod codec;
pub mod error;
pub mod fb_bounds;
pub mod moop;
pub mod os_decoder;
pub mod quadrature;
pub mod rng;
pub mod scalar;
pub mod tradeoff;

pub use codec::{BitMatrix, CodeParent, CodeSpec};
pub use error::{Error, Result};
pub use os_decoder::{CepEstimate, CepRun, DecoderConfig, Metric, Reprocessing};
pub use scalar::Real;

pub type NormalApprox = fb_bounds::NormalApproximation<f64>;
pub type Moments = fb_bounds::ChannelMoments<f64>;
pub type Quadrature = fb_bounds::QuadratureSpec<f64>;
pub type Db = fb_bounds::SnrDb<f64>;
pub type Linear = fb_bounds::SnrLinear<f64>;
pub type Decoding = os_decoder::Decoded<f64>;
pub type Constraints = tradeoff::ConstraintSet<f64>;
pub type Model = tradeoff::TradeoffModel<f64>;
pub type Channel = tradeoff::ConstrainedChannel<f64>;
pub type Gap = tradeoff::GapPoint<f64>;
pub type Reference = moop::ReferencePair<f64>;
pub type Point = moop::ParetoPoint<f64>;
pub type Boundary = moop::ParetoBoundary<f64>;
pub type Scalarization = moop::ScalarizationSpec<f64>;
pub type Pair = moop::TransmissionPair<f64>;
pub type RegimeInfo = moop::Regime<f64>;
pub type BatteryConfig = battery_sim::SimConfig<f64>;
pub type BatterySimulator = battery_sim::Simulator<f64>;

#[cfg(test)]
mod properties;
