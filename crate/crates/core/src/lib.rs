//! Secure computation offloading for blockchain-recorded IoT sensors.
//!
//! * [`channel`]: IRS-assisted Rayleigh uplink, optimal phase alignment and
//!   instantaneous capacities.
//! * [`analytics`]: Gamma moment-matched closed-form ergodic secrecy rates and
//!   their Monte Carlo counterparts.
//! * [`offload`]: energy model, Gas-oriented grouping with Kuhn–Munkres
//!   matching, ECM and bidding baselines.
//! * [`ledger`]: hash-chained record of publish-task and record-result contracts.
//! * [`harness`]: scenarios, experiment runners and CSV output.
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`); the `*64` aliases
//! below fix it to `f64`, which is what the harness uses.

pub mod analytics;
pub mod channel;
mod error;
pub mod harness;
pub mod ledger;
pub mod offload;
mod scalar;

pub use error::{Error, Result};
pub use scalar::{dbm_to_watts, ln_gamma, wrap_angle, Real};

pub type ChannelRealization64 = channel::ChannelRealization<f64>;
pub type PhaseShift64 = channel::PhaseShift<f64>;
pub type LinkGeometry64 = channel::LinkGeometry<f64>;
pub type LinkBudget64 = channel::LinkBudget<f64>;
pub type GammaApprox64 = analytics::GammaApprox<f64>;
pub type RateEstimate64 = analytics::RateEstimate<f64>;
pub type SensorProfile64 = offload::SensorProfile<f64>;
pub type MecProfile64 = offload::MecProfile<f64>;

pub type ChannelRealization32 = channel::ChannelRealization<f32>;
pub type LinkBudget32 = channel::LinkBudget<f32>;
pub type GammaApprox32 = analytics::GammaApprox<f32>;
pub type SensorProfile32 = offload::SensorProfile<f32>;
pub type MecProfile32 = offload::MecProfile<f32>;
