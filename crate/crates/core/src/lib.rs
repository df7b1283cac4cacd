//! Semi-grant-free NOMA uplink engine.
//!
//! One grant-based user owns the resource block; `M` grant-free users
//! contend for opportunistic admission under three policies (two
//! benchmarks and a hybrid threshold scheme), all over unit-mean
//! Rayleigh fading. The crate provides the per-realization scheme
//! logic, deterministic parallel Monte Carlo estimators, and
//! closed-form outage analytics with an independent quadrature oracle,
//! so every headline number can be computed three ways.

pub mod analytic;
pub mod channel;
mod dd;
pub mod error;
pub mod montecarlo;
pub mod params;
pub mod quadrature;
pub mod scheme;

pub use channel::{resample, sample_channels, ChannelRealization};
pub use error::{Error, MAX_EXACT_USERS};
pub use params::{derive_constants, DerivedConstants, SystemParams};
pub use scheme::{
    classify_groups, run, run_oma_baseline, run_proposed, run_scheme_i, run_scheme_ii,
    threshold_tau, GroupingOutcome, Scheme, SicStage, TransmissionOutcome,
};
