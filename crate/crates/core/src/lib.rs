//! Secrecy-rate maximization for a jammer-assisted vehicle-to-infrastructure
//! link with fully analog (constant-amplitude) beamformers.
//!
//! The crate is organized bottom-up:
//!
//! - [`channel`] draws clustered geometric MIMO channels.
//! - [`metrics`] evaluates SINRs, capacities, the secrecy capacity and the
//!   singular-value diagnostic bound.
//! - [`gradients`] holds the closed-form conjugate gradients together with a
//!   finite-difference oracle.
//! - [`optimizer`] runs projected gradient ascent at fixed or adaptive
//!   source power.
//! - [`config`] and [`experiment`] drive seeded Monte Carlo campaigns.

pub mod channel;
pub mod config;
pub mod error;
pub mod experiment;
pub mod gradients;
pub mod metrics;
pub mod optimizer;

pub use error::{Error, Result};

/// Complex column vector used for every beamformer and gradient.
pub type CVector = nalgebra::DVector<num_complex::Complex64>;
/// Complex matrix used for channels.
pub type CMatrix = nalgebra::DMatrix<num_complex::Complex64>;

/// Converts a power in dB to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a linear power to dB.
pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}
