//! Ternary stochastic geometry for RIS-assisted ultra-dense networks.
//!
//! Two engines evaluate the same downlink model: a Monte Carlo simulator
//! ([`montecarlo`]) that samples BSs, RISs and UEs and computes the SINR of a
//! typical user, and a numerical engine ([`analytic`]) for the corresponding
//! integral expressions. [`harness`] sweeps both and compares them.

pub mod analytic;
pub mod channel;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod montecarlo;
pub mod ppp;
pub mod rng;
pub mod scenario;
pub mod stats;

pub use error::{Error, Result};
