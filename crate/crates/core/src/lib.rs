//! Coverage, spectral efficiency and rate of two-tier (low-band + mmWave)
//! UAV downlink networks under biased cell association, computed two ways:
//! numerically integrated closed forms and Monte Carlo simulation.

pub mod analysis;
pub mod antenna;
pub mod association;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod params;
pub mod quadrature;
pub mod simulator;
pub mod validation;

pub use error::{Error, Result};
