//! Link model and optimizer for a two-phase terahertz integrated sensing,
//! communications and powering (ISCAP) link.
//!
//! Phase 1 spends `rho0 * T` seconds sensing the reflected signal to shrink
//! beam misalignment. Phase 2 uses the remaining `(1 - rho0) * T` seconds for
//! simultaneous information and power transfer, with a power splitter sending
//! `rho1` of the received power to the rectifier and `1 - rho1` to the decoder.
//!
//! The crate is organised bottom-up:
//!
//! * [`propagation`]: aperture gain, near/far-field regions, path loss,
//!   Gaussian beam geometry, misalignment and Rician fading.
//! * [`absorption`]: molecular absorption coefficient and Beer-Lambert loss.
//! * [`harvest`]: RF-to-DC conversion models.
//! * [`link`]: received/reflected power, harvested energy, achievable rate and
//!   their partial derivatives.
//! * [`optimizer`]: constrained maximization of energy or rate over
//!   `(rho0, rho1)`, plus an exhaustive grid oracle.

// `!(x > y)` is used on purpose in validation so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod absorption;
mod error;
pub mod harvest;
pub mod link;
pub mod optimizer;
pub mod propagation;

#[cfg(test)]
mod solver_properties;

pub use absorption::{AbsorptionProvider, Atmosphere, LineModel, TableProvider};
pub use error::{Error, Result};
pub use harvest::EnergyHarvestModel;
pub use link::{AllocationPoint, BandPolicy, ChannelSnapshot, HarvestPlacement, SystemParams};
pub use optimizer::{FeasibleInterval, OptimizationOutcome, Problem, SolverConfig, SolverStatus};
pub use propagation::{AntennaSpec, FadingMode, FadingModel, RegionClass};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Wavelength in metres for a carrier frequency in hertz.
pub fn wavelength(frequency_hz: f64) -> f64 {
    SPEED_OF_LIGHT / frequency_hz
}

/// Converts a power level in dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}
