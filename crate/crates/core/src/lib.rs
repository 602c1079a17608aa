//! Steady-state spectroscopy of driven three-level atoms with finite laser
//! linewidth.
//!
//! [`obe`] solves the optical Bloch equations numerically and serves as the
//! reference for the closed forms in [`analytic`] and [`models`]. [`discrim`]
//! builds state-discrimination ratios on top of them and [`cooling`] computes
//! sideband cooling rates of a trapped atom driven in the same scheme.

pub mod analytic;
pub mod cooling;
pub mod discrim;
pub mod figures;
pub mod models;
pub mod numerics;
pub mod obe;
pub mod params;
pub mod validation;

pub use params::{AtomParams, CoherenceMode, CoherenceModel, ConfigError, LaserDrive, SystemConfig, Topology, ValidatedConfig};
