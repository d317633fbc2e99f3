//! Simulation and synchronization analysis for finite lattices of
//! asynchronously clocked, coupled dynamical subsystems.
//!
//! - [`dynamics`]: node models, the coupled lattice, flows, permutation and
//!   time-shift actions, Koopman evaluation.
//! - [`metric`]: windowed phase distance, the asynchronous metric and
//!   distances to the synchronous diagonal.
//! - [`synchrony`]: partitions, balanced colourings, group orbits and
//!   polydiagonal invariance checks.
//! - [`transition`]: order parameter, drift, contraction factor,
//!   stroboscopic fixed points, transverse multipliers, sweeps and threshold
//!   bisection.

pub mod dynamics;
mod error;
pub mod metric;
pub mod optimize;
pub mod synchrony;
pub mod transition;

pub use error::{Error, Result};
