//! Availability and coverage analysis of UAV-assisted cellular networks
//! whose drones must periodically fly to the nearest charging station.
//!
//! Hotspot users follow a Matérn cluster process with a UAV hovering above
//! each cluster centre; terrestrial base stations and charging stations are
//! independent Poisson point processes. The crate provides the closed-form
//! availability and SNR-coverage expressions ([`availability`],
//! [`coverage`]), the rotor energy model behind them ([`energy`]), and an
//! independent Monte Carlo simulator ([`montecarlo`]) used to check them.

pub mod availability;
pub mod config;
pub mod coverage;
pub mod energy;
pub mod error;
pub mod montecarlo;
pub mod numerics;
pub mod params;
pub mod sweep;

pub use error::{Error, Result};
pub use params::{ChannelParams, CruiseVelocity, EnergyParams, NetworkParams, RotorParams, SystemParams};
