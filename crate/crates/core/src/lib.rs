//! Simulation of three-qubit adiabatic quantum teleportation.
//!
//! A qubit state on qubit 1 is moved to qubit 3 by slowly handing the
//! exchange coupling over from the (2,3) pair to the (1,2) pair. This crate
//! propagates the exact dynamics, solves the XX/harmonic case in closed form
//! and scans the infidelity as a function of the run time to locate the
//! resonances where finite-speed transfer is perfect.
//!
//! Units: ħ = J = 1. Run lengths are given as x = JT/(πħ).

pub mod adiabatic_frame;
pub mod error;
pub mod hamiltonian;
pub mod model;
pub mod propagator;
pub mod scan;
pub mod spectral;

pub use error::{Error, Result};
pub use model::{Amplitudes, Coupling, Schedule, SimulationConfig};
