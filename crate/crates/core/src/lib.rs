//! Exact simulation of the driven Caldeira–Leggett model with a finite
//! harmonic bath.
//!
//! The total state stays Gaussian, so everything follows from the
//! closed-form evolution of first moments and covariances: entropy
//! production under competing definitions, its split into system–bath
//! correlations, intra-bath correlations and bath displacement, and
//! system–bath entanglement.

pub mod bath;
pub mod drive;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod gaussian;
pub mod linalg;
pub mod normal_modes;
pub mod quadrature;
pub mod state;
pub mod thermo;

pub use bath::{
    build_couplings, drive_force, drive_force_derivative, hamiltonian_position_block, initial_state,
    CouplingSet, DrivePulse, ModelSpec,
};
pub use dynamics::{Dynamics, ModeMoments, Observables, Sample, Trajectory};
pub use error::{Error, Result};
pub use normal_modes::{diagonalize, evolve, propagator_at, recurrence_time, NormalModeBasis, Propagator};
pub use state::{GaussianState, ModeSelection};
pub use thermo::{SystemFrequency, SystemHamiltonianSpec, ThermoRecord};
