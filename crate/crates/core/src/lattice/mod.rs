//! State layer of the toy model.

mod energy;
mod madelung;
mod minimizer;
mod state;

pub use energy::{
    grad_h, hamiltonian, hamiltonian_amps, hessian_form, hessian_h, mass, phase_rotate, taylor_coefficients,
    HessianMatrix,
};
pub use madelung::{from_madelung, to_madelung, to_madelung_with, HydroState, ZERO_DENSITY};
pub use minimizer::{minimizer_amplitudes, minimizer_state, MinimizerId};
pub use state::LatticeState;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LatticeError {
    #[error("half width must be at least 1")]
    ZeroHalfWidth,
    #[error("expected {expected} amplitudes, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-finite amplitude at site {site}")]
    NonFinite { site: i64 },
    #[error("negative density {value} at site {site}")]
    NegativeDensity { site: i64, value: f64 },
    #[error("center {center} outside the legal range |k| <= {max}")]
    CenterOutOfRange { center: i64, max: i64 },
    #[error("mass must be positive and finite, got {0}")]
    InvalidMass(f64),
}
