//! Numerical laboratory for the finite toy model of NLS frequency cascades.
//!
//! The model lives on the lattice sites `j = -N..=N` with complex amplitudes
//! `b_j` and Dirichlet boundary `b_{-N-1} = b_{N+1} = 0`. Its energy is
//!
//! ```text
//! H(b) = Σ_j ( ½|b_j|⁴ − 2 Re( conj(b_j)² b_{j−1}² ) )
//! ```
//!
//! and the mass `M(b) = Σ_j |b_j|²` is conserved by the flow. For fixed mass
//! `m` the energy is minimized by the three-mode states
//! `(√(3m/11), √(5m/11), √(3m/11))·e^{iθ}` centred on any interior site,
//! with minimal energy `−7m²/22`.
//!
//! Modules:
//!
//! * [`lattice`]: state types, `H`, `M`, gradient, Hessian, Madelung variables,
//!   phase rotation and the three-mode minimizers.
//! * [`dynamics`]: RK4 and implicit-midpoint integration of the lattice ODE.
//! * [`stationary`]: phase-locked profiles from the tridiagonal system.
//! * [`minimization`]: in-phase energies, rearrangements, sphere-constrained
//!   minimization and a brute-force oracle.
//! * [`spectral`]: the shifted Hessian at a minimizer and its eigenstructure.
//! * [`gibbs`]: sampling the fixed-mass Gibbs measure, nearest-minimizer
//!   geometry, Gaussian reference measures and concentration diagnostics.

pub mod dynamics;
pub mod gibbs;
pub mod lattice;
pub mod linalg;
pub mod minimization;
pub mod rng;
pub mod spectral;
pub mod stationary;
pub mod stats;

pub use lattice::{
    grad_h, hamiltonian, hessian_h, mass, minimizer_state, phase_rotate, HessianMatrix, HydroState, LatticeError,
    LatticeState, MinimizerId,
};

/// Ratio `14/11` of the Lagrange multiplier `−(14/11)·m` at a minimizer.
pub const LAGRANGE_RATIO: f64 = 14.0 / 11.0;

/// Minimal energy per unit mass squared: `h*(m) = −(7/22)·m²`.
pub const MIN_ENERGY_RATIO: f64 = -7.0 / 22.0;

/// Maximal energy per unit mass squared on the mass sphere.
pub const MAX_ENERGY_RATIO: f64 = 3.0 / 4.0;

/// Minimal energy `h*(m)` on the sphere of mass `m`.
pub fn min_energy(m: f64) -> f64 {
    MIN_ENERGY_RATIO * m * m
}
