//! The fixed-mass Gibbs measure `∝ e^{−βH}` on `S(m)`: nearest-minimizer
//! geometry, Metropolis and replica-exchange sampling, Gaussian reference
//! draws and concentration diagnostics.

mod geometry;
mod reference;
mod report;
mod sampler;

pub use geometry::{
    cap_gfunc, cap_point, exp_map, g_intrinsic, g_k_value, g_value, g_with, log_map, nearest_minimizer,
    nearest_minimizer_in, nearest_on_circle, proj_perp, random_cap_direction, signed_minimizer_state, MinimizerSet,
    NearestMinimizer, ProjectionVariant, SIGN_PATTERNS,
};
pub use reference::{
    gaussian_reference_sample, gaussian_reference_sample_with, reference_beta_threshold, sphere_uniform, ReferenceDraw,
    ReferenceLift,
};
pub use report::{
    concentration_report, concentration_report_with, phase_average_test, well_weights, CapFraction,
    ConcentrationReport, GvsH, ReportOptions, TANGENT_WINDOW,
};
pub use sampler::{
    mcmc_run, metropolis_accept_prob, swap_accept_prob, tempering_run, ChainResult, SamplerConfig, TemperingConfig,
    TemperingResult,
};

use thiserror::Error;

use crate::lattice::LatticeError;
use crate::spectral::SpectralError;

#[derive(Debug, Error)]
pub enum GibbsError {
    #[error("state has zero mass")]
    ZeroMass,
    #[error("nearest minimizer is not unique (centers {first} and {second} tie)")]
    NonUniqueNearest { first: i64, second: i64 },
    #[error("points are antipodal; the log map is undefined")]
    Antipodal,
    #[error("points lie on different spheres (masses {0} and {1})")]
    MassMismatch(f64, f64),
    #[error("beta = {beta} is below the validity threshold {min} of the Gaussian reference")]
    ValidityGuard { beta: f64, min: f64 },
    #[error("invalid sampler configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}
