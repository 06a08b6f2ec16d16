//! Energy minimization on the mass sphere and in the in-phase variables.

mod brute;
mod profile;
mod rearrange;
mod sphere;

pub use brute::{brute_force_min, brute_force_search, BruteForceResult, BRUTE_MAX_GRID, BRUTE_MAX_HALF_WIDTH};
pub use profile::{h_inphase, h_inphase_generic, k_mode_energy, k_mode_energy_exact, k_mode_profile_exact, RhoProfile};
pub use rearrange::{
    check_5over3, check_5over3_at, five_mode_reduction, is_unimodal, monotone_sweep, organ_pipe,
    rearrange_nonincreasing,
};
pub use sphere::{
    maximize_h_on_sphere, minimize_h_on_sphere, optimize_on_sphere, random_sphere_state, MinimizeResult, Sense,
    SphereOptions,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MinimizationError {
    #[error("profile is empty")]
    Empty,
    #[error("profile entry {index} is negative or not finite ({value})")]
    InvalidEntry { index: usize, value: f64 },
    #[error("k-mode candidate only tabulated for k in 1..=4, got {0}")]
    UnsupportedK(u32),
    #[error("support of length {len} is too small for the five-mode reduction (need at least 6)")]
    SupportTooSmall { len: usize },
    #[error("profile is not non-increasing away from its maximum")]
    NotUnimodal,
    #[error("brute force budget exceeded: N = {half_width} (max {max_n}), grid = {grid} (max {max_grid})")]
    BudgetExceeded { half_width: usize, grid: usize, max_n: usize, max_grid: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
