//! In-phase stationary profiles.
//!
//! A state `b_j = √ρ_j e^{i(θ + ωt)}` with common phase solves the flow iff
//! `−ρ_j + 2ρ_{j−1} + 2ρ_{j+1} = ω` on its support, with zero density outside.
//! For `n` consecutive sites this is a tridiagonal system with diagonal `−1`
//! and off-diagonals `2`, which is not diagonally dominant.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::lattice::LatticeState;
use crate::linalg::{solve_dense, solve_tridiagonal, Matrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StationaryError {
    #[error("number of nodes must be at least 1")]
    NoNodes,
    #[error("tridiagonal solve failed (relative residual {0:e})")]
    SolveFailed(f64),
    #[error("profile is not strictly positive")]
    NotPositive,
    #[error("profile of {n_nodes} nodes centred at {center} does not fit in [-{half_width}, {half_width}]")]
    DoesNotFit { n_nodes: usize, center: i64, half_width: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhaseLockedProfile {
    pub n_nodes: usize,
    pub omega: f64,
    pub rho: Vec<f64>,
    pub positive: bool,
}

impl PhaseLockedProfile {
    pub fn mass(&self) -> f64 {
        self.rho.iter().sum()
    }

    pub fn min_rho(&self) -> f64 {
        self.rho.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

const RESIDUAL_TOL: f64 = 1e-10;

/// Strict positivity relative to the largest entry.
pub fn is_positive(rho: &[f64]) -> bool {
    let max = rho.iter().copied().fold(0.0f64, |a, b| a.max(b.abs()));
    max > 0.0 && rho.iter().all(|&r| r > 1e-12 * max)
}

fn residual(rho: &[f64], omega: f64) -> f64 {
    let n = rho.len();
    let get = |i: isize| if i < 0 || i as usize >= n { 0.0 } else { rho[i as usize] };
    let r: f64 = (0..n as isize).map(|i| (-get(i) + 2.0 * get(i - 1) + 2.0 * get(i + 1) - omega).powi(2)).sum();
    r.sqrt()
}

pub fn solve_phase_locked(n_nodes: usize, omega: f64) -> Result<PhaseLockedProfile, StationaryError> {
    if n_nodes == 0 {
        return Err(StationaryError::NoNodes);
    }
    let rhs_norm = omega.abs() * (n_nodes as f64).sqrt();
    let tol = RESIDUAL_TOL * rhs_norm.max(f64::MIN_POSITIVE);
    let lower: Vec<f64> = (0..n_nodes).map(|i| if i == 0 { 0.0 } else { 2.0 }).collect();
    let upper: Vec<f64> = (0..n_nodes).map(|i| if i + 1 == n_nodes { 0.0 } else { 2.0 }).collect();
    let diag = vec![-1.0; n_nodes];
    let rhs = vec![omega; n_nodes];
    let thomas = solve_tridiagonal(&lower, &diag, &upper, &rhs).filter(|x| residual(x, omega) <= tol);
    let rho = match thomas {
        Some(x) => x,
        None => {
            let a = Matrix::from_fn(n_nodes, n_nodes, |r, c| match r.abs_diff(c) {
                0 => -1.0,
                1 => 2.0,
                _ => 0.0,
            });
            let x = solve_dense(&a, &rhs).ok_or(StationaryError::SolveFailed(f64::INFINITY))?;
            let res = residual(&x, omega);
            if res > tol {
                return Err(StationaryError::SolveFailed(res / rhs_norm));
            }
            x
        }
    };
    let positive = is_positive(&rho);
    Ok(PhaseLockedProfile { n_nodes, omega, rho, positive })
}

/// Embeds `√ρ e^{iθ}` with the profile's middle node at `center`
/// (for even `n` the left-of-middle node).
pub fn profile_to_state(
    p: &PhaseLockedProfile,
    half_width: usize,
    center: i64,
    theta: f64,
) -> Result<LatticeState, StationaryError> {
    if !p.positive {
        return Err(StationaryError::NotPositive);
    }
    let start = center - ((p.n_nodes as i64 - 1) / 2);
    let end = start + p.n_nodes as i64 - 1;
    let n = half_width as i64;
    if half_width == 0 || start < -n || end > n {
        return Err(StationaryError::DoesNotFit { n_nodes: p.n_nodes, center, half_width });
    }
    let rot = Complex64::from_polar(1.0, theta);
    let sites: Vec<(i64, Complex64)> =
        p.rho.iter().enumerate().map(|(i, &r)| (start + i as i64, rot * r.sqrt())).collect();
    Ok(LatticeState::from_sites(half_width, &sites).expect("fit checked above"))
}

/// Positivity of `solve_phase_locked(n, 1)` for `n = 1..=max_nodes`.
pub fn scan_positivity(max_nodes: usize) -> Vec<(usize, bool)> {
    (1..=max_nodes).map(|n| (n, solve_phase_locked(n, 1.0).map(|p| p.positive).unwrap_or(false))).collect()
}
