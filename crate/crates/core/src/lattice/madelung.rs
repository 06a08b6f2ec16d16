use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{LatticeError, LatticeState};

/// Densities below this are treated as zero and get phase 0.
pub const ZERO_DENSITY: f64 = 1e-300;

/// Madelung variables `b_j = √ρ_j e^{iθ_j}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HydroState {
    pub half_width: usize,
    pub rho: Vec<f64>,
    pub theta: Vec<f64>,
}

impl HydroState {
    pub fn rho_at(&self, site: i64) -> f64 {
        self.index_of(site).map_or(0.0, |i| self.rho[i])
    }

    pub fn theta_at(&self, site: i64) -> f64 {
        self.index_of(site).map_or(0.0, |i| self.theta[i])
    }

    pub fn index_of(&self, site: i64) -> Option<usize> {
        let i = site + self.half_width as i64;
        (0..self.rho.len() as i64).contains(&i).then_some(i as usize)
    }
}

pub fn to_madelung(state: &LatticeState) -> HydroState {
    to_madelung_with(state, ZERO_DENSITY)
}

/// As [`to_madelung`] with a custom zero-density threshold.
pub fn to_madelung_with(state: &LatticeState, zero_density: f64) -> HydroState {
    let mut rho = Vec::with_capacity(state.len());
    let mut theta = Vec::with_capacity(state.len());
    for z in state.amps() {
        let r = z.norm_sqr();
        rho.push(r);
        theta.push(if r < zero_density { 0.0 } else { z.arg().rem_euclid(TAU) });
    }
    HydroState { half_width: state.half_width(), rho, theta }
}

pub fn from_madelung(h: &HydroState) -> Result<LatticeState, LatticeError> {
    if h.rho.len() != h.theta.len() {
        return Err(LatticeError::LengthMismatch { expected: h.rho.len(), got: h.theta.len() });
    }
    if let Some(i) = h.rho.iter().position(|&r| r < 0.0 || r.is_nan()) {
        return Err(LatticeError::NegativeDensity { site: i as i64 - h.half_width as i64, value: h.rho[i] });
    }
    let amps = h.rho.iter().zip(&h.theta).map(|(&r, &t)| Complex64::from_polar(r.sqrt(), t)).collect();
    LatticeState::new(h.half_width, amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{minimizer_state, MinimizerId};

    #[test]
    fn imaginary_unit() {
        let s = LatticeState::from_sites(1, &[(0, Complex64::new(0.0, 1.0))]).unwrap();
        let h = to_madelung(&s);
        assert_eq!(h.rho_at(0), 1.0);
        assert!((h.theta_at(0) - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert_eq!(h.theta_at(1), 0.0);
    }

    #[test]
    fn minimizer_densities() {
        let h = to_madelung(&minimizer_state(&MinimizerId::new(1.0, 0, 0.0), 3).unwrap());
        let expected = [0.0, 0.0, 3.0 / 11.0, 5.0 / 11.0, 3.0 / 11.0, 0.0, 0.0];
        for (r, e) in h.rho.iter().zip(expected) {
            assert!((r - e).abs() < 1e-15);
        }
        assert!(h.theta.iter().all(|&t| t == 0.0));
    }

    #[test]
    fn rejects_negative_density() {
        let h = HydroState { half_width: 1, rho: vec![0.0, -1.0, 0.0], theta: vec![0.0; 3] };
        assert!(matches!(from_madelung(&h), Err(LatticeError::NegativeDensity { site: 0, .. })));
    }
}
