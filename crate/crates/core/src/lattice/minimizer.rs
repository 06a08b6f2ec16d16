use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{LatticeError, LatticeState};

/// Label of the three-mode minimizer `e^{iθ} b*_k` at mass `m`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinimizerId {
    pub mass: f64,
    pub center: i64,
    pub phase: f64,
}

impl MinimizerId {
    pub fn new(mass: f64, center: i64, phase: f64) -> Self {
        MinimizerId { mass, center, phase }
    }
}

/// Real amplitudes `(√(3m/11), √(5m/11), √(3m/11))` on `k−1, k, k+1`.
pub fn minimizer_amplitudes(m: f64) -> [f64; 3] {
    let side = (3.0 * m / 11.0).sqrt();
    [side, (5.0 * m / 11.0).sqrt(), side]
}

pub fn minimizer_state(id: &MinimizerId, half_width: usize) -> Result<LatticeState, LatticeError> {
    if half_width == 0 {
        return Err(LatticeError::ZeroHalfWidth);
    }
    if !(id.mass > 0.0 && id.mass.is_finite()) {
        return Err(LatticeError::InvalidMass(id.mass));
    }
    let max = half_width as i64 - 1;
    if id.center.abs() > max {
        return Err(LatticeError::CenterOutOfRange { center: id.center, max });
    }
    let rot = Complex64::from_polar(1.0, id.phase);
    let a = minimizer_amplitudes(id.mass);
    LatticeState::from_sites(
        half_width,
        &[(id.center - 1, rot * a[0]), (id.center, rot * a[1]), (id.center + 1, rot * a[2])],
    )
}
