use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::geometry::SIGN_PATTERNS;
use super::GibbsError;
use crate::lattice::{minimizer_state, LatticeState, MinimizerId};
use crate::linalg::symmetric_eigen;
use crate::rng::stream_rng;
use crate::spectral::shifted_operator;

/// `count` i.i.d. uniform points on `S(m)`.
pub fn sphere_uniform(half_width: usize, m: f64, count: usize, seed: u64) -> Vec<LatticeState> {
    (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            loop {
                let amps: Vec<Complex64> = (0..2 * half_width + 1)
                    .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                    .collect();
                let s = LatticeState::new(half_width, amps).expect("finite normals");
                if s.norm_sqr() > 0.0 {
                    return s.normalized_to(m);
                }
            }
        })
        .collect()
}

/// How a tangent Gaussian `η` at `b*` is placed on the sphere.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReferenceLift {
    /// `√(m − |η|²)·b*/√m + η`: the projection of the draw away from `b*` is
    /// exactly `η`, so the Gaussian law of the fluctuation is preserved.
    #[default]
    Orthogonal,
    /// `(b* + η)·√m/|b* + η|`, which shrinks `η` by `(1 + |η|²/m)^{−1/2}`.
    Normalize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceDraw {
    pub state: LatticeState,
    pub center: i64,
    pub phase: f64,
    pub signs: [i8; 2],
}

/// Smallest admissible `β` for the Gaussian reference at mass `m`: the
/// fluctuation scale `√(11/(2βm))` must stay below `0.1·√m`.
pub fn reference_beta_threshold(m: f64) -> f64 {
    550.0 / (m * m)
}

pub fn gaussian_reference_sample(
    half_width: usize,
    m: f64,
    beta: f64,
    count: usize,
    seed: u64,
) -> Result<Vec<ReferenceDraw>, GibbsError> {
    gaussian_reference_sample_with(half_width, m, beta, count, seed, ReferenceLift::default())
}

/// Draws `k` uniformly among the interior centers, a sign pattern of the
/// outer modes uniformly, `θ` uniformly, and a tangent Gaussian with covariance `β⁻¹A⁺` where `A⁺` inverts the shifted
/// operator on its positive eigenspace.
pub fn gaussian_reference_sample_with(
    half_width: usize,
    m: f64,
    beta: f64,
    count: usize,
    seed: u64,
    lift: ReferenceLift,
) -> Result<Vec<ReferenceDraw>, GibbsError> {
    let min = reference_beta_threshold(m);
    if m.is_nan() || m <= 0.0 || beta.is_nan() || beta <= min {
        return Err(GibbsError::ValidityGuard { beta, min });
    }
    let n = half_width as i64;
    let centers: Vec<i64> = (-(n - 1)..=(n - 1)).collect();
    // Per center: the real b*_k and the scaled positive eigenvectors v/√(βλ).
    let mut modes = Vec::with_capacity(centers.len());
    for &k in &centers {
        let a = shifted_operator(half_width, m, k, 0.0)?;
        let e = symmetric_eigen(a.matrix(), 1e-10).map_err(crate::spectral::SpectralError::from)?;
        let cols: Vec<Vec<f64>> = (0..e.values.len())
            .filter(|&i| e.values[i] > 1e-9 * m)
            .map(|i| e.vector(i).into_iter().map(|x| x / (beta * e.values[i]).sqrt()).collect())
            .collect();
        modes.push((minimizer_state(&MinimizerId::new(m, k, 0.0), half_width)?, cols));
    }
    let dim = 4 * half_width + 2;
    let draws = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let ci = rng.random_range(0..centers.len());
            let signs = SIGN_PATTERNS[rng.random_range(0..SIGN_PATTERNS.len())];
            let phase = rng.random_range(0.0..TAU);
            let (bstar, cols) = &modes[ci];
            loop {
                let mut eta = vec![0.0; dim];
                for col in cols {
                    let z: f64 = rng.sample(StandardNormal);
                    for (e, c) in eta.iter_mut().zip(col) {
                        *e += z * c;
                    }
                }
                let eta = LatticeState::from_real(half_width, &eta).expect("finite draw");
                let e2 = eta.norm_sqr();
                let b = match lift {
                    ReferenceLift::Orthogonal => {
                        if e2 >= m {
                            continue;
                        }
                        bstar.scale(((m - e2) / m).sqrt()).add(&eta)
                    }
                    ReferenceLift::Normalize => bstar.add(&eta).normalized_to(m),
                };
                // Site sign flips are symmetries of H, so flipping the draw
                // gives the Gaussian about the flipped minimizer.
                let c = centers[ci] + n;
                let rot = Complex64::from_polar(1.0, phase);
                let mut amps = b.into_amps();
                for (j, z) in amps.iter_mut().enumerate() {
                    let s = match j as i64 - c {
                        -1 => signs[0] as f64,
                        1 => signs[1] as f64,
                        _ => 1.0,
                    };
                    *z *= rot * s;
                }
                let state = LatticeState::new(half_width, amps).expect("finite draw");
                return ReferenceDraw { state, center: centers[ci], phase, signs };
            }
        })
        .collect();
    Ok(draws)
}
