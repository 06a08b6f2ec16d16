use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::geometry::{g_with, nearest_minimizer_in, proj_perp, MinimizerSet, NearestMinimizer, ProjectionVariant};
use crate::lattice::{hamiltonian, LatticeState};
use crate::linalg::Matrix;
use crate::min_energy;
use crate::spectral::catalogue;
use crate::stats::{chi_square_p, chi_square_uniform_p, integrated_autocorr_time, mean, variance};

/// Tangent covariance window: `α` then `β` components at offsets −2..=2 from k̂.
pub const TANGENT_WINDOW: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportOptions {
    /// Ambient cap radii.
    pub cap_eps: Vec<f64>,
    pub phase_bins: usize,
    /// `g_vs_h` uses samples within `g_window·√m` of `B*`.
    pub g_window: f64,
    /// Sites with `|j − k̂| ≥ far_offset` count as far sites.
    pub far_offset: i64,
    pub set: MinimizerSet,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            cap_eps: vec![0.05, 0.1, 0.2, 0.3, 0.5],
            phase_bins: 16,
            g_window: 0.2,
            far_offset: 3,
            set: MinimizerSet::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapFraction {
    pub eps: f64,
    pub fraction: f64,
}

/// Summary of `|(H − h*) − G|` over samples near `B*`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GvsH {
    pub count: usize,
    pub mean: f64,
    pub max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub n_samples: usize,
    pub m: f64,
    pub beta: f64,
    pub cap: Vec<CapFraction>,
    /// Autocorrelation time of the distance to `B*`.
    pub distance_tau: f64,
    pub site_centers: Vec<i64>,
    pub site_histogram: Vec<u64>,
    /// Largest autocorrelation time among the per-center indicator series.
    pub site_tau: f64,
    /// Uniformity p-value over all centers.
    pub site_p_value: f64,
    /// p-value against the low-temperature well weights of [`well_weights`].
    pub site_weighted_p_value: f64,
    pub phase_histogram: Vec<u64>,
    pub phase_tau: f64,
    pub phase_p_value: f64,
    /// Samples whose nearest minimizer is not unique.
    pub non_unique: usize,
    /// Covariance of `Proj⊥ b` on the window around k̂, mapped by the phase
    /// and sign symmetries into the frame of the positive `b*_k̂`; centers with
    /// `|k̂| ≤ N − 2` only.
    pub tangent_covariance: Vec<Vec<f64>>,
    pub tangent_samples: usize,
    /// Mean square of a real coordinate at the far sites, with its standard error.
    pub far_site_variance: Option<f64>,
    pub far_site_se: Option<f64>,
    pub g_vs_h: GvsH,
}

impl ConcentrationReport {
    pub fn cap_fraction(&self, eps: f64) -> Option<f64> {
        self.cap.iter().find(|c| c.eps == eps).map(|c| c.fraction)
    }

    pub fn tangent_matrix(&self) -> Matrix {
        Matrix::from_rows(&self.tangent_covariance)
    }

    /// `n / site_tau`.
    pub fn site_effective_samples(&self) -> f64 {
        self.n_samples as f64 / self.site_tau
    }
}

/// Limiting probabilities of the wells `k = −N+1..N−1` as `β → ∞`.
///
/// Each well carries the Gaussian volume `Π λ^{−1/2}` over the positive
/// eigenvalues of the shifted operator. A center next to the boundary lacks the
/// `2/11, 26/11` pair of soft modes, which has product `52/121` against
/// `(14/11)²` in the bulk, so it carries `√52/14 ≈ 0.515` of an interior weight.
pub fn well_weights(half_width: usize) -> Vec<f64> {
    let n = half_width as i64;
    let raw: Vec<f64> = (-(n - 1)..=(n - 1))
        .map(|k| {
            catalogue(half_width, k)
                .into_iter()
                .map(|q| *q.numer() as f64 / *q.denom() as f64)
                .filter(|&l| l > 0.0)
                .map(|l| l.powf(-0.5))
                .product()
        })
        .collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

pub fn concentration_report(samples: &[LatticeState], m: f64, beta: f64) -> ConcentrationReport {
    concentration_report_with(samples, m, beta, &ReportOptions::default())
}

fn indicator_tau(labels: &[usize], bins: usize) -> f64 {
    (0..bins)
        .into_par_iter()
        .map(|b| {
            let x: Vec<f64> = labels.iter().map(|&l| (l == b) as u8 as f64).collect();
            integrated_autocorr_time(&x)
        })
        .reduce(|| 1.0, f64::max)
}

/// Diagnostics of a sample sequence, read in order as a time series for the
/// autocorrelation corrections.
pub fn concentration_report_with(
    samples: &[LatticeState],
    m: f64,
    beta: f64,
    opts: &ReportOptions,
) -> ConcentrationReport {
    let n_samples = samples.len();
    let half_width = samples.first().map_or(1, |s| s.half_width());
    let n = half_width as i64;
    let nearest: Vec<Option<NearestMinimizer>> =
        samples.par_iter().map(|b| nearest_minimizer_in(b, opts.set).ok()).collect();

    let dist: Vec<f64> = nearest.iter().map(|nm| nm.as_ref().map_or(f64::INFINITY, |x| x.distance)).collect();
    let cap = opts
        .cap_eps
        .iter()
        .map(|&eps| CapFraction {
            eps,
            fraction: if n_samples == 0 {
                0.0
            } else {
                dist.iter().filter(|&&d| d <= eps).count() as f64 / n_samples as f64
            },
        })
        .collect();
    let finite: Vec<f64> = dist.iter().map(|&d| if d.is_finite() { d } else { 0.0 }).collect();
    let distance_tau = integrated_autocorr_time(&finite);

    let site_centers: Vec<i64> = (-(n - 1)..=(n - 1)).collect();
    let site_labels: Vec<usize> =
        nearest.iter().map(|nm| nm.as_ref().map_or(0, |x| (x.center + n - 1) as usize)).collect();
    let mut site_histogram = vec![0u64; site_centers.len()];
    for &l in &site_labels {
        site_histogram[l] += 1;
    }
    let site_tau = indicator_tau(&site_labels, site_centers.len());
    let site_p_value = chi_square_uniform_p(&site_histogram, 1.0 / site_tau);
    let site_weighted_p_value = chi_square_p(&site_histogram, &well_weights(half_width), 1.0 / site_tau);

    let bins = opts.phase_bins.max(1);
    let phase_labels: Vec<usize> = nearest
        .iter()
        .map(|nm| nm.as_ref().map_or(0, |x| ((x.phase / TAU * bins as f64) as usize).min(bins - 1)))
        .collect();
    let mut phase_histogram = vec![0u64; bins];
    for &l in &phase_labels {
        phase_histogram[l] += 1;
    }
    let phase_tau = indicator_tau(&phase_labels, bins);
    let phase_p_value = chi_square_uniform_p(&phase_histogram, 1.0 / phase_tau);

    let non_unique = nearest.iter().filter(|nm| nm.as_ref().is_none_or(|x| !x.unique)).count();

    // Tangent window and far-site second moments in the frame of θ̂.
    let mut windows: Vec<[f64; TANGENT_WINDOW]> = Vec::new();
    let mut far_means: Vec<f64> = Vec::new();
    for (b, nm) in samples.iter().zip(&nearest) {
        let Some(nm) = nm.as_ref().filter(|x| x.unique) else { continue };
        let rot = Complex64::from_polar(1.0, -nm.phase);
        if nm.center.abs() <= n - 2 {
            let xi = proj_perp(b, nm, ProjectionVariant::RealAndPhase);
            let mut w = [0.0; TANGENT_WINDOW];
            let sign = |off: i64| match off {
                -1 => nm.signs[0] as f64,
                1 => nm.signs[1] as f64,
                _ => 1.0,
            };
            for (i, off) in (-2..=2).enumerate() {
                let z = rot * xi.get(nm.center + off) * sign(off);
                w[i] = z.re;
                w[i + 5] = z.im;
            }
            windows.push(w);
        }
        let far: Vec<f64> = b
            .sites()
            .filter(|j| (j - nm.center).abs() >= opts.far_offset)
            .flat_map(|j| {
                let z = rot * b.get(j);
                [z.re * z.re, z.im * z.im]
            })
            .collect();
        if !far.is_empty() {
            far_means.push(mean(&far));
        }
    }
    let tangent_samples = windows.len();
    let mut cov = vec![vec![0.0; TANGENT_WINDOW]; TANGENT_WINDOW];
    if tangent_samples > 1 {
        let mu: Vec<f64> =
            (0..TANGENT_WINDOW).map(|i| windows.iter().map(|w| w[i]).sum::<f64>() / tangent_samples as f64).collect();
        for w in &windows {
            for r in 0..TANGENT_WINDOW {
                for c in 0..TANGENT_WINDOW {
                    cov[r][c] += (w[r] - mu[r]) * (w[c] - mu[c]);
                }
            }
        }
        for row in &mut cov {
            for v in row.iter_mut() {
                *v /= (tangent_samples - 1) as f64;
            }
        }
    }
    let (far_site_variance, far_site_se) = if far_means.len() > 1 {
        let tau = integrated_autocorr_time(&far_means);
        (Some(mean(&far_means)), Some((variance(&far_means) * tau / far_means.len() as f64).sqrt()))
    } else {
        (None, None)
    };

    let h_star = min_energy(m);
    let window = opts.g_window * m.sqrt();
    let gaps: Vec<f64> = samples
        .par_iter()
        .zip(&nearest)
        .filter_map(|(b, nm)| {
            let nm = nm.as_ref().filter(|x| x.unique && x.distance <= window)?;
            Some(((hamiltonian(b) - h_star) - g_with(b, nm, ProjectionVariant::Real)).abs())
        })
        .collect();
    let g_vs_h = GvsH {
        count: gaps.len(),
        mean: if gaps.is_empty() { 0.0 } else { mean(&gaps) },
        max: gaps.iter().copied().fold(0.0, f64::max),
    };

    ConcentrationReport {
        n_samples,
        m,
        beta,
        cap,
        distance_tau,
        site_centers,
        site_histogram,
        site_tau,
        site_p_value,
        site_weighted_p_value,
        phase_histogram,
        phase_tau,
        phase_p_value,
        non_unique,
        tangent_covariance: cov,
        tangent_samples,
        far_site_variance,
        far_site_se,
        g_vs_h,
    }
}

/// `(mean φ, mean φ̄)` where `φ̄(b)` averages `φ(e^{iθ}b)` over 64 equally
/// spaced phases.
pub fn phase_average_test<F>(phi: F, samples: &[LatticeState]) -> (f64, f64)
where
    F: Fn(&LatticeState) -> f64 + Sync,
{
    const ROTATIONS: usize = 64;
    let pairs: Vec<(f64, f64)> = samples
        .par_iter()
        .map(|b| {
            let avg = (0..ROTATIONS)
                .map(|r| phi(&b.scale_complex(Complex64::from_polar(1.0, TAU * r as f64 / ROTATIONS as f64))))
                .sum::<f64>()
                / ROTATIONS as f64;
            (phi(b), avg)
        })
        .collect();
    let k = pairs.len().max(1) as f64;
    (pairs.iter().map(|p| p.0).sum::<f64>() / k, pairs.iter().map(|p| p.1).sum::<f64>() / k)
}
