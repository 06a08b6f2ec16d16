//! Small statistics helpers for the Monte Carlo diagnostics.

use num_complex::Complex64;
use rustfft::FftPlanner;
use statrs::distribution::{ChiSquared, ContinuousCDF};

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Unbiased sample variance.
pub fn variance(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() as f64 - 1.0)
}

/// Ordinary least-squares slope of `y` on `x`.
pub fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let mx = mean(x);
    let my = mean(y);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Integrated autocorrelation time `τ = 1 + 2Σ_t ρ(t)` with Sokal's
/// self-consistent window `t ≤ 5τ`. The autocovariance is computed by FFT.
/// Constant series give `τ = 1`.
pub fn integrated_autocorr_time(x: &[f64]) -> f64 {
    let n = x.len();
    if n < 4 {
        return 1.0;
    }
    let rho = autocorrelation(x);
    if rho.is_empty() {
        return 1.0;
    }
    let mut tau = 1.0;
    for (t, r) in rho.iter().enumerate().take(n / 2).skip(1) {
        tau += 2.0 * r;
        if (t as f64) >= 5.0 * tau {
            break;
        }
    }
    tau.max(1.0)
}

/// Normalized autocorrelation `ρ(t)`, `t = 0..n`; empty for a constant series.
fn autocorrelation(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let m = mean(x);
    let size = (2 * n).next_power_of_two();
    let mut buf: Vec<Complex64> = x.iter().map(|v| Complex64::new(v - m, 0.0)).collect();
    buf.resize(size, Complex64::new(0.0, 0.0));
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(size).process(&mut buf);
    for z in &mut buf {
        *z = Complex64::new(z.norm_sqr(), 0.0);
    }
    planner.plan_fft_inverse(size).process(&mut buf);
    let c0 = buf[0].re;
    if c0 <= 0.0 {
        return Vec::new();
    }
    buf[..n].iter().map(|z| z.re / c0).collect()
}

/// `n / τ` for the series.
pub fn effective_sample_size(x: &[f64]) -> f64 {
    x.len() as f64 / integrated_autocorr_time(x)
}

/// Pearson chi-square p-value for uniformity of `counts`, with counts
/// rescaled by `scale` (e.g. `n_eff / n` for correlated samples).
pub fn chi_square_uniform_p(counts: &[u64], scale: f64) -> f64 {
    let probs = vec![1.0 / counts.len().max(1) as f64; counts.len()];
    chi_square_p(counts, &probs, scale)
}

/// Pearson chi-square p-value of `counts` against cell probabilities `probs`
/// (normalized internally), counts rescaled by `scale`.
pub fn chi_square_p(counts: &[u64], probs: &[f64], scale: f64) -> f64 {
    let k = counts.len();
    assert_eq!(k, probs.len(), "one probability per cell");
    if k < 2 {
        return 1.0;
    }
    let total: f64 = counts.iter().map(|&c| c as f64).sum::<f64>() * scale;
    let norm: f64 = probs.iter().sum();
    if total <= 0.0 || norm <= 0.0 {
        return 1.0;
    }
    let stat: f64 = counts
        .iter()
        .zip(probs)
        .map(|(&c, &p)| {
            let e = total * p / norm;
            (c as f64 * scale - e).powi(2) / e
        })
        .sum();
    let dist = ChiSquared::new((k - 1) as f64).expect("positive degrees of freedom");
    1.0 - dist.cdf(stat)
}
