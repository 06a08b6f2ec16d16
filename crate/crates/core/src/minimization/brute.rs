//! Exhaustive grid search over in-phase profiles, used as an independent check
//! of the sphere optimizer.

use super::profile::h_inphase_generic;
use super::MinimizationError;

pub const BRUTE_MAX_HALF_WIDTH: usize = 3;
pub const BRUTE_MAX_GRID: usize = 40;

#[derive(Clone, Debug, PartialEq)]
pub struct BruteForceResult {
    /// Best value on the grid `ρ_j ∈ m·{0, 1/(g−1), …, 1}` with `Σρ = m`.
    pub grid_min: f64,
    pub grid_profile: Vec<f64>,
    /// After projected-gradient refinement on the simplex.
    pub refined_min: f64,
    pub refined_profile: Vec<f64>,
}

/// Refined minimum of the in-phase energy over the mass-`m` simplex on `2N+1` sites.
pub fn brute_force_min(half_width: usize, m: f64, grid: usize) -> Result<f64, MinimizationError> {
    brute_force_search(half_width, m, grid).map(|r| r.refined_min)
}

pub fn brute_force_search(half_width: usize, m: f64, grid: usize) -> Result<BruteForceResult, MinimizationError> {
    if half_width > BRUTE_MAX_HALF_WIDTH || grid > BRUTE_MAX_GRID {
        return Err(MinimizationError::BudgetExceeded {
            half_width,
            grid,
            max_n: BRUTE_MAX_HALF_WIDTH,
            max_grid: BRUTE_MAX_GRID,
        });
    }
    if half_width == 0 || grid < 2 || !(m > 0.0 && m.is_finite()) {
        return Err(MinimizationError::InvalidArgument(format!(
            "need N >= 1, grid >= 2 and m > 0 (got N = {half_width}, grid = {grid}, m = {m})"
        )));
    }
    let dim = 2 * half_width + 1;
    let total = (grid - 1) as u32;
    let unit = m / total as f64;
    let mut parts = vec![0u32; dim];
    let mut rho = vec![0.0; dim];
    let mut best = (f64::INFINITY, Vec::new());
    // Enumerate compositions of `total` into `dim` parts in lexicographic order.
    parts[dim - 1] = total;
    loop {
        for (r, &p) in rho.iter_mut().zip(&parts) {
            *r = p as f64 * unit;
        }
        let h = h_inphase_generic(&rho);
        if h < best.0 {
            best = (h, rho.clone());
        }
        if !next_composition(&mut parts) {
            break;
        }
    }
    let (grid_min, grid_profile) = best;
    let refined_profile = refine_on_simplex(&grid_profile, m);
    let refined_min = h_inphase_generic(&refined_profile).min(grid_min);
    Ok(BruteForceResult { grid_min, grid_profile, refined_min, refined_profile })
}

/// Advances `parts` to the next composition of the same total in
/// lexicographic order; `false` once the last one has been visited.
fn next_composition(parts: &mut [u32]) -> bool {
    let dim = parts.len();
    let Some(i) = (0..dim.saturating_sub(1)).rev().find(|&i| parts[i + 1..].iter().any(|&p| p > 0)) else {
        return false;
    };
    let rest: u32 = parts[i + 1..].iter().sum();
    parts[i] += 1;
    for p in &mut parts[i + 1..] {
        *p = 0;
    }
    parts[dim - 1] = rest - 1;
    true
}

/// Euclidean projection onto `{x ≥ 0, Σx = m}`.
fn project_simplex(v: &[f64], m: f64) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut tau = 0.0;
    for (i, &x) in u.iter().enumerate() {
        cum += x;
        let t = (cum - m) / (i + 1) as f64;
        if x - t > 0.0 {
            tau = t;
        }
    }
    v.iter().map(|&x| (x - tau).max(0.0)).collect()
}

fn refine_on_simplex(start: &[f64], m: f64) -> Vec<f64> {
    let step = 0.2 / m;
    let mut x = start.to_vec();
    for _ in 0..200_000 {
        let n = x.len();
        let grad: Vec<f64> = (0..n)
            .map(|j| {
                let l = if j > 0 { x[j - 1] } else { 0.0 };
                let r = if j + 1 < n { x[j + 1] } else { 0.0 };
                x[j] - 2.0 * (l + r)
            })
            .collect();
        let y: Vec<f64> = x.iter().zip(&grad).map(|(a, g)| a - step * g).collect();
        let next = project_simplex(&y, m);
        let moved = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        x = next;
        if moved <= 1e-15 * m {
            break;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_and_refined_values() {
        let r = brute_force_search(2, 1.0, 30).unwrap();
        assert!((r.grid_min + 7.0 / 22.0).abs() < 1e-3);
        assert!((r.refined_min + 7.0 / 22.0).abs() < 1e-9);
        assert!((r.refined_profile.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coarse_grid_is_an_upper_bound() {
        let v = brute_force_search(2, 1.0, 2).unwrap();
        assert!(v.grid_min >= -7.0 / 22.0);
        assert_eq!(v.grid_min, 0.5);
    }

    #[test]
    fn budget_guard() {
        assert!(matches!(brute_force_min(4, 1.0, 10), Err(MinimizationError::BudgetExceeded { .. })));
        assert!(matches!(brute_force_min(2, 1.0, 41), Err(MinimizationError::BudgetExceeded { .. })));
    }

    #[test]
    fn composition_count() {
        // Compositions of 2 into 3 parts: C(4, 2) = 6; of 29 into 5 parts: C(33, 4).
        for (total, dim, expected) in [(2u32, 3usize, 6usize), (29, 5, 40920)] {
            let mut parts = vec![0u32; dim];
            parts[dim - 1] = total;
            let mut seen = 1;
            while next_composition(&mut parts) {
                assert_eq!(parts.iter().sum::<u32>(), total);
                seen += 1;
            }
            assert_eq!(seen, expected);
        }
    }
}
