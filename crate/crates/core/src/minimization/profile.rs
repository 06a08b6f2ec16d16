use num_rational::Rational64;
use num_traits::Num;
use serde::Serialize;

use super::MinimizationError;

/// Nonnegative densities on a finite window of consecutive sites.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RhoProfile {
    rho: Vec<f64>,
    mass: f64,
}

impl RhoProfile {
    pub fn new(rho: Vec<f64>) -> Result<Self, MinimizationError> {
        if rho.is_empty() {
            return Err(MinimizationError::Empty);
        }
        if let Some(index) = rho.iter().position(|&r| !(r >= 0.0 && r.is_finite())) {
            return Err(MinimizationError::InvalidEntry { index, value: rho[index] });
        }
        let mass = rho.iter().sum();
        Ok(RhoProfile { rho, mass })
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.rho
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    /// Entry at `i`, zero outside the window.
    pub fn get(&self, i: isize) -> f64 {
        if i < 0 {
            0.0
        } else {
            self.rho.get(i as usize).copied().unwrap_or(0.0)
        }
    }

    /// Index of the first maximal entry.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &r) in self.rho.iter().enumerate() {
            if r > self.rho[best] {
                best = i;
            }
        }
        best
    }

    /// `(first, last)` indices of nonzero entries, `None` for the zero profile.
    pub fn support(&self) -> Option<(usize, usize)> {
        let first = self.rho.iter().position(|&r| r > 0.0)?;
        let last = self.rho.iter().rposition(|&r| r > 0.0)?;
        Some((first, last))
    }

    pub fn energy(&self) -> f64 {
        h_inphase(self)
    }
}

/// `Σ_j (½ρ_j² − 2ρ_jρ_{j−1})`, the energy of the in-phase state `√ρ_j`.
pub fn h_inphase(p: &RhoProfile) -> f64 {
    h_inphase_generic(p.rho())
}

/// [`h_inphase`] over any numeric type, e.g. exact rationals.
pub fn h_inphase_generic<T: Num + Copy>(rho: &[T]) -> T {
    let two = T::one() + T::one();
    let mut h = T::zero();
    for (i, &r) in rho.iter().enumerate() {
        h = h + r * r / two;
        if i > 0 {
            h = h - two * r * rho[i - 1];
        }
    }
    h
}

/// Symmetric `k`-mode candidate of unit mass as exact rationals.
pub fn k_mode_profile_exact(k: u32) -> Result<Vec<Rational64>, MinimizationError> {
    let r = |n, d| Rational64::new(n, d);
    Ok(match k {
        1 => vec![r(1, 1)],
        2 => vec![r(1, 2), r(1, 2)],
        3 => vec![r(3, 11), r(5, 11), r(3, 11)],
        4 => vec![r(1, 8), r(3, 8), r(3, 8), r(1, 8)],
        _ => return Err(MinimizationError::UnsupportedK(k)),
    })
}

/// Energy of the unit-mass `k`-mode candidate: `½, −¼, −7/22, −5/16`.
pub fn k_mode_energy_exact(k: u32) -> Result<Rational64, MinimizationError> {
    Ok(h_inphase_generic(&k_mode_profile_exact(k)?))
}

/// Candidate profile of mass `m` and its energy `m²·h_k`.
pub fn k_mode_energy(k: u32, m: f64) -> Result<(RhoProfile, f64), MinimizationError> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(MinimizationError::InvalidArgument(format!("mass must be positive, got {m}")));
    }
    let exact = k_mode_profile_exact(k)?;
    let rho = exact.iter().map(|q| m * (*q.numer() as f64) / (*q.denom() as f64)).collect();
    let p = RhoProfile::new(rho)?;
    let e = h_inphase(&p);
    Ok((p, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inphase_examples() {
        let p = RhoProfile::new(vec![3.0 / 11.0, 5.0 / 11.0, 3.0 / 11.0]).unwrap();
        assert!((h_inphase(&p) + 7.0 / 22.0).abs() < 1e-15);
        let p = RhoProfile::new(vec![0.125, 0.375, 0.375, 0.125]).unwrap();
        assert_eq!(h_inphase(&p), -5.0 / 16.0);
        assert_eq!(h_inphase(&RhoProfile::new(vec![1.0]).unwrap()), 0.5);
    }

    #[test]
    fn candidate_energies_are_exact() {
        let e: Vec<Rational64> = (1..=4).map(|k| k_mode_energy_exact(k).unwrap()).collect();
        assert_eq!(e[0], Rational64::new(1, 2));
        assert_eq!(e[1], Rational64::new(-1, 4));
        assert_eq!(e[2], Rational64::new(-7, 22));
        assert_eq!(e[3], Rational64::new(-5, 16));
        assert!(e[2] < e[3] && e[3] < e[1] && e[1] < e[0]);
        assert_eq!(k_mode_energy_exact(5), Err(MinimizationError::UnsupportedK(5)));
    }

    #[test]
    fn candidate_scaling() {
        let (p, e) = k_mode_energy(2, 1.0).unwrap();
        assert_eq!(p.rho(), &[0.5, 0.5]);
        assert_eq!(e, -0.25);
        let (_, e) = k_mode_energy(3, 2.0).unwrap();
        assert!((e + 7.0 / 22.0 * 4.0).abs() < 1e-14);
        assert_eq!(k_mode_energy(1, 1.0).unwrap().1, 0.5);
    }

    #[test]
    fn rejects_negative() {
        assert!(matches!(RhoProfile::new(vec![1.0, -0.1]), Err(MinimizationError::InvalidEntry { index: 1, .. })));
        assert_eq!(RhoProfile::new(vec![]), Err(MinimizationError::Empty));
    }
}
