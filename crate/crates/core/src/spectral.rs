//! The shifted Hessian `(14/11)·m·I + ∇²H(e^{iθ} b*_k)` and its spectrum.
//!
//! In units of `m` the eigenvalues are `−28/11` (along `b*`), `0` (along
//! `i b*`), `2/11` and `26/11` for each of the two sites at distance 2 from
//! the centre, `12/11, 40/11, 60/11, 8` on the three central sites, and the
//! bulk value `14/11` on every remaining real coordinate. When the centre sits
//! next to the boundary one of the distance-2 sites is missing, so its pair
//! `2/11, 26/11` is absent and the bulk multiplicity grows by two.

use num_complex::Complex64;
use num_rational::Rational64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use thiserror::Error;

use crate::lattice::{hessian_h, minimizer_state, HessianMatrix, LatticeError, LatticeState, MinimizerId};
use crate::linalg::{norm, symmetric_eigen, EigenError, Matrix};
use crate::rng::stream_rng;
use crate::LAGRANGE_RATIO;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("matrix is not symmetric (asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("eigen iteration failed: {0}")]
    IterationFailure(String),
    #[error("eigenpair residual {0:e} above tolerance")]
    ResidualTooLarge(f64),
}

impl From<EigenError> for SpectralError {
    fn from(e: EigenError) -> Self {
        match e {
            EigenError::NotSymmetric(a) => SpectralError::NotSymmetric(a),
            other => SpectralError::IterationFailure(other.to_string()),
        }
    }
}

/// Label of an eigenvalue relative to the catalogue, in units of `m`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EigenLabel {
    Negative,
    Null,
    Bulk,
    Discrete { numer: i64, denom: i64 },
    Unmatched,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralReport {
    pub shift: f64,
    pub eigenvalues: Vec<f64>,
    #[serde(skip)]
    pub eigenvectors: Matrix,
    pub classification: Vec<EigenLabel>,
    pub residuals: Vec<f64>,
    /// Whether the eigenvalue multiset matches the catalogue; `None` when the
    /// report was produced without a reference minimizer.
    pub catalogue_match: Option<bool>,
}

impl SpectralReport {
    pub fn residual_max(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn eigenvector(&self, i: usize) -> Vec<f64> {
        self.eigenvectors.column(i)
    }
}

pub fn shifted_operator(half_width: usize, m: f64, k: i64, theta: f64) -> Result<HessianMatrix, SpectralError> {
    let b = minimizer_state(&MinimizerId::new(m, k, theta), half_width)?;
    let h = hessian_h(&b);
    Ok(HessianMatrix::from_matrix(half_width, h.matrix().add_scaled_identity(LAGRANGE_RATIO * m)))
}

/// Full eigendecomposition with residuals `‖Av − λv‖`; the symmetric part
/// `(A + Aᵀ)/2` is decomposed after checking asymmetry ≤ 1e−10.
pub fn eigen_decompose(a: &HessianMatrix) -> Result<SpectralReport, SpectralError> {
    let mat = a.matrix();
    let e = symmetric_eigen(mat, 1e-10)?;
    let residuals: Vec<f64> = (0..e.values.len())
        .map(|i| {
            let v = e.vector(i);
            let av = mat.mul_vec(&v);
            let r: Vec<f64> = av.iter().zip(&v).map(|(x, y)| x - e.values[i] * y).collect();
            norm(&r)
        })
        .collect();
    let scale = 1.0 + e.values.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    let worst = residuals.iter().copied().fold(0.0, f64::max);
    if worst > 1e-10 * scale {
        return Err(SpectralError::ResidualTooLarge(worst));
    }
    Ok(SpectralReport {
        shift: 0.0,
        classification: vec![EigenLabel::Unmatched; e.values.len()],
        eigenvalues: e.values,
        eigenvectors: e.vectors,
        residuals,
        catalogue_match: None,
    })
}

/// Expected eigenvalues divided by `m`, sorted, as exact rationals.
pub fn catalogue(half_width: usize, k: i64) -> Vec<Rational64> {
    let r = Rational64::new;
    let n = half_width as i64;
    let mut out = vec![r(-28, 11), r(0, 1), r(12, 11), r(40, 11), r(60, 11), r(8, 1)];
    let far = [k - 2, k + 2].iter().filter(|s| s.abs() <= n).count();
    for _ in 0..far {
        out.push(r(2, 11));
        out.push(r(26, 11));
    }
    let bulk = 4 * half_width + 2 - out.len();
    out.extend(std::iter::repeat_n(r(14, 11), bulk));
    out.sort();
    out
}

fn label_for(q: Rational64) -> EigenLabel {
    if q == Rational64::new(-28, 11) {
        EigenLabel::Negative
    } else if q == Rational64::from_integer(0) {
        EigenLabel::Null
    } else if q == Rational64::new(14, 11) {
        EigenLabel::Bulk
    } else {
        EigenLabel::Discrete { numer: *q.numer(), denom: *q.denom() }
    }
}

fn to_f64(q: Rational64) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

/// Eigendecomposition of the shifted operator with each eigenvalue labelled
/// against the catalogue (tolerance `1e−9·m`).
pub fn spectral_report(half_width: usize, m: f64, k: i64, theta: f64) -> Result<SpectralReport, SpectralError> {
    let a = shifted_operator(half_width, m, k, theta)?;
    let mut rep = eigen_decompose(&a)?;
    rep.shift = LAGRANGE_RATIO * m;
    let cat = catalogue(half_width, k);
    let tol = 1e-9 * m;
    rep.classification = rep
        .eigenvalues
        .iter()
        .map(|&v| {
            cat.iter().find(|&&q| (m * to_f64(q) - v).abs() <= tol).map_or(EigenLabel::Unmatched, |&q| label_for(q))
        })
        .collect();
    // Both lists are sorted, so multiplicities agree iff they match pairwise.
    let matched = cat.len() == rep.eigenvalues.len()
        && cat.iter().zip(&rep.eigenvalues).all(|(&q, &v)| (m * to_f64(q) - v).abs() <= tol);
    rep.catalogue_match = Some(matched);
    Ok(rep)
}

/// Catalogue eigenvectors at `e^{iθ} b*_k` with their eigenvalues over `m`.
pub fn catalogue_eigenvectors(
    half_width: usize,
    m: f64,
    k: i64,
    theta: f64,
) -> Result<Vec<(LatticeState, Rational64)>, SpectralError> {
    let r = Rational64::new;
    let b = minimizer_state(&MinimizerId::new(m, k, theta), half_width)?;
    let rot = Complex64::from_polar(1.0, theta);
    let i = Complex64::i();
    let n = half_width as i64;
    let vec_of = |entries: &[(i64, f64)], phase: Complex64| {
        let sites: Vec<(i64, Complex64)> = entries.iter().map(|&(s, a)| (k + s, rot * phase * a)).collect();
        LatticeState::from_sites(half_width, &sites).expect("sites checked by caller")
    };
    let one = Complex64::new(1.0, 0.0);
    let c = (5.0f64 / 3.0).sqrt();
    let mut out = vec![
        (b.clone(), r(-28, 11)),
        (b.scale_complex(i), r(0, 1)),
        (vec_of(&[(1, 1.0), (-1, -1.0)], one), r(12, 11)),
        (vec_of(&[(1, 1.0), (-1, -1.0)], i), r(40, 11)),
        (vec_of(&[(1, c), (-1, c), (0, -2.0)], one), r(60, 11)),
        (vec_of(&[(1, c), (-1, c), (0, -2.0)], i), r(8, 1)),
    ];
    for s in [-2, 2] {
        if (k + s).abs() <= n {
            out.push((vec_of(&[(s, 1.0)], one), r(2, 11)));
            out.push((vec_of(&[(s, 1.0)], i), r(26, 11)));
        }
    }
    Ok(out)
}

/// Outcome of [`coercivity_check`]; `witness` holds a violating direction.
#[derive(Clone, Debug)]
pub struct CoercivityOutcome {
    pub passed: bool,
    /// Smallest observed `⟨Aξ, ξ⟩ / |ξ|²` divided by `m`.
    pub min_ratio: f64,
    pub witness: Option<LatticeState>,
}

/// Removes the components along `b` and `i b`.
pub fn project_out_minimizer_directions(xi: &LatticeState, b: &LatticeState) -> LatticeState {
    let bb = b.norm_sqr();
    let ib = b.scale_complex(Complex64::i());
    xi.axpy(-xi.inner(b) / bb, b).axpy(-xi.inner(&ib) / bb, &ib)
}

/// Random-direction test of `⟨Aξ, ξ⟩ ≥ (2m/11)|ξ|² − 1e−10` on the
/// complement of `b*` and `i b*`.
pub fn coercivity_check(
    half_width: usize,
    m: f64,
    k: i64,
    theta: f64,
    trials: usize,
    seed: u64,
) -> Result<CoercivityOutcome, SpectralError> {
    let a = shifted_operator(half_width, m, k, theta)?;
    let b = minimizer_state(&MinimizerId::new(m, k, theta), half_width)?;
    let mut rng = stream_rng(seed, 0);
    let mut min_ratio = f64::INFINITY;
    for _ in 0..trials {
        let amps: Vec<Complex64> =
            (0..b.len()).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
        let xi = project_out_minimizer_directions(&LatticeState::new(half_width, amps)?, &b);
        let q = a.matrix().quadratic_form(&xi.to_real());
        let x2 = xi.norm_sqr();
        min_ratio = min_ratio.min(q / (m * x2));
        if q < 2.0 * m / 11.0 * x2 - 1e-10 {
            return Ok(CoercivityOutcome { passed: false, min_ratio, witness: Some(xi) });
        }
    }
    Ok(CoercivityOutcome { passed: true, min_ratio, witness: None })
}

/// `⟨Aξ, ξ⟩` for the shifted operator at `e^{iθ} b*_k`.
pub fn shifted_form(half_width: usize, m: f64, k: i64, theta: f64, xi: &LatticeState) -> Result<f64, SpectralError> {
    Ok(shifted_operator(half_width, m, k, theta)?.matrix().quadratic_form(&xi.to_real()))
}

/// Uniform helper for tests that need a random unit direction.
pub fn random_direction<R: Rng + ?Sized>(half_width: usize, rng: &mut R) -> LatticeState {
    let amps = (0..2 * half_width + 1)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    LatticeState::new(half_width, amps).expect("finite normals").normalized_to(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_spectrum() {
        let a = HessianMatrix::from_matrix(1, Matrix::identity(6));
        let rep = eigen_decompose(&a).unwrap();
        assert!(rep.eigenvalues.iter().all(|&v| (v - 1.0).abs() < 1e-15));
    }

    #[test]
    fn catalogue_counts() {
        let c = catalogue(3, 0);
        assert_eq!(c.len(), 14);
        assert_eq!(c.iter().filter(|&&q| q == Rational64::new(14, 11)).count(), 4);
        let edge = catalogue(3, 2);
        assert_eq!(edge.iter().filter(|&&q| q == Rational64::new(2, 11)).count(), 1);
        assert_eq!(edge.iter().filter(|&&q| q == Rational64::new(14, 11)).count(), 6);
    }

    #[test]
    fn matches_catalogue() {
        for (n, k) in [(3, 0), (3, 1), (3, 2), (4, -3), (2, 0)] {
            let rep = spectral_report(n, 1.0, k, 0.4).unwrap();
            assert_eq!(rep.catalogue_match, Some(true), "N={n} k={k}: {:?}", rep.eigenvalues);
            assert!(rep.classification.iter().all(|l| *l != EigenLabel::Unmatched));
        }
    }

    #[test]
    fn null_direction() {
        let a = shifted_operator(3, 1.0, 0, 0.0).unwrap();
        let b = minimizer_state(&MinimizerId::new(1.0, 0, 0.0), 3).unwrap();
        let v = a.apply(&b.scale_complex(Complex64::i()));
        assert!(v.norm() < 1e-12);
    }

    #[test]
    fn tight_direction() {
        let xi = LatticeState::from_sites(3, &[(-2, Complex64::new(1.0, 0.0))]).unwrap();
        let q = shifted_form(3, 2.0, 0, 0.0, &xi).unwrap();
        assert!((q - 4.0 / 11.0).abs() < 1e-14);
        let b = minimizer_state(&MinimizerId::new(2.0, 0, 0.0), 3).unwrap();
        let q = shifted_form(3, 2.0, 0, 0.0, &b).unwrap();
        assert!((q + 28.0 * 2.0 / 11.0 * b.norm_sqr()).abs() < 1e-12);
    }
}
