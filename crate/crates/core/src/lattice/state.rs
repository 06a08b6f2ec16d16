use std::ops::RangeInclusive;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::LatticeError;

/// Complex amplitudes `b_j` on the sites `j = -N..=N`.
///
/// Stored densely with offset `N`. Sites outside the lattice read as zero
/// through [`LatticeState::get`], which realizes the Dirichlet boundary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateRepr", into = "StateRepr")]
pub struct LatticeState {
    half_width: usize,
    amps: Vec<Complex64>,
}

/// JSON layout: `{"N": int, "re": [...], "im": [...]}` ordered `j = -N..N`.
#[derive(Serialize, Deserialize)]
struct StateRepr {
    #[serde(rename = "N")]
    n: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl TryFrom<StateRepr> for LatticeState {
    type Error = LatticeError;

    fn try_from(r: StateRepr) -> Result<Self, Self::Error> {
        if r.re.len() != r.im.len() {
            return Err(LatticeError::LengthMismatch { expected: r.re.len(), got: r.im.len() });
        }
        let amps = r.re.iter().zip(&r.im).map(|(&a, &b)| Complex64::new(a, b)).collect();
        LatticeState::new(r.n, amps)
    }
}

impl From<LatticeState> for StateRepr {
    fn from(s: LatticeState) -> Self {
        StateRepr {
            n: s.half_width,
            re: s.amps.iter().map(|z| z.re).collect(),
            im: s.amps.iter().map(|z| z.im).collect(),
        }
    }
}

impl LatticeState {
    pub fn new(half_width: usize, amps: Vec<Complex64>) -> Result<Self, LatticeError> {
        if half_width == 0 {
            return Err(LatticeError::ZeroHalfWidth);
        }
        let expected = 2 * half_width + 1;
        if amps.len() != expected {
            return Err(LatticeError::LengthMismatch { expected, got: amps.len() });
        }
        if let Some(i) = amps.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LatticeError::NonFinite { site: i as i64 - half_width as i64 });
        }
        Ok(LatticeState { half_width, amps })
    }

    pub fn zeros(half_width: usize) -> Self {
        assert!(half_width >= 1, "half width must be at least 1");
        LatticeState { half_width, amps: vec![Complex64::new(0.0, 0.0); 2 * half_width + 1] }
    }

    /// State with the listed `(site, amplitude)` pairs set and zeros elsewhere.
    pub fn from_sites(half_width: usize, sites: &[(i64, Complex64)]) -> Result<Self, LatticeError> {
        if half_width == 0 {
            return Err(LatticeError::ZeroHalfWidth);
        }
        let mut s = Self::zeros(half_width);
        for &(j, z) in sites {
            let i = s.index_of(j).ok_or(LatticeError::CenterOutOfRange { center: j, max: half_width as i64 })?;
            s.amps[i] = z;
        }
        Self::new(half_width, s.amps)
    }

    /// Inverse of [`LatticeState::to_real`].
    pub fn from_real(half_width: usize, x: &[f64]) -> Result<Self, LatticeError> {
        let expected = 2 * (2 * half_width + 1);
        if x.len() != expected {
            return Err(LatticeError::LengthMismatch { expected, got: x.len() });
        }
        let amps = x.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect();
        Self::new(half_width, amps)
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    /// Number of sites `2N + 1`.
    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    /// Real dimension `4N + 2`.
    pub fn real_dim(&self) -> usize {
        2 * self.amps.len()
    }

    pub fn sites(&self) -> RangeInclusive<i64> {
        let n = self.half_width as i64;
        -n..=n
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amps(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn index_of(&self, site: i64) -> Option<usize> {
        let i = site + self.half_width as i64;
        (0..self.amps.len() as i64).contains(&i).then_some(i as usize)
    }

    pub fn site_of(&self, index: usize) -> i64 {
        index as i64 - self.half_width as i64
    }

    /// Amplitude at `site`; zero outside `[-N, N]`.
    pub fn get(&self, site: i64) -> Complex64 {
        self.index_of(site).map_or(Complex64::new(0.0, 0.0), |i| self.amps[i])
    }

    /// Real coordinates `(α_{-N}, β_{-N}, …, α_N, β_N)` with `b_j = α_j + iβ_j`.
    pub fn to_real(&self) -> Vec<f64> {
        self.amps.iter().flat_map(|z| [z.re, z.im]).collect()
    }

    /// Real pairing `⟨u, v⟩ = Re Σ u_j conj(v_j)`.
    pub fn inner(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.len(), other.len());
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.re * b.re + a.im * b.im).sum()
    }

    /// Complex pairing `Σ u_j conj(v_j)`.
    pub fn complex_inner(&self, other: &Self) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a * b.conj()).sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, lambda: f64) -> Self {
        self.map(|z| z * lambda)
    }

    pub fn scale_complex(&self, lambda: Complex64) -> Self {
        self.map(|z| z * lambda)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        LatticeState { half_width: self.half_width, amps: self.amps.iter().map(|&z| f(z)).collect() }
    }

    /// `self + lambda·other`.
    pub fn axpy(&self, lambda: f64, other: &Self) -> Self {
        debug_assert_eq!(self.len(), other.len());
        LatticeState {
            half_width: self.half_width,
            amps: self.amps.iter().zip(&other.amps).map(|(a, b)| a + b * lambda).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.axpy(-1.0, other)
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    /// Rescaled copy with mass `m`. Panics on the zero state.
    pub fn normalized_to(&self, m: f64) -> Self {
        let n = self.norm();
        assert!(n > 0.0, "cannot normalize the zero state");
        self.scale(m.sqrt() / n)
    }

    /// Shift every amplitude by `offset` sites if the support stays inside the lattice.
    pub fn translate(&self, offset: i64) -> Option<Self> {
        let mut out = Self::zeros(self.half_width);
        for (i, &z) in self.amps.iter().enumerate() {
            if z == Complex64::new(0.0, 0.0) {
                continue;
            }
            let j = out.index_of(self.site_of(i) + offset)?;
            out.amps[j] = z;
        }
        Some(out)
    }

    /// Largest pointwise modulus difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}
