use num_complex::Complex64;

use super::LatticeState;
use crate::linalg::Matrix;

/// `M(b) = Σ_j |b_j|²`.
pub fn mass(state: &LatticeState) -> f64 {
    state.norm_sqr()
}

/// `H(b) = Σ_j ( ½|b_j|⁴ − 2 Re(conj(b_j)² b_{j−1}²) )` with `b_{−N−1} = 0`.
pub fn hamiltonian(state: &LatticeState) -> f64 {
    hamiltonian_amps(state.amps())
}

/// [`hamiltonian`] on a raw amplitude slice ordered `j = −N..N`.
pub fn hamiltonian_amps(a: &[Complex64]) -> f64 {
    let onsite: f64 = a.iter().map(|z| 0.5 * z.norm_sqr() * z.norm_sqr()).sum();
    let hopping: f64 = a.windows(2).map(|w| (w[1].conj().powi(2) * w[0].powi(2)).re).sum();
    onsite - 2.0 * hopping
}

/// Gradient of `H` as a complex vector.
///
/// Entry `j` is `2(|b_j|² b_j − 2 conj(b_j)(b_{j−1}² + b_{j+1}²))`, which is
/// `2 ∂H/∂conj(b_j)`. With this factor of two the `(α, β)` stacking of the
/// result is exactly the real gradient of `H`, and at a minimizer of mass `m`
/// the result equals `−(14/11)·m·b*`.
pub fn grad_h(state: &LatticeState) -> LatticeState {
    let mut out = Vec::with_capacity(state.len());
    for j in state.sites() {
        let b = state.get(j);
        let nb = state.get(j - 1).powi(2) + state.get(j + 1).powi(2);
        out.push(2.0 * (b * b.norm_sqr() - 2.0 * b.conj() * nb));
    }
    LatticeState::new(state.half_width(), out).expect("gradient of a finite state is finite")
}

/// Real symmetric Hessian of `H` in the coordinates `(α_{−N}, β_{−N}, …, α_N, β_N)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HessianMatrix {
    half_width: usize,
    entries: Matrix,
}

impl HessianMatrix {
    /// Wraps a `(4N+2)`-square matrix; panics on a dimension mismatch.
    pub fn from_matrix(half_width: usize, entries: Matrix) -> Self {
        let dim = 4 * half_width + 2;
        assert!(entries.rows() == dim && entries.cols() == dim, "Hessian must be {dim}x{dim}");
        HessianMatrix { half_width, entries }
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn dim(&self) -> usize {
        self.entries.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.entries
    }

    pub fn into_matrix(self) -> Matrix {
        self.entries
    }

    /// Row/column index of `α_j`.
    pub fn alpha_index(&self, site: i64) -> usize {
        2 * (site + self.half_width as i64) as usize
    }

    /// Row/column index of `β_j`.
    pub fn beta_index(&self, site: i64) -> usize {
        self.alpha_index(site) + 1
    }

    /// Matrix-vector product with a state viewed in real coordinates.
    pub fn apply(&self, v: &LatticeState) -> LatticeState {
        let y = self.entries.mul_vec(&v.to_real());
        LatticeState::from_real(self.half_width, &y).expect("finite product")
    }

    /// Sub-block on `sites` reordered as `(α_{s_0}, …, α_{s_last}, β_{s_0}, …, β_{s_last})`.
    pub fn block_alpha_beta(&self, sites: &[i64]) -> Matrix {
        let idx: Vec<usize> =
            sites.iter().map(|&s| self.alpha_index(s)).chain(sites.iter().map(|&s| self.beta_index(s))).collect();
        Matrix::from_fn(idx.len(), idx.len(), |r, c| self.entries[(idx[r], idx[c])])
    }
}

/// Hessian of `H` assembled from the closed-form second partials.
pub fn hessian_h(state: &LatticeState) -> HessianMatrix {
    let n = state.half_width();
    let dim = 4 * n + 2;
    let mut h = Matrix::zeros(dim, dim);
    for j in state.sites() {
        let ia = 2 * (j + n as i64) as usize;
        let ib = ia + 1;
        let b = state.get(j);
        let (a, bt) = (b.re, b.im);
        let (l, r) = (state.get(j - 1), state.get(j + 1));
        let sa = l.re * l.re + r.re * r.re;
        let sb = l.im * l.im + r.im * r.im;
        h[(ia, ia)] = 6.0 * a * a + 2.0 * bt * bt - 4.0 * sa + 4.0 * sb;
        h[(ib, ib)] = 6.0 * bt * bt + 2.0 * a * a + 4.0 * sa - 4.0 * sb;
        let ab = 4.0 * a * bt - 8.0 * l.re * l.im - 8.0 * r.re * r.im;
        h[(ia, ib)] = ab;
        h[(ib, ia)] = ab;
        if j < n as i64 {
            let (ja, jb) = (ia + 2, ib + 2);
            let same = -8.0 * a * r.re - 8.0 * bt * r.im;
            let cross = 8.0 * a * r.im - 8.0 * bt * r.re;
            for (p, q, v) in [(ia, ja, same), (ib, jb, same), (ia, jb, cross), (ib, ja, -cross)] {
                h[(p, q)] = v;
                h[(q, p)] = v;
            }
        }
    }
    HessianMatrix { half_width: n, entries: h }
}

/// Coefficients `[c0, …, c4]` with `H(b + λξ) = Σ_p c_p λ^p` exactly.
///
/// `c1 = ⟨∇H(b), ξ⟩` and `c2 = ½ ξᵀ∇²H(b)ξ`, so this gives matrix-free access
/// to the first two derivatives along a direction.
pub fn taylor_coefficients(b: &LatticeState, xi: &LatticeState) -> [f64; 5] {
    let mut c = [0.0; 5];
    for (x, y) in b.amps().iter().zip(xi.amps()) {
        let aa = x.norm_sqr();
        let bb = 2.0 * (x.re * y.re + x.im * y.im);
        let cc = y.norm_sqr();
        c[0] += 0.5 * aa * aa;
        c[1] += aa * bb;
        c[2] += 0.5 * (bb * bb + 2.0 * aa * cc);
        c[3] += bb * cc;
        c[4] += 0.5 * cc * cc;
    }
    let (ba, xa) = (b.amps(), xi.amps());
    for j in 1..ba.len() {
        // conj(b_j + λξ_j)(b_{j−1} + λξ_{j−1}) = u0 + λu1 + λ²u2, squared.
        let u0 = ba[j].conj() * ba[j - 1];
        let u1 = xa[j].conj() * ba[j - 1] + ba[j].conj() * xa[j - 1];
        let u2 = xa[j].conj() * xa[j - 1];
        let sq: [Complex64; 5] = [u0 * u0, 2.0 * u0 * u1, u1 * u1 + 2.0 * u0 * u2, 2.0 * u1 * u2, u2 * u2];
        for p in 0..5 {
            c[p] -= 2.0 * sq[p].re;
        }
    }
    c
}

/// Quadratic form `ξᵀ ∇²H(b) ξ` without assembling the matrix.
pub fn hessian_form(b: &LatticeState, xi: &LatticeState) -> f64 {
    2.0 * taylor_coefficients(b, xi)[2]
}

/// `e^{iθ}·b`.
pub fn phase_rotate(state: &LatticeState, theta: f64) -> LatticeState {
    state.scale_complex(Complex64::from_polar(1.0, theta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{minimizer_state, MinimizerId};
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn bstar(m: f64, n: usize) -> LatticeState {
        minimizer_state(&MinimizerId::new(m, 0, 0.0), n).unwrap()
    }

    #[test]
    fn mass_examples() {
        assert_eq!(mass(&LatticeState::zeros(3)), 0.0);
        assert_eq!(mass(&LatticeState::from_sites(2, &[(0, c(3.0, 4.0))]).unwrap()), 25.0);
        assert_relative_eq!(mass(&bstar(1.0, 3)), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn hamiltonian_examples() {
        assert_relative_eq!(hamiltonian(&bstar(1.0, 3)), -7.0 / 22.0, max_relative = 1e-14);
        let single = LatticeState::from_sites(2, &[(0, c(1.0, 0.0))]).unwrap();
        assert_eq!(hamiltonian(&single), 0.5);
        let h = 0.5f64.sqrt();
        let two = LatticeState::from_sites(2, &[(0, c(h, 0.0)), (1, c(0.0, h))]).unwrap();
        assert_relative_eq!(hamiltonian(&two), 0.75, max_relative = 1e-14);
    }

    #[test]
    fn gradient_at_minimizer() {
        for m in [1.0, 2.5] {
            let b = bstar(m, 3);
            let g = grad_h(&b);
            let expected = b.scale(-14.0 / 11.0 * m);
            assert!(g.max_abs_diff(&expected) < 1e-13 * m.powf(1.5));
        }
        assert_eq!(grad_h(&LatticeState::zeros(2)), LatticeState::zeros(2));
    }

    #[test]
    fn hessian_at_minimizer() {
        let m = 1.7;
        let b = bstar(m, 3);
        let hb = hessian_h(&b).apply(&b);
        assert!(hb.max_abs_diff(&b.scale(-42.0 / 11.0 * m)) < 1e-12);
    }

    #[test]
    fn hessian_central_block_matches_closed_form() {
        let m = 2.0;
        let h = hessian_h(&bstar(m, 3));
        let block = h.block_alpha_beta(&[-2, -1, 0, 1, 2]);
        let s15 = 15f64.sqrt() / 11.0;
        let t = 3.0 / 11.0;
        let f = 5.0 / 11.0;
        let ha = [
            [-4.0 * t, 0.0, 0.0, 0.0, 0.0],
            [0.0, 6.0 * t - 4.0 * f, -8.0 * s15, 0.0, 0.0],
            [0.0, -8.0 * s15, 6.0 * f - 4.0 * 2.0 * t, -8.0 * s15, 0.0],
            [0.0, 0.0, -8.0 * s15, 6.0 * t - 4.0 * f, 0.0],
            [0.0, 0.0, 0.0, 0.0, -4.0 * t],
        ];
        let hb = [
            [4.0 * t, 0.0, 0.0, 0.0, 0.0],
            [0.0, 2.0 * t + 4.0 * f, -8.0 * s15, 0.0, 0.0],
            [0.0, -8.0 * s15, 2.0 * f + 4.0 * 2.0 * t, -8.0 * s15, 0.0],
            [0.0, 0.0, -8.0 * s15, 2.0 * t + 4.0 * f, 0.0],
            [0.0, 0.0, 0.0, 0.0, 4.0 * t],
        ];
        for r in 0..10 {
            for col in 0..10 {
                let expected = match (r < 5, col < 5) {
                    (true, true) => ha[r][col],
                    (false, false) => hb[r - 5][col - 5],
                    _ => 0.0,
                };
                assert!((block[(r, col)] - m * expected).abs() < 1e-13, "({r},{col})");
            }
        }
    }

    #[test]
    fn rotation_invariance() {
        let b = bstar(1.0, 3);
        assert_eq!(phase_rotate(&b, 0.0), b);
        assert!(phase_rotate(&b, 2.0 * std::f64::consts::PI).max_abs_diff(&b) < 1e-15);
        assert_relative_eq!(
            hamiltonian(&phase_rotate(&b, std::f64::consts::FRAC_PI_3)),
            -7.0 / 22.0,
            max_relative = 1e-14
        );
    }
}
