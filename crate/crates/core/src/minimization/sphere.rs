//! Projected gradient descent on the mass sphere `{ M(b) = m }`.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::lattice::{grad_h, hamiltonian, taylor_coefficients, LatticeState};
use crate::rng::stream_rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Sense {
    Minimize,
    Maximize,
}

impl Sense {
    fn sign(self) -> f64 {
        match self {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SphereOptions {
    /// Converged when the tangential gradient norm is at most `tol_factor·m^{3/2}`.
    pub tol_factor: f64,
    pub max_iter: usize,
    /// Run starts on the current rayon pool.
    pub parallel: bool,
}

impl Default for SphereOptions {
    fn default() -> Self {
        SphereOptions { tol_factor: 1e-9, max_iter: 100_000, parallel: true }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MinimizeResult {
    pub state: LatticeState,
    pub energy: f64,
    pub iterations: usize,
    pub converged: bool,
    pub grad_norm: f64,
    pub seed: u64,
    /// Index of the start that produced the returned state.
    pub start_index: u64,
    /// Number of starts that met the gradient tolerance.
    pub converged_starts: usize,
}

/// Complex Gaussian vector rescaled to mass `m`, i.e. uniform on the sphere.
pub fn random_sphere_state<R: Rng + ?Sized>(half_width: usize, m: f64, rng: &mut R) -> LatticeState {
    loop {
        let amps: Vec<Complex64> = (0..2 * half_width + 1)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let s = LatticeState::new(half_width, amps).expect("finite normals");
        if s.norm() > 0.0 {
            return s.normalized_to(m);
        }
    }
}

/// Tangential part `g − (⟨g, b⟩/m) b` of a gradient at `b`.
///
/// Near a critical point `g` is almost parallel to `b`, so a single
/// projection leaves a normal residue comparable to the tangential part; the
/// second pass removes it.
fn tangential(g: &LatticeState, b: &LatticeState, m: f64) -> LatticeState {
    let once = g.axpy(-g.inner(b) / m, b);
    once.axpy(-once.inner(b) / m, b)
}

struct StartOutcome {
    state: LatticeState,
    energy: f64,
    iterations: usize,
    converged: bool,
    grad_norm: f64,
}

fn descend(mut b: LatticeState, m: f64, sense: Sense, opts: &SphereOptions) -> StartOutcome {
    let sgn = sense.sign();
    let tol = opts.tol_factor * m.powf(1.5);
    let mut alpha = 0.1 / m;
    let mut grad_norm = f64::INFINITY;
    for it in 0..opts.max_iter {
        let g = grad_h(&b).scale(sgn);
        let gt = tangential(&g, &b, m);
        grad_norm = gt.norm();
        if grad_norm <= tol {
            return StartOutcome { energy: hamiltonian(&b), state: b, iterations: it, converged: true, grad_norm };
        }
        let g2 = grad_norm * grad_norm;
        let mut accepted = false;
        while alpha * m > 1e-16 {
            // b − αg_t has mass m(1 + x) since g_t ⊥ b; rescale by s = (1 + x)^{-1/2}.
            let x = alpha * alpha * g2 / m;
            let r = (1.0 + x).sqrt();
            let s_minus_1 = -x / (r * (1.0 + r));
            let s = 1.0 + s_minus_1;
            let xi = b.scale(s_minus_1).axpy(-s * alpha, &gt);
            // Energy change from the exact Taylor coefficients, free of cancellation.
            let c = taylor_coefficients(&b, &xi);
            let delta = sgn * (c[1] + c[2] + c[3] + c[4]);
            if delta <= -1e-4 * alpha * g2 {
                b = b.add(&xi).normalized_to(m);
                alpha *= 1.5;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            return StartOutcome { energy: hamiltonian(&b), state: b, iterations: it, converged: false, grad_norm };
        }
    }
    StartOutcome { energy: hamiltonian(&b), state: b, iterations: opts.max_iter, converged: false, grad_norm }
}

/// Multistart projected gradient on the sphere of mass `m`. Start `i` draws
/// its initial point from stream `i` of `seed`, so results do not depend on
/// scheduling. Returns the best start (ties go to the lower index).
pub fn optimize_on_sphere(
    half_width: usize,
    m: f64,
    n_starts: usize,
    seed: u64,
    sense: Sense,
    opts: &SphereOptions,
) -> MinimizeResult {
    assert!(half_width >= 1 && m > 0.0 && n_starts >= 1, "need N >= 1, m > 0 and at least one start");
    let run = |i: u64| {
        let mut rng = stream_rng(seed, i);
        (i, descend(random_sphere_state(half_width, m, &mut rng), m, sense, opts))
    };
    let outcomes: Vec<(u64, StartOutcome)> = if opts.parallel {
        (0..n_starts as u64).into_par_iter().map(run).collect()
    } else {
        (0..n_starts as u64).map(run).collect()
    };
    let converged_starts = outcomes.iter().filter(|(_, o)| o.converged).count();
    let sgn = sense.sign();
    let (start_index, best) = outcomes
        .into_iter()
        .reduce(|a, b| if sgn * b.1.energy < sgn * a.1.energy { b } else { a })
        .expect("at least one start");
    MinimizeResult {
        state: best.state,
        energy: best.energy,
        iterations: best.iterations,
        converged: best.converged,
        grad_norm: best.grad_norm,
        seed,
        start_index,
        converged_starts,
    }
}

pub fn minimize_h_on_sphere(half_width: usize, m: f64, n_starts: usize, seed: u64) -> MinimizeResult {
    optimize_on_sphere(half_width, m, n_starts, seed, Sense::Minimize, &SphereOptions::default())
}

/// Largest energy on the sphere, used to probe the upper bound `¾m²`.
pub fn maximize_h_on_sphere(half_width: usize, m: f64, n_starts: usize, seed: u64) -> MinimizeResult {
    optimize_on_sphere(half_width, m, n_starts, seed, Sense::Maximize, &SphereOptions::default())
}
