use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::GibbsError;
use crate::lattice::{
    hessian_form, mass, minimizer_amplitudes, minimizer_state, LatticeError, LatticeState, MinimizerId,
};
use crate::spectral::project_out_minimizer_directions;
use crate::LAGRANGE_RATIO;

/// Distances closer than this count as a tie between circles.
const TIE_TOL: f64 = 1e-12;

/// Sign patterns `(s_{k−1}, s_{k+1})` of the outer modes, with the central
/// mode fixed positive.
pub const SIGN_PATTERNS: [[i8; 2]; 4] = [[1, 1], [-1, 1], [1, -1], [-1, -1]];

/// Which family of three-mode minimizers the geometry works with.
///
/// `H` depends on each `b_j` only through `|b_j|²` and `b_j²`, so flipping the
/// sign of a single site is a symmetry and `e^{iθ}(±a, b, ±a)` are minimizers
/// as well. `SignOrbit` is the full minimizer set, four circles per center;
/// `Circles` keeps only the positive profiles `e^{iθ} b*_k`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum MinimizerSet {
    #[default]
    SignOrbit,
    Circles,
}

impl MinimizerSet {
    fn patterns(self) -> &'static [[i8; 2]] {
        match self {
            MinimizerSet::SignOrbit => &SIGN_PATTERNS,
            MinimizerSet::Circles => &SIGN_PATTERNS[..1],
        }
    }
}

/// `e^{iθ}(s₀a, b, s₁a)` on sites `k−1, k, k+1` at mass `m`.
pub fn signed_minimizer_state(
    m: f64,
    k: i64,
    phase: f64,
    signs: [i8; 2],
    half_width: usize,
) -> Result<LatticeState, LatticeError> {
    let b = minimizer_state(&MinimizerId::new(m, k, phase), half_width)?;
    let mut amps = b.into_amps();
    let c = (k + half_width as i64) as usize;
    amps[c - 1] *= signs[0] as f64;
    amps[c + 1] *= signs[1] as f64;
    LatticeState::new(half_width, amps)
}

/// Closest point of the minimizer set at mass `M(b)` to `b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NearestMinimizer {
    pub center: i64,
    /// `θ̂ ∈ [0, 2π)`.
    pub phase: f64,
    /// Signs of the modes at `k − 1` and `k + 1`.
    pub signs: [i8; 2],
    pub point: LatticeState,
    pub distance: f64,
    pub unique: bool,
    /// Center of the second-closest circle when it ties with `center`.
    pub runner_up: Option<i64>,
    /// `b` has zero overlap with every circle.
    pub degenerate: bool,
}

/// `Σ_j b_j b*_j` for the signed real minimizer centred at `k`.
fn overlap(b: &LatticeState, k: i64, amps: &[f64; 3], signs: [i8; 2]) -> Complex64 {
    b.get(k - 1) * (amps[0] * signs[0] as f64) + b.get(k) * amps[1] + b.get(k + 1) * (amps[2] * signs[1] as f64)
}

struct Candidate {
    distance: f64,
    center: i64,
    signs: [i8; 2],
    phase: f64,
    overlap: f64,
}

fn on_circle(b: &LatticeState, m: f64, k: i64, amps: &[f64; 3], signs: [i8; 2]) -> Candidate {
    let z = overlap(b, k, amps, signs);
    let d2 = (m + m - 2.0 * z.norm()).max(0.0);
    Candidate { distance: d2.sqrt(), center: k, signs, phase: z.arg().rem_euclid(TAU), overlap: z.norm() }
}

fn finish(
    b: &LatticeState,
    m: f64,
    c: &Candidate,
    runner_up: Option<i64>,
    degenerate: bool,
) -> Result<NearestMinimizer, GibbsError> {
    let point = signed_minimizer_state(m, c.center, c.phase, c.signs, b.half_width())?;
    let distance = b.sub(&point).norm();
    Ok(NearestMinimizer {
        center: c.center,
        phase: c.phase,
        signs: c.signs,
        point,
        distance,
        unique: runner_up.is_none() && !degenerate,
        runner_up,
        degenerate,
    })
}

/// Nearest element of the full minimizer set at mass `M(b)`.
pub fn nearest_minimizer(b: &LatticeState) -> Result<NearestMinimizer, GibbsError> {
    nearest_minimizer_in(b, MinimizerSet::default())
}

/// Nearest minimizer within `set`.
///
/// On each circle the optimal phase is `arg Σ_j b_j b*_j`; circles are ranked
/// by distance with ties (within 1e−12) resolved towards the smallest center
/// and flagged `unique = false`. A state with no overlap at all is reported as
/// degenerate with `k = −N+1`, `θ̂ = 0`.
pub fn nearest_minimizer_in(b: &LatticeState, set: MinimizerSet) -> Result<NearestMinimizer, GibbsError> {
    let m = mass(b);
    if m <= 0.0 {
        return Err(GibbsError::ZeroMass);
    }
    let n = b.half_width() as i64;
    let amps = minimizer_amplitudes(m);
    let mut ranked: Vec<Candidate> = (-(n - 1)..=(n - 1))
        .flat_map(|k| set.patterns().iter().map(move |&s| (k, s)))
        .map(|(k, s)| on_circle(b, m, k, &amps, s))
        .collect();
    // Stable sort keeps the pattern order within a center.
    ranked.sort_by(|x, y| x.distance.total_cmp(&y.distance).then(x.center.cmp(&y.center)));
    if ranked.iter().all(|r| r.overlap == 0.0) {
        let k = -(n - 1);
        let c = Candidate { distance: 0.0, center: k, signs: [1, 1], phase: 0.0, overlap: 0.0 };
        return finish(b, m, &c, None, true);
    }
    let best = &ranked[0];
    let runner_up = ranked.get(1).filter(|r| r.distance - best.distance <= TIE_TOL).map(|r| r.center);
    finish(b, m, best, runner_up, false)
}

/// Nearest point of the single circle `B*_k(M(b))` of positive profiles.
pub fn nearest_on_circle(b: &LatticeState, k: i64) -> Result<NearestMinimizer, GibbsError> {
    let m = mass(b);
    if m <= 0.0 {
        return Err(GibbsError::ZeroMass);
    }
    let amps = minimizer_amplitudes(m);
    let mut c = on_circle(b, m, k, &amps, [1, 1]);
    let degenerate = c.overlap == 0.0;
    if degenerate {
        c.phase = 0.0;
    }
    finish(b, m, &c, None, degenerate)
}

/// Which directions [`proj_perp`] removes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProjectionVariant {
    /// Only the component along `u = b̂*/|b̂*|`.
    #[default]
    Real,
    /// Also the component along `i·u`, the null direction of the shifted operator.
    RealAndPhase,
}

pub fn proj_perp(b: &LatticeState, nm: &NearestMinimizer, variant: ProjectionVariant) -> LatticeState {
    match variant {
        ProjectionVariant::Real => {
            let pp = nm.point.norm_sqr();
            b.axpy(-b.inner(&nm.point) / pp, &nm.point)
        }
        ProjectionVariant::RealAndPhase => project_out_minimizer_directions(b, &nm.point),
    }
}

/// `½⟨(14/11·M·I + ∇²H(p))ξ, ξ⟩` at the minimizer `p`.
fn shifted_half_form(p: &LatticeState, m: f64, xi: &LatticeState) -> f64 {
    0.5 * (LAGRANGE_RATIO * m * xi.norm_sqr() + hessian_form(p, xi))
}

/// Quadratic functional about a given nearest point with the chosen projection.
pub fn g_with(b: &LatticeState, nm: &NearestMinimizer, variant: ProjectionVariant) -> f64 {
    shifted_half_form(&nm.point, mass(b), &proj_perp(b, nm, variant))
}

/// `G(b)` about the nearest minimizer; ties are an error.
pub fn g_value(b: &LatticeState) -> Result<f64, GibbsError> {
    let nm = nearest_minimizer(b)?;
    if !nm.unique {
        return Err(GibbsError::NonUniqueNearest { first: nm.center, second: nm.runner_up.unwrap_or(nm.center) });
    }
    Ok(g_with(b, &nm, ProjectionVariant::Real))
}

/// `G_k(b)` about the nearest point of the circle `B*_k`.
pub fn g_k_value(b: &LatticeState, k: i64) -> Result<f64, GibbsError> {
    let nm = nearest_on_circle(b, k)?;
    Ok(g_with(b, &nm, ProjectionVariant::Real))
}

/// `G` with the fluctuation measured by the log map on the sphere.
pub fn g_intrinsic(b: &LatticeState) -> Result<f64, GibbsError> {
    let nm = nearest_minimizer(b)?;
    let xi = log_map(&nm.point, b)?;
    Ok(shifted_half_form(&nm.point, mass(b), &xi))
}

/// Tangent vector at `x` pointing to `y` along the great circle, with length
/// equal to the geodesic distance `√m·arccos(⟨x, y⟩/m)`.
pub fn log_map(x: &LatticeState, y: &LatticeState) -> Result<LatticeState, GibbsError> {
    let m = mass(x);
    let my = mass(y);
    if m <= 0.0 {
        return Err(GibbsError::ZeroMass);
    }
    if (my - m).abs() > 1e-10 * m {
        return Err(GibbsError::MassMismatch(m, my));
    }
    let c = x.inner(y);
    let v = y.axpy(-c / m, x);
    let vn = v.norm();
    if vn == 0.0 {
        if c > 0.0 {
            return Ok(LatticeState::zeros(x.half_width()));
        }
        return Err(GibbsError::Antipodal);
    }
    // atan2 keeps full precision for nearby points, where arccos does not.
    let angle = (vn / m.sqrt()).atan2(c / m);
    if std::f64::consts::PI - angle < 1e-12 {
        return Err(GibbsError::Antipodal);
    }
    Ok(v.scale(m.sqrt() * angle / vn))
}

/// Walks from `x` along the great circle with initial velocity `v`.
pub fn exp_map(x: &LatticeState, v: &LatticeState) -> LatticeState {
    let r = mass(x).sqrt();
    let vn = v.norm();
    if vn == 0.0 {
        return x.clone();
    }
    let a = vn / r;
    x.scale(a.cos()).axpy(a.sin() * r / vn, v)
}

/// Random unit vector orthogonal to `b*` and `i b*`.
pub fn random_cap_direction<R: Rng + ?Sized>(bstar: &LatticeState, rng: &mut R) -> LatticeState {
    loop {
        let amps =
            (0..bstar.len()).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
        let g = LatticeState::new(bstar.half_width(), amps).expect("finite normals");
        let p = project_out_minimizer_directions(&g, bstar);
        if p.norm() > 1e-8 {
            return p.normalized_to(1.0);
        }
    }
}

/// Cap coordinates `(1 − t)·b* + √(2t − t²)·√m·Ψ` on `S(m)`, with `Ψ` a unit
/// vector orthogonal to `b*` and `i b*`.
pub fn cap_point(bstar: &LatticeState, t: f64, psi: &LatticeState) -> LatticeState {
    let m = mass(bstar);
    bstar.scale(1.0 - t).axpy((2.0 * t - t * t).sqrt() * m.sqrt(), psi)
}

/// `𝒢_k(t, Ψ) = ½(1 − t)²(2t − t²)·m·⟨AΨ, Ψ⟩` with `A` the shifted operator at `b*`.
pub fn cap_gfunc(bstar: &LatticeState, t: f64, psi: &LatticeState) -> f64 {
    let m = mass(bstar);
    (1.0 - t).powi(2) * (2.0 * t - t * t) * m * shifted_half_form(bstar, m, psi)
}
