//! Time integration of `db_j/dt = i(−|b_j|²b_j + 2 conj(b_j)(b_{j−1}² + b_{j+1}²))`.
//!
//! In the gradient convention of [`grad_h`] the vector field is
//! `−(i/2)·grad_h(b)`. Substituting the in-phase three-mode minimizer gives
//! `b(t) = e^{iωt} b*` with `ω = 7m/11`.

use std::io::{self, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{grad_h, hamiltonian, hessian_h, mass, HydroState, LatticeState};
use crate::linalg::{solve_dense, Matrix};
use crate::stats::ls_slope;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("invalid integrator config: {0}")]
    InvalidConfig(String),
    #[error("implicit midpoint solve did not converge at step {step} (residual {residual:e})")]
    NonConvergence { step: usize, residual: f64 },
    #[error("site {site} has vanishing amplitude, its phase is undefined")]
    DegenerateSite { site: i64 },
    #[error("site {site} outside the lattice")]
    SiteOutOfRange { site: i64 },
    #[error("trajectory needs at least two recorded times")]
    TooShort,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "RK4", alias = "rk4")]
    Rk4,
    #[serde(rename = "ImplicitMidpoint", alias = "implicit_midpoint")]
    ImplicitMidpoint,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    #[serde(default = "default_scheme")]
    pub scheme: Scheme,
    pub dt: f64,
    pub t_final: f64,
    #[serde(default = "default_stride")]
    pub record_stride: usize,
    #[serde(default = "default_newton_tol")]
    pub newton_tol: f64,
    #[serde(default = "default_newton_max_iter")]
    pub newton_max_iter: usize,
}

fn default_scheme() -> Scheme {
    Scheme::Rk4
}
fn default_stride() -> usize {
    1
}
fn default_newton_tol() -> f64 {
    1e-12
}
fn default_newton_max_iter() -> usize {
    50
}

impl IntegratorConfig {
    pub fn rk4(dt: f64, t_final: f64) -> Self {
        IntegratorConfig {
            scheme: Scheme::Rk4,
            dt,
            t_final,
            record_stride: 1,
            newton_tol: default_newton_tol(),
            newton_max_iter: default_newton_max_iter(),
        }
    }

    pub fn implicit_midpoint(dt: f64, t_final: f64) -> Self {
        IntegratorConfig { scheme: Scheme::ImplicitMidpoint, ..Self::rk4(dt, t_final) }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.record_stride = stride;
        self
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        let bad = |m: &str| Err(DynamicsError::InvalidConfig(m.to_string()));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad("dt must be positive and finite");
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return bad("t_final must be positive and finite");
        }
        if self.dt >= self.t_final {
            return bad("dt must be smaller than t_final");
        }
        if self.record_stride == 0 {
            return bad("record_stride must be at least 1");
        }
        if self.newton_tol.is_nan() || self.newton_tol <= 0.0 {
            return bad("newton_tol must be positive");
        }
        if self.newton_max_iter == 0 {
            return bad("newton_max_iter must be at least 1");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<LatticeState>,
    pub h_series: Vec<f64>,
    pub m_series: Vec<f64>,
}

impl Trajectory {
    fn push(&mut self, t: f64, s: &LatticeState) {
        self.times.push(t);
        self.h_series.push(hamiltonian(s));
        self.m_series.push(mass(s));
        self.states.push(s.clone());
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> Option<&LatticeState> {
        self.states.last()
    }

    /// `max_t |H(t) − H(0)|`.
    pub fn max_h_drift(&self) -> f64 {
        max_drift(&self.h_series)
    }

    /// `max_t |M(t) − M(0)|`.
    pub fn max_m_drift(&self) -> f64 {
        max_drift(&self.m_series)
    }

    /// CSV with header `t,H,M,re_{-N},im_{-N},…,re_N,im_N`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let Some(first) = self.states.first() else {
            return writeln!(w, "t,H,M");
        };
        let mut header = String::from("t,H,M");
        for j in first.sites() {
            header.push_str(&format!(",re_{j},im_{j}"));
        }
        writeln!(w, "{header}")?;
        for (i, s) in self.states.iter().enumerate() {
            let mut line =
                format!("{},{},{}", fmt_float(self.times[i]), fmt_float(self.h_series[i]), fmt_float(self.m_series[i]));
            for z in s.amps() {
                line.push(',');
                line.push_str(&fmt_float(z.re));
                line.push(',');
                line.push_str(&fmt_float(z.im));
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }
}

fn max_drift(series: &[f64]) -> f64 {
    series.first().map_or(0.0, |&x0| series.iter().map(|x| (x - x0).abs()).fold(0.0, f64::max))
}

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_float(x: f64) -> String {
    format!("{x:?}")
}

pub fn rhs(state: &LatticeState) -> LatticeState {
    let mut out = Vec::with_capacity(state.len());
    for j in state.sites() {
        let b = state.get(j);
        let nb = state.get(j - 1).powi(2) + state.get(j + 1).powi(2);
        out.push(Complex64::i() * (-b * b.norm_sqr() + 2.0 * b.conj() * nb));
    }
    LatticeState::new(state.half_width(), out).expect("vector field of a finite state is finite")
}

/// RK4 increment `x_{n+1} − x_n`.
fn rk4_increment(x: &LatticeState, h: f64) -> LatticeState {
    let k1 = rhs(x);
    let k2 = rhs(&x.axpy(0.5 * h, &k1));
    let k3 = rhs(&x.axpy(0.5 * h, &k2));
    let k4 = rhs(&x.axpy(h, &k3));
    k1.add(&k2.scale(2.0)).add(&k3.scale(2.0)).add(&k4).scale(h / 6.0)
}

/// Kahan-compensated `x += incr`. Over 10⁵ steps or more the plain sum
/// accumulates roundoff above the RK4 truncation error at small `dt`.
fn compensated_add(x: &mut [Complex64], carry: &mut [Complex64], incr: &[Complex64]) {
    for ((xi, ci), di) in x.iter_mut().zip(carry.iter_mut()).zip(incr) {
        let y = di - *ci;
        let t = *xi + y;
        *ci = (t - *xi) - y;
        *xi = t;
    }
}

/// Solves `z = x + (h/2)·f(z)` by Newton, returns `2z − x`.
fn midpoint_step(
    x: &LatticeState,
    h: f64,
    tol: f64,
    max_iter: usize,
    step: usize,
) -> Result<LatticeState, DynamicsError> {
    let n = x.half_width();
    let mut z = x.axpy(0.5 * h, &rhs(x));
    let scale = 1.0 + x.norm();
    let mut residual = f64::INFINITY;
    for _ in 0..max_iter {
        let f = x.axpy(0.5 * h, &rhs(&z)).sub(&z);
        residual = f.norm();
        if residual <= tol * scale {
            return Ok(z.scale(2.0).sub(x));
        }
        // d f / d z in real coordinates is ½·S·Hess with S(gα, gβ) = (gβ, −gα).
        let hess = hessian_h(&z);
        let hm = hess.matrix();
        let dim = hm.rows();
        let mut jac = Matrix::identity(dim);
        for r in 0..dim {
            let (src, sign) = if r % 2 == 0 { (r + 1, 1.0) } else { (r - 1, -1.0) };
            for c in 0..dim {
                jac[(r, c)] -= 0.25 * h * sign * hm[(src, c)];
            }
        }
        let delta = solve_dense(&jac, &f.to_real()).ok_or(DynamicsError::NonConvergence { step, residual })?;
        z = z.add(&LatticeState::from_real(n, &delta).map_err(|_| DynamicsError::NonConvergence { step, residual })?);
    }
    let f = x.axpy(0.5 * h, &rhs(&z)).sub(&z);
    if f.norm() <= tol * scale {
        return Ok(z.scale(2.0).sub(x));
    }
    Err(DynamicsError::NonConvergence { step, residual: residual.min(f.norm()) })
}

/// Fixed-step integration to `t_final`. The last step is shortened when
/// `t_final` is not a multiple of `dt`; it is always recorded.
pub fn integrate(state: &LatticeState, cfg: &IntegratorConfig) -> Result<Trajectory, DynamicsError> {
    cfg.validate()?;
    let full = (cfg.t_final / cfg.dt * (1.0 + 1e-12)).floor() as usize;
    let rem = cfg.t_final - full as f64 * cfg.dt;
    let steps = if rem > 1e-12 * cfg.t_final { full + 1 } else { full };
    let mut traj = Trajectory::default();
    traj.push(0.0, state);
    let n = state.half_width();
    let mut x = state.clone();
    let mut carry = vec![Complex64::new(0.0, 0.0); state.len()];
    for step in 1..=steps {
        let last = step == steps;
        let h = if last { cfg.t_final - (step - 1) as f64 * cfg.dt } else { cfg.dt };
        x = match cfg.scheme {
            Scheme::Rk4 => {
                let incr = rk4_increment(&x, h);
                let mut amps = x.into_amps();
                compensated_add(&mut amps, &mut carry, incr.amps());
                LatticeState::new(n, amps).expect("finite RK4 step")
            }
            Scheme::ImplicitMidpoint => midpoint_step(&x, h, cfg.newton_tol, cfg.newton_max_iter, step)?,
        };
        if step % cfg.record_stride == 0 || last {
            let t = if last { cfg.t_final } else { step as f64 * cfg.dt };
            traj.push(t, &x);
        }
    }
    Ok(traj)
}

/// Right-hand side of the Madelung form. Phase rates are `None` at sites
/// with zero density.
#[derive(Clone, Debug, PartialEq)]
pub struct HydroRates {
    pub half_width: usize,
    pub drho: Vec<f64>,
    pub dtheta: Vec<Option<f64>>,
}

impl HydroRates {
    pub fn dtheta_at(&self, site: i64) -> Result<f64, DynamicsError> {
        let i = site + self.half_width as i64;
        if i < 0 || i as usize >= self.dtheta.len() {
            return Err(DynamicsError::SiteOutOfRange { site });
        }
        self.dtheta[i as usize].ok_or(DynamicsError::DegenerateSite { site })
    }

    /// All phase rates, failing on the first degenerate site.
    pub fn phase_rates(&self) -> Result<Vec<f64>, DynamicsError> {
        (0..self.dtheta.len()).map(|i| self.dtheta_at(i as i64 - self.half_width as i64)).collect()
    }
}

/// `ρ̇_j = −4ρ_j Σ_± ρ_{j±1} sin(2(θ_{j±1} − θ_j))`,
/// `θ̇_j = −ρ_j + 2 Σ_± ρ_{j±1} cos(2(θ_{j±1} − θ_j))`.
pub fn hydro_rhs(h: &HydroState) -> HydroRates {
    let n = h.half_width as i64;
    let mut drho = Vec::with_capacity(h.rho.len());
    let mut dtheta = Vec::with_capacity(h.rho.len());
    for j in -n..=n {
        let (r, t) = (h.rho_at(j), h.theta_at(j));
        let mut dr = 0.0;
        let mut dt = -r;
        for nb in [j - 1, j + 1] {
            let (rn, tn) = (h.rho_at(nb), h.theta_at(nb));
            let phase = 2.0 * (tn - t);
            dr -= 4.0 * r * rn * phase.sin();
            dt += 2.0 * rn * phase.cos();
        }
        drho.push(dr);
        dtheta.push((r > 0.0).then_some(dt));
    }
    HydroRates { half_width: h.half_width, drho, dtheta }
}

/// Least-squares slope of the unwrapped phase of `b_site` against time.
pub fn measure_rotation_rate(traj: &Trajectory, site: i64) -> Result<f64, DynamicsError> {
    if traj.len() < 2 {
        return Err(DynamicsError::TooShort);
    }
    let first = &traj.states[0];
    if first.index_of(site).is_none() {
        return Err(DynamicsError::SiteOutOfRange { site });
    }
    let mut phases = Vec::with_capacity(traj.len());
    let mut prev: Option<f64> = None;
    for s in &traj.states {
        let z = s.get(site);
        if z.norm() < 1e-8 {
            return Err(DynamicsError::DegenerateSite { site });
        }
        let raw = z.arg();
        let un = match prev {
            None => raw,
            Some(p) => {
                let mut d = raw - p.rem_euclid(std::f64::consts::TAU);
                d = (d + std::f64::consts::PI).rem_euclid(std::f64::consts::TAU) - std::f64::consts::PI;
                p + d
            }
        };
        phases.push(un);
        prev = Some(un);
    }
    Ok(ls_slope(&traj.times, &phases))
}

/// `rhs(b) = −(i/2)·grad_h(b)`; exposed for consistency checks.
pub fn rhs_from_gradient(state: &LatticeState) -> LatticeState {
    grad_h(state).scale_complex(Complex64::new(0.0, -0.5))
}
