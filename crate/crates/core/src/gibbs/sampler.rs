use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::report::{concentration_report, ConcentrationReport};
use super::GibbsError;
use crate::lattice::{hamiltonian_amps, mass, LatticeState};
use crate::rng::{stream_rng, StreamRng};

/// Burn-in tuning window length.
const TUNE_WINDOW: usize = 100;
/// Streams per chain id: levels use `0..1023`, the swap schedule uses 1023.
const STREAMS_PER_CHAIN: u64 = 1024;

fn default_target() -> (f64, f64) {
    (0.3, 0.5)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerConfig {
    #[serde(rename = "N")]
    pub n: usize,
    pub m: f64,
    pub beta: f64,
    /// Total number of Metropolis steps, burn-in included.
    pub n_steps: usize,
    pub burn_in: usize,
    pub thin: usize,
    /// Standard deviation of each real tangent component of the proposal.
    pub proposal_sigma: f64,
    pub seed: u64,
    #[serde(default = "default_target")]
    pub target_accept: (f64, f64),
    #[serde(default)]
    pub chain_id: u64,
    /// Starting state; a uniform point of `S(m)` when absent.
    #[serde(default)]
    pub init: Option<LatticeState>,
}

impl SamplerConfig {
    pub fn new(n: usize, m: f64, beta: f64, n_steps: usize, burn_in: usize, thin: usize, seed: u64) -> Self {
        SamplerConfig {
            n,
            m,
            beta,
            n_steps,
            burn_in,
            thin,
            proposal_sigma: 0.1 * m.sqrt(),
            seed,
            target_accept: default_target(),
            chain_id: 0,
            init: None,
        }
    }

    pub fn validate(&self) -> Result<(), GibbsError> {
        let bad = |s: String| Err(GibbsError::InvalidConfig(s));
        if self.n == 0 {
            return bad("N must be at least 1".into());
        }
        if !(self.m > 0.0 && self.m.is_finite()) {
            return bad(format!("m must be positive, got {}", self.m));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return bad(format!("beta must be finite and non-negative, got {}", self.beta));
        }
        if self.n_steps == 0 || self.burn_in >= self.n_steps {
            return bad(format!("need burn_in < n_steps, got {} and {}", self.burn_in, self.n_steps));
        }
        if self.thin == 0 {
            return bad("thin must be at least 1".into());
        }
        if !(self.proposal_sigma > 0.0 && self.proposal_sigma.is_finite()) {
            return bad(format!("proposal_sigma must be positive, got {}", self.proposal_sigma));
        }
        let (lo, hi) = self.target_accept;
        if !(0.0 < lo && lo < hi && hi < 1.0) {
            return bad(format!("target_accept must satisfy 0 < lo < hi < 1, got ({lo}, {hi})"));
        }
        if let Some(s) = &self.init {
            if s.half_width() != self.n {
                return bad(format!("init has N = {}, expected {}", s.half_width(), self.n));
            }
            if (mass(s) - self.m).abs() > 1e-10 * self.m {
                return bad(format!("init has mass {}, expected {}", mass(s), self.m));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct ChainResult {
    pub beta: f64,
    pub samples: Vec<LatticeState>,
    /// Step index (0-based, burn-in included) of each retained sample.
    pub steps: Vec<usize>,
    pub h_values: Vec<f64>,
    /// Acceptance rate after burn-in.
    pub accept_rate: f64,
    /// Proposal scale frozen at the end of burn-in.
    pub sigma: f64,
    pub diagnostics: ConcentrationReport,
}

/// `min(1, e^{−β(h_new − h_old)})`.
pub fn metropolis_accept_prob(beta: f64, h_old: f64, h_new: f64) -> f64 {
    let dh = h_new - h_old;
    if dh <= 0.0 {
        1.0
    } else {
        (-beta * dh).exp()
    }
}

/// Acceptance of exchanging the states at inverse temperatures `beta_i`, `beta_j`.
pub fn swap_accept_prob(beta_i: f64, beta_j: f64, h_i: f64, h_j: f64) -> f64 {
    ((beta_i - beta_j) * (h_i - h_j)).exp().min(1.0)
}

struct Chain {
    beta: f64,
    m: f64,
    amps: Vec<Complex64>,
    prop: Vec<Complex64>,
    noise: Vec<Complex64>,
    h: f64,
    sigma: f64,
    rng: StreamRng,
    window_accepts: usize,
    accepts: usize,
    tried: usize,
    samples: Vec<LatticeState>,
    steps: Vec<usize>,
    h_values: Vec<f64>,
}

impl Chain {
    fn new(cfg: &SamplerConfig, beta: f64, stream: u64) -> Chain {
        let mut rng = stream_rng(cfg.seed, stream);
        let dim = 2 * cfg.n + 1;
        let amps = match &cfg.init {
            Some(s) => s.amps().to_vec(),
            None => loop {
                let v: Vec<Complex64> =
                    (0..dim).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
                let r2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
                if r2 > 0.0 {
                    let s = (cfg.m / r2).sqrt();
                    break v.into_iter().map(|z| z * s).collect();
                }
            },
        };
        let h = hamiltonian_amps(&amps);
        Chain {
            beta,
            m: cfg.m,
            prop: vec![Complex64::new(0.0, 0.0); dim],
            noise: vec![Complex64::new(0.0, 0.0); dim],
            amps,
            h,
            sigma: cfg.proposal_sigma,
            rng,
            window_accepts: 0,
            accepts: 0,
            tried: 0,
            samples: Vec::new(),
            steps: Vec::new(),
            h_values: Vec::new(),
        }
    }

    /// One Metropolis step with proposal `normalize(b + σ·P_b z)·√m`, where
    /// `P_b` projects onto the tangent space at `b`.
    fn step(&mut self) -> bool {
        let mut along = 0.0;
        for (z, b) in self.noise.iter_mut().zip(&self.amps) {
            *z = Complex64::new(self.rng.sample(StandardNormal), self.rng.sample(StandardNormal));
            along += z.re * b.re + z.im * b.im;
        }
        let c = along / self.m;
        let mut r2 = 0.0;
        for ((p, z), b) in self.prop.iter_mut().zip(&self.noise).zip(&self.amps) {
            *p = b + (z - b * c) * self.sigma;
            r2 += p.norm_sqr();
        }
        let s = (self.m / r2).sqrt();
        for p in &mut self.prop {
            *p *= s;
        }
        let h_new = hamiltonian_amps(&self.prop);
        let u: f64 = self.rng.random();
        if u < metropolis_accept_prob(self.beta, self.h, h_new) {
            std::mem::swap(&mut self.amps, &mut self.prop);
            self.h = h_new;
            true
        } else {
            false
        }
    }

    fn run(&mut self, cfg: &SamplerConfig, start: usize, len: usize) {
        let (lo, hi) = cfg.target_accept;
        for s in start..start + len {
            let accepted = self.step();
            if s < cfg.burn_in {
                self.window_accepts += accepted as usize;
                if (s + 1) % TUNE_WINDOW == 0 {
                    let rate = self.window_accepts as f64 / TUNE_WINDOW as f64;
                    if rate > hi {
                        self.sigma = (self.sigma * 1.2).min(2.0 * self.m.sqrt());
                    } else if rate < lo {
                        self.sigma *= 0.8;
                    }
                    self.window_accepts = 0;
                }
                continue;
            }
            self.tried += 1;
            self.accepts += accepted as usize;
            if (s - cfg.burn_in + 1).is_multiple_of(cfg.thin) {
                self.samples.push(self.state(cfg.n));
                self.steps.push(s);
                self.h_values.push(self.h);
            }
        }
    }

    fn state(&self, n: usize) -> LatticeState {
        LatticeState::new(n, self.amps.clone()).expect("finite chain state")
    }

    fn finish(self) -> ChainResult {
        let diagnostics = concentration_report(&self.samples, self.m, self.beta);
        ChainResult {
            beta: self.beta,
            accept_rate: if self.tried == 0 { 0.0 } else { self.accepts as f64 / self.tried as f64 },
            sigma: self.sigma,
            samples: self.samples,
            steps: self.steps,
            h_values: self.h_values,
            diagnostics,
        }
    }
}

/// Single Metropolis chain targeting `e^{−βH}` on `S(m)`.
pub fn mcmc_run(cfg: &SamplerConfig) -> Result<ChainResult, GibbsError> {
    cfg.validate()?;
    let mut chain = Chain::new(cfg, cfg.beta, cfg.chain_id * STREAMS_PER_CHAIN);
    chain.run(cfg, 0, cfg.n_steps);
    Ok(chain.finish())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemperingConfig {
    /// Shared settings; `base.beta` is ignored in favour of `betas`.
    pub base: SamplerConfig,
    pub betas: Vec<f64>,
    /// Steps between exchange rounds.
    pub swap_interval: usize,
}

impl TemperingConfig {
    pub fn validate(&self) -> Result<(), GibbsError> {
        let bad = |s: String| Err(GibbsError::InvalidConfig(s));
        if self.betas.is_empty() || self.betas.len() as u64 >= STREAMS_PER_CHAIN {
            return bad(format!("need between 1 and {} levels", STREAMS_PER_CHAIN - 1));
        }
        if self.swap_interval == 0 {
            return bad("swap_interval must be at least 1".into());
        }
        for &b in &self.betas {
            SamplerConfig { beta: b, ..self.base.clone() }.validate()?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct TemperingResult {
    /// One result per entry of `betas`, in the same order.
    pub levels: Vec<ChainResult>,
    /// Exchange attempts and acceptances between levels `i` and `i + 1`.
    pub swap_attempts: Vec<u64>,
    pub swap_accepts: Vec<u64>,
}

impl TemperingResult {
    pub fn swap_rates(&self) -> Vec<f64> {
        self.swap_attempts
            .iter()
            .zip(&self.swap_accepts)
            .map(|(&a, &s)| if a == 0 { 0.0 } else { s as f64 / a as f64 })
            .collect()
    }
}

/// Replica exchange over a ladder of inverse temperatures.
///
/// Levels advance independently for `swap_interval` steps, then adjacent pairs
/// attempt to exchange states, alternating between even and odd pairs. Each
/// level and the exchange schedule draw from their own random streams, so a
/// run is reproducible from `(seed, chain_id)` regardless of thread count.
pub fn tempering_run(cfg: &TemperingConfig) -> Result<TemperingResult, GibbsError> {
    cfg.validate()?;
    let base = &cfg.base;
    let stream0 = base.chain_id * STREAMS_PER_CHAIN;
    let mut chains: Vec<Chain> =
        cfg.betas.iter().enumerate().map(|(i, &b)| Chain::new(base, b, stream0 + i as u64)).collect();
    let mut swap_rng = stream_rng(base.seed, stream0 + STREAMS_PER_CHAIN - 1);
    let pairs = chains.len().saturating_sub(1);
    let mut attempts = vec![0u64; pairs];
    let mut accepts = vec![0u64; pairs];
    let mut done = 0;
    let mut round = 0usize;
    // Fork-join every few steps costs more than it saves on a single worker.
    let parallel = rayon::current_num_threads() > 1;
    while done < base.n_steps {
        let len = cfg.swap_interval.min(base.n_steps - done);
        if parallel {
            chains.par_iter_mut().for_each(|c| c.run(base, done, len));
        } else {
            chains.iter_mut().for_each(|c| c.run(base, done, len));
        }
        done += len;
        for i in (round % 2..pairs).step_by(2) {
            attempts[i] += 1;
            let p = swap_accept_prob(chains[i].beta, chains[i + 1].beta, chains[i].h, chains[i + 1].h);
            let u: f64 = swap_rng.random();
            if u < p {
                accepts[i] += 1;
                let (a, b) = chains.split_at_mut(i + 1);
                std::mem::swap(&mut a[i].amps, &mut b[0].amps);
                std::mem::swap(&mut a[i].h, &mut b[0].h);
            }
        }
        round += 1;
    }
    let levels = chains.into_par_iter().map(Chain::finish).collect();
    Ok(TemperingResult { levels, swap_attempts: attempts, swap_accepts: accepts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gibbs::sphere_uniform;
    use crate::lattice::hamiltonian;
    use crate::stats::mean;

    #[test]
    fn detailed_balance_on_three_states() {
        // Uniform proposal to one of the other two states, Metropolis acceptance.
        let h: [f64; 3] = [0.3, -0.1, 0.7];
        let beta: f64 = 2.5;
        let mut p = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    p[i][j] = 0.5 * metropolis_accept_prob(beta, h[i], h[j]);
                }
            }
            p[i][i] = 1.0 - p[i].iter().sum::<f64>();
        }
        let z: f64 = h.iter().map(|e| (-beta * e).exp()).sum();
        let pi: Vec<f64> = h.iter().map(|e| (-beta * e).exp() / z).collect();
        for i in 0..3 {
            let next: f64 = (0..3).map(|j| pi[j] * p[j][i]).sum();
            assert!((next - pi[i]).abs() < 1e-15);
            for j in 0..3 {
                assert!((pi[i] * p[i][j] - pi[j] * p[j][i]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn swap_balance() {
        // π(x, y) ∝ e^{−β₁H(x) − β₂H(y)} is preserved by the exchange move.
        let (b1, b2): (f64, f64) = (1.0, 3.0);
        let h: [f64; 3] = [0.2, -0.4, 0.9];
        for &x in &h {
            for &y in &h {
                let fwd = (-b1 * x - b2 * y).exp() * swap_accept_prob(b1, b2, x, y);
                let back = (-b1 * y - b2 * x).exp() * swap_accept_prob(b1, b2, y, x);
                assert!((fwd - back).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn config_validation() {
        let ok = SamplerConfig::new(3, 1.0, 10.0, 1000, 100, 1, 0);
        assert!(ok.validate().is_ok());
        for bad in [
            SamplerConfig { burn_in: 1000, ..ok.clone() },
            SamplerConfig { proposal_sigma: 0.0, ..ok.clone() },
            SamplerConfig { thin: 0, ..ok.clone() },
            SamplerConfig { target_accept: (0.5, 0.3), ..ok.clone() },
            SamplerConfig { init: Some(LatticeState::zeros(3)), ..ok.clone() },
        ] {
            assert!(matches!(mcmc_run(&bad), Err(GibbsError::InvalidConfig(_))));
        }
    }

    #[test]
    fn chain_is_reproducible_and_on_sphere() {
        let cfg = SamplerConfig::new(3, 1.5, 20.0, 5000, 1000, 10, 42);
        let a = mcmc_run(&cfg).unwrap();
        let b = mcmc_run(&cfg).unwrap();
        assert_eq!(a.samples, b.samples);
        assert_eq!(a.samples.len(), 400);
        for (s, &e) in a.samples.iter().zip(&a.h_values) {
            assert!((mass(s) - 1.5).abs() <= 1e-10 * 1.5);
            assert!((hamiltonian(s) - e).abs() < 1e-12);
            assert!((-7.0 / 22.0 * 2.25 - 1e-9..=0.75 * 2.25 + 1e-9).contains(&e));
        }
    }

    #[test]
    fn infinite_temperature_matches_uniform() {
        let (n, m) = (2, 1.0);
        let cfg = SamplerConfig { proposal_sigma: 0.5, ..SamplerConfig::new(n, m, 0.0, 200_000, 1000, 20, 3) };
        let chain = mcmc_run(&cfg).unwrap();
        let iid = sphere_uniform(n, m, chain.samples.len(), 3);
        for j in -2..=2 {
            let a: Vec<f64> = chain.samples.iter().map(|b| b.get(j).norm_sqr()).collect();
            let b: Vec<f64> = iid.iter().map(|b| b.get(j).norm_sqr()).collect();
            // Beta(1, 4) has sd ≈ 0.163; allow for chain correlation.
            let se = 0.163 * (2.0 / a.len() as f64).sqrt() * 2.0;
            assert!((mean(&a) - mean(&b)).abs() < 4.0 * se, "site {j}");
        }
    }

    #[test]
    fn tempering_is_reproducible() {
        let base = SamplerConfig::new(3, 1.0, 0.0, 4000, 500, 5, 7);
        let cfg = TemperingConfig { base, betas: vec![5.0, 20.0, 50.0], swap_interval: 10 };
        let a = tempering_run(&cfg).unwrap();
        let b = tempering_run(&cfg).unwrap();
        assert_eq!(a.levels.len(), 3);
        for (x, y) in a.levels.iter().zip(&b.levels) {
            assert_eq!(x.samples, y.samples);
        }
        assert_eq!(a.swap_accepts, b.swap_accepts);
        assert!(a.swap_attempts.iter().all(|&t| t > 100));
    }
}
