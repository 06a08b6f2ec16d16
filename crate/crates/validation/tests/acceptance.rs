//! Acceptance criteria 1–12, one test each. Every test writes a single
//! `PASS`/`FAIL` line with the measured quantities and its runtime, then
//! asserts the criterion.

use std::io::Write;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use num_rational::Rational64;
use rand::Rng;
use rand_distr::StandardNormal;

use toy_cascade::dynamics::{integrate, measure_rotation_rate, IntegratorConfig};
use toy_cascade::gibbs::{
    cap_gfunc, cap_point, concentration_report, g_k_value, gaussian_reference_sample, mcmc_run, nearest_minimizer,
    nearest_minimizer_in, random_cap_direction, tempering_run, MinimizerSet, SamplerConfig, TemperingConfig,
};
use toy_cascade::lattice::{grad_h, hamiltonian, hessian_h, mass, minimizer_state, LatticeState, MinimizerId};
use toy_cascade::minimization::{
    brute_force_min, five_mode_reduction, h_inphase, is_unimodal, k_mode_energy_exact, maximize_h_on_sphere,
    minimize_h_on_sphere, organ_pipe, random_sphere_state, rearrange_nonincreasing, RhoProfile,
};
use toy_cascade::rng::stream_rng;
use toy_cascade::spectral::{catalogue, spectral_report};
use toy_cascade::stationary::scan_positivity;
use toy_cascade::stats::ls_slope;

fn verdict(id: u32, title: &str, pass: bool, detail: &str, elapsed: Duration) {
    let tag = if pass { "PASS" } else { "FAIL" };
    // Written past the test harness capture so the line shows for passing tests too.
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "criterion {id:>2} {tag} {title}: {detail} [{:.2}s]", elapsed.as_secs_f64());
    let _ = out.flush();
    assert!(pass, "criterion {id} failed: {detail}");
}

fn gaussian_state(n: usize, scale: f64, rng: &mut impl Rng) -> LatticeState {
    let amps = (0..2 * n + 1)
        .map(|_| Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal)) * scale)
        .collect();
    LatticeState::new(n, amps).unwrap()
}

#[test]
fn criterion_01_minimizer_value() {
    let t0 = Instant::now();
    let r = minimize_h_on_sphere(5, 1.0, 32, 2024);
    let gap = (r.energy + 7.0 / 22.0).abs();
    let dist = nearest_minimizer(&r.state).unwrap().distance;
    let elapsed = t0.elapsed();
    let pass = gap <= 1e-8 && dist <= 1e-4 && elapsed <= Duration::from_secs(10);
    verdict(
        1,
        "minimizer value",
        pass,
        &format!("|E + 7/22| = {gap:.2e} (tol 1e-8), distance to minimizer set {dist:.2e} (tol 1e-4), budget 10s"),
        elapsed,
    );
}

#[test]
fn criterion_02_candidate_ladder() {
    let t0 = Instant::now();
    let r = Rational64::new;
    let expected = [r(1, 2), r(-1, 4), r(-7, 22), r(-5, 16)];
    let exact: Vec<Rational64> = (1..=4).map(|k| k_mode_energy_exact(k).unwrap()).collect();
    let ladder_ok = exact == expected;
    let brute = brute_force_min(2, 1.0, 30).unwrap();
    let gap = (brute + 7.0 / 22.0).abs();
    let elapsed = t0.elapsed();
    let pass = ladder_ok && gap <= 1e-9 && elapsed <= Duration::from_secs(60);
    verdict(
        2,
        "candidate ladder",
        pass,
        &format!("k-mode energies {exact:?} exact = {ladder_ok}, brute force gap {gap:.2e} (tol 1e-9), budget 60s"),
        elapsed,
    );
}

#[test]
fn criterion_03_hessian_catalogue() {
    let t0 = Instant::now();
    let r = Rational64::new;
    let mut listed =
        vec![r(-28, 11), r(0, 1), r(2, 11), r(2, 11), r(12, 11), r(26, 11), r(26, 11), r(40, 11), r(60, 11), r(8, 1)];
    listed.extend([r(14, 11); 4]);
    listed.sort();
    let to_f = |q: &Rational64| *q.numer() as f64 / *q.denom() as f64;
    let matches_list =
        |vals: &[f64]| vals.len() == listed.len() && vals.iter().zip(&listed).all(|(v, q)| (v - to_f(q)).abs() <= 1e-9);

    let base = spectral_report(3, 1.0, 0, 0.0).unwrap();
    let base_ok = matches_list(&base.eigenvalues) && base.residual_max() <= 1e-10;
    let mut worst_residual = base.residual_max();
    let mut theta_ok = true;
    for i in 0..12 {
        let rep = spectral_report(3, 1.0, 0, 0.5 * i as f64).unwrap();
        worst_residual = worst_residual.max(rep.residual_max());
        theta_ok &= matches_list(&rep.eigenvalues);
    }
    let mut k_mismatch = Vec::new();
    for k in -2..=2 {
        for theta in [0.0, 1.3, 4.0] {
            let rep = spectral_report(3, 1.0, k, theta).unwrap();
            worst_residual = worst_residual.max(rep.residual_max());
            if !matches_list(&rep.eigenvalues) && !k_mismatch.contains(&k) {
                k_mismatch.push(k);
            }
        }
    }
    let edge_note = k_mismatch
        .iter()
        .map(|&k| {
            let c = catalogue(3, k);
            let soft = c.iter().filter(|&&q| q == r(2, 11)).count();
            format!("k={k} has {soft} eigenvalue(s) 2/11")
        })
        .collect::<Vec<_>>()
        .join(", ");
    let elapsed = t0.elapsed();
    let pass =
        base_ok && theta_ok && k_mismatch.is_empty() && worst_residual <= 1e-10 && elapsed <= Duration::from_secs(1);
    verdict(
        3,
        "Hessian catalogue",
        pass,
        &format!(
            "k=0 list match {base_ok}, theta invariance {theta_ok}, k values off the list {k_mismatch:?} ({edge_note}), \
             max residual {worst_residual:.1e} (tol 1e-10), budget 1s"
        ),
        elapsed,
    );
}

#[test]
fn criterion_04_gradient_identities() {
    let t0 = Instant::now();
    let mut identity_err: f64 = 0.0;
    for (m, k, th) in [(1.0, 0, 0.0), (2.5, 1, 0.7), (0.3, -2, 3.0)] {
        let b = minimizer_state(&MinimizerId::new(m, k, th), 3).unwrap();
        identity_err = identity_err.max(grad_h(&b).max_abs_diff(&b.scale(-14.0 / 11.0 * m)));
        identity_err = identity_err.max(hessian_h(&b).apply(&b).max_abs_diff(&b.scale(-42.0 / 11.0 * m)));
    }
    let mut rng = stream_rng(4, 0);
    let (mut grad_err, mut hess_err): (f64, f64) = (0.0, 0.0);
    for _ in 0..100 {
        let b = gaussian_state(3, 0.5, &mut rng);
        let x = b.to_real();
        let g = grad_h(&b).to_real();
        let hm = hessian_h(&b);
        for i in 0..x.len() {
            let shifted = |d: f64| {
                let mut y = x.clone();
                y[i] += d;
                LatticeState::from_real(3, &y).unwrap()
            };
            let h = 1e-6;
            let fd = (hamiltonian(&shifted(h)) - hamiltonian(&shifted(-h))) / (2.0 * h);
            grad_err = grad_err.max((fd - g[i]).abs());
            let h = 1e-5;
            let col: Vec<f64> = grad_h(&shifted(h))
                .to_real()
                .iter()
                .zip(grad_h(&shifted(-h)).to_real())
                .map(|(a, b)| (a - b) / (2.0 * h))
                .collect();
            for (r, v) in col.iter().enumerate() {
                hess_err = hess_err.max((v - hm.matrix()[(r, i)]).abs());
            }
        }
    }
    let pass = identity_err <= 1e-10 && grad_err <= 1e-6 && hess_err <= 1e-5;
    verdict(
        4,
        "gradient identities",
        pass,
        &format!(
            "minimizer identities {identity_err:.1e} (tol 1e-10), gradient vs FD {grad_err:.1e} (tol 1e-6), \
             Hessian vs FD {hess_err:.1e} (tol 1e-5) on 100 states"
        ),
        t0.elapsed(),
    );
}

#[test]
fn criterion_05_conservation() {
    let t0 = Instant::now();
    let mut rng = stream_rng(5, 0);
    let b = random_sphere_state(5, 1.0, &mut rng);
    let run = |dt: f64| {
        let traj = integrate(&b, &IntegratorConfig::rk4(dt, 100.0).with_stride(1000)).unwrap();
        (traj.max_h_drift(), traj.max_m_drift())
    };
    let (dh, dm) = run(1e-3);
    let (dh2, dm2) = run(5e-4);
    let ratio = dh / dh2;
    let elapsed = t0.elapsed();
    let pass = dh <= 1e-7 && dm <= 1e-7 && ratio >= 8.0 && elapsed <= Duration::from_secs(30);
    verdict(
        5,
        "conservation",
        pass,
        &format!(
            "|dH| {dh:.2e}, |dM| {dm:.2e} (tol 1e-7); halved dt: |dH| {dh2:.2e}, |dM| {dm2:.2e}, \
             H drift ratio {ratio:.1} (need >= 8) [M ratio {:.1}], budget 30s",
            dm / dm2
        ),
        elapsed,
    );
}

#[test]
fn criterion_06_phase_locked_rotation() {
    let t0 = Instant::now();
    let b = minimizer_state(&MinimizerId::new(1.0, 0, 0.0), 3).unwrap();
    let traj = integrate(&b, &IntegratorConfig::rk4(1e-3, 20.0).with_stride(10)).unwrap();
    let mut amp_err: f64 = 0.0;
    for s in &traj.states {
        for (z, z0) in s.amps().iter().zip(b.amps()) {
            amp_err = amp_err.max((z.norm() - z0.norm()).abs());
        }
    }
    let rate = measure_rotation_rate(&traj, 0).unwrap();
    let err = (rate - 7.0 / 11.0).abs();
    let pass = amp_err <= 1e-8 && err <= 1e-6;
    verdict(
        6,
        "phase-locked rotation",
        pass,
        &format!(
            "max | |b_j(t)| - |b_j(0)| | {amp_err:.1e} (tol 1e-8), rate {rate:.10} vs 7/11, error {err:.1e} (tol 1e-6)"
        ),
        t0.elapsed(),
    );
}

#[test]
fn criterion_07_stationary_positivity() {
    let t0 = Instant::now();
    let scan = scan_positivity(8);
    let positive = |n: usize| scan.iter().find(|(k, _)| *k == n).map(|(_, p)| *p).unwrap();
    let ok = [2, 3, 4, 8].iter().all(|&n| positive(n)) && !positive(5);
    let elapsed = t0.elapsed();
    verdict(
        7,
        "stationary positivity",
        ok && elapsed <= Duration::from_secs(1),
        &format!("scan {scan:?}, budget 1s"),
        elapsed,
    );
}

#[test]
fn criterion_08_energy_bounds() {
    let t0 = Instant::now();
    let mut rng = stream_rng(8, 0);
    let mut violations = 0;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..100_000 {
        let n = [2, 3, 5][i % 3];
        let scale = rng.random_range(0.1..2.0);
        let b = gaussian_state(n, scale, &mut rng);
        let m = mass(&b);
        let r = hamiltonian(&b) / (m * m);
        lo = lo.min(r);
        hi = hi.max(r);
        let h = hamiltonian(&b);
        if h < -7.0 / 22.0 * m * m - 1e-9 || h > 0.75 * m * m + 1e-9 {
            violations += 1;
        }
    }
    let max = maximize_h_on_sphere(3, 1.0, 32, 8);
    let gap = (max.energy - 0.75).abs();
    let pass = violations == 0 && gap <= 1e-6;
    verdict(
        8,
        "energy bounds",
        pass,
        &format!(
            "{violations} violations in 1e5 states, H/M^2 range [{lo:.4}, {hi:.4}], maximizer {:.9} (gap {gap:.1e}, tol 1e-6)",
            max.energy
        ),
        t0.elapsed(),
    );
}

#[test]
fn criterion_09_rearrangement() {
    let t0 = Instant::now();
    let mut rng = stream_rng(9, 0);
    let (mut increases, mut not_perm, mut not_strict, mut admissible) = (0, 0, 0, 0);
    for _ in 0..10_000 {
        let len = rng.random_range(1..=12);
        let raw: Vec<f64> = (0..len).map(|_| if rng.random_bool(0.2) { 0.0 } else { rng.random::<f64>() }).collect();
        if raw.iter().all(|&v| v == 0.0) {
            continue;
        }
        let p = RhoProfile::new(raw.clone()).unwrap();
        let q = rearrange_nonincreasing(&p);
        if h_inphase(&q) > h_inphase(&p) + 1e-12 * (1.0 + p.mass().powi(2)) {
            increases += 1;
        }
        let mut a = raw.clone();
        let mut b = q.rho().to_vec();
        a.retain(|&v| v != 0.0);
        b.retain(|&v| v != 0.0);
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        if a != b {
            not_perm += 1;
        }
        // Admissible for the five-mode step: unimodal with support of length ≥ 6.
        let positive: Vec<f64> = raw.iter().map(|&v| v + 0.01).collect();
        if positive.len() >= 6 {
            let u = organ_pipe(&RhoProfile::new(positive).unwrap());
            if is_unimodal(&u) {
                admissible += 1;
                let f = five_mode_reduction(&u).unwrap();
                if h_inphase(&f) >= h_inphase(&u) {
                    not_strict += 1;
                }
            }
        }
    }
    let pass = increases == 0 && not_perm == 0 && not_strict == 0 && admissible > 1000;
    verdict(
        9,
        "rearrangement monotonicity",
        pass,
        &format!(
            "energy increases {increases}, non-permutations {not_perm} (1e4 profiles); \
             five-mode reduction not strictly lower on {not_strict} of {admissible} admissible inputs"
        ),
        t0.elapsed(),
    );
}

#[test]
fn criterion_10_concentration() {
    let t0 = Instant::now();
    let betas = vec![50.0, 100.0, 200.0, 400.0];
    let steps = 150_000_000;
    let base = SamplerConfig::new(4, 1.0, 0.0, steps, steps / 20, 100, 10);
    let run = tempering_run(&TemperingConfig { base, betas: betas.clone(), swap_interval: 10 }).unwrap();
    let mut caps = Vec::new();
    let mut lines = Vec::new();
    let mut min_eff = f64::INFINITY;
    for l in &run.levels {
        let d = &l.diagnostics;
        let cap = d.cap_fraction(0.3).unwrap();
        let eff = d.n_samples as f64 / d.distance_tau.max(d.site_tau).max(d.phase_tau);
        min_eff = min_eff.min(eff);
        caps.push(cap);
        let circles = l
            .samples
            .iter()
            .filter(|s| nearest_minimizer_in(s, MinimizerSet::Circles).unwrap().distance <= 0.3)
            .count() as f64
            / l.samples.len() as f64;
        lines.push(format!(
            "beta {}: cap(0.3) {cap:.4} [positive circles only {circles:.4}], n_eff {eff:.0}, sites {:?} p {:.2e} \
             (vs well weights p {:.2e}), phase p {:.3}",
            l.beta, d.site_histogram, d.site_p_value, d.site_weighted_p_value, d.phase_p_value
        ));
    }
    let top = run.levels.last().unwrap();
    let monotone = caps.windows(2).all(|w| w[1] >= w[0]);
    let site_ok = top.diagnostics.site_p_value >= 0.01;
    let phase_ok = top.diagnostics.phase_p_value >= 0.01;
    let elapsed = t0.elapsed();
    let pass =
        monotone && caps[3] >= 0.95 && site_ok && phase_ok && min_eff >= 1e5 && elapsed <= Duration::from_secs(600);
    verdict(
        10,
        "concentration",
        pass,
        &format!(
            "monotone {monotone}, cap(0.3) at beta 400 = {:.4} (need >= 0.95), site uniformity p {:.2e} (need >= 0.01), \
             phase p {:.3} (need >= 0.01), min n_eff {min_eff:.0} (need >= 1e5), swap rates {:?}, budget 600s; {}",
            caps[3],
            top.diagnostics.site_p_value,
            top.diagnostics.phase_p_value,
            run.swap_rates(),
            lines.join("; ")
        ),
        elapsed,
    );
}

#[test]
fn criterion_11_gaussian_fluctuations() {
    let t0 = Instant::now();
    let (n, m, beta) = (4, 1.0, 1000.0);
    let init = minimizer_state(&MinimizerId::new(m, 0, 0.0), n).unwrap();
    let steps = 20_000_000;
    let cfg = SamplerConfig { init: Some(init), ..SamplerConfig::new(n, m, beta, steps, steps / 20, 50, 11) };
    let chain = mcmc_run(&cfg).unwrap();
    let draws: Vec<LatticeState> =
        gaussian_reference_sample(n, m, beta, 200_000, 11).unwrap().into_iter().map(|d| d.state).collect();
    let reference = concentration_report(&draws, m, beta);
    let a = chain.diagnostics.tangent_matrix();
    let b = reference.tangent_matrix();
    let frob = a.sub(&b).frobenius_norm() / b.frobenius_norm();

    let predicted = 11.0 / 14.0 / beta;
    let far = reference.far_site_variance.unwrap();
    let se = reference.far_site_se.unwrap();
    let z = (far - predicted) / se;
    let chain_far = chain.diagnostics.far_site_variance.unwrap();
    let chain_z = (chain_far - predicted) / chain.diagnostics.far_site_se.unwrap();

    let ladder = [1e3, 4e3, 1.6e4];
    let mut means = Vec::new();
    for (i, &bt) in ladder.iter().enumerate() {
        let d: Vec<LatticeState> = gaussian_reference_sample(n, m, bt, 100_000, 100 + i as u64)
            .unwrap()
            .into_iter()
            .map(|d| d.state)
            .collect();
        means.push(concentration_report(&d, m, bt).g_vs_h.mean);
    }
    let lx: Vec<f64> = ladder.iter().map(|b| b.ln()).collect();
    let ly: Vec<f64> = means.iter().map(|v| v.ln()).collect();
    let slope = ls_slope(&lx, &ly);

    let pass = frob <= 0.1 && z.abs() <= 3.0 && (slope + 1.5).abs() <= 0.3;
    verdict(
        11,
        "Gaussian fluctuations",
        pass,
        &format!(
            "tangent covariance MCMC vs reference rel. Frobenius {frob:.4} (tol 0.1); far-site variance {far:.5e} vs \
             {predicted:.5e}, z = {z:.2} (tol 3) [MCMC {chain_far:.5e}, z = {chain_z:.1}]; g_vs_h means {means:?}, \
             slope {slope:.3} (need -1.5 +- 0.3)"
        ),
        t0.elapsed(),
    );
}

#[test]
fn criterion_12_cap_identity() {
    let t0 = Instant::now();
    let mut rng = stream_rng(12, 0);
    let (mut worst, mut worst_inverse_square): (f64, f64) = (0.0, 0.0);
    let mut example = String::new();
    for i in 0..500 {
        let k = rng.random_range(-3..=3);
        let theta = rng.random_range(0.0..std::f64::consts::TAU);
        let bstar = minimizer_state(&MinimizerId::new(1.0, k, theta), 4).unwrap();
        let t = rng.random_range(1e-4..=0.2);
        let psi = random_cap_direction(&bstar, &mut rng);
        let b = cap_point(&bstar, t, &psi);
        let gk = g_k_value(&b, k).unwrap();
        let cal = cap_gfunc(&bstar, t, &psi);
        let err = (gk - (1.0 + 2.0 * t - t * t) * cal).abs();
        worst = worst.max(err);
        worst_inverse_square = worst_inverse_square.max((gk - cal / (1.0 - t).powi(2)).abs());
        if i == 0 || err >= worst {
            example = format!("t = {t:.3}: G_k = {gk:.6}, (1+2t-t^2)G = {:.6}", (1.0 + 2.0 * t - t * t) * cal);
        }
    }
    let pass = worst <= 1e-10;
    verdict(
        12,
        "cap-coordinate identity",
        pass,
        &format!(
            "max |G_k - (1+2t-t^2) G| = {worst:.3e} (tol 1e-10), worst case {example}; \
             max |G_k - G/(1-t)^2| = {worst_inverse_square:.1e}"
        ),
        t0.elapsed(),
    );
}
