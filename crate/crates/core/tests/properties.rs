//! Structural invariants of the model checked on random states.

use num_complex::Complex64;
use proptest::prelude::*;

use toy_cascade::dynamics::{integrate, rhs, IntegratorConfig};
use toy_cascade::gibbs::{nearest_minimizer, signed_minimizer_state, SIGN_PATTERNS};
use toy_cascade::lattice::{
    from_madelung, grad_h, hamiltonian, hessian_form, mass, phase_rotate, taylor_coefficients, to_madelung,
    LatticeState,
};
use toy_cascade::minimization::{h_inphase, rearrange_nonincreasing, RhoProfile};

fn state(n: usize) -> impl Strategy<Value = LatticeState> {
    prop::collection::vec((-1.5f64..1.5, -1.5f64..1.5), 2 * n + 1)
        .prop_map(move |v| LatticeState::new(n, v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()).unwrap())
}

fn any_state() -> impl Strategy<Value = LatticeState> {
    (1usize..=5).prop_flat_map(state)
}

fn pair() -> impl Strategy<Value = (LatticeState, LatticeState)> {
    (1usize..=5).prop_flat_map(|n| (state(n), state(n)))
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn homogeneity(b in any_state(), lambda in 0.1f64..3.0) {
        let s = b.scale(lambda);
        prop_assert!(close(hamiltonian(&s), lambda.powi(4) * hamiltonian(&b), 1e-12));
        prop_assert!(close(mass(&s), lambda * lambda * mass(&b), 1e-12));
    }

    #[test]
    fn energy_bounds(b in any_state()) {
        let m = mass(&b);
        let h = hamiltonian(&b);
        prop_assert!(h >= -7.0 / 22.0 * m * m - 1e-9);
        prop_assert!(h <= 0.75 * m * m + 1e-9);
    }

    #[test]
    fn global_phase_and_conjugation(b in any_state(), theta in 0.0f64..7.0) {
        let h = hamiltonian(&b);
        prop_assert!(close(hamiltonian(&phase_rotate(&b, theta)), h, 1e-12));
        prop_assert!(close(hamiltonian(&b.conj()), h, 1e-12));
        // Time reversal: t -> -t together with b -> conj(b).
        let lhs = rhs(&b.conj());
        let r = rhs(&b).conj().scale(-1.0);
        prop_assert!(lhs.max_abs_diff(&r) <= 1e-12 * (1.0 + r.norm()));
    }

    #[test]
    fn single_site_sign_flip(b in any_state(), pick in 0usize..11) {
        let j = pick % b.len();
        let mut amps = b.amps().to_vec();
        amps[j] = -amps[j];
        let f = LatticeState::new(b.half_width(), amps).unwrap();
        prop_assert!(close(hamiltonian(&f), hamiltonian(&b), 1e-12));
        // The flow commutes with the flip.
        let mut expected = rhs(&b).into_amps();
        expected[j] = -expected[j];
        let expected = LatticeState::new(b.half_width(), expected).unwrap();
        prop_assert!(rhs(&f).max_abs_diff(&expected) <= 1e-12 * (1.0 + expected.norm()));
    }

    #[test]
    fn translation(b in state(2), shift in -2i64..=2) {
        // Embed a width-2 state in a width-5 lattice, then move it.
        let mut wide = vec![Complex64::new(0.0, 0.0); 11];
        wide[3..8].copy_from_slice(b.amps());
        let w = LatticeState::new(5, wide).unwrap();
        let t = w.translate(shift).unwrap();
        prop_assert!(close(hamiltonian(&t), hamiltonian(&b), 1e-12));
        prop_assert!(close(mass(&t), mass(&b), 1e-12));
    }

    #[test]
    fn quartic_expansion_is_exact((b, xi) in pair(), lambda in -2.0f64..2.0) {
        let c = taylor_coefficients(&b, &xi);
        let poly = c.iter().rev().fold(0.0, |acc, &cp| acc * lambda + cp);
        prop_assert!(close(hamiltonian(&b.axpy(lambda, &xi)), poly, 1e-10));
        prop_assert!(close(c[1], grad_h(&b).inner(&xi), 1e-10));
        prop_assert!(close(hessian_form(&b, &xi), 2.0 * c[2], 1e-12));
    }

    #[test]
    fn in_phase_reduction(n in 1usize..=5, rho in prop::collection::vec(0.0f64..2.0, 11), theta in 0.0f64..7.0) {
        let mut rho = rho;
        rho.truncate(2 * n + 1);
        let amps = rho.iter().map(|r| Complex64::from_polar(r.sqrt(), theta)).collect();
        let b = LatticeState::new(n, amps).unwrap();
        let p = RhoProfile::new(rho).unwrap();
        prop_assert!(close(hamiltonian(&b), h_inphase(&p), 1e-12));
        prop_assert!(h_inphase(&rearrange_nonincreasing(&p)) <= h_inphase(&p) + 1e-12 * (1.0 + p.mass().powi(2)));
    }

    #[test]
    fn madelung_round_trip(b in any_state()) {
        let back = from_madelung(&to_madelung(&b)).unwrap();
        prop_assert!(back.max_abs_diff(&b) <= 1e-12);
    }

    #[test]
    fn minimizer_orbit_is_recognised(
        n in 2usize..=5,
        k_raw in 0i64..64,
        theta in 0.0f64..std::f64::consts::TAU,
        s in 0usize..4,
        m in 0.2f64..3.0,
    ) {
        let k = k_raw % (2 * n as i64 - 1) - (n as i64 - 1);
        let b = signed_minimizer_state(m, k, theta, SIGN_PATTERNS[s], n).unwrap();
        prop_assert!(close(hamiltonian(&b), -7.0 / 22.0 * m * m, 1e-12));
        let near = nearest_minimizer(&b).unwrap();
        prop_assert_eq!(near.center, k);
        prop_assert_eq!(near.signs, SIGN_PATTERNS[s]);
        prop_assert!(near.distance <= 1e-6 * m.sqrt());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn short_time_conservation(b in state(3)) {
        let traj = integrate(&b, &IntegratorConfig::rk4(1e-3, 1.0).with_stride(100)).unwrap();
        let scale = 1.0 + mass(&b).powi(2);
        prop_assert!(traj.max_h_drift() <= 1e-8 * scale);
        prop_assert!(traj.max_m_drift() <= 1e-8 * scale);
    }
}
