//! Modal evolution, observables and the decay envelope.

use std::f64::consts::PI;

use approx::assert_relative_eq;
use hypocert::certificate::certify;
use hypocert::hermite::{lex_index, Variant};
use hypocert::linalg::c64;
use hypocert::simulation::{
    concentrated_initial_data, decay_envelope, entropy, evolve, l1_distance_1d, raised_cosine_coefficient,
    simulate, t_init, ModalState, Propagator, SimConfig, VelocityGrid,
};
use proptest::prelude::*;

const TWO_PI: f64 = 2.0 * PI;

fn unit_state(d: usize, variant: Variant, size: usize, index: usize) -> ModalState {
    let mut s = ModalState::zeros(d, TWO_PI, variant, size, 1).unwrap();
    for m in &mut s.modes {
        m.coeffs[index] = c64(1.0, 0.0);
    }
    s
}

#[test]
fn moments_of_basis_vectors() {
    let e0 = unit_state(1, Variant::Tensor, 6, 0).moments();
    assert_eq!((e0[0].sigma, e0[0].momentum[0], e0[0].tau), (c64(1.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)));
    let e1 = unit_state(1, Variant::Tensor, 6, 1).moments();
    assert_eq!((e1[0].sigma, e1[0].momentum[0], e1[0].tau), (c64(0.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)));
    let e2 = unit_state(1, Variant::Tensor, 6, 2).moments();
    assert_relative_eq!(e2[0].tau.re, 2f64.sqrt(), epsilon = 1e-15);
    assert_eq!(e2[0].sigma, c64(0.0, 0.0));

    // 3D tensor basis: τ = 3σ + √2 (ĥ_{200} + ĥ_{020} + ĥ_{002}).
    let mut s = ModalState::zeros(3, TWO_PI, Variant::Tensor, 20, 1).unwrap();
    s.modes[1].coeffs[0] = c64(0.5, 0.0);
    s.modes[1].coeffs[lex_index(&[0, 2, 0])] = c64(1.0, 0.0);
    s.modes[1].coeffs[lex_index(&[0, 0, 1])] = c64(0.0, 2.0);
    let m = &s.moments()[1];
    assert_relative_eq!(m.tau.re, 1.5 + 2f64.sqrt(), epsilon = 1e-14);
    assert_eq!(m.momentum, vec![c64(0.0, 0.0), c64(0.0, 0.0), c64(0.0, 2.0)]);

    // Energy coefficients are converted before taking moments.
    let energy = unit_state(2, Variant::Energy, 10, 0).moments();
    let tensor = {
        let mut t = ModalState::zeros(2, TWO_PI, Variant::Tensor, 10, 1).unwrap();
        let s = hypocert::hermite::basis_change_matrix(2, 10).unwrap();
        for m in &mut t.modes {
            for i in 0..10 {
                m.coeffs[i] = c64(s[(i, 0)], 0.0);
            }
        }
        t.moments()
    };
    for (a, b) in energy.iter().zip(&tensor) {
        assert!((a.tau - b.tau).norm() < 1e-14 && (a.sigma - b.sigma).norm() < 1e-14);
    }
}

#[test]
fn entropy_examples() {
    let zero = ModalState::zeros(1, TWO_PI, Variant::Tensor, 8, 3).unwrap();
    assert_eq!(entropy(&zero, 0.1, 0.0).unwrap(), 0.0);
    let mut mean = zero.clone();
    let k0 = mean.modes.iter().position(|m| m.kappa == 0.0).unwrap();
    mean.modes[k0].coeffs[3] = c64(1.0, 0.0);
    for gamma in [0.0, 1.0, 2.5] {
        assert_relative_eq!(entropy(&mean, 0.2, gamma).unwrap(), 1.0, epsilon = 1e-15);
    }
}

#[test]
fn zero_step_is_identity_and_mean_mode_decays_exactly() {
    let (state, _) = concentrated_initial_data(1, TWO_PI, 0.3, 4, 12).unwrap();
    let same = evolve(&state, 0.0).unwrap();
    for (a, b) in state.modes.iter().zip(&same.modes) {
        assert_eq!(a.coeffs, b.coeffs);
    }
    let mut s = ModalState::zeros(1, TWO_PI, Variant::Tensor, 12, 2).unwrap();
    let k0 = s.modes.iter().position(|m| m.kappa == 0.0).unwrap();
    for i in 3..12 {
        s.modes[k0].coeffs[i] = c64(i as f64, -1.0);
    }
    let next = evolve(&s, 1.0).unwrap();
    for i in 3..12 {
        let want = c64(i as f64, -1.0) * (-1.0f64).exp();
        assert!((next.modes[k0].coeffs[i] - want).norm() < 1e-14);
    }
    assert_eq!(next.time, 1.0);
}

#[test]
fn evolution_is_a_semigroup() {
    for d in 1..=3 {
        let size = [0, 12, 21, 35][d];
        let (state, _) = concentrated_initial_data(d, TWO_PI, 0.25, 3, size).unwrap();
        let two = evolve(&evolve(&state, 0.4).unwrap(), 0.7).unwrap();
        let one = evolve(&state, 1.1).unwrap();
        for (a, b) in one.modes.iter().zip(&two.modes) {
            let scale = a.coeffs.norm().max(1e-300);
            assert!((&a.coeffs - &b.coeffs).norm() <= 1e-9 * scale, "d={d} κ={}", a.kappa);
        }
    }
}

#[test]
fn reality_and_conservation_are_preserved() {
    let (mut state, _) = concentrated_initial_data(1, TWO_PI, 0.1, 8, 16).unwrap();
    let prop = Propagator::new(&state, 0.5).unwrap();
    for _ in 0..6 {
        prop.step(&mut state).unwrap();
        for m in &state.modes {
            let partner = state.modes.iter().find(|p| p.kappa == -m.kappa).unwrap();
            assert!((&m.coeffs - partner.coeffs.conjugate()).norm() < 1e-13);
        }
        let mean = state.moments().into_iter().find(|m| m.kappa == 0.0).unwrap();
        assert_eq!(mean.sigma, c64(0.0, 0.0));
        assert_eq!(mean.momentum[0], c64(0.0, 0.0));
        assert_eq!(mean.tau, c64(0.0, 0.0));
    }
    assert_relative_eq!(state.time, 3.0);
}

#[test]
fn container_filling_the_torus_is_equilibrium() {
    let (state, tail) = concentrated_initial_data(1, TWO_PI, 1.0, 8, 10).unwrap();
    assert_eq!(tail, 0.0);
    assert!(state.modes.iter().all(|m| m.coeffs.norm() == 0.0));
    assert!(concentrated_initial_data(1, TWO_PI, 0.0, 8, 10).is_err());
    assert!(concentrated_initial_data(1, TWO_PI, 1.5, 8, 10).is_err());
}

#[test]
fn raised_cosine_has_unit_mass_and_matches_quadrature() {
    let (eps, length) = (0.2, TWO_PI);
    assert_relative_eq!(raised_cosine_coefficient(eps, length, 0.0), 1.0, epsilon = 1e-14);
    // Direct midpoint quadrature of (1/L)∫χ(x)e^{−iωx}dx·L.
    let a = 0.5 * eps * length;
    let n = 20000;
    for omega in [1.0, 3.0, 7.0] {
        let sum: f64 = (0..n)
            .map(|j| {
                let x = -a + (j as f64 + 0.5) * 2.0 * a / n as f64;
                (1.0 + (2.0 * PI * x / (eps * length)).cos()) / (eps * length) * (omega * x).cos()
            })
            .sum::<f64>()
            * 2.0
            * a
            / n as f64;
        assert_relative_eq!(raised_cosine_coefficient(eps, length, omega), sum, epsilon = 1e-8);
    }
}

#[test]
fn initial_entropy_grows_as_the_container_shrinks() {
    let e = |eps: f64| {
        let (s, _) = concentrated_initial_data(1, TWO_PI, eps, 512, 4).unwrap();
        entropy(&s, 0.0, 0.0).unwrap()
    };
    // A unit-mass bump of width εL has squared L² norm of order 1/ε.
    let ratio = e(0.05) / e(0.1);
    assert!((ratio - 2.0).abs() < 0.3, "{ratio}");
    assert!(ratio <= 4.0 * 1.3);
}

#[test]
fn parseval_and_l1_bounds() {
    let (state, _) = concentrated_initial_data(1, TWO_PI, 0.3, 16, 24).unwrap();
    let grid = VelocityGrid::new(96, 24);
    let cert = certify(1, TWO_PI).unwrap();
    let prop = Propagator::new(&state, 0.5).unwrap();
    let mut s = state.clone();
    for _ in 0..8 {
        let h = s.h_norm();
        assert_relative_eq!(h * h, entropy(&s, 0.0, 0.0).unwrap(), max_relative = 1e-12);
        let l1 = l1_distance_1d(&s, 64, &grid).unwrap();
        assert!(l1 <= h + 1e-6, "{l1} vs {h}");
        let e = entropy(&s, cert.alpha_star, 0.0).unwrap();
        assert!(l1 <= (cert.upper_c_d * e).sqrt() + 1e-6);
        prop.step(&mut s).unwrap();
    }
    let zero = ModalState::zeros(1, TWO_PI, Variant::Tensor, 24, 16).unwrap();
    assert_eq!(l1_distance_1d(&zero, 64, &grid).unwrap(), 0.0);
    assert!(l1_distance_1d(&zero, 8, &grid).is_err());
    assert!(l1_distance_1d(&zero, 64, &VelocityGrid::new(96, 20)).is_err());
}

#[test]
fn l1_of_a_single_mode_matches_closed_form() {
    // ĥ_{±1,0} = c gives (f − M₁) = 2c cos(x) M₁(v), whose mean L¹ norm is 4c/π.
    let mut s = ModalState::zeros(1, TWO_PI, Variant::Tensor, 6, 1).unwrap();
    for m in &mut s.modes {
        if m.kappa != 0.0 {
            m.coeffs[0] = c64(0.1, 0.0);
        }
    }
    let grid = VelocityGrid::new(64, 6);
    let l1 = l1_distance_1d(&s, 4096, &grid).unwrap();
    assert_relative_eq!(l1, 0.4 / PI, max_relative = 1e-6);
}

#[test]
fn envelope_examples() {
    assert_relative_eq!(t_init(1.0, 4.0, 1.0), 0.0, epsilon = 1e-15);
    let (c, e0, lambda) = (1.3, 15.0, 0.0836);
    let t0 = t_init(c, e0, lambda);
    assert!(t0 > 0.0);
    assert_relative_eq!(decay_envelope(t0, c, e0, lambda), 2.0, epsilon = 1e-12);
    assert_eq!(decay_envelope(0.0, c, e0, lambda), 2.0);
    let later = decay_envelope(t0 + 2.0 / lambda, c, e0, lambda);
    assert_relative_eq!(later, 2.0 / std::f64::consts::E, max_relative = 1e-12);
}

fn small_config(d: usize) -> SimConfig {
    let cert = certify(d, TWO_PI).unwrap();
    SimConfig {
        d,
        length: TWO_PI,
        epsilon: 0.2,
        kmax: if d == 1 { 12 } else { 3 },
        size: [0, 16, 21, 35][d],
        alpha: cert.alpha_star,
        gamma: 0.0,
        tmax: 10.0,
        dt: 0.5,
        lambda: cert.lambda,
        upper_c: cert.upper_c_d,
        nx: 64,
        nv: 48,
    }
}

#[test]
fn entropy_decays_at_the_certified_rate() {
    for d in 1..=3 {
        let cfg = small_config(d);
        let traj = simulate(&cfg).unwrap();
        assert_eq!(traj.points.len(), 21);
        assert!(traj.e0 > 0.0);
        for w in traj.points.windows(2) {
            assert!(w[1].entropy <= w[0].entropy * (1.0 + 1e-12), "d={d} t={}", w[1].t);
        }
        for p in &traj.points {
            assert!(p.entropy <= (-cfg.lambda * p.t).exp() * traj.e0 * (1.0 + 1e-12));
            assert_eq!(p.l1.is_some(), d == 1);
        }
        let csv = traj.to_csv();
        assert!(csv.starts_with("t,entropy,h_norm,l1,envelope\n"));
        assert_eq!(csv.lines().count(), 22);
    }
}

#[test]
fn simulation_rejects_bad_steps() {
    let mut cfg = small_config(1);
    cfg.dt = 0.0;
    assert!(simulate(&cfg).is_err());
    let mut cfg = small_config(1);
    cfg.tmax = -1.0;
    assert!(simulate(&cfg).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn entropy_is_nonnegative_and_monotone(eps in 0.05f64..0.9, steps in 1usize..6) {
        let cert = certify(1, TWO_PI).unwrap();
        let (mut s, _) = concentrated_initial_data(1, TWO_PI, eps, 10, 14).unwrap();
        let prop = Propagator::new(&s, 0.3).unwrap();
        let mut prev = entropy(&s, cert.alpha_star, 0.0).unwrap();
        prop_assert!(prev >= 0.0);
        for _ in 0..steps {
            prop.step(&mut s).unwrap();
            let e = entropy(&s, cert.alpha_star, 0.0).unwrap();
            prop_assert!(e >= 0.0 && e <= prev * (1.0 + 1e-12));
            prev = e;
        }
    }
}
