//! Transformation matrices: eigenvector construction, perturbative
//! ansatzes, first-order slopes and the explicit BGK families.

use std::f64::consts::PI;

use approx::assert_relative_eq;
use hypocert::eigen::complex_eigenvalues;
use hypocert::hermite::Variant;
use hypocert::linalg::{c64, hermitian_eigenvalues, is_hermitian, max_abs, min_eigenvalue, to_complex, CMatrix, I};
use hypocert::lyapunov::{
    ansatz_chain3, ansatz_dimker1, ansatz_dimker2, bgk_ansatz, bgk_p, bgk_p_block, bgk_p_eigenvalues,
    bgk_p_entries, bgk_p_spread, bgk_perturbation, certified_rate, chain3_conditions, kato_slopes,
    lyapunov_matrix, optimal_p, PAnsatz, Pattern,
};
use hypocert::operators::OperatorPair;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-10;

fn real(rows: usize, data: &[f64]) -> CMatrix {
    CMatrix::from_row_slice(rows, rows, &data.iter().map(|&x| c64(x, 0.0)).collect::<Vec<_>>())
}

fn diag(values: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        values.len(),
        values.iter().map(|&x| c64(x, 0.0)),
    ))
}

fn random_complex(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

/// Asserts that a certified ansatz is a genuine Lyapunov matrix.
fn check_ansatz(ans: &PAnsatz, c1: &CMatrix, c2: &CMatrix) {
    let c = c1 * I + c2;
    assert!(is_hermitian(&ans.p, 1e-12));
    assert!(ans.scale > 0.0 && ans.scale <= 1.0);
    assert!(min_eigenvalue(&ans.p) > 0.0);
    assert_relative_eq!(ans.min_eig_p, min_eigenvalue(&ans.p), epsilon = 1e-12);
    let lyap = lyapunov_matrix(&c, &ans.p);
    assert!(min_eigenvalue(&lyap) > 0.0);
    assert!(ans.rate > 0.0);
    assert_relative_eq!(ans.rate, certified_rate(&c, &ans.p).unwrap(), epsilon = 1e-12);
    // The rate never exceeds the spectral abscissa of C.
    let abscissa = complex_eigenvalues(&c).unwrap().iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
    assert!(ans.rate <= abscissa + 1e-10);
}

#[test]
fn optimal_p_of_hermitian_generator_is_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let a = random_complex(&mut rng, 6);
    let c = &a * a.adjoint() + CMatrix::identity(6, 6).scale(0.1);
    let res = optimal_p(&c, None).unwrap();
    assert!(max_abs(&(&res.p - CMatrix::identity(6, 6))) < 1e-10);
    assert_relative_eq!(res.mu, min_eigenvalue(&c), epsilon = 1e-10);
    assert_relative_eq!(res.condition, 1.0, epsilon = 1e-8);
}

#[test]
fn optimal_p_attains_spectral_abscissa() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let m = random_complex(&mut rng, 5);
        let shift = complex_eigenvalues(&m).unwrap().iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
        let c = &m + CMatrix::identity(5, 5).scale(0.3 - shift);
        let res = optimal_p(&c, None).unwrap();
        assert_relative_eq!(res.mu, 0.3, epsilon = 1e-10);
        let rate = certified_rate(&c, &res.p).unwrap();
        assert_relative_eq!(rate, res.mu, epsilon = 1e-8);
        let weighted = optimal_p(&c, Some(&[1.0, 2.0, 3.0, 4.0, 5.0])).unwrap();
        assert_relative_eq!(certified_rate(&c, &weighted.p).unwrap(), 0.3, epsilon = 1e-8);
    }
}

#[test]
fn optimal_p_rejects_bad_input() {
    let c = CMatrix::identity(3, 3);
    assert!(optimal_p(&c, Some(&[1.0, 2.0])).is_err());
    assert!(optimal_p(&c, Some(&[1.0, 0.0, 1.0])).is_err());
    let jordan = real(2, &[1.0, 1.0, 0.0, 1.0]);
    assert!(optimal_p(&jordan, None).is_err());
}

/// `(ℓ L₁, L₂)` for the one-dimensional BGK model at `κ = 1`.
fn bgk_1d(size: usize, length: f64) -> (CMatrix, CMatrix) {
    let pair = OperatorPair::new(1, Variant::Tensor, size, length).unwrap();
    (to_complex(&pair.l1).scale(pair.ell()), to_complex(&pair.l2))
}

#[test]
fn bgk_slopes_equal_twice_ell_alpha() {
    for length in [2.0 * PI, 5.0, 1.0] {
        let ell = 2.0 * PI / length;
        let (c1, c2) = bgk_1d(10, length);
        for alpha in [0.05, 0.2, 0.4] {
            let a = bgk_perturbation(1, alpha, 10).unwrap();
            let slopes = kato_slopes(&c1, &c2, &a, TOL).unwrap();
            assert_eq!(slopes.len(), 3);
            for s in slopes {
                assert_relative_eq!(s, 2.0 * ell * alpha, epsilon = 1e-12);
            }
        }
    }
}

#[test]
fn slopes_match_finite_differences() {
    let (c1, c2) = bgk_1d(10, 2.0 * PI);
    let c = &c1 * I + &c2;
    let a = bgk_perturbation(1, 0.3, 10).unwrap();
    let slopes = kato_slopes(&c1, &c2, &a, TOL).unwrap();
    let r = 1e-4;
    let p = CMatrix::identity(10, 10) + &a * c64(r, 0.0);
    let eig = hermitian_eigenvalues(&lyapunov_matrix(&c, &p));
    for (k, s) in slopes.iter().enumerate() {
        assert!((eig[k] / r - s).abs() < 1e-3, "{} vs {s}", eig[k] / r);
    }
}

#[test]
fn zero_perturbation_has_zero_slopes() {
    let (c1, c2) = bgk_1d(8, 2.0 * PI);
    let slopes = kato_slopes(&c1, &c2, &CMatrix::zeros(8, 8), TOL).unwrap();
    assert_eq!(slopes.len(), 3);
    assert!(slopes.iter().all(|s| s.abs() < 1e-15));
}

#[test]
fn slopes_reject_bad_input() {
    let (c1, c2) = bgk_1d(8, 2.0 * PI);
    assert!(kato_slopes(&c1, &c2, &CMatrix::zeros(7, 7), TOL).is_err());
    let mut a = CMatrix::zeros(8, 8);
    a[(0, 1)] = c64(1.0, 0.0);
    assert!(kato_slopes(&c1, &c2, &a, TOL).is_err());
}

#[test]
fn one_dimensional_kernel() {
    let c1 = real(3, &[0.5, 1.0, 0.0, 1.0, -0.3, 0.7, 0.0, 0.7, 0.2]);
    let c2 = diag(&[0.0, 1.0, 2.0]);
    let ans = ansatz_dimker1(&c1, &c2, TOL).unwrap();
    assert_eq!(ans.pattern, Pattern::DimKer1);
    check_ansatz(&ans, &c1, &c2);
    // The parameter is rotated by −π/2 against the coupling, so its
    // first-order effect is positive.
    assert!((c64(1.0, 0.0) * ans.lambdas[0].conj()).im > 0.0);

    // Kernel not in leading position and a non-diagonal C₂.
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let q = random_complex(&mut rng, 3).qr().q();
    let d1 = &q * &c1 * q.adjoint();
    let d2 = &q * &c2 * q.adjoint();
    let d1 = (&d1 + d1.adjoint()).scale(0.5);
    let d2 = (&d2 + d2.adjoint()).scale(0.5);
    let ans = ansatz_dimker1(&d1, &d2, TOL).unwrap();
    check_ansatz(&ans, &d1, &d2);
}

#[test]
fn one_dimensional_kernel_failures() {
    let c2 = diag(&[0.0, 1.0, 2.0]);
    let decoupled = diag(&[1.0, 2.0, 3.0]);
    assert!(ansatz_dimker1(&decoupled, &c2, TOL).is_err());
    assert!(ansatz_dimker1(&decoupled, &diag(&[0.0, 0.0, 1.0]), TOL).is_err());
}

#[test]
fn two_dimensional_kernel_case_2a() {
    // Kernel {1, 2} coupled to two different decaying modes.
    let c1 = real(
        4,
        &[0.0, 0.0, 0.4, 1.0, 0.0, 0.0, 1.0, 0.3, 0.4, 1.0, 0.0, 0.0, 1.0, 0.3, 0.0, 0.0],
    );
    let c2 = diag(&[0.0, 0.0, 1.0, 1.0]);
    let ans = ansatz_dimker2(&c1, &c2, TOL).unwrap();
    assert_eq!(ans.pattern, Pattern::Case2A);
    check_ansatz(&ans, &c1, &c2);
    // One of the cross products vanishing exercises the fallback weights.
    let c1 = real(
        4,
        &[0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.5, 0.0, 1.0, 0.0, 0.0, 1.0, 0.5, 0.0, 0.0],
    );
    let ans = ansatz_dimker2(&c1, &c2, TOL).unwrap();
    assert_eq!(ans.pattern, Pattern::Case2A);
    check_ansatz(&ans, &c1, &c2);
}

#[test]
fn two_dimensional_kernel_case_2b1() {
    // Chain: first kernel vector talks only to the second one, which talks
    // to the decaying mode.
    let c1 = real(3, &[0.2, 1.0, 0.0, 1.0, -0.1, 0.8, 0.0, 0.8, 0.0]);
    let c2 = diag(&[0.0, 0.0, 1.5]);
    let ans = ansatz_dimker2(&c1, &c2, TOL).unwrap();
    assert_eq!(ans.pattern, Pattern::Case2B1);
    check_ansatz(&ans, &c1, &c2);
    let (l1, l2) = (ans.lambdas[0], ans.lambdas[1]);
    let a1 = (c64(1.0, 0.0) * l1.conj()).im;
    let b1 = (c64(0.8, 0.0) * l2.conj()).im;
    assert!(0.0 < a1 && a1 < b1, "{a1} {b1}");
}

#[test]
fn two_dimensional_kernel_case_2b2() {
    // Rank-one coupling block with both kernel rows nonzero.
    let c1 = real(3, &[0.0, 0.5, 1.0, 0.5, 0.3, 2.0, 1.0, 2.0, 0.0]);
    let c2 = diag(&[0.0, 0.0, 1.0]);
    let ans = ansatz_dimker2(&c1, &c2, TOL).unwrap();
    assert_eq!(ans.pattern, Pattern::Case2B2);
    check_ansatz(&ans, &c1, &c2);
    // The stored unitary decouples its first kernel direction from mode 3.
    let u = ans.unitary.as_ref().unwrap();
    let rotated = u.adjoint() * &c1 * u;
    assert!(is_hermitian(&rotated, 1e-12));
}

#[test]
fn two_dimensional_kernel_failures() {
    let c2 = diag(&[0.0, 0.0, 1.0]);
    let invariant = real(3, &[0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
    assert!(ansatz_dimker2(&invariant, &c2, TOL).is_err());
    // Decoupled chain link c₁₂ = 0 with c₁₁ = c₂₂: not hypocoercive.
    let broken = real(3, &[0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0]);
    assert!(ansatz_dimker2(&broken, &c2, TOL).is_err());
    assert!(ansatz_dimker2(&broken, &diag(&[0.0, 1.0, 1.0]), TOL).is_err());
}

#[test]
fn chain_of_three_on_bgk_1d() {
    let (c1, c2) = bgk_1d(6, 2.0 * PI);
    let ans = ansatz_chain3(&c1, &c2, TOL).unwrap();
    assert_eq!(ans.pattern, Pattern::Chain3);
    check_ansatz(&ans, &c1, &c2);
    let lambdas = [ans.lambdas[0], ans.lambdas[1], ans.lambdas[2]];
    assert!(chain3_conditions(&c1, &lambdas).satisfied());
}

#[test]
fn chain_conditions_fail_without_middle_link() {
    let (c1, _) = bgk_1d(6, 2.0 * PI);
    let l = [c64(0.0, -1.0), c64(0.0, 0.0), c64(0.0, -3.0)];
    let cond = chain3_conditions(&c1, &l);
    assert!(!cond.ordered);
    assert!(!cond.satisfied());
    assert_eq!(cond.first_order[1], 0.0);
}

#[test]
fn chain_rejects_other_shapes() {
    let (c1, c2) = bgk_1d(6, 2.0 * PI);
    // Unequal diagonal in the kernel block.
    let mut shifted = c1.clone();
    shifted[(0, 0)] = c64(0.5, 0.0);
    assert!(ansatz_chain3(&shifted, &c2, TOL).is_err());
    // Wrong kernel dimension.
    assert!(ansatz_chain3(&c1, &diag(&[0.0, 0.0, 1.0, 1.0, 1.0, 1.0]), TOL).is_err());
}

#[test]
fn bgk_entry_pattern() {
    let a = 0.1;
    let (s2, s3, s6) = (2f64.sqrt(), 3f64.sqrt(), 6f64.sqrt());
    assert_eq!(bgk_p_entries(1, a).unwrap(), vec![(0, 1, a), (1, 2, s2 * a), (2, 3, s3 * a)]);
    assert_eq!(
        bgk_p_entries(2, a).unwrap(),
        vec![(0, 1, a), (1, 5, 2.0 * a), (2, 4, a), (3, 6, s6 * a)]
    );
    assert_eq!(
        bgk_p_entries(3, a).unwrap(),
        vec![(0, 1, a), (1, 7, s3 * a), (2, 5, a), (3, 6, a), (4, 10, a)]
    );
    assert!(bgk_p_entries(4, a).is_err());
    let p = bgk_p(1, 2.0, 0.4, 6).unwrap();
    assert_eq!(p[(0, 1)], c64(0.0, -0.2));
    assert_eq!(p[(1, 0)], c64(0.0, 0.2));
    assert_eq!(p[(4, 4)], c64(1.0, 0.0));
    // Negative wave numbers give the complex conjugate.
    let q = bgk_p(1, -2.0, 0.4, 6).unwrap();
    assert!(max_abs(&(q - p.map(|z| z.conj()))) == 0.0);
    assert!(bgk_p(1, 0.0, 0.4, 6).is_err());
    assert!(bgk_p(1, 1.0, -0.1, 6).is_err());
    assert!(bgk_p(2, 1.0, 0.1, 6).is_err());
}

#[test]
fn bgk_eigenvalue_fixtures_and_sandwich() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for dim in 1..=3 {
        let block = bgk_p_block(dim);
        let s = bgk_p_spread(dim);
        for _ in 0..10 {
            let kappa = rng.random_range(1.0..6.0);
            let alpha = rng.random_range(0.0..0.4);
            let p = bgk_p(dim, kappa, alpha, block + 2).unwrap();
            let got = hermitian_eigenvalues(&p.view((0, 0), (block, block)).into_owned());
            let want = bgk_p_eigenvalues(dim, kappa, alpha);
            for (g, w) in got.iter().zip(&want) {
                assert_relative_eq!(*g, *w, epsilon = 1e-13);
            }
            let all = hermitian_eigenvalues(&p);
            let t = s * alpha / kappa;
            assert_relative_eq!(all[0], 1.0 - t, epsilon = 1e-13);
            assert_relative_eq!(*all.last().unwrap(), 1.0 + t, epsilon = 1e-13);
        }
    }
}

#[test]
fn bgk_ansatz_certifies_small_alpha() {
    for dim in 1..=3 {
        let size = match dim {
            1 => 12,
            2 => 21,
            _ => 35,
        };
        let variant = if dim == 1 { Variant::Tensor } else { Variant::Energy };
        let pair = OperatorPair::new(dim, variant, size, 2.0 * PI).unwrap();
        for kappa in [1.0, 2.0] {
            let c = pair.generator(kappa).matrix;
            let ans = bgk_ansatz(dim, &c, kappa, 0.1).unwrap();
            assert!(ans.min_eig_p > 0.0);
            assert!(ans.min_eig_lyapunov > 0.0, "dim {dim} κ {kappa}");
            assert!(ans.rate > 0.0);
            assert_relative_eq!(ans.scale, 1.0 / kappa);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bgk_p_is_hermitian_and_sandwiched(dim in 1usize..=3, kappa in 0.5f64..10.0, alpha in 0.0f64..0.2) {
        let p = bgk_p(dim, kappa, alpha, bgk_p_block(dim)).unwrap();
        prop_assert!(is_hermitian(&p, 0.0));
        let eig = hermitian_eigenvalues(&p);
        let t = bgk_p_spread(dim) * alpha / kappa;
        prop_assert!(eig[0] >= 1.0 - t - 1e-12);
        prop_assert!(*eig.last().unwrap() <= 1.0 + t + 1e-12);
    }

    #[test]
    fn optimal_p_rate_is_certified(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_complex(&mut rng, 4);
        let c = &m + CMatrix::identity(4, 4).scale(3.0);
        if let Ok(res) = optimal_p(&c, None) {
            let rate = certified_rate(&c, &res.p).unwrap();
            prop_assert!((rate - res.mu).abs() < 1e-7 * res.condition.max(1.0));
        }
    }
}

