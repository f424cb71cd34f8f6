//! Closed-form minors, thresholds, rate constants and their numerical
//! verification.

use std::f64::consts::PI;

use approx::assert_relative_eq;
use hypocert::certificate::{
    alpha3_1d, alpha_plus, alpha_star, assemble_d_block, certify, certify_with, minor_table, minors,
    minors_1d, minors_2d, minors_3d, mu_limits_1d, mu_objective, p_bound, rate_constants,
    rational_factors, rational_monotone_check, sweep_lengths, verify_inequality,
};
use hypocert::hermite::Variant;
use hypocert::linalg::{determinant, hermitian_eigenvalues, is_hermitian, max_abs, min_eigenvalue, CMatrix};
use hypocert::lyapunov::{bgk_p, lyapunov_matrix};
use hypocert::operators::OperatorPair;
use hypocert::spectral::spectral_gap;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TWO_PI: f64 = 2.0 * PI;

fn block_size(d: usize) -> usize {
    match d {
        1 => 5,
        2 => 11,
        _ => 21,
    }
}

/// Principal minors by LU determinants: trailing in one dimension,
/// leading otherwise.
fn brute_minors(d: usize, m: &CMatrix) -> Vec<f64> {
    let n = m.nrows();
    (1..=n)
        .map(|j| {
            let start = if d == 1 { n - j } else { 0 };
            determinant(&m.view((start, start), (j, j)).into_owned()).re
        })
        .collect()
}

#[test]
fn one_dimensional_minor_examples() {
    let m = minors_1d(1.0, 0.1, 1.0);
    assert_eq!(m[0], 2.0);
    assert_relative_eq!(m[1], 2.8, epsilon = 1e-14);
    assert_eq!(minors_1d(3.0, 0.0, 2.0)[2], 0.0);
    let (k, a, l) = (1.7, 0.12, 0.8);
    let m = minors_1d(k, a, l);
    let d3 = a * (72.0 * l.powi(3) * a * a - (48.0 * l * l + 6.0 / (k * k)) * a + 8.0 * l);
    assert_relative_eq!(m[2], d3, max_relative = 1e-14);
    assert_relative_eq!(m[3], 2.0 * l * a * d3, max_relative = 1e-14);
    assert_relative_eq!(m[4], (2.0 * l * a).powi(2) * d3, max_relative = 1e-14);
}

#[test]
fn two_and_three_dimensional_minor_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..20 {
        let k = rng.random_range(1.0..10.0);
        let a = rng.random_range(0.0..0.2);
        let l = rng.random_range(0.2..5.0);
        let m2 = minors_2d(k, a, l);
        assert_relative_eq!(m2[3], 44.0 * (l * a).powi(4), max_relative = 1e-13);
        let d5 = 22.0 * l.powi(3) * a.powi(4) * (4.0 * l - 4.0 * l * l * a - a / (k * k));
        assert_relative_eq!(m2[4], d5, max_relative = 1e-12, epsilon = 1e-300);
        let m3 = minors_3d(k, a, l);
        let c = 2f64.sqrt() - 1.0;
        assert_relative_eq!(m3[1], 4.0 * c * (l * a).powi(2), max_relative = 1e-13);
        assert_relative_eq!(m3[4], 80.0 / 3.0 * c * (l * a).powi(5), max_relative = 1e-13);
    }
}

#[test]
fn factorization_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..20 {
        let k = rng.random_range(1.0..10.0);
        let a = rng.random_range(0.01..0.2);
        let l = rng.random_range(0.2..5.0);
        let m1 = minors_1d(k, a, l);
        assert_relative_eq!(m1[3], 2.0 * l * a * m1[2], max_relative = 1e-14);
        let m2 = minors_2d(k, a, l);
        assert_relative_eq!(m2[9], 2.0 * m2[8], max_relative = 1e-14);
        let m3 = minors_3d(k, a, l);
        assert_relative_eq!(m3[14], 2.0 * m3[13], max_relative = 1e-14);
        for (j, factor) in [(16, 2.0), (17, 4.0), (18, 8.0), (19, 16.0)] {
            assert_relative_eq!(m3[j], factor * m3[15], max_relative = 1e-14);
        }
    }
}

#[test]
fn closed_form_minors_match_determinants() {
    let mut rng = ChaCha8Rng::seed_from_u64(2718);
    for d in 1..=3 {
        for _ in 0..50 {
            let kappa = rng.random_range(1.0..10.0);
            let ell: f64 = rng.random_range(0.2..5.0);
            let (ap, _) = alpha_plus(d, ell).unwrap();
            let alpha = rng.random_range(0.0..1.0) * ap;
            let block = assemble_d_block(d, kappa, alpha, ell).unwrap();
            assert_eq!(block.nrows(), block_size(d));
            let closed = minors(d, kappa, alpha, ell).unwrap();
            let brute = brute_minors(d, &block);
            for (j, (c, b)) in closed.iter().zip(&brute).enumerate() {
                let rel = (c - b).abs() / c.abs().max(b.abs());
                assert!(rel < 1e-9, "d={d} δ{} κ={kappa} α={alpha} ℓ={ell}: {c} vs {b}", j + 1);
            }
        }
    }
}

#[test]
fn block_is_the_nontrivial_part_of_the_lyapunov_matrix() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for d in 1..=3 {
        let (size, variant) = match d {
            1 => (12, Variant::Tensor),
            2 => (28, Variant::Energy),
            _ => (56, Variant::Energy),
        };
        for _ in 0..5 {
            let length = rng.random_range(1.0..20.0);
            let kappa = rng.random_range(1.0..6.0);
            let alpha = rng.random_range(0.0..0.3);
            let pair = OperatorPair::new(d, variant, size, length).unwrap();
            let c = pair.generator(kappa).matrix;
            let p = bgk_p(d, kappa, alpha, size).unwrap();
            let mut full = lyapunov_matrix(&c, &p);
            let block = assemble_d_block(d, kappa, alpha, pair.ell()).unwrap();
            let n = block.nrows();
            let lead = full.view((0, 0), (n, n)).into_owned();
            assert!(max_abs(&(lead - &block)) < 1e-12);
            // Everything else is twice the identity.
            full.view_mut((0, 0), (n, n)).copy_from(&CMatrix::identity(n, n).scale(2.0));
            assert!(max_abs(&(full - CMatrix::identity(size, size).scale(2.0))) < 1e-12);
        }
    }
}

#[test]
fn trace_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..50 {
        let k = rng.random_range(1.0..10.0);
        let a = rng.random_range(0.0..0.2);
        let l = rng.random_range(0.2..5.0);
        let d1 = assemble_d_block(1, k, a, l).unwrap();
        let lower = d1.view((2, 2), (3, 3)).trace().re;
        assert!((lower - 4.0 * (1.0 - l * a)).abs() < 1e-12);
        assert!((assemble_d_block(2, k, a, l).unwrap().trace().re - 14.0).abs() < 1e-12);
        assert!((assemble_d_block(3, k, a, l).unwrap().trace().re - 32.0).abs() < 1e-12);
    }
}

#[test]
fn block_is_hermitian_and_rejects_bad_arguments() {
    for d in 1..=3 {
        assert!(is_hermitian(&assemble_d_block(d, 2.0, 0.1, 1.0).unwrap(), 0.0));
        assert!(assemble_d_block(d, 0.0, 0.1, 1.0).is_err());
        assert!(assemble_d_block(d, 1.0, -0.1, 1.0).is_err());
        assert!(assemble_d_block(d, 1.0, 0.1, 0.0).is_err());
        assert!(minors(d, 1.0, f64::NAN, 1.0).is_err());
    }
    assert!(assemble_d_block(4, 1.0, 0.1, 1.0).is_err());
    assert!(minors(4, 1.0, 0.1, 1.0).is_err());
    assert!(rational_factors(0, 1.0).is_err());
}

#[test]
fn minor_table_carries_the_factors() {
    let t = minor_table(3, 2.0, 0.1, 1.0).unwrap();
    assert_eq!(t.values.len(), 21);
    let names: Vec<&str> = t.factors.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(names, ["p6", "p8", "p10", "p11", "p12", "p14", "p16", "p21"]);
    let t = minor_table(2, 2.0, 0.1, 1.0).unwrap();
    assert_eq!(t.values.len(), 11);
    assert_eq!(t.factors.len(), 6);
}

#[test]
fn block_is_positive_below_threshold_and_indefinite_above_in_1d() {
    for length in [1.0, TWO_PI, 20.0] {
        let ell = TWO_PI / length;
        let (ap, _) = alpha_plus(1, ell).unwrap();
        for s in [0.1, 0.5, 0.99] {
            assert!(min_eigenvalue(&assemble_d_block(1, 1.0, s * ap, ell).unwrap()) > 0.0);
        }
        let above = assemble_d_block(1, 1.0, ap * (1.0 + 1e-6), ell).unwrap();
        assert!(min_eigenvalue(&above) < 0.0, "L={length}");
    }
}

#[test]
fn positive_below_threshold_in_all_dimensions() {
    for d in 2..=3 {
        let (ap, _) = alpha_plus(d, 1.0).unwrap();
        for kappa in [1.0, 1.5, 3.0, 10.0] {
            for s in [0.2, 0.6, 0.999] {
                let eig = hermitian_eigenvalues(&assemble_d_block(d, kappa, s * ap, 1.0).unwrap());
                assert!(eig[0] > 0.0, "d={d} κ={kappa} s={s}");
            }
        }
    }
}

#[test]
fn third_minor_threshold() {
    let l = TWO_PI;
    assert!((alpha3_1d(l) - (9.0 - 17f64.sqrt()) / 24.0).abs() < 1e-15);
    let mut sup: f64 = 0.0;
    for i in 0..4000 {
        let ell = 10f64.powf(-3.0 + 6.0 * i as f64 / 3999.0);
        let length = TWO_PI / ell;
        let a = alpha3_1d(length);
        assert!(a > 0.0 && a < 1.0 / (3.0 * ell));
        // It is the root of δ₃(1, ·).
        assert!(minors_1d(1.0, a, ell)[2].abs() < 1e-9 * a.max(1e-300) * (1.0 + ell.powi(3)));
        sup = sup.max(a);
    }
    assert!(sup < 0.257, "{sup}");
    assert!(alpha3_1d(1e-3) < 1e-3);
    assert!(alpha3_1d(1e-4) < alpha3_1d(1e-3));
}

#[test]
fn one_dimensional_threshold_is_the_third_minor_root() {
    for length in [0.5, TWO_PI, 30.0] {
        let (ap, list) = alpha_plus(1, TWO_PI / length).unwrap();
        let expected = alpha3_1d(length).min(p_bound(1));
        assert_relative_eq!(ap, expected, max_relative = 1e-12);
        assert!(list.iter().any(|t| t.condition == "P positive definite"));
    }
    assert!(alpha_plus(1, -1.0).is_err());
}

#[test]
fn certificate_values_at_two_pi() {
    let (ap, star, mu) = rate_constants(1, TWO_PI).unwrap();
    assert!((mu - 0.041812).abs() < 1e-5, "{mu}");
    assert!(0.0 < star && star < ap);

    let (ap, star, mu) = rate_constants(2, TWO_PI).unwrap();
    assert!((ap - 0.2102380141).abs() < 1e-8, "{ap}");
    assert!((star - 0.1453311384).abs() < 1e-6, "{star}");
    assert!((mu - 0.003013362117).abs() < 1e-8 * 0.003013362117, "{mu}");

    let (ap, star, mu) = rate_constants(3, TWO_PI).unwrap();
    assert!((ap - 0.214287873283229).abs() < 1e-8, "{ap}");
    assert!((star - 0.1644256115).abs() < 1e-6, "{star}");
    assert!((mu - 0.0001774540949).abs() < 1e-8 * 0.0001774540949, "{mu}");
    assert!(2.0 * mu >= 1.0 / 2820.0);
}

#[test]
fn rate_equals_determinant_expression_at_optimum() {
    // Independent evaluation of μ(α★) from an LU determinant of the block.
    for (d, factor, spread) in [
        (2, (10.0f64 / 14.0).powi(10), 6f64.sqrt()),
        (3, (20.0f64 / 32.0).powi(20), 2.0),
    ] {
        let (_, star, mu) = rate_constants(d, TWO_PI).unwrap();
        let det = determinant(&assemble_d_block(d, 1.0, star, 1.0).unwrap()).re;
        assert_relative_eq!(mu, factor * det / (2.0 * (1.0 + spread * star)), max_relative = 1e-12);
    }
}

#[test]
fn optimum_is_a_maximum_of_the_objective() {
    for d in 1..=3 {
        for length in [1.0, TWO_PI, 12.0] {
            let ell = TWO_PI / length;
            let (ap, _) = alpha_plus(d, ell).unwrap();
            let star = alpha_star(d, ell, ap);
            let best = mu_objective(d, star, ell);
            for i in 1..200 {
                let a = ap * i as f64 / 200.0;
                assert!(mu_objective(d, a, ell) <= best + 1e-15, "d={d} L={length} α={a}");
            }
        }
    }
}

#[test]
fn certificates_verify_and_have_ordered_constants() {
    for d in 1..=3 {
        let cert = certify(d, TWO_PI).unwrap();
        assert!(cert.valid, "d={d}: {:?}", cert.offending_kappa);
        assert_eq!(cert.verified.len(), 50);
        assert!(cert.verified.iter().all(|v| v.min_eig >= -1e-9));
        assert!(0.0 < cert.alpha_star && cert.alpha_star < cert.alpha_plus);
        assert!(cert.mu > 0.0);
        assert_relative_eq!(cert.lambda, 2.0 * cert.mu.min(1.0));
        assert!(cert.c_d <= 1.0 && 1.0 <= cert.upper_c_d);
        let json = serde_json::to_value(&cert).unwrap();
        for key in ["d", "L", "alpha_plus", "alpha_star", "mu", "lambda", "c_d", "C_d", "verified"] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
    }
    assert!(certify(0, TWO_PI).is_err());
    assert!(certify(1, -1.0).is_err());
}

#[test]
fn overstated_rate_is_caught_by_verification() {
    let (_, star, mu) = rate_constants(1, TWO_PI).unwrap();
    let sweep = verify_inequality(1, TWO_PI, star, 20.0 * mu, &[1.0, 2.0], 20).unwrap();
    assert!(sweep.iter().any(|v| v.min_eig < -1e-9));
    let cert = certify_with(2, 3.0, 10, 22).unwrap();
    assert!(cert.valid);
}

#[test]
fn small_length_limits() {
    let lim = mu_limits_1d().unwrap();
    let r = 13f64.sqrt();
    assert_relative_eq!(lim.mu_limit, 3.0 * (4.0 - r) * (3.0 - r).powi(2) / (1.0 - r).powi(2));
    assert!((lim.mu_limit - 0.06391670961).abs() < 1e-8);
    assert!((lim.mu_at_probe - lim.mu_limit).abs() < 1e-4);
    assert!((lim.alpha_over_l_at_probe - (4.0 - r) / (6.0 * PI)).abs() < 1e-4);
}

#[test]
fn rate_decreases_with_length_in_1d() {
    let lengths: Vec<f64> = (0..41).map(|i| 10f64.powf(-2.0 + 4.0 * i as f64 / 40.0)).collect();
    let sweep = sweep_lengths(1, &lengths).unwrap();
    for w in sweep.windows(2) {
        assert!(w[1].mu < w[0].mu, "L={} → {}", w[0].length, w[1].length);
    }
}

#[test]
fn certified_rate_lies_below_numerical_gap() {
    for length in [PI, TWO_PI, 4.0 * PI] {
        let (_, _, mu) = rate_constants(1, length).unwrap();
        let gap = spectral_gap(1, length, &[1.0, 2.0, 3.0], 60).unwrap().overall_gap;
        assert!(mu <= gap, "L={length}: μ={mu} gap={gap}");
    }
}

#[test]
fn monotone_check_examples() {
    assert!(rational_monotone_check(&[0.0, -4.0], &[0.0, 1.0], &[3.0], 1.0));
    // p₁ negative in the middle of the interval.
    assert!(!rational_monotone_check(&[0.0, -4.0], &[0.1, -1.0, 1.0], &[], 1.0));
    // p₀ + 2p₁ positive near the end.
    assert!(!rational_monotone_check(&[0.0, -1.0], &[0.0, 1.0], &[], 1.0));
    assert!(!rational_monotone_check(&[0.0], &[0.0], &[], -1.0));
}

#[test]
fn seventh_factor_is_smallest_at_the_first_mode() {
    let ell = 1.0;
    let p7 = rational_factors(2, ell)
        .unwrap()
        .into_iter()
        .find(|f| f.name == "p7")
        .unwrap();
    let (_, list) = alpha_plus(2, ell).unwrap();
    let bar = list
        .iter()
        .find(|t| t.condition == "p7: p0 + 2p1 ≤ 0")
        .unwrap()
        .alpha;
    assert!(rational_monotone_check(&p7.p0.0, &p7.p1.0, &p7.p2.0, bar * (1.0 - 1e-9)));
    for i in 0..=100 {
        let a = bar * i as f64 / 100.0;
        let at_one = p7.value(1.0, a);
        for k in 2..=20 {
            assert!(p7.value(k as f64, a) >= at_one - 1e-12, "α={a} κ={k}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn minors_are_positive_below_threshold(d in 1usize..=3, kappa in 1.0f64..10.0, s in 0.01f64..0.99, ell in 0.2f64..5.0) {
        let (ap, _) = alpha_plus(d, ell).unwrap();
        let values = minors(d, kappa, s * ap, ell).unwrap();
        prop_assert!(values.iter().all(|&x| x > 0.0), "{:?}", values);
    }
}
