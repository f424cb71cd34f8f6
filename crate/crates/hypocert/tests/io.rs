//! Matrix serialization round trips and number formatting.

use hypocert::hermite::Variant;
use hypocert::io::{fmt_sig, matrix_from_json, matrix_from_triplets, matrix_to_json, matrix_to_triplets};
use hypocert::linalg::{c64, CMatrix};
use hypocert::operators::OperatorPair;
use proptest::prelude::*;

#[test]
fn generator_round_trips_exactly() {
    let pair = OperatorPair::new(2, Variant::Energy, 15, 3.0).unwrap();
    let c = pair.generator(2f64.sqrt()).matrix;
    assert_eq!(matrix_from_json(&matrix_to_json(&c).unwrap()).unwrap(), c);
    assert_eq!(matrix_from_triplets(&matrix_to_triplets(&c)).unwrap(), c);
}

#[test]
fn triplet_format_lists_nonzeros_one_based() {
    let mut m = CMatrix::zeros(3, 3);
    m[(0, 2)] = c64(1.5, -2.0);
    let text = matrix_to_triplets(&m);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("%%MatrixMarket"));
    assert_eq!(lines[1], "3 3 1");
    assert_eq!(lines[2], "1 3 1.5e0 -2e0");
}

#[test]
fn malformed_input_is_rejected() {
    assert!(matrix_from_json("{\"n\": 2, \"rows\": [[[0,0]]]}").is_err());
    assert!(matrix_from_json("not json").is_err());
    assert!(matrix_to_json(&CMatrix::zeros(2, 3)).is_err());
    assert!(matrix_from_triplets("").is_err());
    assert!(matrix_from_triplets("2 2 1\n3 1 0 0\n").is_err());
    assert!(matrix_from_triplets("2 2 2\n1 1 0 0\n").is_err());
    assert!(matrix_from_triplets("2 2\n").is_err());
    assert!(matrix_from_triplets("2 2 1\n1 1 x 0\n").is_err());
}

#[test]
fn numbers_carry_fifteen_significant_digits() {
    assert_eq!(fmt_sig(0.5582962), "5.58296200000000e-1");
    assert_eq!(fmt_sig(-1.0), "-1.00000000000000e0");
    assert_eq!(fmt_sig(f64::INFINITY), "inf");
    let x = std::f64::consts::PI;
    let back: f64 = fmt_sig(x).parse().unwrap();
    assert!((back - x).abs() < 1e-14 * x);
}

proptest! {
    #[test]
    fn random_matrices_round_trip(n in 1usize..8, seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let m = CMatrix::from_fn(n, n, |_, _| {
            if rng.random_bool(0.3) { c64(0.0, 0.0) } else { c64(rng.random_range(-1e3..1e3), rng.random_range(-1.0..1.0)) }
        });
        prop_assert_eq!(matrix_from_json(&matrix_to_json(&m).unwrap()).unwrap(), m.clone());
        prop_assert_eq!(matrix_from_triplets(&matrix_to_triplets(&m)).unwrap(), m);
    }
}
