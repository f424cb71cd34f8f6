//! Closed-form decay certificates for the linearized BGK model.
//!
//! For the transformation matrices `P_κ` of [`crate::lyapunov::bgk_p`], the
//! matrix `C_κ*P_κ + P_κC_κ` equals `2I` outside an explicit block `D`
//! (sizes 5, 11, 21 in one, two, three dimensions). Positivity of `D` is
//! certified by Sylvester's criterion on closed-form principal minors
//! `δ_j(κ, α)`, each a product of monomials in `ℓα` and rational factors
//! `p(κ, α) = (p₀(α) + p₁(α)/κ²)/κ² + p₂(α)`. When `p₁ ≥ 0` and
//! `p₀ + 2p₁ ≤ 0`, the factor is smallest at `κ = 1`, so a single mode
//! controls the whole family.
//!
//! The certificate then consists of
//!
//! - the positivity threshold `α₊` (smallest root among all factors and
//!   monotonicity conditions, capped by the bound keeping `P_κ ≻ 0`);
//! - the maximizer `α★` of the rate expression `μ(α)` on `[0, α₊]`;
//! - the rate `μ = μ(α★)`, `λ = 2 min{1, μ}`, and the norm-equivalence
//!   constants `c_d = (1 + sα★)⁻¹ ≤ 1 ≤ C_d = (1 − sα★)⁻¹`;
//! - a numerical check of `C_κ*P_κ + P_κC_κ − 2μP_κ ⪰ 0` over the first
//!   moduli.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{HypoError, Result};
use crate::hermite::{minimum_block_size, Variant};
use crate::linalg::{min_eigenvalue, CMatrix};
use crate::lyapunov::{bgk_p, bgk_p_spread, lyapunov_matrix};
use crate::operators::{first_moduli, OperatorPair};

/// Tolerance for the numerical verification of the matrix inequality.
pub const VERIFY_TOL: f64 = 1e-9;

/// Number of moduli checked by [`certify`].
pub const DEFAULT_VERIFY_MODULI: usize = 50;

/// Grid points for bracketing the first root of a threshold condition.
const SCAN_POINTS: usize = 4000;

/// Bisection steps after bracketing.
const BISECTION_STEPS: usize = 200;

/// Grid points of the coarse scan preceding the golden-section search.
const COARSE_POINTS: usize = 400;

/// Absolute tolerance of the golden-section search for `α★`.
const GOLDEN_TOL: f64 = 1e-12;

/// Real polynomial with ascending coefficients.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Derivative.
    pub fn derivative(&self) -> Poly {
        Poly(self.0.iter().enumerate().skip(1).map(|(i, &c)| i as f64 * c).collect())
    }

    /// Coefficient-wise `self + factor·other`.
    pub fn add_scaled(&self, other: &Poly, factor: f64) -> Poly {
        let n = self.0.len().max(other.0.len());
        Poly(
            (0..n)
                .map(|i| {
                    self.0.get(i).copied().unwrap_or(0.0)
                        + factor * other.0.get(i).copied().unwrap_or(0.0)
                })
                .collect(),
        )
    }
}

/// Rational factor `p(κ, α) = (p₀(α) + p₁(α)u)u + p₂(α)` with `u = 1/κ²`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RationalFactor {
    /// Factor name (`p5`, `p6`, …).
    pub name: String,
    /// Coefficient of `1/κ²`.
    pub p0: Poly,
    /// Coefficient of `1/κ⁴`.
    pub p1: Poly,
    /// `κ`-independent part.
    pub p2: Poly,
}

impl RationalFactor {
    fn new(name: &str, p0: Vec<f64>, p1: Vec<f64>, p2: Vec<f64>) -> Self {
        Self {
            name: name.to_string(),
            p0: Poly(p0),
            p1: Poly(p1),
            p2: Poly(p2),
        }
    }

    /// Evaluates `p(κ, α)`.
    pub fn value(&self, kappa: f64, alpha: f64) -> f64 {
        let u = 1.0 / (kappa * kappa);
        (self.p0.eval(alpha) + self.p1.eval(alpha) * u) * u + self.p2.eval(alpha)
    }

    /// Whether `p₀ + 2p₁` has a nonzero coefficient, i.e. the factor
    /// depends on `κ` and needs the monotonicity conditions.
    fn depends_on_kappa(&self) -> bool {
        self.p0.0.iter().chain(&self.p1.0).any(|&c| c != 0.0)
    }
}

fn scale_powers(coeffs: &[f64], ell: f64, shift: i32) -> Vec<f64> {
    // Coefficient of α^j carries ℓ^(j + shift).
    coeffs
        .iter()
        .enumerate()
        .map(|(j, &c)| c * ell.powi(j as i32 + shift))
        .collect()
}

/// The rational factors appearing in the minors of dimension `d`.
pub fn rational_factors(d: usize, ell: f64) -> Result<Vec<RationalFactor>> {
    let (s2, s3, s6) = (2f64.sqrt(), 3f64.sqrt(), 6f64.sqrt());
    let sp = |c: &[f64], shift: i32| scale_powers(c, ell, shift);
    let out = match d {
        1 => vec![RationalFactor::new(
            "p3",
            vec![0.0, -6.0],
            vec![],
            sp(&[8.0, -48.0, 72.0], 1),
        )],
        2 => vec![
            RationalFactor::new("p5", vec![0.0, -1.0], vec![], sp(&[4.0, -4.0], 1)),
            RationalFactor::new("p6", vec![0.0, -2.0], vec![], sp(&[2.0, -54.0 / 11.0], 1)),
            RationalFactor::new(
                "p7",
                sp(&[0.0, -34.0, 93.0], 0),
                vec![0.0, 0.0, 12.0],
                sp(&[22.0, -120.0, 162.0], 2),
            ),
            RationalFactor::new("p8", vec![0.0, -1.0], vec![], sp(&[4.0, -6.0, 2.0], 1)),
            RationalFactor::new(
                "p9",
                sp(&[0.0, -68.0, 198.0, -12.0], 0),
                vec![0.0, 0.0, 24.0],
                sp(&[44.0, -262.0, 411.0, -81.0], 2),
            ),
            RationalFactor::new(
                "p11",
                sp(&[0.0, -68.0, 294.0, -300.0, -72.0], 0),
                vec![0.0, 0.0, 24.0],
                sp(&[44.0, -358.0, 963.0, -909.0, 162.0], 2),
            ),
        ],
        3 => {
            let k21 = 4392.0 - 1728.0 * s2;
            vec![
                RationalFactor::new("p6", vec![0.0, -1.0], vec![], sp(&[4.0, -4.0], 1)),
                RationalFactor::new(
                    "p8",
                    vec![0.0, -5.0 / 6.0],
                    vec![],
                    sp(&[10.0 / 9.0 * (s2 - 1.0), (2.0 - 3.0 * s2) / 3.0], 1),
                ),
                RationalFactor::new(
                    "p10",
                    sp(&[0.0, -30.0, 9.0], -1),
                    vec![],
                    sp(&[40.0 * (s2 - 1.0), -6.0 * (8.0 * s2 - 6.0), 9.0 * (s2 - 1.0)], 1),
                ),
                RationalFactor::new(
                    "p11",
                    sp(&[0.0, -(216.0 + 144.0 * s2), 672.0 - 72.0 * s2, 54.0 * s2 - 144.0], 0),
                    sp(&[0.0, 0.0, 108.0, -18.0], -2),
                    sp(
                        &[
                            480.0 * (s2 - 1.0),
                            472.0 - 816.0 * s2,
                            456.0 * s2 - 24.0,
                            9.0 - 54.0 * s2,
                        ],
                        2,
                    ),
                ),
                RationalFactor::new("p12", vec![0.0, -2.0], vec![], sp(&[8.0, -12.0, 4.0], 1)),
                RationalFactor::new(
                    "p14",
                    sp(
                        &[
                            0.0,
                            -1152.0 * s6 - 1728.0 * s3 - 2304.0 * s2 - 3456.0,
                            -576.0 * s6 + 5952.0 * s3 - 1152.0 * s2 + 11760.0,
                            360.0 * s6 - 1824.0 * s3 + 720.0 * s2 - 3396.0,
                            -108.0 * s6 - 72.0 * s3 - 180.0 * s2 - 144.0,
                        ],
                        0,
                    ),
                    sp(&[0.0, 0.0, 864.0 * (s3 + 2.0), -144.0 * (s3 + 2.0)], -2),
                    sp(
                        &[
                            3840.0 * s6 - 3840.0 * s3 + 7680.0 * s2 - 7680.0,
                            4192.0 - 6528.0 * s6 + 1856.0 * s3 - 13056.0 * s2,
                            11056.0 + 3424.0 * s6 + 6368.0 * s3 + 6864.0 * s2,
                            -(9348.0 + 336.0 * s6 + 5400.0 * s3 + 624.0 * s2),
                            1440.0 - 180.0 * s6 + 828.0 * s3 - 324.0 * s2,
                        ],
                        2,
                    ),
                ),
                RationalFactor::new(
                    "p16",
                    sp(
                        &[
                            0.0,
                            -576.0 * s2 - 864.0,
                            -288.0 * s2 + 2976.0,
                            144.0 * s2 - 744.0,
                            -36.0 * (s2 + 2.0),
                        ],
                        0,
                    ),
                    sp(&[0.0, 0.0, 432.0, -72.0], -2),
                    sp(
                        &[
                            1920.0 * (s2 - 1.0),
                            -3264.0 * s2 + 928.0,
                            1632.0 * s2 + 3104.0,
                            -24.0 * s2 - 2412.0,
                            -144.0 * s2 + 216.0,
                            27.0,
                        ],
                        2,
                    ),
                ),
                RationalFactor::new(
                    "p21",
                    sp(
                        &[
                            0.0,
                            -14400.0 * s2 - 25056.0,
                            -130464.0 * s2 + 300768.0,
                            75024.0 * s2 - 175272.0,
                            -468.0 * s2 - 2664.0,
                            -1152.0 * s2 + 2928.0,
                        ],
                        0,
                    ),
                    sp(&[0.0, 0.0, 6.0 * k21, -k21], -2),
                    sp(
                        &[
                            1920.0 * (85.0 * s2 - 109.0),
                            -417216.0 * s2 + 464416.0,
                            158880.0 * s2 + 38048.0,
                            89448.0 * s2 - 353228.0,
                            -25248.0 * s2 + 95000.0,
                            7707.0,
                        ],
                        2,
                    ),
                ),
            ]
        }
        _ => return Err(HypoError::InvalidArgument(format!("dimension {d} not in 1..=3"))),
    };
    Ok(out)
}

fn check_args(kappa: f64, alpha: f64, ell: f64) -> Result<()> {
    if !(kappa.is_finite() && kappa != 0.0) {
        return Err(HypoError::InvalidArgument(format!("κ must be nonzero, got {kappa}")));
    }
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(HypoError::InvalidArgument(format!("α must be nonnegative, got {alpha}")));
    }
    if !(ell.is_finite() && ell > 0.0) {
        return Err(HypoError::InvalidArgument(format!("ℓ must be positive, got {ell}")));
    }
    Ok(())
}

fn factor_map(d: usize, kappa: f64, alpha: f64, ell: f64) -> Result<Vec<(String, f64)>> {
    Ok(rational_factors(d, ell)?
        .iter()
        .map(|f| (f.name.clone(), f.value(kappa, alpha)))
        .collect())
}

/// Trailing principal minors `δ₁..δ₅` of the one-dimensional `D` block.
pub fn minors_1d(kappa: f64, alpha: f64, ell: f64) -> [f64; 5] {
    let u = 1.0 / (kappa * kappa);
    let d3 = alpha * (72.0 * ell.powi(3) * alpha * alpha - (48.0 * ell * ell + 6.0 * u) * alpha + 8.0 * ell);
    let la = 2.0 * ell * alpha;
    [2.0, 4.0 * (1.0 - 3.0 * ell * alpha), d3, la * d3, la * la * d3]
}

/// Leading principal minors `δ₁..δ₁₁` of the two-dimensional `D` block.
pub fn minors_2d(kappa: f64, alpha: f64, ell: f64) -> [f64; 11] {
    let f = rational_factors(2, ell).expect("valid dimension");
    let p: Vec<f64> = f.iter().map(|x| x.value(kappa, alpha)).collect();
    let (p5, p6, p7, p8, p9, p11) = (p[0], p[1], p[2], p[3], p[4], p[5]);
    let (l, a) = (ell, alpha);
    let a4 = a.powi(4);
    let d5 = 22.0 * l.powi(3) * a4 * p5;
    let d9 = 8.0 * l * a4 * p8 * p9;
    [
        2.0 * l * a,
        4.0 * (l * a).powi(2),
        8.0 * (l * a).powi(3),
        44.0 * (l * a).powi(4),
        d5,
        d5 * p6 / l,
        2.0 * d5 * p7 / (11.0 * l * l),
        8.0 * l * a4 * p7 * p8,
        d9,
        2.0 * d9,
        32.0 * l * a4 * p8 * p11,
    ]
}

/// Leading principal minors `δ₁..δ₂₁` of the three-dimensional `D` block.
pub fn minors_3d(kappa: f64, alpha: f64, ell: f64) -> [f64; 21] {
    let f = rational_factors(3, ell).expect("valid dimension");
    let p: Vec<f64> = f.iter().map(|x| x.value(kappa, alpha)).collect();
    let (p6, p8, p10, p11, p12, p14, p16, p21) = (p[0], p[1], p[2], p[3], p[4], p[5], p[6], p[7]);
    let (l, a) = (ell, alpha);
    let (s2, s3) = (2f64.sqrt(), 3f64.sqrt());
    let c = s2 - 1.0;
    let la = l * a;
    let a5 = a.powi(5);
    let d8 = 12.0 * l * l * a5 * p6 * p6 * p8;
    let d11 = 2.0 / 9.0 * l * a5 * p6 * p6 * p11;
    let d14 = l * a5 * p12 * p12 * p14 / (9.0 * (1.0 + s3).powi(2));
    let d16 = 8.0 / 9.0 * (2.0 + s3) / (1.0 + s3).powi(2) * l * a5 * p12 * p12 * p16;
    let d21 = 256.0 * (s3 + 2.0) * (24.0 * s2 + 61.0) / (23121.0 * (s3 + 1.0).powi(2))
        * l
        * a5
        * p12
        * p12
        * p21;
    [
        2.0 * la,
        4.0 * c * la.powi(2),
        8.0 * c * la.powi(3),
        16.0 * c * la.powi(4),
        80.0 / 3.0 * c * la.powi(5),
        40.0 / 3.0 * c * l.powi(4) * a5 * p6,
        20.0 / 3.0 * c * l.powi(3) * a5 * p6 * p6,
        d8,
        2.0 * d8,
        4.0 / 3.0 * l * l * a5 * p6 * p6 * p10,
        d11,
        2.0 / 9.0 * l * a5 * p6 * p11 * p12,
        2.0 / 9.0 * l * a5 * p11 * p12 * p12,
        d14,
        2.0 * d14,
        d16,
        2.0 * d16,
        4.0 * d16,
        8.0 * d16,
        16.0 * d16,
        d21,
    ]
}

/// Closed-form minors for dimension `d` (trailing in 1D, leading otherwise).
pub fn minors(d: usize, kappa: f64, alpha: f64, ell: f64) -> Result<Vec<f64>> {
    check_args(kappa, alpha, ell)?;
    match d {
        1 => Ok(minors_1d(kappa, alpha, ell).to_vec()),
        2 => Ok(minors_2d(kappa, alpha, ell).to_vec()),
        3 => Ok(minors_3d(kappa, alpha, ell).to_vec()),
        _ => Err(HypoError::InvalidArgument(format!("dimension {d} not in 1..=3"))),
    }
}

/// Minor values together with the rational factors they are built from.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MinorTable {
    /// Velocity dimension.
    pub d: usize,
    /// Mode modulus.
    pub kappa: f64,
    /// Ansatz parameter.
    pub alpha: f64,
    /// `ℓ = 2π/L`.
    pub ell: f64,
    /// `δ₁, δ₂, …`.
    pub values: Vec<f64>,
    /// Values of the named rational factors.
    pub factors: Vec<(String, f64)>,
}

/// Evaluates the full minor table.
pub fn minor_table(d: usize, kappa: f64, alpha: f64, ell: f64) -> Result<MinorTable> {
    Ok(MinorTable {
        d,
        kappa,
        alpha,
        ell,
        values: minors(d, kappa, alpha, ell)?,
        factors: factor_map(d, kappa, alpha, ell)?,
    })
}

/// The explicit block `D` of `C_κ*P_κ + P_κC_κ` (size 5, 11 or 21).
pub fn assemble_d_block(d: usize, kappa: f64, alpha: f64, ell: f64) -> Result<CMatrix> {
    check_args(kappa, alpha, ell)?;
    let (s2, s3, s6) = (2f64.sqrt(), 3f64.sqrt(), 6f64.sqrt());
    let la = ell * alpha;
    let t = alpha / kappa;
    let re = |x: f64| Complex64::new(x, 0.0);
    let im = |x: f64| Complex64::new(0.0, x);
    let (diag, off): (Vec<f64>, Vec<(usize, usize, Complex64)>) = match d {
        1 => (
            vec![2.0 * la, 2.0 * la, 2.0 * la, 2.0 - 6.0 * la, 2.0],
            vec![(2, 3, im(-s3 * t)), (2, 4, re(2.0 * s3 * la))],
        ),
        2 => (
            vec![
                2.0 * la,
                2.0 * la,
                2.0 * la,
                6.0 * la,
                2.0 * (1.0 - la),
                2.0 * (1.0 - 2.0 * la),
                2.0 - 6.0 * la,
                2.0,
                2.0,
                2.0,
                2.0,
            ],
            vec![
                (0, 3, re(la)),
                (0, 5, re(-la)),
                (1, 5, im(-2.0 * t)),
                (1, 8, re(-s2 * la)),
                (2, 4, im(-t)),
                (2, 7, re(s2 * la)),
                (3, 5, re(la)),
                (3, 6, im(-s6 * t)),
                (3, 10, re(2.0 * s6 * la)),
                (6, 8, re(-s3 * la)),
            ],
        ),
        3 => {
            let mut diag = vec![
                2.0 * la,
                2.0 * (s2 - 1.0) * la,
                2.0 * la,
                2.0 * la,
                2.0 * la,
                2.0 - 2.0 * la,
                2.0 - 2.0 * la,
                2.0 - 2.0 * s2 * la,
                2.0,
                2.0,
                2.0 - 2.0 * la,
            ];
            diag.extend(std::iter::repeat_n(2.0, 10));
            (
                diag,
                vec![
                    (0, 4, re(s2 / s3 * la)),
                    (0, 7, re((s2 - 3.0) / s3 * la)),
                    (0, 9, re(s2 / s3 * la)),
                    (1, 7, im(-s3 * t)),
                    (1, 10, re((3.0 - s2) / s3 * la)),
                    (1, 13, re(-(s3 + 1.0) / 2.0 * la)),
                    (1, 15, re((s3 - 1.0) / 2.0 * la)),
                    (2, 5, im(-t)),
                    (2, 11, re(s2 * la)),
                    (3, 6, im(-t)),
                    (3, 12, re(s2 * la)),
                    (4, 7, re((1.0 - s2) * la)),
                    (4, 9, re(la)),
                    (4, 10, im(-t)),
                    (4, 20, re(2.0 * la)),
                    (7, 9, re(-s2 * la)),
                    (10, 13, re(-la / s3)),
                    (10, 15, re(-la / s3)),
                ],
            )
        }
        _ => return Err(HypoError::InvalidArgument(format!("dimension {d} not in 1..=3"))),
    };
    let n = diag.len();
    let mut m = CMatrix::zeros(n, n);
    for (i, v) in diag.into_iter().enumerate() {
        m[(i, i)] = re(v);
    }
    for (i, j, v) in off {
        m[(i, j)] = v;
        m[(j, i)] = v.conj();
    }
    Ok(m)
}

/// Closed-form threshold `α⁽³⁾ = (1 + 8ℓ² − √(1 + 16ℓ²))/(24ℓ³)` of the
/// one-dimensional third minor at `κ = 1`.
///
/// Evaluated in the equivalent form `8ℓ/(3(1 + 8ℓ² + √(1 + 16ℓ²)))`, which
/// avoids cancellation for small `ℓ`.
pub fn alpha3_1d(length: f64) -> f64 {
    let ell = 2.0 * PI / length;
    8.0 * ell / (3.0 * (1.0 + 8.0 * ell * ell + (1.0 + 16.0 * ell * ell).sqrt()))
}

/// A named threshold: first `α > 0` at which a condition fails.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Threshold {
    /// Condition label, e.g. `p11(1,α) > 0` or `p7: p1 ≥ 0`.
    pub condition: String,
    /// First root (or `+∞` if the condition holds on the whole range).
    pub alpha: f64,
}

/// First point in `(0, bound]` where `holds` becomes false, located by a
/// grid scan refined near zero followed by bisection.
fn first_failure(bound: f64, holds: impl Fn(f64) -> bool) -> f64 {
    let mut prev = 0.0;
    for i in 1..=SCAN_POINTS {
        let s = i as f64 / SCAN_POINTS as f64;
        let x = bound * s * s;
        if !holds(x) {
            let (mut lo, mut hi) = (prev, x);
            for _ in 0..BISECTION_STEPS {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if holds(mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return lo;
        }
        prev = x;
    }
    f64::INFINITY
}

/// Upper bound for `α` keeping `P_κ ≻ 0` for all `κ ≥ 1`.
pub fn p_bound(d: usize) -> f64 {
    1.0 / bgk_p_spread(d)
}

/// Computes `α₊` and the individual thresholds it is the minimum of.
pub fn alpha_plus(d: usize, ell: f64) -> Result<(f64, Vec<Threshold>)> {
    if !(ell.is_finite() && ell > 0.0) {
        return Err(HypoError::InvalidArgument(format!("ℓ must be positive, got {ell}")));
    }
    let bound = p_bound(d);
    let mut list = vec![Threshold {
        condition: "P positive definite".into(),
        alpha: bound,
    }];
    if d == 1 {
        list.push(Threshold {
            condition: "δ2 > 0".into(),
            alpha: 1.0 / (3.0 * ell),
        });
    }
    if d == 2 {
        // δ₅ carries 4ℓ − 4ℓ²α − α at κ = 1.
        list.push(Threshold {
            condition: "p5(1,α) > 0".into(),
            alpha: 4.0 * ell / (4.0 * ell * ell + 1.0),
        });
    }
    for f in rational_factors(d, ell)? {
        if d == 2 && f.name == "p5" {
            continue;
        }
        list.push(Threshold {
            condition: format!("{}(1,α) > 0", f.name),
            alpha: first_failure(bound, |a| f.value(1.0, a) > 0.0),
        });
        if f.depends_on_kappa() {
            let slope = f.p0.add_scaled(&f.p1, 2.0);
            let scale = |a: f64| f.p0.eval(a).abs().max(f.p1.eval(a).abs()).max(1e-300);
            list.push(Threshold {
                condition: format!("{}: p1 ≥ 0", f.name),
                alpha: first_failure(bound, |a| f.p1.eval(a) >= -1e-14 * scale(a)),
            });
            list.push(Threshold {
                condition: format!("{}: p0 + 2p1 ≤ 0", f.name),
                alpha: first_failure(bound, |a| slope.eval(a) <= 1e-14 * scale(a)),
            });
        }
    }
    let alpha = list.iter().map(|t| t.alpha).fold(f64::INFINITY, f64::min);
    Ok((alpha, list))
}

/// The rate expression `μ(α)` maximized by [`certify`].
///
/// - 1D: `δ₃(1,α)/(8(1 − ℓα)²(1 + α√(3+√6)))`
/// - 2D: `(10/14)¹⁰ δ₁₁(1,α)/(2(1 + √6α))`
/// - 3D: `(20/32)²⁰ δ₂₁(1,α)/(2(1 + 2α))`
pub fn mu_objective(d: usize, alpha: f64, ell: f64) -> f64 {
    let s = bgk_p_spread(d);
    match d {
        1 => minors_1d(1.0, alpha, ell)[2] / (8.0 * (1.0 - ell * alpha).powi(2) * (1.0 + s * alpha)),
        2 => (10.0f64 / 14.0).powi(10) * minors_2d(1.0, alpha, ell)[10] / (2.0 * (1.0 + s * alpha)),
        _ => (20.0f64 / 32.0).powi(20) * minors_3d(1.0, alpha, ell)[20] / (2.0 * (1.0 + s * alpha)),
    }
}

/// Maximizes `f` on `[0, hi]` by a coarse scan followed by golden-section
/// refinement around the best grid point.
fn maximize(hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let step = hi / COARSE_POINTS as f64;
    let best = (1..COARSE_POINTS)
        .map(|i| i as f64 * step)
        .max_by(|a, b| f(*a).total_cmp(&f(*b)))
        .unwrap_or(0.5 * hi);
    let (mut a, mut b) = ((best - step).max(0.0), (best + step).min(hi));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > GOLDEN_TOL {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        }
    }
    0.5 * (a + b)
}

/// `α★ = argmax_{α ∈ [0, α₊]} μ(α)`.
pub fn alpha_star(d: usize, ell: f64, alpha_plus: f64) -> f64 {
    maximize(alpha_plus, |a| mu_objective(d, a, ell))
}

/// One entry of the verification sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifiedMode {
    /// Mode modulus.
    pub kappa: f64,
    /// Smallest eigenvalue of `C_κ*P_κ + P_κC_κ − 2μP_κ`.
    pub min_eig: f64,
}

/// A decay certificate with its numerical verification.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecayCertificate {
    /// Velocity dimension.
    pub d: usize,
    /// Torus side length.
    #[serde(rename = "L")]
    pub length: f64,
    /// `ℓ = 2π/L`.
    pub ell: f64,
    /// Positivity threshold of the minor chain.
    pub alpha_plus: f64,
    /// Maximizer of the rate expression.
    pub alpha_star: f64,
    /// Certified rate constant.
    pub mu: f64,
    /// Entropy decay rate `2 min{1, μ}`.
    pub lambda: f64,
    /// Lower norm-equivalence constant.
    pub c_d: f64,
    /// Upper norm-equivalence constant.
    #[serde(rename = "C_d")]
    pub upper_c_d: f64,
    /// Per-modulus verification results.
    pub verified: Vec<VerifiedMode>,
    /// Whether every verification eigenvalue is at least `−1e-9`.
    pub valid: bool,
    /// Moduli at which the verification failed.
    pub offending_kappa: Vec<f64>,
}

/// Checks `C_κ*P_κ + P_κC_κ − 2μP_κ ⪰ −tol` at the given moduli, in parallel.
pub fn verify_inequality(
    d: usize,
    length: f64,
    alpha: f64,
    mu: f64,
    moduli: &[f64],
    size: usize,
) -> Result<Vec<VerifiedMode>> {
    let variant = if d == 1 { Variant::Tensor } else { Variant::Energy };
    let pair = OperatorPair::new(d, variant, size, length)?;
    moduli
        .par_iter()
        .map(|&kappa| {
            let c = pair.generator(kappa).matrix;
            let p = bgk_p(d, kappa, alpha, size)?;
            let m = lyapunov_matrix(&c, &p) - p * Complex64::new(2.0 * mu, 0.0);
            Ok(VerifiedMode {
                kappa,
                min_eig: min_eigenvalue(&m),
            })
        })
        .collect()
}

/// Computes `(α₊, α★, μ)` without the verification sweep.
pub fn rate_constants(d: usize, length: f64) -> Result<(f64, f64, f64)> {
    if !(length.is_finite() && length > 0.0) {
        return Err(HypoError::InvalidArgument(format!(
            "torus length must be positive, got {length}"
        )));
    }
    let ell = 2.0 * PI / length;
    let (ap, _) = alpha_plus(d, ell)?;
    let star = alpha_star(d, ell, ap);
    Ok((ap, star, mu_objective(d, star, ell)))
}

/// Certificate with a verification sweep over `moduli_count` moduli at
/// truncation `size`.
pub fn certify_with(d: usize, length: f64, moduli_count: usize, size: usize) -> Result<DecayCertificate> {
    let (ap, star, mu) = rate_constants(d, length)?;
    let s = bgk_p_spread(d);
    let moduli = first_moduli(d, moduli_count)?;
    let verified = verify_inequality(d, length, star, mu, &moduli, size)?;
    let offending_kappa: Vec<f64> = verified
        .iter()
        .filter(|v| v.min_eig < -VERIFY_TOL)
        .map(|v| v.kappa)
        .collect();
    Ok(DecayCertificate {
        d,
        length,
        ell: 2.0 * PI / length,
        alpha_plus: ap,
        alpha_star: star,
        mu,
        lambda: 2.0 * mu.min(1.0),
        c_d: 1.0 / (1.0 + s * star),
        upper_c_d: 1.0 / (1.0 - s * star),
        valid: offending_kappa.is_empty(),
        offending_kappa,
        verified,
    })
}

/// Certificate for dimension `d` and torus length `length`, verified over
/// the first [`DEFAULT_VERIFY_MODULI`] moduli at four times the block size.
pub fn certify(d: usize, length: f64) -> Result<DecayCertificate> {
    if !(1..=3).contains(&d) {
        return Err(HypoError::InvalidArgument(format!("dimension {d} not in 1..=3")));
    }
    certify_with(d, length, DEFAULT_VERIFY_MODULI, 4 * minimum_block_size(d))
}

/// Limits of the one-dimensional certificate as `L → 0`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct MuLimits1d {
    /// `3(4 − √13)(3 − √13)²/(1 − √13)²`.
    pub mu_limit: f64,
    /// `(4 − √13)/(6π)`.
    pub alpha_over_l_limit: f64,
    /// Length at which the numerical values were taken.
    pub probe_length: f64,
    /// `μ★(probe_length)`.
    pub mu_at_probe: f64,
    /// `α★(probe_length)/probe_length`.
    pub alpha_over_l_at_probe: f64,
}

/// Closed-form small-`L` limits with a numerical probe at `L = 10⁻³`.
pub fn mu_limits_1d() -> Result<MuLimits1d> {
    let r = 13f64.sqrt();
    let probe = 1e-3;
    let (_, star, mu) = rate_constants(1, probe)?;
    Ok(MuLimits1d {
        mu_limit: 3.0 * (4.0 - r) * (3.0 - r).powi(2) / (1.0 - r).powi(2),
        alpha_over_l_limit: (4.0 - r) / (6.0 * PI),
        probe_length: probe,
        mu_at_probe: mu,
        alpha_over_l_at_probe: star / probe,
    })
}

/// One point of a `μ★(L)` sweep.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SweepPoint {
    /// Torus length.
    #[serde(rename = "L")]
    pub length: f64,
    /// Positivity threshold.
    pub alpha_plus: f64,
    /// Maximizer.
    pub alpha_star: f64,
    /// Rate constant.
    pub mu: f64,
}

/// Rate constants over a list of lengths (computed in parallel).
pub fn sweep_lengths(d: usize, lengths: &[f64]) -> Result<Vec<SweepPoint>> {
    lengths
        .par_iter()
        .map(|&length| {
            let (alpha_plus, alpha_star, mu) = rate_constants(d, length)?;
            Ok(SweepPoint {
                length,
                alpha_plus,
                alpha_star,
                mu,
            })
        })
        .collect()
}

/// Checks the monotonicity conditions `p₁ ≥ 0` and `p₀ + 2p₁ ≤ 0` on
/// `[0, ᾱ]`, which make `p(κ, α) ≥ p(1, α)` for all `κ ≥ 1`.
///
/// The conditions are evaluated on a dense grid and at every interior
/// critical point of `p₁` and `p₀ + 2p₁` (located by sign changes of the
/// derivative and bisection). `p₂` does not enter the conditions.
pub fn rational_monotone_check(p0: &[f64], p1: &[f64], _p2: &[f64], alpha_bar: f64) -> bool {
    if !(alpha_bar.is_finite() && alpha_bar >= 0.0) {
        return false;
    }
    let p0 = Poly(p0.to_vec());
    let p1 = Poly(p1.to_vec());
    let slope = p0.add_scaled(&p1, 2.0);
    let magnitude = p0.0.iter().chain(&p1.0).map(|c| c.abs()).fold(0.0, f64::max).max(1.0);
    let slack = 1e-12 * magnitude;
    let ok = |a: f64| p1.eval(a) >= -slack && slope.eval(a) <= slack;
    let grid = 4000;
    let mut points: Vec<f64> = (0..=grid).map(|i| alpha_bar * i as f64 / grid as f64).collect();
    for q in [p1.derivative(), slope.derivative()] {
        for w in 0..grid {
            let (a, b) = (points[w], points[w + 1]);
            let (fa, fb) = (q.eval(a), q.eval(b));
            if fa == 0.0 {
                continue;
            }
            if fa * fb < 0.0 {
                let (mut lo, mut hi) = (a, b);
                for _ in 0..100 {
                    let mid = 0.5 * (lo + hi);
                    if q.eval(mid) * fa > 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                points.push(0.5 * (lo + hi));
            }
        }
    }
    points.into_iter().all(ok)
}
