//! Lyapunov transformation matrices `P` for hypocoercive generators.
//!
//! For `C = iC₁ + C₂`, a Hermitian `P ≻ 0` with `C*P + PC ⪰ 2μP` yields
//! `‖x(t)‖_P ≤ e^{−μt}‖x(0)‖_P` for `x' = −Cx`. This module provides
//!
//! - the eigenvector construction `P = Σ b_j w̄_j w_jᵀ` from left
//!   eigenvectors, which attains `μ = min Re λ(C)`;
//! - perturbative ansatzes `P = I + rA` for kernels of dimension one, two
//!   (cases 2A, 2B1, 2B2) and three (coupling chain), where `A` places
//!   parameters at the coupling entries of `C₁` and `r` is certified by an
//!   explicit positive-definiteness check;
//! - first-order slopes of the kernel eigenvalues of `C*P(r) + P(r)C`;
//! - the explicit BGK families `P_κ` in one, two and three dimensions.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigen::{eigen_decomposition, DEFECTIVE_CONDITION};
use crate::error::{HypoError, Result};
use crate::hermite::minimum_block_size;
use crate::linalg::{
    condition_number, hermitian_eigen, hermitian_eigenvalues, inv_sqrt_pd, is_hermitian, max_abs,
    min_eigenvalue, null_space, numerical_rank, permutation_matrix, CMatrix, I,
};

/// Maximum number of halvings or bisection steps in the scale search.
pub const MAX_SCALE_STEPS: usize = 40;

/// Structural pattern of a transformation matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pattern {
    /// One-dimensional kernel: a single coupling parameter.
    DimKer1,
    /// Two-dimensional kernel coupled to two different decaying modes.
    Case2A,
    /// Two-dimensional kernel with a chain `∘ → ∘ → •`.
    Case2B1,
    /// Two-dimensional kernel with a rank-one coupling block, rotated to 2B1.
    Case2B2,
    /// Three-dimensional kernel with a chain `∘ → ∘ → ∘ → •`.
    Chain3,
    /// BGK family in one velocity dimension.
    Bgk1d,
    /// BGK family in two velocity dimensions.
    Bgk2d,
    /// BGK family in three velocity dimensions.
    Bgk3d,
}

/// A certified transformation matrix `P = I + r·Q (U A U*) Q*`.
#[derive(Clone, Debug)]
pub struct PAnsatz {
    /// Structural pattern.
    pub pattern: Pattern,
    /// Unscaled parameters `λ_j` placed in `A`.
    pub lambdas: Vec<Complex64>,
    /// Certified scale `r ∈ (0, 1]`.
    pub scale: f64,
    /// Unitary change of basis applied before placing the parameters
    /// (permutation or eigenbasis of `C₂`, composed with `U` for case 2B2).
    pub unitary: Option<CMatrix>,
    /// The resulting transformation matrix in the original coordinates.
    pub p: CMatrix,
    /// Smallest eigenvalue of `P`.
    pub min_eig_p: f64,
    /// Smallest eigenvalue of `C*P + PC`.
    pub min_eig_lyapunov: f64,
    /// Largest `μ` with `C*P + PC ⪰ 2μP`.
    pub rate: f64,
}

/// Returns `C*P + PC`.
pub fn lyapunov_matrix(c: &CMatrix, p: &CMatrix) -> CMatrix {
    c.adjoint() * p + p * c
}

/// Largest `μ` with `C*P + PC − 2μP ⪰ 0`, i.e. half the smallest eigenvalue
/// of `P^{-1/2}(C*P + PC)P^{-1/2}`. Returns `None` if `P` is not positive
/// definite.
pub fn certified_rate(c: &CMatrix, p: &CMatrix) -> Option<f64> {
    let root = inv_sqrt_pd(p)?;
    let m = &root * lyapunov_matrix(c, p) * &root;
    Some(0.5 * min_eigenvalue(&m))
}

/// Result of the eigenvector construction.
#[derive(Clone, Debug)]
pub struct OptimalP {
    /// Hermitian positive definite transformation matrix.
    pub p: CMatrix,
    /// `min Re λ(C)`, the rate attained by `P`.
    pub mu: f64,
    /// Condition number of the eigenvector matrix.
    pub condition: f64,
}

/// Builds `P = Σ_j b_j w̄_j w_jᵀ` from the left eigenvectors `w_j` of `C`.
///
/// With `W = V⁻¹` (rows are left eigenvectors) this is `P = W* B W`, and
/// `C*P + PC = W* B (Λ + Λ̄) W ⪰ 2 min Re λ · P`. Weights default to one.
/// Refuses numerically defective matrices.
pub fn optimal_p(c: &CMatrix, weights: Option<&[f64]>) -> Result<OptimalP> {
    let n = c.nrows();
    if let Some(w) = weights {
        if w.len() != n || w.iter().any(|&b| b.is_nan() || b <= 0.0) {
            return Err(HypoError::InvalidArgument(
                "weights must be positive and match the matrix size".into(),
            ));
        }
    }
    let sys = eigen_decomposition(c)?;
    let condition = condition_number(&sys.vectors);
    if condition > DEFECTIVE_CONDITION {
        return Err(HypoError::Defective { condition });
    }
    let left = sys
        .vectors
        .clone()
        .try_inverse()
        .ok_or(HypoError::Defective { condition })?;
    let b = CMatrix::from_diagonal(&nalgebra::DVector::from_fn(n, |i, _| {
        Complex64::new(weights.map_or(1.0, |w| w[i]), 0.0)
    }));
    let p = left.adjoint() * b * &left;
    let p = (&p + p.adjoint()).scale(0.5);
    let mu = sys.values.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
    Ok(OptimalP { p, mu, condition })
}

/// Slopes `ξ_j`: eigenvalues of `R*(C*A + AC)R` with `R` an orthonormal
/// basis of `ker C₂` and `C = iC₁ + C₂`, sorted ascending.
///
/// The kernel eigenvalues of `C*P(r) + P(r)C`, `P(r) = I + rA`, behave like
/// `r ξ_j + o(r)`.
pub fn kato_slopes(c1: &CMatrix, c2: &CMatrix, a: &CMatrix, tol: f64) -> Result<Vec<f64>> {
    if c1.shape() != c2.shape() || c1.shape() != a.shape() {
        return Err(HypoError::InvalidArgument("C1, C2 and A must share one size".into()));
    }
    if !is_hermitian(a, 1e-12 * max_abs(a).max(1.0)) {
        return Err(HypoError::InvalidArgument("A must be Hermitian".into()));
    }
    let r = null_space(c2, tol);
    let c = c1 * I + c2;
    let m = r.adjoint() * lyapunov_matrix(&c, a) * &r;
    Ok(hermitian_eigenvalues(&m))
}

/// Pair rewritten in a basis where `C₂` is diagonal with its kernel first.
struct Canonical {
    q: CMatrix,
    c1: CMatrix,
    c2: CMatrix,
    kernel_dim: usize,
}

fn canonical_form(c1: &CMatrix, c2: &CMatrix, tol: f64) -> Result<Canonical> {
    if !c1.is_square() || c1.shape() != c2.shape() {
        return Err(HypoError::InvalidArgument("C1 and C2 must be square and equal-sized".into()));
    }
    let n = c1.nrows();
    let scale = max_abs(c2).max(f64::MIN_POSITIVE);
    let off_diag = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| c2[(i, j)].norm())
        .fold(0.0, f64::max);
    let q = if off_diag <= tol * scale {
        let mut kernel: Vec<usize> = (0..n).filter(|&i| c2[(i, i)].re <= tol * scale).collect();
        let rest: Vec<usize> = (0..n).filter(|&i| c2[(i, i)].re > tol * scale).collect();
        kernel.extend(rest);
        permutation_matrix(&kernel)
    } else {
        hermitian_eigen(c2).1
    };
    let c1q = q.adjoint() * c1 * &q;
    let c2q = q.adjoint() * c2 * &q;
    let kernel_dim = (0..n).filter(|&i| c2q[(i, i)].re <= tol * scale).count();
    Ok(Canonical {
        q,
        c1: c1q,
        c2: c2q,
        kernel_dim,
    })
}

/// Swaps basis positions `a` and `b` of the canonical form.
fn swap_positions(can: &mut Canonical, a: usize, b: usize) {
    if a == b {
        return;
    }
    can.q.swap_columns(a, b);
    for m in [&mut can.c1, &mut can.c2] {
        m.swap_rows(a, b);
        m.swap_columns(a, b);
    }
}

/// Searches `r ∈ (0, 1]` with `I + rA ≻ 0` and `C*(I + rA) + (I + rA)C ≻ 0`.
///
/// Starts at `r = 1` and halves up to [`MAX_SCALE_STEPS`] times; after the
/// first success it bisects toward the largest admissible `r`.
fn certify_scale(c: &CMatrix, a: &CMatrix) -> Option<(f64, CMatrix, f64, f64)> {
    let n = c.nrows();
    let floor = 1e-13 * max_abs(c).max(1.0);
    let check = |r: f64| -> Option<(CMatrix, f64, f64)> {
        let p = CMatrix::identity(n, n) + a * Complex64::new(r, 0.0);
        let ep = min_eigenvalue(&p);
        if ep <= 0.0 {
            return None;
        }
        let el = min_eigenvalue(&lyapunov_matrix(c, &p));
        (el > floor).then_some((p, ep, el))
    };
    let mut r = 1.0;
    let mut found = None;
    for _ in 0..=MAX_SCALE_STEPS {
        if let Some(hit) = check(r) {
            found = Some(hit);
            break;
        }
        r *= 0.5;
    }
    let (mut p, mut ep, mut el) = found?;
    if r < 1.0 {
        let mut lo = r;
        let mut hi = (2.0 * r).min(1.0);
        for _ in 0..MAX_SCALE_STEPS {
            let mid = 0.5 * (lo + hi);
            match check(mid) {
                Some(hit) => {
                    lo = mid;
                    (p, ep, el) = hit;
                }
                None => hi = mid,
            }
        }
        r = lo;
    }
    Some((r, p, ep, el))
}

fn finish(
    pattern: Pattern,
    lambdas: Vec<Complex64>,
    basis: CMatrix,
    a_local: &CMatrix,
    c1: &CMatrix,
    c2: &CMatrix,
) -> Result<PAnsatz> {
    let a = &basis * a_local * basis.adjoint();
    let a = (&a + a.adjoint()).scale(0.5);
    let c = c1 * I + c2;
    let (scale, p, min_eig_p, min_eig_lyapunov) = certify_scale(&c, &a).ok_or_else(|| {
        HypoError::ConditionViolated(
            "no admissible scale r found for the ansatz within the search budget".into(),
        )
    })?;
    let rate = certified_rate(&c, &p).unwrap_or(0.0);
    Ok(PAnsatz {
        pattern,
        lambdas,
        scale,
        unitary: Some(basis),
        p,
        min_eig_p,
        min_eig_lyapunov,
        rate,
    })
}

fn polar_minus_half_pi(c: Complex64, modulus: f64) -> Complex64 {
    // λ = −i·modulus·c/|c| gives Im(c λ̄) = modulus·|c| > 0.
    -I * c * (modulus / c.norm())
}

/// Ansatz for a one-dimensional kernel: `P = I + r(λ e₁e₂ᵀ + λ̄ e₂e₁ᵀ)`.
///
/// The coupling index `j₀` maximizing `|c_{j₀,1}|` is moved to position 2
/// and `arg λ = arg c₁₂ − π/2`, so that `Im(λ̄ c₁₂) > 0`.
pub fn ansatz_dimker1(c1: &CMatrix, c2: &CMatrix, tol: f64) -> Result<PAnsatz> {
    let mut can = canonical_form(c1, c2, tol)?;
    if can.kernel_dim != 1 {
        return Err(HypoError::PatternMismatch(format!(
            "expected a one-dimensional kernel of C2, found dimension {}",
            can.kernel_dim
        )));
    }
    let n = can.c1.nrows();
    let scale = max_abs(&can.c1).max(f64::MIN_POSITIVE);
    let (j0, best) = (1..n)
        .map(|j| (j, can.c1[(j, 0)].norm()))
        .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
    if j0 == 0 || best <= tol * scale {
        return Err(HypoError::NotHypocoercive(
            "the kernel direction is not coupled to any decaying mode".into(),
        ));
    }
    swap_positions(&mut can, 1, j0);
    let lambda = polar_minus_half_pi(can.c1[(0, 1)], 1.0);
    let mut a = CMatrix::zeros(n, n);
    a[(0, 1)] = lambda;
    a[(1, 0)] = lambda.conj();
    finish(Pattern::DimKer1, vec![lambda], can.q, &a, c1, c2)
}

/// Ansatz for a two-dimensional kernel, classified by the rank of the
/// coupling block `C₁^{ur} = (c_{jk})_{j ≤ 2, k ≥ 3}`.
pub fn ansatz_dimker2(c1: &CMatrix, c2: &CMatrix, tol: f64) -> Result<PAnsatz> {
    let mut can = canonical_form(c1, c2, tol)?;
    if can.kernel_dim != 2 {
        return Err(HypoError::PatternMismatch(format!(
            "expected a two-dimensional kernel of C2, found dimension {}",
            can.kernel_dim
        )));
    }
    let n = can.c1.nrows();
    if n < 3 {
        return Err(HypoError::NotHypocoercive("no decaying mode available".into()));
    }
    let scale = max_abs(&can.c1).max(f64::MIN_POSITIVE);
    let ur = can.c1.view((0, 2), (2, n - 2)).into_owned();
    let small = tol * scale;
    let rank = if max_abs(&ur) <= small { 0 } else { numerical_rank(&ur, tol.sqrt()) };
    match rank {
        0 => Err(HypoError::NotHypocoercive(
            "the kernel of C2 is invariant under C1".into(),
        )),
        2 => case_2a(can, c1, c2),
        _ => {
            let row_norm =
                |m: &CMatrix, i: usize| (2..n).map(|j| m[(i, j)].norm()).fold(0.0, f64::max);
            if row_norm(&can.c1, 1) <= small {
                swap_positions(&mut can, 0, 1);
            }
            if row_norm(&can.c1, 0) <= small {
                let u = CMatrix::identity(n, n);
                case_2b(can, u, Pattern::Case2B1, c1, c2, tol)
            } else {
                // Rotate the kernel so that the first kernel vector decouples.
                let k = (2..n)
                    .max_by(|&x, &y| {
                        let nx = can.c1[(0, x)].norm_sqr() + can.c1[(1, x)].norm_sqr();
                        let ny = can.c1[(0, y)].norm_sqr() + can.c1[(1, y)].norm_sqr();
                        nx.total_cmp(&ny)
                    })
                    .expect("n ≥ 3");
                swap_positions(&mut can, 2, k);
                let c13 = can.c1[(0, 2)];
                let c23 = can.c1[(1, 2)];
                let s = (c13.norm_sqr() + c23.norm_sqr()).sqrt();
                let mut u = CMatrix::identity(n, n);
                u[(0, 0)] = c23.conj() / s;
                u[(0, 1)] = c13 / s;
                u[(1, 0)] = -c13.conj() / s;
                u[(1, 1)] = c23 / s;
                case_2b(can, u, Pattern::Case2B2, c1, c2, tol)
            }
        }
    }
}

fn case_2a(mut can: Canonical, c1: &CMatrix, c2: &CMatrix) -> Result<PAnsatz> {
    let n = can.c1.nrows();
    let mut best = (2, 3, -1.0);
    for j in 2..n {
        for k in 2..n {
            if j == k {
                continue;
            }
            let v = (can.c1[(0, k)] * can.c1[(1, j)] - can.c1[(0, j)] * can.c1[(1, k)]).norm();
            if v > best.2 {
                best = (j, k, v);
            }
        }
    }
    let (mut j, mut k, _) = best;
    // Orient so that |c₁₄c₂₃| ≥ |c₁₃c₂₄| once j ↦ 3 and k ↦ 4.
    if (can.c1[(0, k)] * can.c1[(1, j)]).norm() < (can.c1[(0, j)] * can.c1[(1, k)]).norm() {
        std::mem::swap(&mut j, &mut k);
    }
    swap_positions(&mut can, 2, j);
    let k = if k == 2 { j } else { k };
    swap_positions(&mut can, 3, k);

    let c = |a: usize, b: usize| can.c1[(a - 1, b - 1)];
    let a_prod = (c(1, 4) * c(2, 4)).norm();
    let b_prod = (c(1, 3) * c(2, 3)).norm();
    let strong = (c(1, 4) * c(2, 3)).norm();
    let weak = (c(1, 3) * c(2, 4)).norm();
    let bracket =
        (3.0 * strong + weak) * (strong - weak) + (c(1, 4) * c(2, 3) - c(1, 3) * c(2, 4)).norm_sqr();
    let (l1, l2) = if a_prod > 0.0 && b_prod > 0.0 {
        (b_prod, a_prod)
    } else if a_prod == 0.0 {
        (1.0 + b_prod * b_prod / bracket, 1.0)
    } else {
        (1.0, 1.0 + a_prod * a_prod / bracket)
    };
    let mut lambda1 = -I * c(1, 4) * l1;
    let mut lambda2 = -I * c(2, 3) * l2;
    let size = (lambda1.norm_sqr() + lambda2.norm_sqr()).sqrt();
    lambda1 /= size;
    lambda2 /= size;
    let mut a = CMatrix::zeros(n, n);
    a[(0, 3)] = lambda1;
    a[(3, 0)] = lambda1.conj();
    a[(1, 2)] = lambda2;
    a[(2, 1)] = lambda2.conj();
    finish(Pattern::Case2A, vec![lambda1, lambda2], can.q, &a, c1, c2)
}

fn case_2b(
    mut can: Canonical,
    u: CMatrix,
    pattern: Pattern,
    c1: &CMatrix,
    c2: &CMatrix,
    tol: f64,
) -> Result<PAnsatz> {
    let n = can.c1.nrows();
    let rotated = u.adjoint() * &can.c1 * &u;
    let scale = max_abs(&rotated).max(f64::MIN_POSITIVE);
    // Bring the strongest coupling of the second kernel vector to position 3.
    let k = (2..n)
        .max_by(|&x, &y| rotated[(1, x)].norm().total_cmp(&rotated[(1, y)].norm()))
        .expect("n ≥ 3");
    let (rotated, u) = if k != 2 {
        swap_positions(&mut can, 2, k);
        let mut u2 = u.clone();
        u2.swap_rows(2, k);
        u2.swap_columns(2, k);
        (u2.adjoint() * &can.c1 * &u2, u2)
    } else {
        (rotated, u)
    };
    let c12 = rotated[(0, 1)];
    let c23 = rotated[(1, 2)];
    if c23.norm() <= tol * scale {
        return Err(HypoError::NotHypocoercive(
            "the kernel of C2 is invariant under C1".into(),
        ));
    }
    if c12.norm() <= tol * scale {
        return Err(HypoError::ConditionViolated(
            "c13·c23·(c11 − c22) − c13²·c21 + c23²·c12 = 0".into(),
        ));
    }
    let lambda2 = polar_minus_half_pi(c23, 1.0);
    let target = 0.5 * (c23 * lambda2.conj()).im;
    let mut lambda1 = polar_minus_half_pi(c12, target / c12.norm());
    let gap = (rotated[(0, 0)] - rotated[(1, 1)]).norm_sqr();
    for _ in 0..200 {
        let a1 = (c12 * lambda1.conj()).im;
        let b1 = (c23 * lambda2.conj()).im;
        if 4.0 * a1 * (b1 - a1) - gap * lambda1.norm_sqr() > 0.0 {
            break;
        }
        lambda1 *= 0.5;
    }
    let mut a = CMatrix::zeros(n, n);
    a[(0, 1)] = lambda1;
    a[(1, 0)] = lambda1.conj();
    a[(1, 2)] = lambda2;
    a[(2, 1)] = lambda2.conj();
    let a = &u * a * u.adjoint();
    finish(pattern, vec![lambda1, lambda2], can.q, &a, c1, c2)
}

/// First-order conditions of the three-parameter chain ansatz.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ChainConditions {
    /// `Im(c₁₂λ̄₁)`, `Im(c₂₃λ̄₂)`, `Im(c₃₄λ̄₃)`.
    pub first_order: [f64; 3],
    /// Whether `0 < Im(c₁₂λ̄₁) < Im(c₂₃λ̄₂) < Im(c₃₄λ̄₃)`.
    pub ordered: bool,
    /// Determinant of the `3 × 3` slope matrix.
    pub determinant: f64,
}

impl ChainConditions {
    /// Whether both the ordering and the determinant condition hold.
    pub fn satisfied(&self) -> bool {
        self.ordered && self.determinant > 0.0
    }
}

/// Evaluates the chain conditions for parameters `λ₁, λ₂, λ₃` against the
/// leading `4 × 4` block of `C₁`.
pub fn chain3_conditions(c1: &CMatrix, lambdas: &[Complex64; 3]) -> ChainConditions {
    let c12 = c1[(0, 1)];
    let c23 = c1[(1, 2)];
    let c34 = c1[(2, 3)];
    let [l1, l2, l3] = *lambdas;
    let m1 = (c12 * l1.conj()).im;
    let m2 = (c23 * l2.conj()).im;
    let m3 = (c34 * l3.conj()).im;
    let cross = (c23 * l1 - c12 * l2).norm_sqr();
    let determinant = 2.0 * (m2 - m1) * (4.0 * m1 * (m3 - m2) - cross);
    ChainConditions {
        first_order: [m1, m2, m3],
        ordered: 0.0 < m1 && m1 < m2 && m2 < m3,
        determinant,
    }
}

/// Ansatz for a three-dimensional kernel with chain coupling.
///
/// Requires `C₂ = diag(0, 0, 0, c₄, …)` up to a permutation, `c₁₃ = 0`,
/// `c₁ⱼ = c₂ⱼ = 0` for `j ≥ 4`, equal diagonal `c₁₁ = c₂₂ = c₃₃`, and
/// nonzero `c₁₂, c₂₃, c₃₄`.
pub fn ansatz_chain3(c1: &CMatrix, c2: &CMatrix, tol: f64) -> Result<PAnsatz> {
    let mut can = canonical_form(c1, c2, tol)?;
    if can.kernel_dim != 3 {
        return Err(HypoError::PatternMismatch(format!(
            "expected a three-dimensional kernel of C2, found dimension {}",
            can.kernel_dim
        )));
    }
    let n = can.c1.nrows();
    let diag_c2 = max_abs(&(&can.c2 - CMatrix::from_diagonal(&can.c2.diagonal())));
    let q_is_perm = can.q.iter().all(|z| z.im == 0.0 && (z.re == 0.0 || z.re == 1.0));
    if n < 4 || diag_c2 > tol * max_abs(c2).max(1.0) || !q_is_perm {
        return Err(HypoError::PatternMismatch(
            "chain ansatz needs a diagonal C2 with a three-dimensional kernel".into(),
        ));
    }
    let scale = max_abs(&can.c1).max(f64::MIN_POSITIVE);
    let small = tol * scale;
    let k = (3..n)
        .max_by(|&x, &y| can.c1[(2, x)].norm().total_cmp(&can.c1[(2, y)].norm()))
        .expect("n ≥ 4");
    swap_positions(&mut can, 3, k);
    let c = &can.c1;
    let decoupled = c[(0, 2)].norm() <= small
        && (3..n).all(|j| c[(0, j)].norm() <= small && c[(1, j)].norm() <= small);
    let equal_diag =
        (c[(0, 0)] - c[(1, 1)]).norm() <= small && (c[(1, 1)] - c[(2, 2)]).norm() <= small;
    let coupled = [c[(0, 1)], c[(1, 2)], c[(2, 3)]].iter().all(|z| z.norm() > small);
    if !(decoupled && equal_diag && coupled) {
        return Err(HypoError::PatternMismatch(
            "C1 does not have the chain form ∘ → ∘ → ∘ → • with equal diagonal".into(),
        ));
    }
    let l1 = polar_minus_half_pi(c[(0, 1)], 1.0 / c[(0, 1)].norm());
    let l2 = polar_minus_half_pi(c[(1, 2)], 2.0 / c[(1, 2)].norm());
    let mut m3 = 3.0 / c[(2, 3)].norm();
    let mut l3 = polar_minus_half_pi(c[(2, 3)], m3);
    for _ in 0..200 {
        if chain3_conditions(c, &[l1, l2, l3]).satisfied() {
            break;
        }
        m3 *= 2.0;
        l3 = polar_minus_half_pi(c[(2, 3)], m3);
    }
    let size = (l1.norm_sqr() + l2.norm_sqr() + l3.norm_sqr()).sqrt();
    let lambdas = vec![l1 / size, l2 / size, l3 / size];
    let mut a = CMatrix::zeros(n, n);
    for (i, l) in lambdas.iter().enumerate() {
        a[(i, i + 1)] = *l;
        a[(i + 1, i)] = l.conj();
    }
    finish(Pattern::Chain3, lambdas, can.q, &a, c1, c2)
}

/// Off-diagonal positions `(i, j)`, `i < j`, and weights `θ` of the BGK
/// family: `P[i, j] = −iθ/κ`, `P[j, i] = iθ/κ` (zero-based indices, energy
/// basis in two and three dimensions).
pub fn bgk_p_entries(dim: usize, alpha: f64) -> Result<Vec<(usize, usize, f64)>> {
    let (s2, s3, s6) = (2f64.sqrt(), 3f64.sqrt(), 6f64.sqrt());
    match dim {
        1 => Ok(vec![(0, 1, alpha), (1, 2, s2 * alpha), (2, 3, s3 * alpha)]),
        2 => Ok(vec![(0, 1, alpha), (1, 5, 2.0 * alpha), (2, 4, alpha), (3, 6, s6 * alpha)]),
        3 => Ok(vec![
            (0, 1, alpha),
            (1, 7, s3 * alpha),
            (2, 5, alpha),
            (3, 6, alpha),
            (4, 10, alpha),
        ]),
        _ => Err(HypoError::InvalidArgument(format!("dimension {dim} not in 1..=3"))),
    }
}

/// Size of the nontrivial block of the BGK family (4, 7, 11).
pub fn bgk_p_block(dim: usize) -> usize {
    match dim {
        1 => 4,
        2 => 7,
        _ => 11,
    }
}

/// Spectral radius factor `s` of the BGK family: `P_κ` has eigenvalues in
/// `[1 − sα/κ, 1 + sα/κ]` with `s = √(3+√6), √6, 2`.
pub fn bgk_p_spread(dim: usize) -> f64 {
    match dim {
        1 => (3.0 + 6f64.sqrt()).sqrt(),
        2 => 6f64.sqrt(),
        _ => 2.0,
    }
}

/// The BGK transformation matrix `P_κ` of size `size`.
///
/// In one dimension `kappa` may be a signed wave number `k`, giving
/// `P_{−k} = conj(P_k)`.
pub fn bgk_p(dim: usize, kappa: f64, alpha: f64, size: usize) -> Result<CMatrix> {
    let entries = bgk_p_entries(dim, alpha)?;
    if kappa == 0.0 || !kappa.is_finite() {
        return Err(HypoError::InvalidArgument("P_κ needs a nonzero finite κ".into()));
    }
    if alpha.is_nan() || alpha < 0.0 {
        return Err(HypoError::InvalidArgument(format!("α must be nonnegative, got {alpha}")));
    }
    let block = bgk_p_block(dim);
    if size < block {
        return Err(HypoError::InvalidArgument(format!(
            "P_κ in {dim}D needs at least {block} rows"
        )));
    }
    let mut p = CMatrix::identity(size, size);
    for (i, j, theta) in entries {
        p[(i, j)] = Complex64::new(0.0, -theta / kappa);
        p[(j, i)] = Complex64::new(0.0, theta / kappa);
    }
    Ok(p)
}

/// Closed-form eigenvalues of the nontrivial block of `P_κ`, ascending.
pub fn bgk_p_eigenvalues(dim: usize, kappa: f64, alpha: f64) -> Vec<f64> {
    let t = alpha / kappa.abs();
    let s6 = 6f64.sqrt();
    let mut v = match dim {
        1 => {
            let a = (3.0 + s6).sqrt() * t;
            let b = (3.0 - s6).sqrt() * t;
            vec![1.0 - a, 1.0 - b, 1.0 + b, 1.0 + a]
        }
        2 => {
            let s5 = 5f64.sqrt();
            vec![1.0, 1.0 - t, 1.0 + t, 1.0 - s5 * t, 1.0 + s5 * t, 1.0 - s6 * t, 1.0 + s6 * t]
        }
        _ => {
            let mut v = vec![1.0; 3];
            for _ in 0..3 {
                v.push(1.0 - t);
                v.push(1.0 + t);
            }
            v.push(1.0 - 2.0 * t);
            v.push(1.0 + 2.0 * t);
            v
        }
    };
    v.sort_by(f64::total_cmp);
    v
}

/// Builds the certified BGK ansatz `P_κ` for a given generator.
pub fn bgk_ansatz(dim: usize, c: &CMatrix, kappa: f64, alpha: f64) -> Result<PAnsatz> {
    let p = bgk_p(dim, kappa, alpha, c.nrows())?;
    let min_eig_p = min_eigenvalue(&p);
    let min_eig_lyapunov = min_eigenvalue(&lyapunov_matrix(c, &p));
    let rate = certified_rate(c, &p).ok_or_else(|| {
        HypoError::ConditionViolated(format!("P_κ is not positive definite at α = {alpha}"))
    })?;
    let pattern = match dim {
        1 => Pattern::Bgk1d,
        2 => Pattern::Bgk2d,
        _ => Pattern::Bgk3d,
    };
    let lambdas = bgk_p_entries(dim, alpha)?
        .into_iter()
        .map(|(_, _, theta)| Complex64::new(0.0, -theta))
        .collect();
    Ok(PAnsatz {
        pattern,
        lambdas,
        scale: 1.0 / kappa.abs(),
        unitary: None,
        p,
        min_eig_p,
        min_eig_lyapunov,
        rate,
    })
}

/// Perturbation matrix `A = P_κ − I` of the BGK family at `κ = 1`.
pub fn bgk_perturbation(dim: usize, alpha: f64, size: usize) -> Result<CMatrix> {
    let size = size.max(minimum_block_size(dim));
    Ok(bgk_p(dim, 1.0, alpha, size)? - CMatrix::identity(size, size))
}
