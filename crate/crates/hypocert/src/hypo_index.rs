//! Hypocoercivity index of a Hermitian pair `(C₁, C₂)`.
//!
//! For `C = iC₁ + C₂` with `C₁` Hermitian and `C₂` positive semi-definite,
//! the index `τ` is the smallest integer with
//! `rank[√C₂, C₁√C₂, …, C₁^τ√C₂] = n` (Kalman rank condition), or
//! equivalently `⋂_{j≤τ} ker(√C₂ C₁^j) = {0}`. The pair is hypocoercive
//! exactly when such a `τ` exists, which is also equivalent to:
//!
//! - no `C₁`-invariant subspace of `ker C₂` other than `{0}`,
//! - no eigenvector of `C₁` lying in `ker C₂`,
//! - every eigenvalue of `C` having positive real part.
//!
//! Ranks are measured against the largest singular value with a single
//! relative tolerance (default `1e-10`), reported in every result.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigen::complex_eigenvalues;
use crate::error::{HypoError, Result};
use crate::linalg::{
    hermitian_eigen, hermitian_eigenvalues, hstack, is_hermitian, matrix_power, max_abs,
    min_eigenvalue, null_space, null_space_below, range_basis, spectral_norm, sqrt_psd,
    CMatrix, I,
};

/// Outcome of the index computation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IndexReport {
    /// Matrix dimension.
    pub size: usize,
    /// The index `τ`, or `None` when the pair is not hypocoercive.
    pub index: Option<usize>,
    /// Kalman ranks `r_j = rank[√C₂, …, C₁^j√C₂]` for `j = 0, 1, …`.
    pub rank_profile: Vec<usize>,
    /// Dimensions of `⋂_{i≤j} ker(√C₂ C₁^i)` for `j = 0, 1, …`.
    pub kernel_profile: Vec<usize>,
    /// Index obtained from the kernel intersections.
    pub kernel_index: Option<usize>,
    /// Whether the rank and kernel computations agree.
    pub consistent: bool,
    /// `dim ker C₂`.
    pub kernel_dim: usize,
    /// Smallest eigenvalue of `Σ_{j≤τ} C₁^j C₂ C₁^j` (coercivity constant).
    pub coercivity: Option<f64>,
    /// Relative rank tolerance used.
    pub tolerance: f64,
}

impl IndexReport {
    /// Whether the pair is hypocoercive.
    pub fn is_hypocoercive(&self) -> bool {
        self.index.is_some()
    }
}

fn validate_pair(c1: &CMatrix, c2: &CMatrix, tol: f64) -> Result<()> {
    if !c1.is_square() || !c2.is_square() || c1.nrows() != c2.nrows() {
        return Err(HypoError::InvalidArgument(
            "C1 and C2 must be square matrices of equal size".into(),
        ));
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(HypoError::InvalidArgument(format!("tolerance {tol} outside (0, 1)")));
    }
    let scale = max_abs(c1).max(max_abs(c2)).max(1.0);
    let herm_tol = 1e-10 * scale;
    if !is_hermitian(c1, herm_tol) || !is_hermitian(c2, herm_tol) {
        return Err(HypoError::InvalidArgument("C1 and C2 must be Hermitian".into()));
    }
    if c2.nrows() > 0 && min_eigenvalue(c2) < -1e-9 * scale {
        return Err(HypoError::InvalidArgument(
            "C2 must be positive semi-definite".into(),
        ));
    }
    Ok(())
}

/// `C₁` scaled to unit spectral norm (ranks are scale invariant).
fn normalized(c1: &CMatrix) -> CMatrix {
    let norm = spectral_norm(c1);
    if norm > 0.0 {
        c1.unscale(norm)
    } else {
        c1.clone()
    }
}

/// Computes the hypocoercivity index by Kalman rank accumulation and
/// cross-checks it with kernel intersections.
pub fn hypocoercivity_index(c1: &CMatrix, c2: &CMatrix, tol: f64) -> Result<IndexReport> {
    validate_pair(c1, c2, tol)?;
    let n = c1.nrows();
    let root = sqrt_psd(c2, tol);
    let c1n = normalized(c1);

    // Kalman ranks: V_j = span(range √C₂ ∪ C₁ V_{j−1}).
    let v0 = range_basis(&root, tol);
    let mut rank_profile = vec![v0.ncols()];
    let mut index = None;
    if v0.ncols() == n {
        index = Some(0);
    } else {
        let mut basis = v0.clone();
        for j in 1..=n {
            let next = range_basis(&hstack(&v0, &(&c1n * &basis)), tol);
            let r = next.ncols();
            let prev = *rank_profile.last().expect("non-empty");
            rank_profile.push(r);
            if r == n {
                index = Some(j);
                break;
            }
            if r == prev {
                break;
            }
            basis = next;
        }
    }

    // Kernel intersections K_j = K_{j−1} ∩ ker(√C₂ C₁^j).
    let root_norm = spectral_norm(&root);
    let threshold = tol * root_norm.max(f64::MIN_POSITIVE);
    let mut kernel = null_space(&root, tol);
    let kernel_dim = kernel.ncols();
    let mut kernel_profile = vec![kernel.ncols()];
    let mut kernel_index = if kernel.ncols() == 0 { Some(0) } else { None };
    if kernel_index.is_none() {
        let mut power = CMatrix::identity(n, n);
        for j in 1..=n {
            power = &c1n * &power;
            let restricted = &root * &power * &kernel;
            let inner = null_space_below(&restricted, threshold);
            let next = &kernel * inner;
            let dim = next.ncols();
            let prev = kernel.ncols();
            kernel_profile.push(dim);
            kernel = next;
            if dim == 0 {
                kernel_index = Some(j);
                break;
            }
            if dim == prev {
                break;
            }
        }
    }

    let coercivity = index.map(|tau| {
        let mut sum = CMatrix::zeros(n, n);
        for j in 0..=tau {
            let p = matrix_power(c1, j);
            sum += &p * c2 * &p;
        }
        min_eigenvalue(&sum)
    });
    let consistent = index == kernel_index
        && rank_profile.iter().zip(&kernel_profile).all(|(r, k)| r + k == n);
    Ok(IndexReport {
        size: n,
        index,
        rank_profile,
        kernel_profile,
        kernel_index,
        consistent,
        kernel_dim,
        coercivity,
        tolerance: tol,
    })
}

/// Smallest real part of the eigenvalues of `iC₁ + C₂`.
pub fn spectral_abscissa(c1: &CMatrix, c2: &CMatrix) -> Result<f64> {
    let c = c1 * I + c2;
    let values = complex_eigenvalues(&c)?;
    Ok(values.iter().map(|z| z.re).fold(f64::INFINITY, f64::min))
}

/// Checks that every eigenvalue of `iC₁ + C₂` has real part above
/// `tol · max(1, ‖C‖_max)`.
pub fn is_hypocoercive_spectral(c1: &CMatrix, c2: &CMatrix, tol: f64) -> Result<bool> {
    validate_pair(c1, c2, tol)?;
    let scale = max_abs(c1).max(max_abs(c2)).max(1.0);
    Ok(spectral_abscissa(c1, c2)? > tol * scale)
}

/// Verdicts of the invariant-subspace and eigenvector conditions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvarianceReport {
    /// No nontrivial `C₁`-invariant subspace inside `ker C₂`.
    pub b3: bool,
    /// No eigenvector of `C₁` inside `ker C₂`.
    pub b4: bool,
    /// Dimension of the largest `C₁`-invariant subspace of `ker C₂`.
    pub invariant_dim: usize,
}

/// Tests the invariant-subspace and eigenvector conditions directly.
///
/// The invariant-subspace test shrinks `W = ker C₂` by
/// `W ← W · ker((I − WW*) C₁ W)` until it stabilizes. The eigenvector test
/// groups the eigenvalues of `C₁` into clusters and checks whether each
/// eigenspace meets `ker C₂`.
pub fn check_invariance_conditions(c1: &CMatrix, c2: &CMatrix, tol: f64) -> Result<InvarianceReport> {
    validate_pair(c1, c2, tol)?;
    let n = c1.nrows();
    let c1n = normalized(c1);
    let root = sqrt_psd(c2, tol);
    let root_norm = spectral_norm(&root).max(f64::MIN_POSITIVE);

    let mut w = null_space(&root, tol);
    loop {
        if w.ncols() == 0 {
            break;
        }
        let proj = CMatrix::identity(n, n) - &w * w.adjoint();
        let leak = proj * &c1n * &w;
        let inner = null_space_below(&leak, 100.0 * tol);
        if inner.ncols() == w.ncols() {
            break;
        }
        w = &w * inner;
    }
    let invariant_dim = w.ncols();

    let (values, vectors) = hermitian_eigen(&c1n);
    let cluster_tol = 1e-8;
    let mut b4 = true;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (values[end] - values[end - 1]).abs() <= cluster_tol {
            end += 1;
        }
        let space = vectors.columns(start, end - start).into_owned();
        let image = &root * &space;
        let hits = null_space_below(&image, 100.0 * tol * root_norm);
        if hits.ncols() > 0 {
            b4 = false;
            break;
        }
        start = end;
    }
    Ok(InvarianceReport {
        b3: invariant_dim == 0,
        b4,
        invariant_dim,
    })
}

/// Forward check of the commutator condition: `C₂ + (K C₁ − C₁ K) ≻ 0`
/// for a supplied skew-Hermitian `K`.
///
/// Returns the verdict together with the smallest eigenvalue.
pub fn check_commutator_condition(
    c1: &CMatrix,
    c2: &CMatrix,
    k: &CMatrix,
    tol: f64,
) -> Result<(bool, f64)> {
    validate_pair(c1, c2, tol)?;
    if k.shape() != c1.shape() {
        return Err(HypoError::InvalidArgument("K must match the size of C1".into()));
    }
    if max_abs(&(k + k.adjoint())) > 1e-10 * max_abs(k).max(1.0) {
        return Err(HypoError::InvalidArgument("K must be skew-Hermitian".into()));
    }
    let m = c2 + (k * c1 - c1 * k);
    let lowest = hermitian_eigenvalues(&m).first().copied().unwrap_or(f64::INFINITY);
    Ok((lowest > tol * max_abs(&m).max(1.0), lowest))
}

/// Value of `c₁₃c₂₃(c₁₁ − c₂₂) − c₁₃²c₂₁ + c₂₃²c₁₂` for the leading
/// `3 × 3` block of `C₁` (entries in one-based notation).
///
/// For a two-dimensional kernel whose coupling block has rank one, the pair
/// is hypocoercive exactly when this quantity is nonzero.
pub fn case_2b_condition(c1: &CMatrix) -> Complex64 {
    let c = |i: usize, j: usize| c1[(i - 1, j - 1)];
    c(1, 3) * c(2, 3) * (c(1, 1) - c(2, 2)) - c(1, 3) * c(1, 3) * c(2, 1)
        + c(2, 3) * c(2, 3) * c(1, 2)
}
