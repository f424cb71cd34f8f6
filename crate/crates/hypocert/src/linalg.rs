//! Dense complex linear-algebra helpers built on `nalgebra`.
//!
//! Hermitian eigen-decompositions, singular value decompositions and LU
//! determinants come from `nalgebra`; this module wraps them with the
//! tolerance conventions used by the rest of the crate (ranks and kernels
//! are measured relative to the largest singular value).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Dense complex matrix, the universal carrier for generators and `P`.
pub type CMatrix = DMatrix<Complex64>;

/// Dense complex column vector.
pub type CVector = DVector<Complex64>;

/// Default relative tolerance for numerical ranks and kernels.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Shorthand constructor for a complex scalar.
#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// The imaginary unit.
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Converts a real matrix to a complex one.
pub fn to_complex(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

/// Returns the Hermitian part `(M + M*)/2`.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Returns the skew-Hermitian part `(M − M*)/2`.
pub fn skew_part(m: &CMatrix) -> CMatrix {
    (m - m.adjoint()).scale(0.5)
}

/// Largest entry modulus of a complex matrix.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Checks `‖M − M*‖_max ≤ tol`.
pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && max_abs(&(m - m.adjoint())) <= tol
}

/// Eigen-decomposition of a Hermitian matrix with ascending eigenvalues.
///
/// The input is symmetrized first, so slightly non-Hermitian round-off is
/// tolerated. Columns of the returned matrix are orthonormal eigenvectors.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMatrix::zeros(0, 0));
    }
    let eig = hermitian_part(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vectors.set_column(k, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut v: Vec<f64> = hermitian_part(m).symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m).first().copied().unwrap_or(f64::INFINITY)
}

/// Principal square root of a positive semi-definite Hermitian matrix.
///
/// Eigenvalues below `tol · λ_max` (including slightly negative round-off)
/// are clipped to zero.
pub fn sqrt_psd(m: &CMatrix, tol: f64) -> CMatrix {
    let (values, vectors) = hermitian_eigen(m);
    let top = values.iter().fold(0.0_f64, |a, &b| a.max(b.abs()));
    let roots: Vec<Complex64> = values
        .iter()
        .map(|&x| {
            if x <= tol * top {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(x.sqrt(), 0.0)
            }
        })
        .collect();
    let d = CMatrix::from_diagonal(&CVector::from_vec(roots));
    &vectors * d * vectors.adjoint()
}

/// Inverse square root of a positive definite Hermitian matrix.
pub fn inv_sqrt_pd(m: &CMatrix) -> Option<CMatrix> {
    let (values, vectors) = hermitian_eigen(m);
    if values.iter().any(|&x| x <= 0.0) {
        return None;
    }
    let d = CMatrix::from_diagonal(&CVector::from_iterator(
        values.len(),
        values.iter().map(|&x| Complex64::new(1.0 / x.sqrt(), 0.0)),
    ));
    Some(&vectors * d * vectors.adjoint())
}

/// Singular values in descending order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Numerical rank: count of singular values above `tol · σ_max`.
pub fn numerical_rank(m: &CMatrix, tol: f64) -> usize {
    let s = singular_values(m);
    match s.first() {
        Some(&top) if top > 0.0 => s.iter().filter(|&&x| x > tol * top).count(),
        _ => 0,
    }
}

/// 2-norm condition number `σ_max / σ_min` of a square matrix.
pub fn condition_number(m: &CMatrix) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    }
}

/// Orthonormal basis of the right null space of `m`.
///
/// A singular value is treated as zero when it is at most `tol · σ_max`;
/// the zero matrix has the full space as kernel. Returns an `ncols × k`
/// matrix with orthonormal columns.
pub fn null_space(m: &CMatrix, tol: f64) -> CMatrix {
    let top = singular_values(m).first().copied().unwrap_or(0.0);
    null_space_below(m, tol * top)
}

/// Orthonormal basis of the span of right singular vectors of `m` whose
/// singular values are at most the absolute `threshold`.
pub fn null_space_below(m: &CMatrix, threshold: f64) -> CMatrix {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return CMatrix::zeros(0, 0);
    }
    if rows == 0 || max_abs(m) == 0.0 {
        return CMatrix::identity(cols, cols);
    }
    // Pad with zero rows so the SVD returns a full set of right vectors.
    let padded = if rows < cols {
        let mut p = CMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] <= threshold)
        .collect();
    let mut out = CMatrix::zeros(cols, keep.len());
    for (k, &i) in keep.iter().enumerate() {
        let row = v_t.row(i);
        for j in 0..cols {
            out[(j, k)] = row[j].conj();
        }
    }
    out
}

/// Orthonormal basis of the column space of `m` (relative tolerance `tol`).
///
/// The basis is built from the images `m v` of the retained right singular
/// vectors and then orthonormalized, so it stays inside the column space
/// up to round-off even when the singular vectors themselves are only
/// accurate to a few digits.
pub fn range_basis(m: &CMatrix, tol: f64) -> CMatrix {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 || max_abs(m) == 0.0 {
        return CMatrix::zeros(rows, 0);
    }
    let padded = if rows < cols {
        let mut p = CMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let top = svd.singular_values.iter().fold(0.0_f64, |a, &b| a.max(b));
    let mut keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > tol * top)
        .collect();
    keep.truncate(rows.min(cols));
    if keep.is_empty() {
        return CMatrix::zeros(rows, 0);
    }
    let mut images = CMatrix::zeros(rows, keep.len());
    for (k, &i) in keep.iter().enumerate() {
        let v = v_t.row(i).adjoint();
        images.set_column(k, &(m * v).unscale(svd.singular_values[i]));
    }
    images.qr().q()
}

/// Determinant via LU factorization.
pub fn determinant(m: &CMatrix) -> Complex64 {
    if m.nrows() == 0 {
        return Complex64::new(1.0, 0.0);
    }
    m.clone().lu().determinant()
}

/// Real parts of the leading principal minors `det M[0..j, 0..j]`, `j = 1..n`.
pub fn leading_minors(m: &CMatrix) -> Vec<f64> {
    (1..=m.nrows())
        .map(|j| determinant(&m.view((0, 0), (j, j)).into_owned()).re)
        .collect()
}

/// Real parts of the trailing principal minors of sizes `1..n`.
///
/// Entry `j − 1` is the determinant of the lower-right `j × j` block.
pub fn trailing_minors(m: &CMatrix) -> Vec<f64> {
    let n = m.nrows();
    (1..=n)
        .map(|j| determinant(&m.view((n - j, n - j), (j, j)).into_owned()).re)
        .collect()
}

/// Matrix power by repeated squaring.
pub fn matrix_power(m: &CMatrix, mut exponent: usize) -> CMatrix {
    let n = m.nrows();
    let mut result = CMatrix::identity(n, n);
    let mut base = m.clone();
    while exponent > 0 {
        if exponent & 1 == 1 {
            result = &result * &base;
        }
        exponent >>= 1;
        if exponent > 0 {
            base = &base * &base;
        }
    }
    result
}

/// Spectral norm (largest singular value).
pub fn spectral_norm(m: &CMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Horizontal concatenation of two matrices with equal row counts.
pub fn hstack(a: &CMatrix, b: &CMatrix) -> CMatrix {
    assert_eq!(a.nrows(), b.nrows(), "hstack needs equal row counts");
    let mut out = CMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((0, a.ncols()), b.shape()).copy_from(b);
    out
}

/// Builds the permutation matrix that moves basis vector `perm[i]` to slot `i`.
///
/// For `Q = permutation_matrix(perm)`, `(Q* M Q)[i, j] = M[perm[i], perm[j]]`.
pub fn permutation_matrix(perm: &[usize]) -> CMatrix {
    let n = perm.len();
    let mut q = CMatrix::zeros(n, n);
    for (i, &p) in perm.iter().enumerate() {
        q[(p, i)] = Complex64::new(1.0, 0.0);
    }
    q
}
