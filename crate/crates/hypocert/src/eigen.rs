//! Dense complex eigenvalue solver for non-Hermitian matrices.
//!
//! The solver follows the classical pipeline: diagonal balancing,
//! Householder reduction to upper Hessenberg form, and single-shift
//! implicit QR sweeps with Wilkinson shifts and Givens rotations until
//! the Hessenberg matrix is reduced to upper triangular (Schur) form.
//! Eigenvectors are recovered from the Schur factor by back substitution.
//!
//! The matrix exponential used for time stepping is built on top of the
//! eigen-decomposition, with `nalgebra`'s Padé scaling-and-squaring as the
//! fallback for ill-conditioned eigenvector bases.

use num_complex::Complex64;

use crate::error::{HypoError, Result};
use crate::linalg::{condition_number, CMatrix};

/// Average number of QR sweeps allowed per eigenvalue.
pub const SWEEPS_PER_EIGENVALUE: usize = 40;

/// Eigenvector-matrix condition number above which a matrix is treated
/// as numerically defective.
pub const DEFECTIVE_CONDITION: f64 = 1e8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Eigenvalues and right eigenvectors of a square matrix.
#[derive(Clone, Debug)]
pub struct Eigensystem {
    /// Eigenvalues in the order they appear on the Schur diagonal.
    pub values: Vec<Complex64>,
    /// Unit-norm right eigenvectors stored column-wise.
    pub vectors: CMatrix,
}

/// All eigenvalues of a square complex matrix.
///
/// Fails with [`HypoError::NoConvergence`] (carrying the converged part of
/// the spectrum) when the iteration cap of `40·n` sweeps is exceeded.
pub fn complex_eigenvalues(m: &CMatrix) -> Result<Vec<Complex64>> {
    check_square(m)?;
    let (balanced, _) = balance(m);
    let (mut h, _) = hessenberg(&balanced, false);
    shifted_qr(&mut h, None)?;
    Ok((0..h.nrows()).map(|i| h[(i, i)]).collect())
}

/// Eigenvalues and unit-norm right eigenvectors of a square complex matrix.
pub fn eigen_decomposition(m: &CMatrix) -> Result<Eigensystem> {
    check_square(m)?;
    let n = m.nrows();
    let (balanced, scale) = balance(m);
    let (mut t, q) = hessenberg(&balanced, true);
    let mut q = q.expect("accumulated Householder reflectors");
    shifted_qr(&mut t, Some(&mut q))?;
    let values: Vec<Complex64> = (0..n).map(|i| t[(i, i)]).collect();

    let norm_t = t.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let small = f64::EPSILON * norm_t;
    let mut y = CMatrix::zeros(n, n);
    for k in 0..n {
        let lambda = t[(k, k)];
        y[(k, k)] = ONE;
        for j in (0..k).rev() {
            let mut acc = ZERO;
            for p in (j + 1)..=k {
                acc += t[(j, p)] * y[(p, k)];
            }
            let mut denom = t[(j, j)] - lambda;
            if denom.norm() < small {
                denom = Complex64::new(small, 0.0);
            }
            y[(j, k)] = -acc / denom;
        }
    }
    let mut vectors = &q * y;
    for i in 0..n {
        let s = scale[i];
        for k in 0..n {
            vectors[(i, k)] *= s;
        }
    }
    for k in 0..n {
        let norm = vectors.column(k).norm();
        if norm > 0.0 {
            vectors.column_mut(k).unscale_mut(norm);
        }
    }
    Ok(Eigensystem { values, vectors })
}

/// Computes `exp(−t·C)`.
///
/// Uses the eigen-decomposition `C = V Λ V⁻¹` when the eigenvector basis is
/// well conditioned (condition number at most [`DEFECTIVE_CONDITION`]) and
/// falls back to Padé scaling-and-squaring otherwise.
pub fn exp_neg(c: &CMatrix, t: f64) -> Result<CMatrix> {
    check_square(c)?;
    let n = c.nrows();
    if t == 0.0 {
        return Ok(CMatrix::identity(n, n));
    }
    if let Ok(sys) = eigen_decomposition(c) {
        if condition_number(&sys.vectors) <= DEFECTIVE_CONDITION {
            if let Some(inv) = sys.vectors.clone().try_inverse() {
                let mut scaled = sys.vectors.clone();
                for k in 0..n {
                    let f = (-sys.values[k] * t).exp();
                    for i in 0..n {
                        scaled[(i, k)] *= f;
                    }
                }
                return Ok(scaled * inv);
            }
        }
    }
    let e = (c * Complex64::new(-t, 0.0)).exp();
    if e.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(e)
    } else {
        Err(HypoError::InvalidArgument(format!(
            "matrix exponential overflowed for t = {t}"
        )))
    }
}

fn check_square(m: &CMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(HypoError::InvalidArgument(format!(
            "eigenvalue problem needs a square matrix, got {}×{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(HypoError::InvalidArgument("matrix has non-finite entries".into()));
    }
    Ok(())
}

/// Diagonal similarity scaling by powers of two that equalizes row and
/// column norms. Returns the balanced matrix `D⁻¹ M D` and the diagonal of `D`.
fn balance(m: &CMatrix) -> (CMatrix, Vec<f64>) {
    let n = m.nrows();
    let mut a = m.clone();
    let mut scale = vec![1.0; n];
    let radix = 2.0_f64;
    let mut changed = true;
    let mut passes = 0;
    while changed && passes < 100 {
        changed = false;
        passes += 1;
        for i in 0..n {
            let mut col = 0.0;
            let mut row = 0.0;
            for j in 0..n {
                if j != i {
                    col += a[(j, i)].l1_norm();
                    row += a[(i, j)].l1_norm();
                }
            }
            if col == 0.0 || row == 0.0 {
                continue;
            }
            let total = col + row;
            let mut f = 1.0;
            let mut c = col;
            let mut r = row;
            while c < r / radix {
                c *= radix;
                r /= radix;
                f *= radix;
            }
            while c >= r * radix {
                c /= radix;
                r *= radix;
                f /= radix;
            }
            if (c + r) < 0.95 * total {
                changed = true;
                scale[i] *= f;
                for j in 0..n {
                    a[(i, j)] /= f;
                    a[(j, i)] *= f;
                }
            }
        }
    }
    (a, scale)
}

/// Householder reduction to upper Hessenberg form `H = Q* M Q`.
fn hessenberg(m: &CMatrix, want_q: bool) -> (CMatrix, Option<CMatrix>) {
    let n = m.nrows();
    let mut h = m.clone();
    let mut q = if want_q { Some(CMatrix::identity(n, n)) } else { None };
    if n < 3 {
        return (h, q);
    }
    for k in 0..n - 2 {
        let len = n - k - 1;
        let mut v: Vec<Complex64> = (0..len).map(|i| h[(k + 1 + i, k)]).collect();
        let alpha_norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if alpha_norm == 0.0 {
            continue;
        }
        let x0 = v[0];
        let phase = if x0.norm() == 0.0 { ONE } else { x0 / x0.norm() };
        // Reflect x onto −phase·‖x‖·e₁, which avoids cancellation in v₀.
        v[0] = x0 + phase * alpha_norm;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // H ← (I − 2vv*) H on rows k+1.., all columns from k.
        for j in k..n {
            let mut dot = ZERO;
            for i in 0..len {
                dot += v[i].conj() * h[(k + 1 + i, j)];
            }
            let dot2 = dot * 2.0;
            for i in 0..len {
                h[(k + 1 + i, j)] -= v[i] * dot2;
            }
        }
        // H ← H (I − 2vv*) on columns k+1.., all rows.
        for i in 0..n {
            let mut dot = ZERO;
            for j in 0..len {
                dot += h[(i, k + 1 + j)] * v[j];
            }
            let dot2 = dot * 2.0;
            for j in 0..len {
                h[(i, k + 1 + j)] -= dot2 * v[j].conj();
            }
        }
        if let Some(q) = q.as_mut() {
            for i in 0..n {
                let mut dot = ZERO;
                for j in 0..len {
                    dot += q[(i, k + 1 + j)] * v[j];
                }
                let dot2 = dot * 2.0;
                for j in 0..len {
                    q[(i, k + 1 + j)] -= dot2 * v[j].conj();
                }
            }
        }
        for i in (k + 2)..n {
            h[(i, k)] = ZERO;
        }
    }
    (h, q)
}

/// Givens rotation `G = [[c, s], [−s̄, c]]` with real `c` mapping `(x, y)` to `(r, 0)`.
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64) {
    let ax = x.norm();
    let ay = y.norm();
    if ay == 0.0 {
        return (1.0, ZERO);
    }
    if ax == 0.0 {
        return (0.0, y.conj() / ay);
    }
    let r = ax.hypot(ay);
    (ax / r, (x / ax) * y.conj() / r)
}

/// Reduces an upper Hessenberg matrix to upper triangular Schur form in place.
///
/// When `q` is given, the unitary similarity transformations are accumulated
/// into it so that `M = Q T Q*` continues to hold.
fn shifted_qr(h: &mut CMatrix, mut q: Option<&mut CMatrix>) -> Result<()> {
    let n = h.nrows();
    if n <= 1 {
        return Ok(());
    }
    let full = q.is_some();
    let cap = SWEEPS_PER_EIGENVALUE * n;
    let mut total = 0usize;
    let mut since_deflation = 0usize;
    let mut hi = n - 1;
    let norm_h = h.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let eps = f64::EPSILON;
    while hi > 0 {
        // Locate the start of the active unreduced block.
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let mut diag = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            if diag == 0.0 {
                diag = norm_h;
            }
            if sub <= eps * diag || sub < f64::MIN_POSITIVE {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        if total >= cap {
            let partial = ((hi + 1)..n).map(|i| h[(i, i)]).collect();
            return Err(HypoError::NoConvergence {
                iterations: total,
                n,
                partial,
            });
        }
        total += 1;
        since_deflation += 1;

        let shift = if since_deflation.is_multiple_of(11) {
            // Exceptional shift to break rare cycling.
            h[(hi, hi)] + Complex64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };

        let col_end = if full { n } else { hi + 1 };
        let row_start = if full { 0 } else { lo };
        let mut x = h[(lo, lo)] - shift;
        let mut y = h[(lo + 1, lo)];
        for k in lo..hi {
            if k > lo {
                x = h[(k, k - 1)];
                y = h[(k + 1, k - 1)];
            }
            let (c, s) = givens(x, y);
            let first_col = if k > lo { k - 1 } else { lo };
            for j in first_col..col_end {
                let u = h[(k, j)];
                let v = h[(k + 1, j)];
                h[(k, j)] = u * c + s * v;
                h[(k + 1, j)] = -s.conj() * u + v * c;
            }
            let last_row = (k + 2).min(hi);
            for i in row_start..=last_row {
                let u = h[(i, k)];
                let v = h[(i, k + 1)];
                h[(i, k)] = u * c + v * s.conj();
                h[(i, k + 1)] = -u * s + v * c;
            }
            if k > lo {
                h[(k + 1, k - 1)] = ZERO;
            }
            if let Some(q) = q.as_deref_mut() {
                for i in 0..n {
                    let u = q[(i, k)];
                    let v = q[(i, k + 1)];
                    q[(i, k)] = u * c + v * s.conj();
                    q[(i, k + 1)] = -u * s + v * c;
                }
            }
        }
    }
    Ok(())
}

/// Eigenvalue of the trailing `2 × 2` block `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mean = (a + d) * 0.5;
    let l1 = mean + disc;
    let l2 = mean - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}
