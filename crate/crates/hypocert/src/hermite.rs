//! Normalized Hermite function bases in one, two and three velocity dimensions.
//!
//! The one-dimensional functions are
//! `g_m(v) = (2π m!)^{-1/2} He_m(v) e^{-v²/2}`, orthonormal in the
//! Maxwellian-weighted space `L²(M₁⁻¹)`. Multi-dimensional functions are
//! tensor products `g_m(v) = ∏ g_{m_i}(v_i)`, ordered by total degree. In two
//! dimensions the degree-`n` block is listed with decreasing `m₁`; in three
//! dimensions with decreasing `m₁`, then decreasing `m₂`.
//!
//! The *energy* variant replaces the second-degree block by an orthogonal
//! recombination `S` in which `(|v|² − d)M₁/√(2d)` is itself a basis element.

use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{HypoError, Result};

/// Largest supported truncation size.
pub const MAX_TRUNCATION: usize = 2000;

/// Basis variant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Plain tensor products of one-dimensional Hermite functions.
    Tensor,
    /// Tensor basis with the second-degree block recombined by `S`.
    Energy,
}

impl std::str::FromStr for Variant {
    type Err = HypoError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tensor" => Ok(Variant::Tensor),
            "energy" => Ok(Variant::Energy),
            other => Err(HypoError::InvalidArgument(format!(
                "unknown basis variant '{other}' (expected tensor or energy)"
            ))),
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Variant::Tensor => "tensor",
            Variant::Energy => "energy",
        })
    }
}

/// Coefficients `(√(m+1), √m)` of `v·g_m = up·g_{m+1} + down·g_{m−1}`.
pub fn recurrence_coeffs(m: usize) -> (f64, f64) {
    (((m + 1) as f64).sqrt(), (m as f64).sqrt())
}

/// One-dimensional Maxwellian `M₁(v) = (2π)^{-1/2} e^{-v²/2}`.
pub fn maxwellian(v: f64) -> f64 {
    (-0.5 * v * v).exp() / (2.0 * PI).sqrt()
}

/// Values `g_0(v), …, g_{count−1}(v)` of the normalized Hermite functions.
///
/// The three-term recurrence runs on the polynomial part `He_m/√(m!)` with
/// a running power-of-two exponent, and the Gaussian factor is applied at
/// the end. This keeps large degrees accurate even where `e^{-v²/2}` alone
/// would underflow.
pub fn hermite_functions(v: f64, count: usize) -> Vec<f64> {
    let mut out = vec![0.0; count];
    if count == 0 {
        return out;
    }
    let log_gauss = -0.5 * v * v - 0.5 * (2.0 * PI).ln();
    let mut prev = 0.0_f64;
    let mut cur = 1.0_f64;
    let mut log_scale = 0.0_f64;
    for (m, slot) in out.iter_mut().enumerate() {
        *slot = cur * (log_scale + log_gauss).exp();
        let (up, down) = recurrence_coeffs(m);
        let next = (v * cur - down * prev) / up;
        prev = cur;
        cur = next;
        let size = cur.abs().max(prev.abs());
        if size > 1e150 {
            cur *= 1e-150;
            prev *= 1e-150;
            log_scale += 150.0 * std::f64::consts::LN_10;
        }
    }
    out
}

/// Normalized probabilists' Hermite polynomials `He_m(v)/√(m!)`, `m < count`.
pub fn normalized_hermite_polynomials(v: f64, count: usize) -> Vec<f64> {
    let mut out = vec![0.0; count];
    if count == 0 {
        return out;
    }
    out[0] = 1.0;
    if count > 1 {
        out[1] = v;
    }
    for m in 1..count.saturating_sub(1) {
        let (up, down) = recurrence_coeffs(m);
        out[m + 1] = (v * out[m] - down * out[m - 1]) / up;
    }
    out
}

/// Number of multi-indices in `ℕ₀^d` with total degree below `n`.
pub fn degree_offset(n: usize, d: usize) -> usize {
    match d {
        1 => n,
        2 => n * (n + 1) / 2,
        3 => n * (n + 1) * (n + 2) / 6,
        _ => panic!("dimension must be 1, 2 or 3"),
    }
}

/// Linear index of a multi-index under the degree-graded ordering.
///
/// 2D: `|m|(|m|+1)/2 + m₂`. 3D: the degree offset `|m|(|m|+1)(|m|+2)/6`
/// plus the rank within the degree under decreasing `m₁`, then `m₂`.
pub fn lex_index(m: &[usize]) -> usize {
    match m.len() {
        1 => m[0],
        2 => {
            let n = m[0] + m[1];
            n * (n + 1) / 2 + m[1]
        }
        3 => {
            let n = m[0] + m[1] + m[2];
            let rest = n - m[0];
            degree_offset(n, 3) + rest * (rest + 1) / 2 + (rest - m[1])
        }
        d => panic!("unsupported dimension {d}"),
    }
}

/// Inverse of [`lex_index`].
pub fn multi_index(index: usize, d: usize) -> Vec<usize> {
    match d {
        1 => vec![index],
        2 => {
            let mut n = 0;
            while degree_offset(n + 1, 2) <= index {
                n += 1;
            }
            let m2 = index - degree_offset(n, 2);
            vec![n - m2, m2]
        }
        3 => {
            let mut n = 0;
            while degree_offset(n + 1, 3) <= index {
                n += 1;
            }
            let mut r = index - degree_offset(n, 3);
            // Within a degree, m₁ = n − j occupies j + 1 consecutive slots.
            let mut j = 0;
            while r > j {
                r -= j + 1;
                j += 1;
            }
            let m1 = n - j;
            let m2 = j - r;
            vec![m1, m2, n - m1 - m2]
        }
        _ => panic!("dimension must be 1, 2 or 3"),
    }
}

/// Smallest truncation that contains the full certificate block.
pub fn minimum_block_size(d: usize) -> usize {
    match d {
        1 => 5,
        2 => 11,
        3 => 21,
        _ => panic!("dimension must be 1, 2 or 3"),
    }
}

/// First index past the second-degree block that `S` modifies.
pub fn energy_block_end(d: usize) -> usize {
    degree_offset(3, d)
}

/// Validated basis description with a cached index table.
#[derive(Clone, Debug)]
pub struct BasisSpec {
    dim: usize,
    variant: Variant,
    size: usize,
    indices: Vec<Vec<usize>>,
    lookup: HashMap<Vec<usize>, usize>,
}

impl BasisSpec {
    /// Creates a basis of the first `size` functions in dimension `dim`.
    pub fn new(dim: usize, variant: Variant, size: usize) -> Result<Self> {
        check_dim(dim)?;
        if size == 0 || size > MAX_TRUNCATION {
            return Err(HypoError::InvalidArgument(format!(
                "truncation size {size} outside 1..={MAX_TRUNCATION}"
            )));
        }
        if variant == Variant::Energy && dim > 1 && size < energy_block_end(dim) {
            return Err(HypoError::InvalidArgument(format!(
                "energy basis in {dim}D needs at least {} functions",
                energy_block_end(dim)
            )));
        }
        let indices: Vec<Vec<usize>> = (0..size).map(|i| multi_index(i, dim)).collect();
        let lookup = indices.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        Ok(Self {
            dim,
            variant,
            size,
            indices,
            lookup,
        })
    }

    /// Velocity dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Basis variant.
    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// Number of retained functions.
    pub fn size(&self) -> usize {
        self.size
    }

    /// Multi-index of a retained linear index.
    pub fn multi_index(&self, i: usize) -> &[usize] {
        &self.indices[i]
    }

    /// Linear index of a multi-index, if it is retained.
    pub fn linear_index(&self, m: &[usize]) -> Option<usize> {
        self.lookup.get(m).copied()
    }

    /// Evaluates every retained basis function at the velocity `v`.
    pub fn evaluate(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.dim, "velocity has wrong dimension");
        let max_deg = self.indices.iter().map(|m| m.iter().sum::<usize>()).max().unwrap_or(0);
        let tables: Vec<Vec<f64>> = v.iter().map(|&x| hermite_functions(x, max_deg + 1)).collect();
        let mut out: Vec<f64> = self
            .indices
            .iter()
            .map(|m| m.iter().zip(&tables).map(|(&k, t)| t[k]).product())
            .collect();
        if self.variant == Variant::Energy && self.dim > 1 {
            let s = energy_block(self.dim);
            let start = degree_offset(2, self.dim);
            let block: Vec<f64> = out[start..start + s.nrows()].to_vec();
            for i in 0..s.nrows() {
                out[start + i] = (0..s.ncols()).map(|j| s[(i, j)] * block[j]).sum();
            }
        }
        out
    }
}

fn check_dim(d: usize) -> Result<()> {
    if (1..=3).contains(&d) {
        Ok(())
    } else {
        Err(HypoError::InvalidArgument(format!("dimension {d} not in 1..=3")))
    }
}

/// Evaluates a single basis function `g_m(v)` or its energy counterpart.
pub fn eval_basis(m: &[usize], v: &[f64], variant: Variant) -> f64 {
    assert_eq!(m.len(), v.len(), "multi-index and velocity dimensions differ");
    let d = m.len();
    let tensor = |mi: &[usize]| -> f64 {
        mi.iter()
            .zip(v)
            .map(|(&k, &x)| hermite_functions(x, k + 1)[k])
            .product()
    };
    let idx = lex_index(m);
    let start = degree_offset(2, d);
    if variant == Variant::Tensor || d == 1 || idx < start || idx >= energy_block_end(d) {
        return tensor(m);
    }
    let s = energy_block(d);
    (0..s.ncols())
        .map(|j| s[(idx - start, j)] * tensor(&multi_index(start + j, d)))
        .sum()
}

/// The second-degree block of the basis-change matrix.
fn energy_block(d: usize) -> DMatrix<f64> {
    match d {
        2 => {
            let h = 1.0 / 2f64.sqrt();
            DMatrix::from_row_slice(3, 3, &[h, 0.0, h, 0.0, 1.0, 0.0, h, 0.0, -h])
        }
        3 => {
            let r = 1.0 / 3f64.sqrt();
            let a = -(1.0 + r) / 2.0;
            let b = (1.0 - r) / 2.0;
            DMatrix::from_row_slice(
                6,
                6,
                &[
                    r, 0.0, 0.0, r, 0.0, r, //
                    0.0, 1.0, 0.0, 0.0, 0.0, 0.0, //
                    0.0, 0.0, 1.0, 0.0, 0.0, 0.0, //
                    r, 0.0, 0.0, a, 0.0, b, //
                    0.0, 0.0, 0.0, 0.0, 1.0, 0.0, //
                    r, 0.0, 0.0, b, 0.0, a,
                ],
            )
        }
        _ => DMatrix::identity(0, 0),
    }
}

/// Real symmetric involution `S` mapping tensor to energy coefficients.
///
/// `S` is the identity outside the second-degree block (indices 3–5 in 2D,
/// 4–9 in 3D). Rejects truncations that cut through that block.
pub fn basis_change_matrix(d: usize, n: usize) -> Result<DMatrix<f64>> {
    if d != 2 && d != 3 {
        return Err(HypoError::InvalidArgument(format!(
            "basis change is defined for d = 2, 3 only (got {d})"
        )));
    }
    let end = energy_block_end(d);
    if n < end {
        return Err(HypoError::InvalidArgument(format!(
            "truncation {n} smaller than the second-degree block extent {end}"
        )));
    }
    let mut s = DMatrix::identity(n, n);
    let start = degree_offset(2, d);
    let block = energy_block(d);
    s.view_mut((start, start), block.shape()).copy_from(&block);
    Ok(s)
}

/// `ln Σ_{m<count} p_m(v)²` for the normalized Hermite polynomials
/// `p_m = He_m/√(m!)`, with rescaling so that large `|v|` does not overflow.
pub fn log_christoffel_sum(v: f64, count: usize) -> f64 {
    let (mut prev, mut cur) = (0.0_f64, 1.0_f64);
    let (mut log_scale, mut sum) = (0.0_f64, 0.0_f64);
    for m in 0..count {
        sum += cur * cur;
        let (up, down) = recurrence_coeffs(m);
        let next = (v * cur - down * prev) / up;
        prev = cur;
        cur = next;
        if cur.abs().max(prev.abs()) > 1e100 {
            cur *= 1e-100;
            prev *= 1e-100;
            sum *= 1e-200;
            log_scale += 200.0 * std::f64::consts::LN_10;
        }
    }
    sum.ln() + log_scale
}

/// Gauss–Hermite nodes and weights for the weight `e^{-v²/2}` on ℝ.
///
/// Computed by the Golub–Welsch method: nodes are the eigenvalues of the
/// symmetric Jacobi matrix with off-diagonal `√k`. Weights use the
/// equivalent Christoffel form `√(2π)/Σ_{m<n} p_m(v_i)²`, which keeps full
/// relative accuracy at the outer nodes where squared eigenvector entries
/// do not. Nodes are returned in ascending order and symmetrized.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    if n == 0 {
        return (Vec::new(), Vec::new());
    }
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = (k as f64).sqrt();
        jacobi[(k - 1, k)] = b;
        jacobi[(k, k - 1)] = b;
    }
    let eig = jacobi.symmetric_eigen();
    let mut nodes: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    nodes.sort_by(f64::total_cmp);
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let x = 0.5 * (nodes[j] - nodes[i]);
        nodes[i] = -x;
        nodes[j] = x;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    let root = (2.0 * PI).sqrt();
    let weights = nodes
        .iter()
        .map(|&v| root * (-log_christoffel_sum(v, n)).exp())
        .collect();
    (nodes, weights)
}
