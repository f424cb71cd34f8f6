//! Truncated transport and collision matrices of the linearized BGK model.
//!
//! In the Hermite basis, multiplication by the first velocity component is
//! the real symmetric matrix `L₁`, and the linearized BGK collision operator
//! is the orthogonal projection `L₂ = I − Π` onto the complement of the
//! conserved quantities (mass, momentum, energy). After a Fourier transform
//! in space and a rotation that aligns the wave vector with the first axis,
//! mode `k` evolves by `ĥ' = −C_κ ĥ` with `C_κ = iℓκL₁ + L₂`, `ℓ = 2π/L`,
//! `κ = |k|`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{HypoError, Result};
use crate::hermite::{basis_change_matrix, lex_index, BasisSpec, Variant};
use crate::linalg::CMatrix;

/// Transport and collision matrices for one basis and torus length.
#[derive(Clone, Debug)]
pub struct OperatorPair {
    /// Real symmetric transport matrix.
    pub l1: DMatrix<f64>,
    /// Real symmetric positive semi-definite collision matrix.
    pub l2: DMatrix<f64>,
    /// Velocity dimension.
    pub dim: usize,
    /// Basis variant.
    pub variant: Variant,
    /// Truncation size.
    pub size: usize,
    /// Torus side length.
    pub length: f64,
}

impl OperatorPair {
    /// Assembles both matrices.
    pub fn new(dim: usize, variant: Variant, size: usize, length: f64) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(HypoError::InvalidArgument(format!(
                "torus length must be positive, got {length}"
            )));
        }
        Ok(Self {
            l1: build_l1(dim, variant, size)?,
            l2: build_l2(dim, variant, size)?,
            dim,
            variant,
            size,
            length,
        })
    }

    /// Wave-number scale `ℓ = 2π/L`.
    pub fn ell(&self) -> f64 {
        2.0 * PI / self.length
    }

    /// Generator for the mode modulus (or signed 1D wave number) `kappa`.
    pub fn generator(&self, kappa: f64) -> ModalGenerator {
        modal_generator(self, kappa)
    }
}

/// Modal generator `C = iℓκL₁ + L₂`.
#[derive(Clone, Debug)]
pub struct ModalGenerator {
    /// Mode modulus (a signed wave number is accepted in 1D).
    pub kappa: f64,
    /// The complex generator matrix.
    pub matrix: CMatrix,
}

/// Transport matrix: entry `(i, j)` is the coefficient of `g_i` in `v₁·g_j`.
///
/// The energy variant is `S·L₁·S`.
pub fn build_l1(dim: usize, variant: Variant, size: usize) -> Result<DMatrix<f64>> {
    let basis = BasisSpec::new(dim, variant, size)?;
    let mut l1 = DMatrix::zeros(size, size);
    for j in 0..size {
        let m = basis.multi_index(j);
        let mut up = m.to_vec();
        up[0] += 1;
        let row = lex_index(&up);
        if row < size {
            let value = ((m[0] + 1) as f64).sqrt();
            l1[(row, j)] = value;
            l1[(j, row)] = value;
        }
    }
    Ok(to_variant(l1, dim, variant))
}

/// Collision matrix `I − Π`, with `Π` the projection onto mass, momentum
/// and the normalized energy direction `Σ_i g_{2e_i}/√d`.
pub fn build_l2(dim: usize, variant: Variant, size: usize) -> Result<DMatrix<f64>> {
    BasisSpec::new(dim, variant, size)?;
    let mut l2 = DMatrix::identity(size, size);
    for i in 0..=dim {
        if i < size {
            l2[(i, i)] = 0.0;
        }
    }
    let energy: Vec<usize> = (0..dim)
        .map(|i| {
            let mut m = vec![0; dim];
            m[i] = 2;
            lex_index(&m)
        })
        .filter(|&i| i < size)
        .collect();
    let w = 1.0 / (dim as f64);
    for &a in &energy {
        for &b in &energy {
            l2[(a, b)] -= w;
        }
    }
    Ok(to_variant(l2, dim, variant))
}

fn to_variant(m: DMatrix<f64>, dim: usize, variant: Variant) -> DMatrix<f64> {
    if variant == Variant::Energy && dim > 1 {
        let s = basis_change_matrix(dim, m.nrows()).expect("size checked by BasisSpec");
        let mut out = &s * m * &s;
        // Restore exact symmetry lost to rounding in the triple product.
        let t = out.transpose();
        out = (out + t) * 0.5;
        out
    } else {
        m
    }
}

/// Builds `C = iℓκL₁ + L₂`.
pub fn modal_generator(pair: &OperatorPair, kappa: f64) -> ModalGenerator {
    let s = pair.ell() * kappa;
    let matrix = CMatrix::from_fn(pair.size, pair.size, |i, j| {
        Complex64::new(pair.l2[(i, j)], s * pair.l1[(i, j)])
    });
    ModalGenerator { kappa, matrix }
}

/// A distinct lattice modulus `κ = |k|` and the number of lattice points on it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeModulus {
    /// Euclidean length of the lattice vectors.
    pub kappa: f64,
    /// Squared length (an integer).
    pub norm_squared: u64,
    /// Number of `k ∈ ℤ^d` in the enumerated box with `|k| = κ`.
    pub multiplicity: usize,
}

/// Distinct moduli of nonzero `k ∈ ℤ^d` with `|k|_∞ ≤ kmax`, ascending.
pub fn mode_moduli(dim: usize, kmax: usize) -> Result<Vec<ModeModulus>> {
    if !(1..=3).contains(&dim) {
        return Err(HypoError::InvalidArgument(format!("dimension {dim} not in 1..=3")));
    }
    if kmax == 0 {
        return Err(HypoError::InvalidArgument("kmax must be at least 1".into()));
    }
    let k = kmax as i64;
    let mut counts: BTreeMap<u64, usize> = BTreeMap::new();
    let range = || -k..=k;
    let mut visit = |v: &[i64]| {
        let n2: i64 = v.iter().map(|x| x * x).sum();
        if n2 > 0 {
            *counts.entry(n2 as u64).or_default() += 1;
        }
    };
    match dim {
        1 => range().for_each(|a| visit(&[a])),
        2 => range().for_each(|a| range().for_each(|b| visit(&[a, b]))),
        _ => range().for_each(|a| range().for_each(|b| range().for_each(|c| visit(&[a, b, c])))),
    }
    Ok(counts
        .into_iter()
        .map(|(n2, multiplicity)| ModeModulus {
            kappa: (n2 as f64).sqrt(),
            norm_squared: n2,
            multiplicity,
        })
        .collect())
}

/// The `count` smallest distinct moduli `|k|`, `k ∈ ℤ^d \ {0}`.
pub fn first_moduli(dim: usize, count: usize) -> Result<Vec<f64>> {
    if !(1..=3).contains(&dim) {
        return Err(HypoError::InvalidArgument(format!("dimension {dim} not in 1..=3")));
    }
    // A squared norm n² ≤ kmax² is always reached inside the box |k|_∞ ≤ kmax.
    let mut kmax = 1usize;
    loop {
        let all = mode_moduli(dim, kmax)?;
        let complete: Vec<f64> = all
            .iter()
            .filter(|m| m.norm_squared <= (kmax * kmax) as u64)
            .map(|m| m.kappa)
            .collect();
        if complete.len() >= count {
            return Ok(complete.into_iter().take(count).collect());
        }
        kmax *= 2;
    }
}
