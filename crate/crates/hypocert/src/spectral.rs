//! Spectral gaps of the truncated modal generators `C_κ`.
//!
//! The gap of mode `κ` is `min Re λ(C_κ)`; the zero mode evolves by
//! `h₀' = −h₀` on the non-conserved part and is assigned gap 1. The overall
//! gap is the minimum over the requested moduli. Eigenvalues come from the
//! balanced Hessenberg/shifted-QR solver in [`crate::eigen`], one
//! decomposition per `(κ, N)` pair, run in parallel.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigen::complex_eigenvalues;
use crate::error::{HypoError, Result};
use crate::hermite::{minimum_block_size, Variant};
use crate::io::fmt_sig;
use crate::operators::OperatorPair;

/// Gap of one mode at one truncation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapEntry {
    /// Mode modulus (signed wave number in 1D).
    pub kappa: f64,
    /// Truncation size.
    #[serde(rename = "N")]
    pub size: usize,
    /// `min Re λ(C_κ)`.
    pub gap: f64,
}

/// Gaps over a list of moduli.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GapReport {
    /// Velocity dimension.
    pub d: usize,
    /// Torus side length.
    #[serde(rename = "L")]
    pub length: f64,
    /// Per-mode gaps in input order.
    pub entries: Vec<GapEntry>,
    /// Minimum over all entries.
    pub overall_gap: f64,
    /// Modulus attaining the minimum (first one on ties).
    pub argmin_kappa: f64,
}

impl GapReport {
    /// CSV with header `kappa,N,gap`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("kappa,N,gap\n");
        for e in &self.entries {
            s.push_str(&format!("{},{},{}\n", fmt_sig(e.kappa), e.size, fmt_sig(e.gap)));
        }
        s
    }
}

fn natural_variant(d: usize) -> Variant {
    if d == 1 {
        Variant::Tensor
    } else {
        Variant::Energy
    }
}

fn check_size(d: usize, size: usize) -> Result<()> {
    let min = minimum_block_size(d);
    if size < min {
        return Err(HypoError::InvalidArgument(format!(
            "truncation {size} below the minimum {min} for dimension {d}"
        )));
    }
    Ok(())
}

/// `min Re λ(C_κ)` for one generator; `κ = 0` gives 1.
pub fn mode_gap(pair: &OperatorPair, kappa: f64) -> Result<f64> {
    if kappa == 0.0 {
        return Ok(1.0);
    }
    let values = complex_eigenvalues(&pair.generator(kappa).matrix)?;
    Ok(values.iter().map(|z| z.re).fold(f64::INFINITY, f64::min))
}

/// Gaps of `C_κ` for every `κ` in `kappas` at truncation `size`.
pub fn spectral_gap(d: usize, length: f64, kappas: &[f64], size: usize) -> Result<GapReport> {
    check_size(d, size)?;
    if kappas.is_empty() {
        return Err(HypoError::InvalidArgument("no moduli requested".into()));
    }
    let pair = OperatorPair::new(d, natural_variant(d), size, length)?;
    let entries: Vec<GapEntry> = kappas
        .par_iter()
        .map(|&kappa| {
            Ok(GapEntry {
                kappa,
                size,
                gap: mode_gap(&pair, kappa)?,
            })
        })
        .collect::<Result<_>>()?;
    let best = entries
        .iter()
        .fold(None::<GapEntry>, |acc, e| match acc {
            Some(a) if a.gap <= e.gap => Some(a),
            _ => Some(*e),
        })
        .expect("non-empty");
    Ok(GapReport {
        d,
        length,
        overall_gap: best.gap,
        argmin_kappa: best.kappa,
        entries,
    })
}

/// Gap of one mode across several truncation sizes.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TruncationStudy {
    /// Velocity dimension.
    pub d: usize,
    /// Torus side length.
    #[serde(rename = "L")]
    pub length: f64,
    /// Mode modulus.
    pub kappa: f64,
    /// Gaps in the order of the requested sizes.
    pub entries: Vec<GapEntry>,
    /// `|gap(N_{i+1}) − gap(N_i)|`.
    pub cauchy_differences: Vec<f64>,
    /// Whether the gap is nondecreasing along the requested sizes.
    pub monotone: bool,
}

impl TruncationStudy {
    /// CSV with header `kappa,N,gap`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("kappa,N,gap\n");
        for e in &self.entries {
            s.push_str(&format!("{},{},{}\n", fmt_sig(e.kappa), e.size, fmt_sig(e.gap)));
        }
        s
    }
}

/// Default truncation ladder of the convergence study.
pub const TRUNCATION_LADDER: [usize; 6] = [25, 50, 100, 200, 400, 500];

/// Computes the gap of mode `kappa` for each truncation size in `sizes`.
pub fn truncation_study(d: usize, length: f64, kappa: f64, sizes: &[usize]) -> Result<TruncationStudy> {
    for &n in sizes {
        check_size(d, n)?;
    }
    let entries: Vec<GapEntry> = sizes
        .par_iter()
        .map(|&size| {
            let pair = OperatorPair::new(d, natural_variant(d), size, length)?;
            Ok(GapEntry {
                kappa,
                size,
                gap: mode_gap(&pair, kappa)?,
            })
        })
        .collect::<Result<_>>()?;
    let cauchy_differences: Vec<f64> = entries.windows(2).map(|w| (w[1].gap - w[0].gap).abs()).collect();
    let monotone = entries.windows(2).all(|w| w[1].gap >= w[0].gap);
    Ok(TruncationStudy {
        d,
        length,
        kappa,
        entries,
        cauchy_differences,
        monotone,
    })
}

/// `gap(κ)·(1 + κ²)/κ²` for each entry of a report, the profile of an
/// empirical uniform lower bound of the form `c·κ²/(1 + κ²)`.
pub fn scaled_gaps(report: &GapReport) -> Vec<(f64, f64)> {
    report
        .entries
        .iter()
        .filter(|e| e.kappa != 0.0)
        .map(|e| (e.kappa, e.gap * (1.0 + e.kappa * e.kappa) / (e.kappa * e.kappa)))
        .collect()
}
