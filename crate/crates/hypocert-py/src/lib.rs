//! Python bindings for the `hypocert` crate.
//!
//! The module `pyhypocert` exposes certificate constants, full decay
//! certificates (as JSON text), hypocoercivity indices, spectral gaps and
//! the closed-form minors. Library errors surface as `ValueError`.

use std::f64::consts::TAU;

use hypocert::hermite::{minimum_block_size, Variant};
use hypocert::linalg::to_complex;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn value_error(err: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(err.to_string())
}

fn parse_basis(d: usize, basis: Option<&str>) -> PyResult<Variant> {
    match basis {
        None if d == 1 => Ok(Variant::Tensor),
        None => Ok(Variant::Energy),
        Some("tensor") => Ok(Variant::Tensor),
        Some("energy") => Ok(Variant::Energy),
        Some(other) => Err(value_error(format!("unknown basis {other:?}; use \"tensor\" or \"energy\""))),
    }
}

/// `(alpha_plus, alpha_star, mu)` for dimension `d` and torus length `length`.
#[pyfunction]
#[pyo3(signature = (d, length = TAU))]
pub fn rate_constants(d: usize, length: f64) -> PyResult<(f64, f64, f64)> {
    hypocert::certificate::rate_constants(d, length).map_err(value_error)
}

/// Decay certificate as JSON text, verified over the first `kmax` moduli at
/// truncation `trunc` (default: four times the minimum block size).
#[pyfunction]
#[pyo3(signature = (d, length = TAU, kmax = 50, trunc = None))]
pub fn certificate(d: usize, length: f64, kmax: usize, trunc: Option<usize>) -> PyResult<String> {
    if !(1..=3).contains(&d) {
        return Err(value_error(format!("dimension {d} not in 1..=3")));
    }
    let size = trunc.unwrap_or(4 * minimum_block_size(d));
    let cert = hypocert::certificate::certify_with(d, length, kmax, size).map_err(value_error)?;
    serde_json::to_string(&cert).map_err(value_error)
}

/// Hypocoercivity index of the truncated (transport, collision) pair, or
/// `None` when the pair is not hypocoercive.
#[pyfunction]
#[pyo3(signature = (d, trunc, basis = None, tol_rank = 1e-10))]
pub fn hypocoercivity_index(d: usize, trunc: usize, basis: Option<&str>, tol_rank: f64) -> PyResult<Option<usize>> {
    let variant = parse_basis(d, basis)?;
    let pair = hypocert::operators::OperatorPair::new(d, variant, trunc, TAU).map_err(value_error)?;
    let report = hypocert::hypo_index::hypocoercivity_index(&to_complex(&pair.l1), &to_complex(&pair.l2), tol_rank)
        .map_err(value_error)?;
    Ok(report.index)
}

/// Spectral gaps `min Re λ(C_κ)` for each modulus in `kappas`.
#[pyfunction]
#[pyo3(signature = (d, kappas, trunc, length = TAU))]
pub fn spectral_gaps(d: usize, kappas: Vec<f64>, trunc: usize, length: f64) -> PyResult<Vec<f64>> {
    let report = hypocert::spectral::spectral_gap(d, length, &kappas, trunc).map_err(value_error)?;
    Ok(report.entries.iter().map(|e| e.gap).collect())
}

/// Closed-form minors `δ₁, δ₂, …` at modulus `kappa` and parameter `alpha`.
#[pyfunction]
#[pyo3(signature = (d, kappa, alpha, length = TAU))]
pub fn minors(d: usize, kappa: f64, alpha: f64, length: f64) -> PyResult<Vec<f64>> {
    if !(length.is_finite() && length > 0.0) {
        return Err(value_error(format!("torus length must be positive, got {length}")));
    }
    hypocert::certificate::minors(d, kappa, alpha, TAU / length).map_err(value_error)
}

/// `[(L, alpha_plus, alpha_star, mu), …]` over the given torus lengths.
#[pyfunction]
pub fn sweep_lengths(d: usize, lengths: Vec<f64>) -> PyResult<Vec<(f64, f64, f64, f64)>> {
    let points = hypocert::certificate::sweep_lengths(d, &lengths).map_err(value_error)?;
    Ok(points.iter().map(|p| (p.length, p.alpha_plus, p.alpha_star, p.mu)).collect())
}

/// The `pyhypocert` extension module.
#[pymodule]
fn pyhypocert(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(rate_constants, m)?)?;
    m.add_function(wrap_pyfunction!(certificate, m)?)?;
    m.add_function(wrap_pyfunction!(hypocoercivity_index, m)?)?;
    m.add_function(wrap_pyfunction!(spectral_gaps, m)?)?;
    m.add_function(wrap_pyfunction!(minors, m)?)?;
    m.add_function(wrap_pyfunction!(sweep_lengths, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
