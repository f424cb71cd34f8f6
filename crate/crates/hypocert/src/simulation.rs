//! Modal time evolution of the linearized BGK equation.
//!
//! A state stores one Hermite coefficient vector per spatial mode: every
//! signed wave number `k` in 1D, and one representative modulus `κ` with a
//! lattice multiplicity weight in 2D and 3D. Modes decouple, so each one
//! evolves by `ĥ_κ(t + Δt) = exp(−C_κΔt) ĥ_κ(t)`; propagators are computed
//! once per `(κ, Δt)` and reused for every step.
//!
//! Observables along a trajectory:
//!
//! - the entropy `E_γ = Σ w_κ (1 + κ²)^γ ⟨ĥ_κ, P_κ ĥ_κ⟩` with `P₀ = I`;
//! - the weighted norm `(Σ w_κ ‖ĥ_κ‖²)^{1/2}`;
//! - in 1D, the `L¹` distance `(1/L)∫∫|f − M₁| dx dv`, reconstructed on a
//!   uniform `x`-grid (inverse FFT) times Gauss–Hermite velocity nodes;
//! - the envelope `min{2, √(C E₀) e^{−λt/2}}` and its crossover time.

use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::eigen::exp_neg;
use crate::error::{HypoError, Result};
use crate::hermite::{basis_change_matrix, gauss_hermite, hermite_functions, log_christoffel_sum, Variant};
use crate::io::fmt_sig;
use crate::linalg::{CMatrix, CVector};
use crate::lyapunov::bgk_p;
use crate::operators::{mode_moduli, OperatorPair};

/// One spatial mode of a state.
#[derive(Clone, Debug)]
pub struct Mode {
    /// Signed wave number (1D) or modulus (2D/3D); zero for the mean.
    pub kappa: f64,
    /// Number of lattice vectors represented by this mode.
    pub weight: f64,
    /// Hermite coefficients.
    pub coeffs: CVector,
}

/// Hermite coefficients of all retained modes at one time.
#[derive(Clone, Debug)]
pub struct ModalState {
    /// Velocity dimension.
    pub d: usize,
    /// Torus side length.
    pub length: f64,
    /// Basis variant of the coefficient vectors.
    pub variant: Variant,
    /// Truncation size.
    pub size: usize,
    /// Modes in a fixed order (1D: `k = −K..K`; else ascending `κ`).
    pub modes: Vec<Mode>,
    /// Current time.
    pub time: f64,
}

/// Density, momentum and temperature moments of one mode.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeMoments {
    /// Mode label.
    pub kappa: f64,
    /// `σ_k`.
    pub sigma: Complex64,
    /// `μ_k` (one component per velocity direction).
    pub momentum: Vec<Complex64>,
    /// `τ_k`.
    pub tau: Complex64,
}

impl ModalState {
    /// An all-zero state with 1D modes `k = −kmax..kmax`, or the moduli up
    /// to `|k|_∞ ≤ kmax` (plus the mean) in 2D/3D.
    pub fn zeros(d: usize, length: f64, variant: Variant, size: usize, kmax: usize) -> Result<Self> {
        OperatorPair::new(d, variant, size, length)?;
        let modes = mode_list(d, kmax)?
            .into_iter()
            .map(|(kappa, weight)| Mode {
                kappa,
                weight,
                coeffs: CVector::zeros(size),
            })
            .collect();
        Ok(Self {
            d,
            length,
            variant,
            size,
            modes,
            time: 0.0,
        })
    }

    /// Coefficients converted to the tensor basis.
    fn tensor_coeffs(&self, coeffs: &CVector) -> CVector {
        if self.variant == Variant::Energy && self.d > 1 {
            let s = basis_change_matrix(self.d, self.size).expect("size validated");
            s.map(|x| Complex64::new(x, 0.0)) * coeffs
        } else {
            coeffs.clone()
        }
    }

    /// Moments of every mode. With `ĥ` in the tensor basis,
    /// `σ = ĥ₀`, `μ_i = ĥ_{e_i}` and `τ = dσ + √2 Σ_i ĥ_{2e_i}`.
    pub fn moments(&self) -> Vec<ModeMoments> {
        let d = self.d;
        let second: Vec<usize> = (0..d)
            .map(|i| {
                let mut m = vec![0; d];
                m[i] = 2;
                crate::hermite::lex_index(&m)
            })
            .collect();
        self.modes
            .iter()
            .map(|mode| {
                let h = self.tensor_coeffs(&mode.coeffs);
                let get = |i: usize| h.get(i).copied().unwrap_or_default();
                let sigma = get(0);
                let momentum = (1..=d).map(get).collect();
                let sum2: Complex64 = second.iter().map(|&i| get(i)).sum();
                ModeMoments {
                    kappa: mode.kappa,
                    sigma,
                    momentum,
                    tau: sigma * d as f64 + sum2 * 2f64.sqrt(),
                }
            })
            .collect()
    }

    /// `(Σ w_κ ‖ĥ_κ‖²)^{1/2}`.
    pub fn h_norm(&self) -> f64 {
        self.modes
            .iter()
            .map(|m| m.weight * m.coeffs.norm_squared())
            .sum::<f64>()
            .sqrt()
    }
}

/// Mode labels and weights: `(k, 1)` for `k = −K..K` in 1D, `(0, 1)` and
/// `(κ, multiplicity)` in 2D/3D.
fn mode_list(d: usize, kmax: usize) -> Result<Vec<(f64, f64)>> {
    if kmax == 0 {
        return Err(HypoError::InvalidArgument("kmax must be at least 1".into()));
    }
    if d == 1 {
        let k = kmax as i64;
        return Ok((-k..=k).map(|j| (j as f64, 1.0)).collect());
    }
    let mut out = vec![(0.0, 1.0)];
    out.extend(
        mode_moduli(d, kmax)?
            .into_iter()
            .map(|m| (m.kappa, m.multiplicity as f64)),
    );
    Ok(out)
}

/// Fourier coefficient at `ω` of the raised cosine
/// `χ(x) = (1 + cos(ω₀x))/(εL)` on `|x| < εL/2`, `ω₀ = 2π/(εL)`.
pub fn raised_cosine_coefficient(epsilon: f64, length: f64, omega: f64) -> f64 {
    let a = 0.5 * epsilon * length;
    let w0 = 2.0 * PI / (epsilon * length);
    let s = |nu: f64| {
        if (nu * a).abs() < 1e-12 {
            a
        } else {
            (nu * a).sin() / nu
        }
    };
    (2.0 * s(omega) + s(w0 - omega) + s(w0 + omega)) / (epsilon * length)
}

/// Concentrated initial datum `f^I = Lχ_ε(x)M₁(v)` with a raised-cosine
/// bump `χ_ε` of width `εL` and unit mass.
///
/// Only the density coefficient `ĥ_{k,0}` is populated and the mean mode
/// is zero, so mass, momentum and energy of the perturbation vanish. For
/// `ε = 1` the container fills the torus and the datum is the equilibrium
/// itself (all coefficients zero). In 2D/3D the same radial profile is
/// evaluated at `ω = ℓκ`.
pub fn concentrated_initial_data(
    d: usize,
    length: f64,
    epsilon: f64,
    kmax: usize,
    size: usize,
) -> Result<(ModalState, f64)> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(HypoError::InvalidArgument(format!("ε must lie in (0, 1], got {epsilon}")));
    }
    let variant = if d == 1 { Variant::Tensor } else { Variant::Energy };
    let mut state = ModalState::zeros(d, length, variant, size, kmax)?;
    if epsilon == 1.0 {
        return Ok((state, 0.0));
    }
    let ell = 2.0 * PI / length;
    for mode in &mut state.modes {
        if mode.kappa != 0.0 {
            mode.coeffs[0] = Complex64::new(raised_cosine_coefficient(epsilon, length, ell * mode.kappa), 0.0);
        }
    }
    // Energy in the discarded 1D modes K < |k| ≤ 64K.
    let tail = if d == 1 {
        2.0 * ((kmax + 1)..=(64 * kmax))
            .map(|k| raised_cosine_coefficient(epsilon, length, ell * k as f64).powi(2))
            .sum::<f64>()
    } else {
        0.0
    };
    Ok((state, tail))
}

/// Cached propagators `exp(−C_κΔt)` for a fixed step.
pub struct Propagator {
    dt: f64,
    matrices: HashMap<u64, CMatrix>,
}

impl Propagator {
    /// Builds the propagators for every mode of `state`, in parallel.
    pub fn new(state: &ModalState, dt: f64) -> Result<Self> {
        if !(dt >= 0.0 && dt.is_finite()) {
            return Err(HypoError::InvalidArgument(format!("Δt must be nonnegative, got {dt}")));
        }
        let pair = OperatorPair::new(state.d, state.variant, state.size, state.length)?;
        // exp(−C_{−κ}Δt) is the complex conjugate of exp(−C_κΔt).
        let mut kappas: Vec<f64> = state.modes.iter().map(|m| m.kappa.abs()).collect();
        kappas.sort_by(f64::total_cmp);
        kappas.dedup();
        let built: Vec<(f64, CMatrix)> = kappas
            .par_iter()
            .map(|&kappa| Ok((kappa, exp_neg(&pair.generator(kappa).matrix, dt)?)))
            .collect::<Result<_>>()?;
        let mut matrices = HashMap::new();
        for (kappa, e) in built {
            if state.modes.iter().any(|m| m.kappa == -kappa && kappa != 0.0) {
                matrices.insert((-kappa).to_bits(), e.conjugate());
            }
            matrices.insert(kappa.to_bits(), e);
        }
        Ok(Self { dt, matrices })
    }

    /// The step length.
    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Advances `state` by one step.
    pub fn step(&self, state: &mut ModalState) -> Result<()> {
        state.modes.par_iter_mut().try_for_each(|mode| {
            let e = self.matrices.get(&mode.kappa.to_bits()).ok_or_else(|| {
                HypoError::InvalidArgument(format!("no propagator for mode {}", mode.kappa))
            })?;
            mode.coeffs = e * &mode.coeffs;
            Ok::<(), HypoError>(())
        })?;
        state.time += self.dt;
        Ok(())
    }
}

/// Advances a state by `dt` with freshly computed propagators.
pub fn evolve(state: &ModalState, dt: f64) -> Result<ModalState> {
    let mut next = state.clone();
    if dt == 0.0 {
        return Ok(next);
    }
    Propagator::new(state, dt)?.step(&mut next)?;
    Ok(next)
}

/// `E_γ = Σ w_κ (1 + κ²)^γ ⟨ĥ_κ, P_κ ĥ_κ⟩` with `P₀ = I` and `P_κ` the
/// BGK family at parameter `alpha`.
pub fn entropy(state: &ModalState, alpha: f64, gamma: f64) -> Result<f64> {
    state
        .modes
        .par_iter()
        .map(|mode| {
            let quad = if mode.kappa == 0.0 {
                mode.coeffs.norm_squared()
            } else {
                let p = bgk_p(state.d, mode.kappa, alpha, state.size)?;
                mode.coeffs.dotc(&(p * &mode.coeffs)).re
            };
            Ok(mode.weight * (1.0 + mode.kappa * mode.kappa).powf(gamma) * quad)
        })
        .collect::<Result<Vec<f64>>>()
        .map(|v| v.into_iter().sum())
}

/// Velocity quadrature for [`l1_distance_1d`]: Gauss–Hermite nodes with
/// weights rescaled to Lebesgue measure, `w_i e^{v_i²/2}`, and the table
/// `g_m(v_i)` of Hermite function values.
pub struct VelocityGrid {
    weights: Vec<f64>,
    table: nalgebra::DMatrix<f64>,
}

impl VelocityGrid {
    /// Gauss–Hermite grid with `nv` nodes for coefficient vectors of size `size`.
    pub fn new(nv: usize, size: usize) -> Self {
        let (nodes, _) = gauss_hermite(nv);
        // Christoffel form of the rescaled weight, `1/(φ(v_i) Σ_{m<nv} p_m(v_i)²)`
        // with `φ` the standard normal density and `p_m = He_m/√(m!)`,
        // evaluated in logarithms. Squared eigenvector entries lose all
        // relative accuracy at the outer nodes.
        let weights = nodes
            .iter()
            .map(|&v| {
                let log_density = -0.5 * v * v - 0.5 * (2.0 * std::f64::consts::PI).ln();
                (-log_density - log_christoffel_sum(v, nv)).exp()
            })
            .collect();
        let rows: Vec<Vec<f64>> = nodes.iter().map(|&v| hermite_functions(v, size)).collect();
        let table = nalgebra::DMatrix::from_fn(nv, size, |i, m| rows[i][m]);
        Self { weights, table }
    }
}

/// `(1/L)∫∫|f − M₁| dx dv` for a 1D state.
///
/// `f − M₁ = Σ_k e^{ikℓx} Σ_m ĥ_{k,m} g_m(v)` is sampled on `nx` uniform
/// points by an inverse FFT per velocity node and integrated in `v` with
/// the rescaled Gauss–Hermite rule. Working with the bounded functions
/// `g_m` (rather than polynomials times a Gaussian) keeps round-off from
/// being amplified at the outer nodes.
pub fn l1_distance_1d(state: &ModalState, nx: usize, grid: &VelocityGrid) -> Result<f64> {
    if state.d != 1 {
        return Err(HypoError::InvalidArgument("L¹ distance is only available in 1D".into()));
    }
    let kmax = state.modes.iter().map(|m| m.kappa.abs() as usize).max().unwrap_or(0);
    if nx < 2 * kmax + 1 {
        return Err(HypoError::InvalidArgument(format!(
            "need at least {} x-points for {kmax} modes",
            2 * kmax + 1
        )));
    }
    if grid.table.ncols() != state.size {
        return Err(HypoError::InvalidArgument("velocity grid has the wrong size".into()));
    }
    let nv = grid.weights.len();
    let table = grid.table.map(|x| Complex64::new(x, 0.0));
    // values[(mode, i)] = Σ_m ĥ_{k,m} g_m(v_i)
    let modes: Vec<(i64, DVector<Complex64>)> = state
        .modes
        .iter()
        .map(|m| (m.kappa.round() as i64, &table * &m.coeffs))
        .collect();
    let fft = FftPlanner::<f64>::new().plan_fft_inverse(nx);
    let total: f64 = (0..nv)
        .into_par_iter()
        .map(|i| {
            let mut buf = vec![Complex64::new(0.0, 0.0); nx];
            for (k, vals) in &modes {
                let slot = k.rem_euclid(nx as i64) as usize;
                buf[slot] += vals[i];
            }
            fft.process(&mut buf);
            let mean_abs = buf.iter().map(|z| z.re.abs()).sum::<f64>() / nx as f64;
            grid.weights[i] * mean_abs
        })
        .sum();
    Ok(total)
}

/// `min{2, √(C E₀) e^{−λt/2}}`.
pub fn decay_envelope(t: f64, upper_c: f64, e0: f64, lambda: f64) -> f64 {
    ((upper_c * e0).sqrt() * (-0.5 * lambda * t).exp()).min(2.0)
}

/// Crossover time `(ln C + ln E₀ − 2 ln 2)/λ` of the envelope.
pub fn t_init(upper_c: f64, e0: f64, lambda: f64) -> f64 {
    (upper_c.ln() + e0.ln() - 2.0 * 2f64.ln()) / lambda
}

/// Parameters of a trajectory run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SimConfig {
    /// Velocity dimension.
    pub d: usize,
    /// Torus side length.
    #[serde(rename = "L")]
    pub length: f64,
    /// Container fraction of the initial bump.
    pub epsilon: f64,
    /// Largest retained wave number (`|k|_∞` in 2D/3D).
    pub kmax: usize,
    /// Hermite truncation.
    #[serde(rename = "N")]
    pub size: usize,
    /// `P_κ` parameter used in the entropy.
    pub alpha: f64,
    /// Sobolev weight exponent of the entropy.
    pub gamma: f64,
    /// Final time.
    pub tmax: f64,
    /// Step length.
    pub dt: f64,
    /// Rate `λ` of the envelope.
    pub lambda: f64,
    /// Norm-equivalence constant `C_d` of the envelope.
    pub upper_c: f64,
    /// `x`-points of the `L¹` reconstruction.
    pub nx: usize,
    /// Velocity nodes of the `L¹` reconstruction.
    pub nv: usize,
}

/// One sample of a trajectory.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    /// Time.
    pub t: f64,
    /// Entropy `E_γ`.
    pub entropy: f64,
    /// Weighted coefficient norm.
    pub h_norm: f64,
    /// `L¹` distance (1D only).
    pub l1: Option<f64>,
    /// Envelope `min{2, √(C E₀) e^{−λt/2}}`.
    pub envelope: f64,
}

/// A simulated trajectory with its initial data summary.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Trajectory {
    /// Parameters of the run.
    pub config: SimConfig,
    /// `E_γ` at `t = 0`.
    pub e0: f64,
    /// Crossover time of the envelope.
    pub t_init: f64,
    /// Energy of the initial datum in discarded modes.
    pub truncation_tail: f64,
    /// Samples at `t = 0, Δt, 2Δt, …, tmax`.
    pub points: Vec<TrajectoryPoint>,
}

impl Trajectory {
    /// CSV with header `t,entropy,h_norm,l1,envelope` (`l1` empty in 2D/3D).
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,entropy,h_norm,l1,envelope\n");
        for p in &self.points {
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                fmt_sig(p.t),
                fmt_sig(p.entropy),
                fmt_sig(p.h_norm),
                p.l1.map(fmt_sig).unwrap_or_default(),
                fmt_sig(p.envelope)
            ));
        }
        s
    }
}

/// Runs the modal simulation from concentrated initial data.
pub fn simulate(config: &SimConfig) -> Result<Trajectory> {
    if !(config.dt > 0.0 && config.tmax >= 0.0) {
        return Err(HypoError::InvalidArgument("need Δt > 0 and tmax ≥ 0".into()));
    }
    let (mut state, tail) =
        concentrated_initial_data(config.d, config.length, config.epsilon, config.kmax, config.size)?;
    let steps = (config.tmax / config.dt).round() as usize;
    let prop = Propagator::new(&state, config.dt)?;
    let grid = (config.d == 1).then(|| VelocityGrid::new(config.nv, config.size));
    let e0 = entropy(&state, config.alpha, config.gamma)?;
    let mut points = Vec::with_capacity(steps + 1);
    for j in 0..=steps {
        if j > 0 {
            prop.step(&mut state)?;
        }
        let t = j as f64 * config.dt;
        let l1 = match &grid {
            Some(g) => Some(l1_distance_1d(&state, config.nx, g)?),
            None => None,
        };
        points.push(TrajectoryPoint {
            t,
            entropy: entropy(&state, config.alpha, config.gamma)?,
            h_norm: state.h_norm(),
            l1,
            envelope: decay_envelope(t, config.upper_c, e0, config.lambda),
        });
    }
    Ok(Trajectory {
        config: config.clone(),
        e0,
        t_init: t_init(config.upper_c, e0, config.lambda),
        truncation_tail: tail,
        points,
    })
}
