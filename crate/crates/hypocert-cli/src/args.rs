//! Command-line flags and the effective run configuration.

use std::f64::consts::PI;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hypocert::hermite::{minimum_block_size, Variant};
use serde::Serialize;

/// Hypocoercivity certificates for linearized BGK on the torus.
#[derive(Debug, Parser)]
#[command(name = "hypocert", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

/// Flags shared by all subcommands.
#[derive(Debug, Args)]
pub struct Common {
    /// Velocity dimension (1, 2 or 3).
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=3))]
    pub dim: u8,
    /// Torus side length.
    #[arg(long = "L", global = true, default_value_t = 2.0 * PI)]
    pub length: f64,
    /// Hermite basis variant (default: tensor in 1D, energy in 2D/3D).
    #[arg(long, global = true)]
    pub basis: Option<BasisArg>,
    /// Hermite truncation size (default: four times the minimum block size).
    #[arg(long, global = true)]
    pub trunc: Option<usize>,
    /// Comma-separated list of mode moduli.
    #[arg(long, global = true, value_delimiter = ',', conflicts_with = "kmax")]
    pub kappa: Vec<f64>,
    /// Number of moduli (spectrum, certificate) or largest wave number (simulate).
    #[arg(long, global = true)]
    pub kmax: Option<usize>,
    /// Override of the transformation parameter (default: the certified maximizer).
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    /// Container fraction of the concentrated initial datum.
    #[arg(long, global = true, default_value_t = 0.02)]
    pub epsilon: f64,
    /// Final time.
    #[arg(long, global = true, default_value_t = 100.0)]
    pub tmax: f64,
    /// Sampling step.
    #[arg(long, global = true, default_value_t = 2.0)]
    pub dt: f64,
    /// Sobolev weight exponent of the entropy.
    #[arg(long, global = true, default_value_t = 0.0)]
    pub gamma: f64,
    /// Relative singular-value tolerance of rank decisions.
    #[arg(long = "tol-rank", global = true, default_value_t = 1e-10)]
    pub tol_rank: f64,
    /// Output path (default: standard output).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format (default depends on the subcommand).
    #[arg(long, global = true)]
    pub format: Option<Format>,
    /// Random seed, echoed into every artifact.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

/// Subcommands.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Hypocoercivity index of the truncated (transport, collision) pair.
    Index,
    /// Decay certificate with a matrix-inequality verification sweep.
    Certificate,
    /// Spectral gaps of the truncated generators.
    Spectrum {
        /// Comma-separated truncation sizes for a convergence study.
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
    },
    /// Closed-form minors and rational factors at one modulus.
    Minors,
    /// Modal time integration from concentrated initial data.
    Simulate {
        /// Spatial points of the `L¹` reconstruction (1D only).
        #[arg(long, default_value_t = 2048)]
        nx: usize,
        /// Velocity nodes of the `L¹` reconstruction (1D only).
        #[arg(long, default_value_t = 256)]
        nv: usize,
    },
    /// Rate constants over a logarithmic grid of torus lengths.
    #[command(name = "sweep-L")]
    SweepL {
        /// Smallest length.
        #[arg(long, default_value_t = 0.1)]
        from: f64,
        /// Largest length.
        #[arg(long, default_value_t = 50.0)]
        to: f64,
        /// Number of grid points.
        #[arg(long, default_value_t = 100)]
        points: usize,
    },
    /// Decay envelope of the `L¹` distance for a given initial entropy.
    Envelope {
        /// Initial entropy `E₀`.
        #[arg(long, default_value_t = 15.0)]
        e0: f64,
    },
}

impl Command {
    /// Name as typed on the command line.
    pub fn name(&self) -> &'static str {
        match self {
            Command::Index => "index",
            Command::Certificate => "certificate",
            Command::Spectrum { .. } => "spectrum",
            Command::Minors => "minors",
            Command::Simulate { .. } => "simulate",
            Command::SweepL { .. } => "sweep-L",
            Command::Envelope { .. } => "envelope",
        }
    }

    fn default_format(&self) -> Format {
        match self {
            Command::Index | Command::Certificate => Format::Json,
            _ => Format::Csv,
        }
    }
}

/// Basis flag values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisArg {
    /// Tensor-product Hermite functions.
    Tensor,
    /// Energy basis.
    Energy,
}

impl From<BasisArg> for Variant {
    fn from(b: BasisArg) -> Self {
        match b {
            BasisArg::Tensor => Variant::Tensor,
            BasisArg::Energy => Variant::Energy,
        }
    }
}

/// Output formats.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    /// Comma-separated values with `#` comment lines carrying the config.
    Csv,
    /// A JSON object with `config` and `result` members.
    Json,
}

/// The effective (post-default) configuration of a run.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    /// Subcommand name.
    pub subcommand: &'static str,
    /// Velocity dimension.
    pub d: usize,
    /// Torus side length.
    #[serde(rename = "L")]
    pub length: f64,
    /// Basis variant.
    pub basis: BasisArg,
    /// Hermite truncation size.
    #[serde(rename = "N")]
    pub size: usize,
    /// Explicit moduli, if any.
    pub kappa: Vec<f64>,
    /// Number of moduli or largest wave number.
    pub kmax: usize,
    /// Transformation parameter override.
    pub alpha: Option<f64>,
    /// Container fraction.
    pub epsilon: f64,
    /// Final time.
    pub tmax: f64,
    /// Sampling step.
    pub dt: f64,
    /// Entropy weight exponent.
    pub gamma: f64,
    /// Rank tolerance.
    pub tol_rank: f64,
    /// Output path.
    pub out: Option<String>,
    /// Output format.
    pub format: Format,
    /// Random seed.
    pub seed: u64,
    /// Subcommand-specific settings.
    pub extra: serde_json::Value,
}

impl RunConfig {
    /// Applies the defaults to the parsed flags.
    pub fn resolve(cli: &Cli) -> RunConfig {
        let c = &cli.common;
        let d = usize::from(c.dim);
        let default_kmax = match (&cli.command, d) {
            (Command::Simulate { .. }, 1) => 128,
            (Command::Simulate { .. }, 2) => 6,
            (Command::Simulate { .. }, _) => 4,
            (Command::Certificate, _) => hypocert::certificate::DEFAULT_VERIFY_MODULI,
            _ => 5,
        };
        let extra = match &cli.command {
            Command::Spectrum { sizes } => serde_json::json!({ "sizes": sizes }),
            Command::Simulate { nx, nv } => serde_json::json!({ "nx": nx, "nv": nv }),
            Command::SweepL { from, to, points } => {
                serde_json::json!({ "from": from, "to": to, "points": points })
            }
            Command::Envelope { e0 } => serde_json::json!({ "e0": e0 }),
            _ => serde_json::json!({}),
        };
        RunConfig {
            subcommand: cli.command.name(),
            d,
            length: c.length,
            basis: c.basis.unwrap_or(if d == 1 { BasisArg::Tensor } else { BasisArg::Energy }),
            size: c.trunc.unwrap_or(4 * minimum_block_size(d)),
            kappa: c.kappa.clone(),
            kmax: c.kmax.unwrap_or(default_kmax),
            alpha: c.alpha,
            epsilon: c.epsilon,
            tmax: c.tmax,
            dt: c.dt,
            gamma: c.gamma,
            tol_rank: c.tol_rank,
            out: c.out.as_ref().map(|p| p.display().to_string()),
            format: c.format.unwrap_or(cli.command.default_format()),
            seed: c.seed,
            extra,
        }
    }
}
