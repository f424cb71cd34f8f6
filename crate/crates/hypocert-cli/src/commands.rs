//! Subcommand implementations.

use anyhow::{bail, ensure, Result};
use hypocert::certificate::{certify_with, minor_table, rate_constants, sweep_lengths};
use hypocert::hermite::Variant;
use hypocert::hypo_index::{check_invariance_conditions, hypocoercivity_index, is_hypocoercive_spectral};
use hypocert::linalg::to_complex;
use hypocert::lyapunov::bgk_p_spread;
use hypocert::operators::{first_moduli, OperatorPair};
use hypocert::simulation::{decay_envelope, simulate, t_init, SimConfig};
use hypocert::spectral::{spectral_gap, truncation_study};
use serde_json::json;

use crate::args::{Cli, Command, RunConfig};
use crate::output::{emit, num, opt_num, to_value, Artifact, Table};
use crate::Status;

/// Relative slack allowed when checking the entropy decay bound.
const DECAY_SLACK: f64 = 1e-9;

/// Resolves the configuration, runs the subcommand and writes its artifact.
pub fn run(cli: &Cli) -> Result<Status> {
    let config = RunConfig::resolve(cli);
    validate(&config)?;
    let (artifact, status) = match &cli.command {
        Command::Index => index(&config)?,
        Command::Certificate => certificate(&config)?,
        Command::Spectrum { sizes } => spectrum(&config, sizes)?,
        Command::Minors => minors(&config)?,
        Command::Simulate { nx, nv } => simulation(&config, *nx, *nv)?,
        Command::SweepL { from, to, points } => sweep(&config, *from, *to, *points)?,
        Command::Envelope { e0 } => envelope(&config, *e0)?,
    };
    emit(&config, &artifact)?;
    if status == Status::VerificationFailed {
        eprintln!("verification failed; see the written artifact");
    }
    Ok(status)
}

fn validate(c: &RunConfig) -> Result<()> {
    ensure!(c.length.is_finite() && c.length > 0.0, "--L must be positive, got {}", c.length);
    ensure!(c.tol_rank > 0.0 && c.tol_rank < 1.0, "--tol-rank must lie in (0, 1)");
    ensure!(c.dt > 0.0 && c.dt.is_finite(), "--dt must be positive");
    ensure!(c.tmax >= 0.0 && c.tmax.is_finite(), "--tmax must be nonnegative");
    ensure!(c.epsilon > 0.0 && c.epsilon <= 1.0, "--epsilon must lie in (0, 1]");
    ensure!(c.gamma >= 0.0 && c.gamma.is_finite(), "--gamma must be nonnegative");
    ensure!(c.kmax > 0, "--kmax must be positive");
    ensure!(c.kappa.iter().all(|k| k.is_finite() && *k >= 0.0), "--kappa entries must be nonnegative");
    if let Some(a) = c.alpha {
        ensure!(a.is_finite() && a >= 0.0, "--alpha must be nonnegative");
    }
    if c.d == 1 && c.basis == crate::args::BasisArg::Energy {
        bail!("the energy basis requires --dim 2 or 3");
    }
    Ok(())
}

/// Moduli from `--kappa`, or the first `kmax` lattice moduli.
fn moduli(c: &RunConfig) -> Result<Vec<f64>> {
    if c.kappa.is_empty() {
        Ok(first_moduli(c.d, c.kmax)?)
    } else {
        Ok(c.kappa.clone())
    }
}

fn index(c: &RunConfig) -> Result<(Artifact, Status)> {
    let pair = OperatorPair::new(c.d, Variant::from(c.basis), c.size, c.length)?;
    let (c1, c2) = (to_complex(&pair.l1), to_complex(&pair.l2));
    let report = hypocoercivity_index(&c1, &c2, c.tol_rank)?;
    let invariance = check_invariance_conditions(&c1, &c2, c.tol_rank)?;
    let spectral = is_hypocoercive_spectral(&c1, &c2, c.tol_rank)?;
    let agree = report.consistent
        && invariance.b3 == report.is_hypocoercive()
        && invariance.b4 == report.is_hypocoercive()
        && spectral == report.is_hypocoercive();
    let rows = report
        .rank_profile
        .iter()
        .zip(&report.kernel_profile)
        .enumerate()
        .map(|(j, (r, k))| vec![j.to_string(), r.to_string(), k.to_string()])
        .collect();
    let index_text = report.index.map(|t| t.to_string()).unwrap_or_else(|| "none".into());
    let artifact = Artifact {
        summary: vec![
            ("index", index_text),
            ("kernel_dim", report.kernel_dim.to_string()),
            ("coercivity", opt_num(report.coercivity)),
            ("conditions_agree", agree.to_string()),
        ],
        table: Table { header: vec!["j", "rank", "kernel_dim"], rows },
        result: json!({
            "report": to_value(&report)?,
            "invariance": to_value(&invariance)?,
            "spectral_hypocoercive": spectral,
            "conditions_agree": agree,
        }),
    };
    Ok((artifact, if agree { Status::Ok } else { Status::VerificationFailed }))
}

fn certificate(c: &RunConfig) -> Result<(Artifact, Status)> {
    if !c.kappa.is_empty() {
        bail!("certificate verifies the first --kmax moduli; --kappa is not accepted");
    }
    let cert = certify_with(c.d, c.length, c.kmax, c.size)?;
    let rows = cert.verified.iter().map(|v| vec![num(v.kappa), num(v.min_eig)]).collect();
    let artifact = Artifact {
        summary: vec![
            ("alpha_plus", num(cert.alpha_plus)),
            ("alpha_star", num(cert.alpha_star)),
            ("mu", num(cert.mu)),
            ("lambda", num(cert.lambda)),
            ("c_d", num(cert.c_d)),
            ("C_d", num(cert.upper_c_d)),
            ("valid", cert.valid.to_string()),
        ],
        table: Table { header: vec!["kappa", "min_eig"], rows },
        result: to_value(&cert)?,
    };
    Ok((artifact, if cert.valid { Status::Ok } else { Status::VerificationFailed }))
}

fn spectrum(c: &RunConfig, sizes: &[usize]) -> Result<(Artifact, Status)> {
    let kappas = moduli(c)?;
    if sizes.is_empty() {
        let report = spectral_gap(c.d, c.length, &kappas, c.size)?;
        let rows = report
            .entries
            .iter()
            .map(|e| vec![num(e.kappa), e.size.to_string(), num(e.gap)])
            .collect();
        let artifact = Artifact {
            summary: vec![
                ("overall_gap", num(report.overall_gap)),
                ("argmin_kappa", num(report.argmin_kappa)),
            ],
            table: Table { header: vec!["kappa", "N", "gap"], rows },
            result: to_value(&report)?,
        };
        return Ok((artifact, Status::Ok));
    }
    let studies = kappas
        .iter()
        .map(|&kappa| truncation_study(c.d, c.length, kappa, sizes))
        .collect::<hypocert::Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for study in &studies {
        for (i, e) in study.entries.iter().enumerate() {
            let diff = if i == 0 { None } else { Some(study.cauchy_differences[i - 1]) };
            rows.push(vec![num(e.kappa), e.size.to_string(), num(e.gap), opt_num(diff)]);
        }
    }
    let monotone = studies.iter().all(|s| s.monotone);
    let artifact = Artifact {
        summary: vec![("monotone", monotone.to_string())],
        table: Table { header: vec!["kappa", "N", "gap", "cauchy_difference"], rows },
        result: to_value(&studies)?,
    };
    Ok((artifact, Status::Ok))
}

fn minors(c: &RunConfig) -> Result<(Artifact, Status)> {
    let kappa = match c.kappa.as_slice() {
        [] => 1.0,
        [k] => *k,
        _ => bail!("minors takes a single --kappa"),
    };
    let (alpha_plus, alpha_star, _) = rate_constants(c.d, c.length)?;
    let alpha = c.alpha.unwrap_or(alpha_star);
    let ell = 2.0 * std::f64::consts::PI / c.length;
    let table = minor_table(c.d, kappa, alpha, ell)?;
    let mut rows: Vec<Vec<String>> = table
        .values
        .iter()
        .enumerate()
        .map(|(j, v)| vec![format!("delta{}", j + 1), num(*v)])
        .collect();
    rows.extend(table.factors.iter().map(|(name, v)| vec![name.clone(), num(*v)]));
    let positive = table.values.iter().all(|v| *v > 0.0);
    let artifact = Artifact {
        summary: vec![
            ("kappa", num(kappa)),
            ("alpha", num(alpha)),
            ("alpha_plus", num(alpha_plus)),
            ("all_positive", positive.to_string()),
        ],
        table: Table { header: vec!["name", "value"], rows },
        result: json!({ "table": to_value(&table)?, "alpha_plus": alpha_plus, "all_positive": positive }),
    };
    Ok((artifact, Status::Ok))
}

/// Rate `λ` and norm-equivalence constant `C_d` at the certified parameter.
fn envelope_constants(d: usize, length: f64) -> Result<(f64, f64, f64)> {
    let (_, alpha_star, mu) = rate_constants(d, length)?;
    let upper_c = 1.0 / (1.0 - bgk_p_spread(d) * alpha_star);
    Ok((alpha_star, 2.0 * mu.min(1.0), upper_c))
}

fn simulation(c: &RunConfig, nx: usize, nv: usize) -> Result<(Artifact, Status)> {
    let (alpha_star, lambda, upper_c) = envelope_constants(c.d, c.length)?;
    let expected = if c.d == 1 { Variant::Tensor } else { Variant::Energy };
    ensure!(Variant::from(c.basis) == expected, "simulate uses the tensor basis in 1D and the energy basis in 2D/3D");
    let config = SimConfig {
        d: c.d,
        length: c.length,
        epsilon: c.epsilon,
        kmax: c.kmax,
        size: c.size,
        alpha: c.alpha.unwrap_or(alpha_star),
        gamma: c.gamma,
        tmax: c.tmax,
        dt: c.dt,
        lambda,
        upper_c,
        nx,
        nv,
    };
    let traj = simulate(&config)?;
    let decays = traj
        .points
        .iter()
        .all(|p| p.entropy <= (-lambda * p.t).exp() * traj.e0 * (1.0 + DECAY_SLACK));
    let rows = traj
        .points
        .iter()
        .map(|p| vec![num(p.t), num(p.entropy), num(p.h_norm), opt_num(p.l1), num(p.envelope)])
        .collect();
    let artifact = Artifact {
        summary: vec![
            ("e0", num(traj.e0)),
            ("t_init", num(traj.t_init)),
            ("lambda", num(lambda)),
            ("C_d", num(upper_c)),
            ("truncation_tail", num(traj.truncation_tail)),
            ("entropy_decay_holds", decays.to_string()),
        ],
        table: Table { header: vec!["t", "entropy", "h_norm", "l1", "envelope"], rows },
        result: json!({ "trajectory": to_value(&traj)?, "entropy_decay_holds": decays }),
    };
    Ok((artifact, if decays { Status::Ok } else { Status::VerificationFailed }))
}

fn sweep(c: &RunConfig, from: f64, to: f64, points: usize) -> Result<(Artifact, Status)> {
    ensure!(from > 0.0 && to > from && to.is_finite(), "need 0 < --from < --to");
    ensure!(points >= 2, "--points must be at least 2");
    let ratio = (to / from).ln() / (points - 1) as f64;
    let lengths: Vec<f64> = (0..points).map(|i| from * (ratio * i as f64).exp()).collect();
    let sweep = sweep_lengths(c.d, &lengths)?;
    let rows = sweep
        .iter()
        .map(|p| vec![num(p.length), num(p.alpha_plus), num(p.alpha_star), num(p.mu), num(2.0 * p.mu)])
        .collect();
    let monotone = sweep.windows(2).all(|w| w[1].mu <= w[0].mu);
    let artifact = Artifact {
        summary: vec![("two_mu_nonincreasing", monotone.to_string())],
        table: Table { header: vec!["L", "alpha_plus", "alpha_star", "mu", "two_mu"], rows },
        result: json!({ "points": to_value(&sweep)?, "two_mu_nonincreasing": monotone }),
    };
    Ok((artifact, Status::Ok))
}

fn envelope(c: &RunConfig, e0: f64) -> Result<(Artifact, Status)> {
    ensure!(e0 > 0.0 && e0.is_finite(), "--e0 must be positive");
    let (_, lambda, upper_c) = envelope_constants(c.d, c.length)?;
    let steps = (c.tmax / c.dt).round() as usize;
    let mut rows = Vec::with_capacity(steps + 1);
    let mut samples = Vec::with_capacity(steps + 1);
    for j in 0..=steps {
        let t = j as f64 * c.dt;
        let exponential = (upper_c * e0).sqrt() * (-lambda * t / 2.0).exp();
        let env = decay_envelope(t, upper_c, e0, lambda);
        rows.push(vec![num(t), num(env), num(exponential), num(2.0)]);
        samples.push(json!({ "t": t, "envelope": env, "exponential_bound": exponential }));
    }
    let crossover = t_init(upper_c, e0, lambda);
    let artifact = Artifact {
        summary: vec![
            ("e0", num(e0)),
            ("lambda", num(lambda)),
            ("C_d", num(upper_c)),
            ("t_init", num(crossover)),
        ],
        table: Table { header: vec!["t", "envelope", "exponential_bound", "trivial_bound"], rows },
        result: json!({
            "e0": e0, "lambda": lambda, "C_d": upper_c, "t_init": crossover, "samples": samples,
        }),
    };
    Ok((artifact, Status::Ok))
}
