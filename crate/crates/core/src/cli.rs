//! The `scatter` command line.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::amplitudes::{amplitudes_from_fundamental, threshold_amplitudes_with, AmplitudeSet, DEFAULT_THRESHOLD_KS};
use crate::error::{Result, ScatterError};
use crate::factorization::{amplitudes_from_factor, compose_factors, factor_from_amplitudes, periodic_compose, translate_amplitudes};
use crate::io::{emit, Cell, Format, Table};
use crate::levinson::{default_k_grid, levinson_check_on, log_grid_descending, phase_curve_with};
use crate::models::bundled;
use crate::potential::{PotentialSpec, ValidatedPotential};
use crate::propagator::{fundamental_at_range_with, PropagationOptions};
use crate::selfcheck;
use crate::spectrum::{default_alpha_max, reduced_determinant, spectrum_report_with, SpectrumOptions, SpectrumWarning};

#[derive(Parser, Debug)]
#[command(name = "scatter", version, about = "One-dimensional coupled-channel scattering")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Potential spec file, or `bundled:NAME` for a shipped model.
    #[arg(long = "spec", value_name = "PATH")]
    specs: Vec<String>,
    #[arg(long)]
    kmin: Option<f64>,
    #[arg(long)]
    kmax: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long = "alpha-max")]
    alpha_max: Option<f64>,
    /// Write the table here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv", value_parser = parse_format)]
    format: Format,
    /// Tolerance override, e.g. `--tol unitarity=1e-10`.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    tols: Vec<String>,
    /// Integrate constant regions with RK4 instead of the exact propagator.
    #[arg(long)]
    ode: bool,
    /// RK4 step for `--ode` and sampled potentials.
    #[arg(long)]
    step: Option<f64>,
}

fn parse_format(s: &str) -> std::result::Result<Format, String> {
    s.parse().map_err(|e: ScatterError| e.to_string())
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Amplitudes and unitarity residual on a log-spaced k grid.
    Amplitudes(Common),
    /// Bound and half-bound states; summary on standard error.
    Spectrum {
        #[command(flatten)]
        common: Common,
        /// Also write (alpha, det M·e^{-2αRN}) samples here.
        #[arg(long = "det-out")]
        det_out: Option<PathBuf>,
    },
    /// η(0) against π(n_b + n/2 − N/2).
    Levinson(Common),
    /// The unwrapped phase (k, η, η/π).
    Phase(Common),
    /// (Re ρ₁₁, Im ρ₁₁) from threshold up to kmax.
    Spiral(Common),
    /// Compose pieces through transfer factors.
    Compose {
        #[command(flatten)]
        common: Common,
        /// Shift of each piece, one per --spec.
        #[arg(long = "shift", allow_hyphen_values = true)]
        shifts: Vec<f64>,
        /// Number of copies of a single cell.
        #[arg(long)]
        copies: Option<usize>,
        /// Distance between copies.
        #[arg(long)]
        spacing: Option<f64>,
    },
    /// Run the acceptance suite.
    Selftest {
        /// Run a single criterion (1-10).
        #[arg(long)]
        criterion: Option<u8>,
    },
}

struct Tolerances {
    unitarity: f64,
    spectrum: SpectrumOptions,
    det: f64,
}

fn parse_tolerances(items: &[String]) -> Result<Tolerances> {
    let mut t = Tolerances {
        unitarity: 1e-6,
        spectrum: SpectrumOptions::default(),
        det: crate::propagator::DEFAULT_DET_TOL,
    };
    for item in items {
        let (name, value) = item
            .split_once('=')
            .ok_or_else(|| ScatterError::InvalidArgument(format!("--tol expects NAME=VALUE, got {item}")))?;
        let v: f64 = value
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite() && *v > 0.0)
            .ok_or_else(|| ScatterError::InvalidArgument(format!("tolerance {name} needs a positive number, got {value}")))?;
        match name {
            "unitarity" => t.unitarity = v,
            "det" => t.det = v,
            "half_bound" => t.spectrum.half_bound_tol = v,
            "multiplicity" => t.spectrum.multiplicity_tol = v,
            "root" => t.spectrum.root_tol = v,
            "candidate" => t.spectrum.candidate_ratio = v,
            _ => {
                return Err(ScatterError::InvalidArgument(format!(
                    "unknown tolerance {name}; known: unitarity, det, half_bound, multiplicity, root, candidate"
                )))
            }
        }
    }
    Ok(t)
}

fn load_spec(src: &str) -> Result<ValidatedPotential> {
    if let Some(name) = src.strip_prefix("bundled:") {
        return bundled(name);
    }
    let text = std::fs::read_to_string(src).map_err(|e| ScatterError::Io(format!("{src}: {e}")))?;
    PotentialSpec::from_json_str(&text)?.validate()
}

fn one_spec(c: &Common) -> Result<ValidatedPotential> {
    match c.specs.as_slice() {
        [one] => load_spec(one),
        [] => Err(ScatterError::InvalidArgument("--spec is required".into())),
        _ => Err(ScatterError::InvalidArgument("this command takes a single --spec".into())),
    }
}

fn propagation(c: &Common, tol: &Tolerances) -> Result<PropagationOptions> {
    if let Some(h) = c.step {
        if !(h > 0.0 && h.is_finite()) {
            return Err(ScatterError::InvalidArgument(format!("--step must be positive, got {h}")));
        }
    }
    let mut o = if c.ode || c.step.is_some() {
        PropagationOptions::ode(c.step)
    } else {
        PropagationOptions::default()
    };
    o.det_tolerance = tol.det;
    Ok(o)
}

fn check_positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(ScatterError::InvalidArgument(format!("{name} must be positive, got {v}")))
    }
}

/// Ascending log grid from the flags, with the given defaults.
fn k_grid(c: &Common, kmin: f64, kmax: f64, points: usize) -> Result<Vec<f64>> {
    let kmin = check_positive("--kmin", c.kmin.unwrap_or(kmin))?;
    let kmax = check_positive("--kmax", c.kmax.unwrap_or(kmax))?;
    let n = c.points.unwrap_or(points);
    if n < 2 || kmax <= kmin {
        return Err(ScatterError::InvalidArgument(format!(
            "need --points >= 2 and kmax > kmin, got {n} points on [{kmin}, {kmax}]"
        )));
    }
    let mut g = log_grid_descending(kmax, kmin, n);
    g.reverse();
    Ok(g)
}

fn amplitude_columns(n: usize) -> Vec<String> {
    let mut cols = vec!["k".to_string()];
    for name in ["rho", "rho_tilde", "tau", "tau_tilde"] {
        for i in 1..=n {
            for j in 1..=n {
                cols.push(format!("{name}_{i}{j}_re"));
                cols.push(format!("{name}_{i}{j}_im"));
            }
        }
    }
    cols.push("unitarity".into());
    cols
}

fn amplitude_row(a: &AmplitudeSet) -> Vec<Cell> {
    let n = a.channels();
    let mut row = vec![Cell::Float(a.k)];
    for m in [&a.rho, &a.rho_tilde, &a.tau, &a.tau_tilde] {
        for i in 0..n {
            for j in 0..n {
                row.push(m[(i, j)].re.into());
                row.push(m[(i, j)].im.into());
            }
        }
    }
    row.push(a.s_matrix().unitarity_residual().into());
    row
}

fn gate_unitarity(a: &AmplitudeSet, tol: f64) -> Result<()> {
    let residual = a.s_matrix().unitarity_residual();
    if residual > tol {
        return Err(ScatterError::NonUnitaryInput { residual });
    }
    Ok(())
}

struct Output<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Output<'_> {
    fn table(&mut self, c: &Common, t: &Table) -> Result<()> {
        if let Some(text) = emit(t, c.format, c.out.as_deref())? {
            self.out.write_all(text.as_bytes()).map_err(|e| ScatterError::Io(e.to_string()))?;
        }
        Ok(())
    }

    fn note(&mut self, line: &str) {
        let _ = writeln!(self.err, "{line}");
    }
}

fn cmd_amplitudes(c: &Common, o: &mut Output) -> Result<()> {
    let pot = one_spec(c)?;
    let tol = parse_tolerances(&c.tols)?;
    let opts = propagation(c, &tol)?;
    let grid = k_grid(c, 1e-2, 10.0, 200)?;
    let rows: Vec<(AmplitudeSet, bool)> = grid
        .par_iter()
        .map(|&k| {
            let rep = fundamental_at_range_with(&pot, crate::linalg::c(k * k), &opts)?;
            Ok((amplitudes_from_fundamental(&rep.state, k, pot.range())?, rep.det_warning))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::new(amplitude_columns(pot.channels()));
    for (a, warn) in &rows {
        gate_unitarity(a, tol.unitarity)?;
        if *warn {
            o.note(&format!("warning kind=DetDrift k={}", a.k));
        }
        t.push(amplitude_row(a));
    }
    o.table(c, &t)
}

fn cmd_spectrum(c: &Common, det_out: Option<&std::path::Path>, o: &mut Output) -> Result<()> {
    let pot = one_spec(c)?;
    let tol = parse_tolerances(&c.tols)?;
    let alpha_max = check_positive("--alpha-max", c.alpha_max.unwrap_or_else(|| default_alpha_max(&pot)))?;
    let points = c.points.unwrap_or(crate::spectrum::DEFAULT_GRID_POINTS);
    let rep = spectrum_report_with(&pot, alpha_max, points, &tol.spectrum)?;
    let mut t = Table::new(["alpha", "energy", "multiplicity"]);
    for s in &rep.bound_states {
        t.push(vec![s.alpha.into(), s.energy().into(), s.multiplicity.into()]);
    }
    let eig: Vec<String> = rep
        .half_bound_eigenvalues
        .iter()
        .map(|z| format!("{}{:+}i", z.re, z.im))
        .collect();
    o.note(&format!(
        "n_b={} n_half={} channels={} alpha_max={} phi_prime_eigenvalues=[{}]",
        rep.n_b,
        rep.n_half,
        rep.channels,
        alpha_max,
        eig.join(" ")
    ));
    for w in &rep.warnings {
        let SpectrumWarning::GridTooCoarse { alpha_lo, alpha_hi, roots } = w;
        o.note(&format!("warning kind=GridTooCoarse alpha_lo={alpha_lo} alpha_hi={alpha_hi} roots={roots}"));
    }
    if let Some(path) = det_out {
        let a0 = tol.spectrum.alpha_min;
        let step = (alpha_max - a0) / (points - 1) as f64;
        let samples: Vec<(f64, f64)> = (0..points)
            .into_par_iter()
            .map(|i| {
                let a = a0 + step * i as f64;
                Ok((a, reduced_determinant(&pot, a)?))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut d = Table::new(["alpha", "det_reduced"]);
        for (a, v) in samples {
            d.push(vec![a.into(), v.into()]);
        }
        emit(&d, c.format, Some(path))?;
    }
    o.table(c, &t)
}

fn phase_grid(c: &Common, pot: &ValidatedPotential) -> Result<Vec<f64>> {
    if c.kmin.is_none() && c.kmax.is_none() && c.points.is_none() {
        return Ok(default_k_grid(pot.range()));
    }
    let d = default_k_grid(pot.range());
    let mut g = k_grid(c, *d.last().unwrap(), d[0], d.len())?;
    g.reverse();
    Ok(g)
}

fn cmd_levinson(c: &Common, o: &mut Output) -> Result<()> {
    let pot = one_spec(c)?;
    let rep = levinson_check_on(&pot, &phase_grid(c, &pot)?)?;
    let pi = std::f64::consts::PI;
    let mut t = Table::new([
        "eta0",
        "predicted",
        "residual",
        "eta0_over_pi",
        "predicted_over_pi",
        "n_b",
        "n_half",
        "channels",
        "anchor_k",
    ]);
    t.push(vec![
        rep.eta0.into(),
        rep.predicted.into(),
        rep.residual.into(),
        (rep.eta0 / pi).into(),
        (rep.predicted / pi).into(),
        rep.n_b.into(),
        rep.n_half.into(),
        rep.channels.into(),
        rep.anchor_k.into(),
    ]);
    o.table(c, &t)
}

fn cmd_phase(c: &Common, o: &mut Output) -> Result<()> {
    let pot = one_spec(c)?;
    let tol = parse_tolerances(&c.tols)?;
    let curve = phase_curve_with(&pot, &phase_grid(c, &pot)?, &propagation(c, &tol)?)?;
    let mut t = Table::new(["k", "eta", "eta_over_pi"]);
    for &(k, eta) in curve.samples.iter().rev() {
        t.push(vec![k.into(), eta.into(), (eta / std::f64::consts::PI).into()]);
    }
    o.table(c, &t)
}

fn cmd_spiral(c: &Common, o: &mut Output) -> Result<()> {
    let pot = one_spec(c)?;
    let tol = parse_tolerances(&c.tols)?;
    let opts = propagation(c, &tol)?;
    let kmax = check_positive("--kmax", c.kmax.unwrap_or(5.0))?;
    let n = c.points.unwrap_or(500);
    let kmin = check_positive("--kmin", c.kmin.unwrap_or(kmax / n as f64))?;
    if n < 2 || kmax <= kmin {
        return Err(ScatterError::InvalidArgument("need --points >= 2 and kmax > kmin".into()));
    }
    let zero = threshold_amplitudes_with(&pot, &DEFAULT_THRESHOLD_KS, &opts)?;
    let ks: Vec<f64> = (0..n).map(|i| kmin + (kmax - kmin) * i as f64 / (n - 1) as f64).collect();
    let amps: Vec<AmplitudeSet> = ks
        .par_iter()
        .map(|&k| {
            let rep = fundamental_at_range_with(&pot, crate::linalg::c(k * k), &opts)?;
            amplitudes_from_fundamental(&rep.state, k, pot.range())
        })
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::new(["k", "rho11_re", "rho11_im", "rho11_abs"]);
    for a in std::iter::once(&zero).chain(&amps) {
        if a.k > 0.0 {
            gate_unitarity(a, tol.unitarity)?;
        }
        let r = a.rho[(0, 0)];
        t.push(vec![a.k.into(), r.re.into(), r.im.into(), r.norm().into()]);
    }
    o.table(c, &t)
}

fn cmd_compose(c: &Common, shifts: &[f64], copies: Option<usize>, spacing: Option<f64>, o: &mut Output) -> Result<()> {
    let tol = parse_tolerances(&c.tols)?;
    let opts = propagation(c, &tol)?;
    let grid = k_grid(c, 1e-2, 10.0, 200)?;
    let amps: Vec<AmplitudeSet> = match copies {
        Some(m) => {
            let cell = one_spec(c)?;
            if !shifts.is_empty() {
                return Err(ScatterError::InvalidArgument("--shift does not combine with --copies".into()));
            }
            let s = spacing.ok_or_else(|| ScatterError::InvalidArgument("--copies needs --spacing".into()))?;
            grid.par_iter()
                .map(|&k| periodic_compose(&cell, m, s, k))
                .collect::<Result<Vec<_>>>()?
        }
        None => {
            if spacing.is_some() {
                return Err(ScatterError::InvalidArgument("--spacing needs --copies".into()));
            }
            if c.specs.is_empty() {
                return Err(ScatterError::InvalidArgument("--spec is required".into()));
            }
            if !shifts.is_empty() && shifts.len() != c.specs.len() {
                return Err(ScatterError::InvalidArgument(format!(
                    "{} --shift values for {} pieces",
                    shifts.len(),
                    c.specs.len()
                )));
            }
            let pieces: Vec<ValidatedPotential> = c.specs.iter().map(|s| load_spec(s)).collect::<Result<_>>()?;
            if pieces.iter().any(|p| p.channels() != pieces[0].channels()) {
                return Err(ScatterError::DimensionMismatch {
                    what: "piece channels".into(),
                    expected: pieces[0].channels(),
                    found: pieces.iter().map(|p| p.channels()).find(|&n| n != pieces[0].channels()).unwrap(),
                });
            }
            grid.par_iter()
                .map(|&k| {
                    let factors = pieces
                        .iter()
                        .enumerate()
                        .map(|(i, p)| {
                            let rep = fundamental_at_range_with(p, crate::linalg::c(k * k), &opts)?;
                            let a = amplitudes_from_fundamental(&rep.state, k, p.range())?;
                            factor_from_amplitudes(&translate_amplitudes(&a, shifts.get(i).copied().unwrap_or(0.0)))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    amplitudes_from_factor(&compose_factors(&factors)?)
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    let mut t = Table::new(amplitude_columns(amps[0].channels()));
    for a in &amps {
        gate_unitarity(a, tol.unitarity)?;
        t.push(amplitude_row(a));
    }
    o.table(c, &t)
}

fn cmd_selftest(criterion: Option<u8>, o: &mut Output) -> Result<bool> {
    let outcomes = match criterion {
        Some(id @ 1..=10) => vec![selfcheck::run_criterion(id)],
        Some(id) => return Err(ScatterError::InvalidArgument(format!("criteria are numbered 1-10, got {id}"))),
        None => selfcheck::run_all(),
    };
    for r in &outcomes {
        let _ = writeln!(o.out, "{r}");
    }
    let passed = outcomes.iter().filter(|r| r.passed).count();
    let _ = writeln!(o.out, "{passed}/{} criteria passed", outcomes.len());
    Ok(passed == outcomes.len())
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("SCATTER_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| ScatterError::InvalidArgument(format!("SCATTER_THREADS must be a positive integer, got {v}")))?;
        // A pool configured earlier in the same process stays in place.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn dispatch(cli: Cli, o: &mut Output) -> Result<bool> {
    configure_threads()?;
    match &cli.command {
        Command::Amplitudes(c) => cmd_amplitudes(c, o)?,
        Command::Spectrum { common, det_out } => cmd_spectrum(common, det_out.as_deref(), o)?,
        Command::Levinson(c) => cmd_levinson(c, o)?,
        Command::Phase(c) => cmd_phase(c, o)?,
        Command::Spiral(c) => cmd_spiral(c, o)?,
        Command::Compose {
            common,
            shifts,
            copies,
            spacing,
        } => cmd_compose(common, shifts, *copies, *spacing, o)?,
        Command::Selftest { criterion } => return cmd_selftest(*criterion, o),
    }
    Ok(true)
}

/// Run with explicit streams; returns the process exit code: 0 on success,
/// 1 for invalid input, 2 for numerical failures.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ");
            let _ = writeln!(err, "error kind=Usage message={first}");
            return 1;
        }
    };
    let mut o = Output { out, err };
    match dispatch(cli, &mut o) {
        Ok(true) => 0,
        Ok(false) => 2,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            let _ = writeln!(o.err, "error kind={} message={msg}", e.kind());
            if e.is_numerical() {
                2
            } else {
                1
            }
        }
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}
