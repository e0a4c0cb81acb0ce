//! The acceptance suite as library code, shared by `scatter selftest` and
//! the `acceptance` test target.

use std::f64::consts::PI;
use std::fmt;

use rayon::prelude::*;

use crate::amplitudes::{
    closed_form_double_delta, closed_form_single_delta, scattering_amplitudes, threshold_amplitudes, AmplitudeSet,
    DEFAULT_THRESHOLD_KS,
};
use crate::asymptotics::asymptotic_sample;
use crate::error::Result;
use crate::factorization::{
    amplitude_distance, amplitudes_from_factor, compose_factors, factor_from_amplitudes, split_consistency,
    split_potential, translate_amplitudes,
};
use crate::levinson::{levinson_check, log_grid_descending, threshold_trace_check};
use crate::linalg::{c, max_abs, norm_inf, CMat, RMat};
use crate::models::{bundled, coupled_double_delta, coupled_pair};
use crate::potential::{PotentialSpec, ValidatedPotential};
use crate::propagator::{fundamental_at_range_with, PropagationOptions};
use crate::spectrum::{default_spectrum, half_bound_count};

#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} [{:>2}] {}: {}", self.id, self.title, self.detail)
    }
}

fn outcome(id: u8, title: &'static str, r: Result<(bool, String)>) -> Outcome {
    match r {
        Ok((passed, detail)) => Outcome { id, title, passed, detail },
        Err(e) => Outcome {
            id,
            title,
            passed: false,
            detail: format!("error kind={} message={e}", e.kind()),
        },
    }
}

pub const TITLES: [&str; 10] = [
    "double-delta bound states",
    "threshold anomaly",
    "threshold trace identity",
    "Levinson theorem",
    "unitarity",
    "reciprocity and parity",
    "factorization consistency",
    "propagator oracles",
    "large-k asymptotics",
    "half-bound counting",
];

pub fn run_criterion(id: u8) -> Outcome {
    let title = TITLES[(id - 1) as usize];
    let r = match id {
        1 => bound_states(),
        2 => threshold_anomaly(),
        3 => trace_identity(),
        4 => levinson(),
        5 => unitarity(),
        6 => reciprocity_parity(),
        7 => factorization(),
        8 => propagator_oracles(),
        9 => large_k(),
        10 => half_bound(),
        _ => unreachable!("criteria are numbered 1 to 10"),
    };
    outcome(id, title, r)
}

pub fn run_all() -> Vec<Outcome> {
    (1..=10).map(run_criterion).collect()
}

const SEPARATIONS: [f64; 3] = [0.95, 1.00, 1.05];

fn scan_grid() -> Vec<f64> {
    let mut g = log_grid_descending(1e2, 1e-2, 200);
    g.reverse();
    g
}

fn nearest(roots: &[f64], target: f64) -> f64 {
    roots.iter().map(|r| (r - target).abs()).fold(f64::INFINITY, f64::min)
}

fn bound_states() -> Result<(bool, String)> {
    let mut ok = true;
    let mut parts = Vec::new();
    for a in SEPARATIONS {
        let rep = default_spectrum(&coupled_double_delta(a)?)?;
        let roots: Vec<f64> = rep.bound_states.iter().map(|s| s.alpha).collect();
        let tol = if a == 1.0 { 1e-3 } else { 5e-2 };
        let mut good = nearest(&roots, 0.5164) < tol && nearest(&roots, 3.3508) < tol;
        let expected = if a == 1.05 { 3 } else { 2 };
        if a == 1.05 {
            good &= nearest(&roots, 0.0259) < 1e-3;
        }
        good &= roots.len() == expected;
        ok &= good;
        let list: Vec<String> = roots.iter().map(|r| format!("{r:.4}")).collect();
        parts.push(format!("a={a:.2} alpha=[{}]", list.join(", ")));
    }
    Ok((ok, parts.join("; ")))
}

fn threshold_anomaly() -> Result<(bool, String)> {
    let mut ok = true;
    let mut parts = Vec::new();
    for a in SEPARATIONS {
        let r11 = threshold_amplitudes(&coupled_double_delta(a)?, &DEFAULT_THRESHOLD_KS)?.rho[(0, 0)].re;
        let good = if a == 1.0 {
            (r11 - 0.777).abs() < 5e-3
        } else {
            (r11 + 1.0).abs() < 1e-3
        };
        ok &= good;
        parts.push(format!("a={a:.2} rho11(0)={r11:.6}"));
    }
    Ok((ok, parts.join("; ")))
}

fn trace_identity() -> Result<(bool, String)> {
    let mut ok = true;
    let mut parts = Vec::new();
    for a in SEPARATIONS {
        let t = threshold_trace_check(&coupled_double_delta(a)?)?;
        let want = if a == 1.0 { -2.0 } else { -4.0 };
        ok &= (t.trace - want).abs() < 5e-2 && t.predicted == want;
        parts.push(format!("a={a:.2} trace={:.6} (n={})", t.trace, t.n_half));
    }
    Ok((ok, parts.join("; ")))
}

fn levinson() -> Result<(bool, String)> {
    let targets = [PI, 1.5 * PI, 2.0 * PI];
    let counts = [(2, 0), (2, 1), (3, 0)];
    let mut eta = Vec::new();
    let mut ok = true;
    for ((a, want), (nb, n)) in SEPARATIONS.iter().zip(targets).zip(counts) {
        let rep = levinson_check(&coupled_double_delta(*a)?)?;
        ok &= (rep.eta0 - want).abs() < 2e-2 * PI && (rep.n_b, rep.n_half) == (nb, n);
        ok &= rep.residual < 2e-2 * PI;
        eta.push(rep.eta0);
    }
    let jump = eta[2] - eta[0];
    let mid = eta[1] - 0.5 * (eta[0] + eta[2]);
    ok &= (jump - PI).abs() < 2e-2 * PI && mid.abs() < 2e-2 * PI;
    Ok((
        ok,
        format!(
            "eta0/pi = {:.5}, {:.5}, {:.5}; jump/pi={:.5}, midpoint offset/pi={:.2e}",
            eta[0] / PI,
            eta[1] / PI,
            eta[2] / PI,
            jump / PI,
            mid / PI
        ),
    ))
}

/// `V(x) = (1 − x²/R²)² M` with a coupled `M`, integrated by RK4 only.
pub fn smooth_coupled_well(range: f64) -> Result<ValidatedPotential> {
    let m = RMat::from_row_slice(2, 2, &[-3.0, 1.0, 1.0, -1.0]);
    PotentialSpec::new(2, range)
        .with_sampled(1e-3, move |x| {
            let u = 1.0 - (x / range).powi(2);
            &m * (u * u)
        })
        .validate()
}

fn s_residual_inf(a: &AmplitudeSet) -> f64 {
    let s = a.s_matrix().s;
    let id = CMat::identity(s.nrows(), s.nrows());
    let sh = s.adjoint();
    norm_inf(&(&sh * &s - &id)).max(norm_inf(&(&s * &sh - &id)))
}

fn max_over_grid<F>(f: F) -> Result<f64>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let v: Vec<f64> = scan_grid().par_iter().map(|&k| f(k)).collect::<Result<Vec<_>>>()?;
    Ok(v.into_iter().fold(0.0, f64::max))
}

fn closed_form_models() -> Result<Vec<(&'static str, ValidatedPotential)>> {
    Ok(vec![
        ("single_delta", bundled("single_delta")?),
        ("double_delta_a0_95", bundled("double_delta_a0_95")?),
        ("double_delta_a1_00", bundled("double_delta_a1_00")?),
        ("double_delta_a1_05", bundled("double_delta_a1_05")?),
        ("barrier", bundled("barrier")?),
    ])
}

fn unitarity() -> Result<(bool, String)> {
    let cf = PropagationOptions::default();
    let (l, lt) = coupled_pair();
    let mut closed = max_over_grid(|k| {
        let a = closed_form_double_delta(&l, &lt, 1.0, k)?;
        let b = closed_form_single_delta(&l, k);
        Ok(s_residual_inf(&a).max(s_residual_inf(&b)))
    })?;
    for (_, pot) in closed_form_models()? {
        closed = closed.max(max_over_grid(|k| Ok(s_residual_inf(&scattering_amplitudes(&pot, k, &cf)?)))?);
    }
    let ode = PropagationOptions::ode(None);
    let barrier = bundled("barrier")?;
    let smooth = smooth_coupled_well(1.0)?;
    let mut ode_res = max_over_grid(|k| Ok(s_residual_inf(&scattering_amplitudes(&barrier, k, &ode)?)))?;
    ode_res = ode_res.max(max_over_grid(|k| Ok(s_residual_inf(&scattering_amplitudes(&smooth, k, &cf)?)))?);
    Ok((
        closed < 1e-12 && ode_res < 1e-8,
        format!("closed-form max={closed:.2e} (<1e-12), ODE max={ode_res:.2e} (<1e-8)"),
    ))
}

fn reciprocity_parity() -> Result<(bool, String)> {
    let cf = PropagationOptions::default();
    let mut models = closed_form_models()?;
    models.push(("smooth", smooth_coupled_well(1.0)?));
    let mut recip = 0.0_f64;
    for (_, pot) in &models {
        recip = recip.max(max_over_grid(|k| {
            let a = scattering_amplitudes(pot, k, &cf)?;
            Ok(max_abs(&(&a.rho - a.rho.transpose())).max(max_abs(&(&a.rho_tilde - a.rho_tilde.transpose()))))
        })?);
    }
    let single = bundled("single_delta")?;
    let parity = max_over_grid(|k| {
        let a = scattering_amplitudes(&single, k, &cf)?;
        Ok(max_abs(&(&a.rho - &a.rho_tilde)).max(max_abs(&(&a.tau - &a.tau_tilde))))
    })?;
    Ok((
        recip < 1e-10 && parity < 1e-12,
        format!("rho-rho^T max={recip:.2e} (<1e-10), single-delta parity max={parity:.2e} (<1e-12)"),
    ))
}

fn factorization() -> Result<(bool, String)> {
    let (l, lt) = coupled_pair();
    let mut delta_rel = 0.0_f64;
    for a in SEPARATIONS {
        delta_rel = delta_rel.max(max_over_grid(|k| {
            let left = translate_amplitudes(&closed_form_single_delta(&l, k), -a);
            let right = translate_amplitudes(&closed_form_single_delta(&lt, k), a);
            let f = compose_factors(&[factor_from_amplitudes(&left)?, factor_from_amplitudes(&right)?])?;
            let got = amplitudes_from_factor(&f)?;
            let want = closed_form_double_delta(&l, &lt, a, k)?;
            Ok(amplitude_distance(&got, &want) / max_abs(&want.s_matrix().s))
        })?);
    }
    let barrier = bundled("barrier")?;
    let cf = PropagationOptions::default();
    let mut split = 0.0_f64;
    for xs in [-0.7, -0.2, 0.0, 0.35, 0.9] {
        let (lp, rp) = split_potential(&barrier, xs)?;
        split = split.max(max_over_grid(|k| {
            let direct = scattering_amplitudes(&barrier, k, &cf)?;
            let f = compose_factors(&[
                factor_from_amplitudes(&scattering_amplitudes(&lp, k, &cf)?)?,
                factor_from_amplitudes(&scattering_amplitudes(&rp, k, &cf)?)?,
            ])?;
            let d = amplitude_distance(&amplitudes_from_factor(&f)?, &direct);
            Ok(d.max(split_consistency(&barrier, xs, k)?))
        })?);
    }
    Ok((
        delta_rel < 1e-10 && split < 1e-8,
        format!("delta composition rel={delta_rel:.2e} (<1e-10), barrier splits max={split:.2e} (<1e-8)"),
    ))
}

fn propagator_oracles() -> Result<(bool, String)> {
    let barrier = bundled("barrier")?;
    let well = PotentialSpec::new(2, 1.5)
        .with_segment(-1.5, -0.2, RMat::from_row_slice(2, 2, &[-2.0, 0.7, 0.7, 0.5]))
        .with_segment(0.3, 1.2, RMat::from_row_slice(2, 2, &[1.0, -0.4, -0.4, -3.0]))
        .validate()?;
    let cf = PropagationOptions::default();
    let ode = PropagationOptions::ode(Some(1e-3));
    let mut agree = 0.0_f64;
    for pot in [&barrier, &well] {
        for k2 in [-4.0, -1.0, 0.0, 0.0025, 0.25, 1.0, 4.0, 25.0] {
            let a = fundamental_at_range_with(pot, c(k2), &cf)?.state;
            let b = fundamental_at_range_with(pot, c(k2), &ode)?.state;
            let scale = max_abs(&a.w()).max(1.0);
            agree = agree.max(max_abs(&(a.w() - b.w())) / scale);
        }
    }
    let mut pots = vec![barrier.clone(), well.clone(), smooth_coupled_well(1.0)?];
    pots.extend(closed_form_models()?.into_iter().map(|(_, p)| p));
    let mut det_dev = 0.0_f64;
    let mut wronskian = 0.0_f64;
    for pot in &pots {
        for opts in [cf, PropagationOptions::ode(None)] {
            let (d, w) = scan_grid()
                .par_iter()
                .map(|&k| {
                    let rep = fundamental_at_range_with(pot, c(k * k), &opts)?;
                    Ok((rep.max_det_deviation, rep.state.wronskian_defect()))
                })
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .fold((0.0_f64, 0.0_f64), |acc, x| (acc.0.max(x.0), acc.1.max(x.1)));
            det_dev = det_dev.max(d);
            wronskian = wronskian.max(w);
        }
    }
    Ok((
        agree < 1e-6 && det_dev < 1e-8 && wronskian < 1e-8,
        format!("ODE(h=1e-3) vs closed form={agree:.2e} (<1e-6), max|det W-1|={det_dev:.2e}, Wronskian defect={wronskian:.2e} (<1e-8)"),
    ))
}

fn spread(v: &[f64]) -> f64 {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
    (max - min) / max
}

fn large_k() -> Result<(bool, String)> {
    let pot = coupled_double_delta(1.0)?;
    let cf = PropagationOptions::default();
    let ks = [50.0, 100.0, 200.0];
    let mut ct = Vec::new();
    let mut cr = Vec::new();
    for k in ks {
        let a = scattering_amplitudes(&pot, k, &cf)?;
        let n = a.channels();
        ct.push(k * norm_inf(&(&a.tau - CMat::identity(n, n))));
        cr.push(k * norm_inf(&a.rho));
    }
    let (st, sr) = (spread(&ct), spread(&cr));
    let mut ok = st < 0.5 && sr < 0.5;

    let mut worst = 0.0_f64;
    for p in [bundled("barrier")?, pot.clone()] {
        for k in ks {
            let s = asymptotic_sample(&p, k)?;
            ok &= s.within_bounds();
            worst = worst
                .max(s.phi_leading / s.leading_bound)
                .max(s.chi_leading / s.leading_bound)
                .max(s.phi_remainder / s.remainder_bound)
                .max(s.chi_remainder / s.remainder_bound);
        }
    }
    Ok((
        ok,
        format!(
            "k|tau-I| = {:.3}/{:.3}/{:.3} (spread {st:.2}), k|rho| = {:.3}/{:.3}/{:.3} (spread {sr:.2}), phi/chi constants at most {worst:.2} of bound",
            ct[0], ct[1], ct[2], cr[0], cr[1], cr[2]
        ),
    ))
}

fn half_bound() -> Result<(bool, String)> {
    let pot = bundled("single_delta_halfbound")?;
    let n = half_bound_count(&pot)?.count;
    let a = scattering_amplitudes(&pot, 1e-3, &PropagationOptions::default())?;
    let mut sv: Vec<f64> = a.tau.clone().singular_values().iter().copied().collect();
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap());
    Ok((
        n == 1 && sv[0] > 0.9 && sv[1] < 5e-3,
        format!("n={n}, tau singular values at k=1e-3: {:.6}, {:.3e}", sv[0], sv[1]),
    ))
}
