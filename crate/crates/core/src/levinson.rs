//! The S-matrix phase `η(k) = (1/2i) ln det S(k)`, made continuous in `k`
//! and anchored at `η(∞) = 0`, and the zero-energy checks built on it:
//! `η(0) = π(n_b + n/2 − N/2)` and `Tr[ρ(0) + ρ̃(0)] = −2(N − n)`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::amplitudes::{scattering_amplitudes, threshold_amplitudes, SMatrix, DEFAULT_THRESHOLD_KS};
use crate::error::{Result, ScatterError};
use crate::linalg::det;
use crate::potential::ValidatedPotential;
use crate::propagator::PropagationOptions;
use crate::spectrum::{default_spectrum, half_bound_count};

pub const UNITARITY_GATE: f64 = 1e-6;
pub const ANCHOR_TOL: f64 = 0.1;
/// Largest accepted change of `η` between neighbouring grid points.
pub const MAX_UNWRAP_STEP: f64 = PI / 4.0;
pub const DEFAULT_PHASE_POINTS: usize = 2000;
pub const DEFAULT_PHASE_KMIN: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseCurve {
    /// `(k, η)` in the order of the input grid, largest `k` first.
    pub samples: Vec<(f64, f64)>,
    pub anchor_k: f64,
}

impl PhaseCurve {
    pub fn eta_at_smallest_k(&self) -> f64 {
        self.samples.last().map(|s| s.1).unwrap_or(0.0)
    }

    /// Linear extrapolation to `k = 0` through the two smallest-`k` samples.
    pub fn eta_at_zero(&self) -> f64 {
        let n = self.samples.len();
        let (k1, e1) = self.samples[n - 2];
        let (k2, e2) = self.samples[n - 1];
        e2 - (e2 - e1) * k2 / (k2 - k1)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevinsonReport {
    pub eta0: f64,
    pub predicted: f64,
    pub residual: f64,
    pub n_b: usize,
    pub n_half: usize,
    pub channels: usize,
    pub anchor_k: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceReport {
    pub trace: f64,
    pub predicted: f64,
    pub residual: f64,
    pub n_half: usize,
    pub channels: usize,
}

/// Principal value of `arg(det S)/2`, in `(−π/2, π/2]`.
pub fn raw_phase(s: &SMatrix) -> Result<f64> {
    let residual = s.unitarity_residual();
    if !(residual <= UNITARITY_GATE) {
        return Err(ScatterError::NonUnitaryInput { residual });
    }
    Ok(0.5 * det(&s.s).arg())
}

/// `n` log-spaced wavenumbers from `kmax` down to `kmin`.
pub fn log_grid_descending(kmax: f64, kmin: f64, n: usize) -> Vec<f64> {
    let (a, b) = (kmax.ln(), kmin.ln());
    (0..n)
        .map(|i| {
            if i == 0 {
                kmax
            } else if i + 1 == n {
                kmin
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

/// Default scan from `100/(2R)` down to `1e-3`.
pub fn default_k_grid(range: f64) -> Vec<f64> {
    log_grid_descending(100.0 / (2.0 * range), DEFAULT_PHASE_KMIN, DEFAULT_PHASE_POINTS)
}

fn validate_grid(k_grid: &[f64], range: f64) -> Result<()> {
    let bad = |m: String| Err(ScatterError::InvalidArgument(m));
    if k_grid.len() < 2 {
        return bad("phase grid needs at least two points".into());
    }
    if k_grid.iter().any(|k| !(k.is_finite() && *k > 0.0)) {
        return bad("phase grid must contain positive finite wavenumbers".into());
    }
    if k_grid.windows(2).any(|w| w[1] >= w[0]) {
        return bad("phase grid must be strictly descending".into());
    }
    let anchor_min = 50.0 / (2.0 * range);
    if k_grid[0] < anchor_min {
        return bad(format!("phase grid must start at k >= {anchor_min} to anchor eta"));
    }
    let kmin = *k_grid.last().unwrap();
    if kmin > 1e-2 {
        return bad(format!("phase grid must reach k <= 0.01, ends at {kmin}"));
    }
    if let Some(w) = k_grid.windows(2).find(|w| w[0] < 1.0 && w[0] / w[1] > 1.05) {
        return bad(format!("phase grid too sparse near threshold: ratio {} at k = {}", w[0] / w[1], w[1]));
    }
    Ok(())
}

pub fn phase_curve(pot: &ValidatedPotential, k_grid: &[f64]) -> Result<PhaseCurve> {
    phase_curve_with(pot, k_grid, &PropagationOptions::default())
}

pub fn phase_curve_with(pot: &ValidatedPotential, k_grid: &[f64], opts: &PropagationOptions) -> Result<PhaseCurve> {
    validate_grid(k_grid, pot.range())?;
    let raw: Vec<f64> = k_grid
        .par_iter()
        .map(|&k| raw_phase(&scattering_amplitudes(pot, k, opts)?.s_matrix()))
        .collect::<Result<Vec<_>>>()?;

    let anchor_k = k_grid[0];
    if raw[0].abs() >= ANCHOR_TOL {
        return Err(ScatterError::AnchorNotConverged { k: anchor_k, eta: raw[0] });
    }
    let mut samples = Vec::with_capacity(raw.len());
    let mut prev = raw[0];
    samples.push((anchor_k, prev));
    for (&k, &r) in k_grid.iter().zip(&raw).skip(1) {
        let eta = r - PI * ((r - prev) / PI).round();
        let step = eta - prev;
        if step.abs() > MAX_UNWRAP_STEP {
            return Err(ScatterError::GridTooCoarse { k, step });
        }
        samples.push((k, eta));
        prev = eta;
    }
    Ok(PhaseCurve { samples, anchor_k })
}

pub fn levinson_check(pot: &ValidatedPotential) -> Result<LevinsonReport> {
    levinson_check_on(pot, &default_k_grid(pot.range()))
}

pub fn levinson_check_on(pot: &ValidatedPotential, k_grid: &[f64]) -> Result<LevinsonReport> {
    let curve = phase_curve(pot, k_grid)?;
    let spec = default_spectrum(pot)?;
    let eta0 = curve.eta_at_zero();
    let predicted = PI * (spec.n_b as f64 + 0.5 * spec.n_half as f64 - 0.5 * spec.channels as f64);
    Ok(LevinsonReport {
        eta0,
        predicted,
        residual: (eta0 - predicted).abs(),
        n_b: spec.n_b,
        n_half: spec.n_half,
        channels: spec.channels,
        anchor_k: curve.anchor_k,
    })
}

pub fn threshold_trace_check(pot: &ValidatedPotential) -> Result<TraceReport> {
    let amp = threshold_amplitudes(pot, &DEFAULT_THRESHOLD_KS)?;
    let half = half_bound_count(pot)?;
    let trace = (amp.rho.trace() + amp.rho_tilde.trace()).re;
    let n = pot.channels();
    let predicted = -2.0 * (n - half.count) as f64;
    Ok(TraceReport {
        trace,
        predicted,
        residual: (trace - predicted).abs(),
        n_half: half.count,
        channels: n,
    })
}
