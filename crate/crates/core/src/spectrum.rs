//! Bound and half-bound states.
//!
//! Bound states at energy `−α²` are the roots of `det M(α)` with
//! `M(α) = α²χ_b + α(χ′_b + φ_b) + φ′_b`, the blocks taken at `x = R` from
//! the propagation at `k² = −α²`. Half-bound states are the null directions
//! of `φ′(0, R)`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Result, ScatterError};
use crate::linalg::{c, norm_inf, norm_inf_real, real_part, RMat};
use crate::potential::ValidatedPotential;
use crate::propagator::fundamental_at_range;

pub const ALPHA_MIN: f64 = 1e-4;
pub const DEFAULT_GRID_POINTS: usize = 512;
pub const MIN_GRID_POINTS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectrumOptions {
    /// Lower end of the α scan; smaller roots belong to the half-bound detector.
    pub alpha_min: f64,
    /// Relative `σ_min` level below which a local minimum is refined.
    pub candidate_ratio: f64,
    /// Relative singular-value level counted towards the multiplicity.
    pub multiplicity_tol: f64,
    /// Bracket width at which refinement stops.
    pub root_tol: f64,
    /// Relative tolerance on eigenvalues of `φ′(0,R)` counted as zero.
    pub half_bound_tol: f64,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions {
            alpha_min: ALPHA_MIN,
            candidate_ratio: 0.1,
            multiplicity_tol: 1e-6,
            root_tol: 1e-10,
            half_bound_tol: 1e-8,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundState {
    pub alpha: f64,
    pub multiplicity: usize,
}

impl BoundState {
    pub fn energy(&self) -> f64 {
        -self.alpha * self.alpha
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SpectrumWarning {
    /// Several roots were found inside one grid cell.
    GridTooCoarse { alpha_lo: f64, alpha_hi: f64, roots: usize },
}

#[derive(Clone, Debug, Default)]
pub struct BoundStateScan {
    pub states: Vec<BoundState>,
    pub warnings: Vec<SpectrumWarning>,
}

#[derive(Clone, Debug)]
pub struct HalfBound {
    pub count: usize,
    /// Eigenvalues of `φ′(0,R)` sorted by increasing modulus.
    pub eigenvalues: Vec<Complex64>,
    pub tolerance: f64,
}

#[derive(Clone, Debug)]
pub struct SpectrumReport {
    pub bound_states: Vec<BoundState>,
    /// Bound states counted with multiplicity.
    pub n_b: usize,
    pub n_half: usize,
    pub channels: usize,
    pub half_bound_eigenvalues: Vec<Complex64>,
    pub warnings: Vec<SpectrumWarning>,
}

/// `M(α)` together with the magnitude of the terms that build it, which
/// serves as the reference scale for "small" singular values.
struct BoundSample {
    matrix: RMat,
    scale: f64,
}

fn bound_sample(pot: &ValidatedPotential, alpha: f64) -> Result<BoundSample> {
    if !(alpha > 0.0) {
        return Err(ScatterError::InvalidArgument(format!("alpha must be positive, got {alpha}")));
    }
    let st = fundamental_at_range(pot, c(-alpha * alpha))?.state;
    let (phi, dphi, chi, dchi) = (
        real_part(&st.phi),
        real_part(&st.phi_prime),
        real_part(&st.chi),
        real_part(&st.chi_prime),
    );
    let matrix = &chi * (alpha * alpha) + (&dchi + &phi) * alpha + &dphi;
    let scale = alpha * alpha * norm_inf_real(&chi)
        + alpha * (norm_inf_real(&dchi) + norm_inf_real(&phi))
        + norm_inf_real(&dphi);
    Ok(BoundSample { matrix, scale })
}

impl BoundSample {
    fn det(&self) -> f64 {
        self.matrix.determinant()
    }

    fn singular_values(&self) -> Vec<f64> {
        let mut sv: Vec<f64> = self.matrix.clone().singular_values().iter().copied().collect();
        sv.sort_by(|a, b| a.partial_cmp(b).unwrap());
        sv
    }

    fn relative_sigma_min(&self) -> f64 {
        self.singular_values()[0] / self.scale
    }
}

/// `M(α) = α²χ_b(α,R) + α[χ′_b(α,R) + φ_b(α,R)] + φ′_b(α,R)`.
pub fn bound_matrix(pot: &ValidatedPotential, alpha: f64) -> Result<RMat> {
    Ok(bound_sample(pot, alpha)?.matrix)
}

pub fn bound_determinant(pot: &ValidatedPotential, alpha: f64) -> Result<f64> {
    Ok(bound_sample(pot, alpha)?.det())
}

/// `det M(α)·e^{−2αRN}`, the determinant with the free exponential growth
/// removed. For delta models this is the bare determinant function
/// `det([(λ+2α)(λ̃+2α) − λλ̃e^{−4αa}]/2α)`.
pub fn reduced_determinant(pot: &ValidatedPotential, alpha: f64) -> Result<f64> {
    let n = pot.channels() as f64;
    Ok(bound_determinant(pot, alpha)? * (-2.0 * alpha * pot.range() * n).exp())
}

/// Default scan ceiling: one plus a bound on the deepest decay constant,
/// `√‖V₀‖` over segments and half the summed delta strengths.
pub fn default_alpha_max(pot: &ValidatedPotential) -> f64 {
    let seg = match pot.sampled() {
        Some(s) => {
            let r = pot.range();
            (0..=256)
                .map(|i| norm_inf_real(&(s.evaluator)(-r + 2.0 * r * i as f64 / 256.0)))
                .fold(0.0, f64::max)
        }
        None => pot
            .segments()
            .iter()
            .map(|s| norm_inf_real(&s.matrix))
            .fold(0.0, f64::max),
    };
    let deltas: f64 = pot.deltas().iter().map(|d| norm_inf_real(&d.strength) / 2.0).sum();
    1.0 + seg.sqrt() + deltas
}

pub fn find_bound_states(pot: &ValidatedPotential, alpha_max: f64, grid_points: usize) -> Result<BoundStateScan> {
    find_bound_states_with(pot, alpha_max, grid_points, &SpectrumOptions::default())
}

pub fn find_bound_states_with(
    pot: &ValidatedPotential,
    alpha_max: f64,
    grid_points: usize,
    opts: &SpectrumOptions,
) -> Result<BoundStateScan> {
    if !(alpha_max > opts.alpha_min) {
        return Err(ScatterError::InvalidArgument(format!(
            "alpha_max must exceed {}, got {alpha_max}",
            opts.alpha_min
        )));
    }
    if grid_points < MIN_GRID_POINTS {
        return Err(ScatterError::InvalidArgument(format!(
            "grid_points must be at least {MIN_GRID_POINTS}, got {grid_points}"
        )));
    }
    let step = (alpha_max - opts.alpha_min) / (grid_points - 1) as f64;
    let grid: Vec<f64> = (0..grid_points).map(|i| opts.alpha_min + step * i as f64).collect();
    let samples: Vec<(f64, f64)> = grid
        .par_iter()
        .map(|&a| {
            let s = bound_sample(pot, a)?;
            Ok((s.det(), s.relative_sigma_min()))
        })
        .collect::<Result<Vec<_>>>()?;

    let det_at = |a: f64| -> Result<f64> { bound_determinant(pot, a) };
    let mut scan = BoundStateScan::default();
    let mut roots: Vec<f64> = Vec::new();

    // Odd-multiplicity roots: sign changes of det M.
    for j in 0..grid_points - 1 {
        let (d0, d1) = (samples[j].0, samples[j + 1].0);
        if d0 == 0.0 {
            roots.push(grid[j]);
            continue;
        }
        if d0.signum() == d1.signum() || d1 == 0.0 {
            continue;
        }
        // Split the cell once to expose additional roots sharing it.
        let (lo, hi) = (grid[j], grid[j + 1]);
        let mut pts = vec![(lo, d0)];
        for q in 1..4 {
            let a = lo + (hi - lo) * q as f64 / 4.0;
            pts.push((a, det_at(a)?));
        }
        pts.push((hi, d1));
        let mut found = 0;
        for w in pts.windows(2) {
            if w[0].1 == 0.0 {
                roots.push(w[0].0);
                found += 1;
            } else if w[0].1.signum() != w[1].1.signum() && w[1].1 != 0.0 {
                roots.push(bisect(&det_at, w[0], w[1], opts.root_tol)?);
                found += 1;
            }
        }
        if found > 1 {
            scan.warnings.push(SpectrumWarning::GridTooCoarse {
                alpha_lo: lo,
                alpha_hi: hi,
                roots: found,
            });
        }
    }
    if samples[grid_points - 1].0 == 0.0 {
        roots.push(grid[grid_points - 1]);
    }

    // Even-multiplicity candidates: interior local minima of σ_min.
    let sigma_at = |a: f64| -> Result<f64> { Ok(bound_sample(pot, a)?.relative_sigma_min()) };
    for j in 1..grid_points - 1 {
        let r = samples[j].1;
        if !(r < samples[j - 1].1 && r <= samples[j + 1].1 && r < opts.candidate_ratio) {
            continue;
        }
        let a = golden_min(&sigma_at, grid[j - 1], grid[j + 1], opts.root_tol)?;
        if roots.iter().any(|&x| (x - a).abs() < 1e-6) {
            continue;
        }
        if sigma_at(a)? < opts.multiplicity_tol {
            roots.push(a);
        }
    }

    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-8);
    for alpha in roots {
        let s = bound_sample(pot, alpha)?;
        let multiplicity = s
            .singular_values()
            .iter()
            .filter(|&&sv| sv < opts.multiplicity_tol * s.scale)
            .count()
            .max(1);
        scan.states.push(BoundState { alpha, multiplicity });
    }
    Ok(scan)
}

fn bisect<F>(f: &F, mut lo: (f64, f64), mut hi: (f64, f64), tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    while hi.0 - lo.0 > tol {
        let mid = 0.5 * (lo.0 + hi.0);
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == lo.1.signum() {
            lo = (mid, fm);
        } else {
            hi = (mid, fm);
        }
    }
    Ok(0.5 * (lo.0 + hi.0))
}

fn golden_min<F>(f: &F, mut a: f64, mut b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while b - a > tol {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok(0.5 * (a + b))
}

/// Count half-bound states as the nullity of `φ′(0,R)`.
pub fn half_bound_count(pot: &ValidatedPotential) -> Result<HalfBound> {
    half_bound_count_with(pot, &SpectrumOptions::default())
}

pub fn half_bound_count_with(pot: &ValidatedPotential, opts: &SpectrumOptions) -> Result<HalfBound> {
    let st = fundamental_at_range(pot, c(0.0))?.state;
    let dphi = real_part(&st.phi_prime);
    let tolerance = opts.half_bound_tol * (1.0 + norm_inf(&st.phi_prime));
    let mut eigenvalues: Vec<Complex64> = dphi.complex_eigenvalues().iter().copied().collect();
    eigenvalues.sort_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap());
    let count = dphi
        .clone()
        .singular_values()
        .iter()
        .filter(|&&s| s < tolerance)
        .count();
    Ok(HalfBound {
        count,
        eigenvalues,
        tolerance,
    })
}

pub fn spectrum_report(pot: &ValidatedPotential, alpha_max: f64, grid_points: usize) -> Result<SpectrumReport> {
    spectrum_report_with(pot, alpha_max, grid_points, &SpectrumOptions::default())
}

pub fn spectrum_report_with(
    pot: &ValidatedPotential,
    alpha_max: f64,
    grid_points: usize,
    opts: &SpectrumOptions,
) -> Result<SpectrumReport> {
    let scan = find_bound_states_with(pot, alpha_max, grid_points, opts)?;
    let half = half_bound_count_with(pot, opts)?;
    Ok(SpectrumReport {
        n_b: scan.states.iter().map(|s| s.multiplicity).sum(),
        bound_states: scan.states,
        n_half: half.count,
        channels: pot.channels(),
        half_bound_eigenvalues: half.eigenvalues,
        warnings: scan.warnings,
    })
}

/// Spectrum with the default scan window and grid.
pub fn default_spectrum(pot: &ValidatedPotential) -> Result<SpectrumReport> {
    spectrum_report(pot, default_alpha_max(pot), DEFAULT_GRID_POINTS)
}
