//! Fundamental solutions `φ(k,x)`, `χ(k,x)` and their derivatives.
//!
//! The pair is propagated as the `2N×2N` matrix
//! `W = [[φ, χ], [φ′, χ′]]` obeying `W′ = F(x) W` with
//! `F = [[0, 1], [V(x) − k², 0]]` and `W(−R) = I`. Constant segments use the
//! exact block propagator built from the eigen-decomposition of the segment
//! matrix; deltas are derivative jumps; sampled potentials are integrated
//! with fixed-step classical RK4.
//!
//! `k²` is carried as a complex number. Bound-state work uses the real
//! negative value `k² = −α²` on the same code path.

use num_complex::Complex64;
use nalgebra::{ComplexField, DMatrix};

use crate::error::{Result, ScatterError};
use crate::linalg::{c, det, identity, is_finite, max_abs, to_complex, CMat, RMat};
use crate::potential::{orthogonal_diagonalize, ValidatedPotential};

/// Blocks larger than this are reported as overflow instead of rescaled.
pub const OVERFLOW_LIMIT: f64 = 1e150;

/// Below this `|v_i − k²|` the linear-in-Δx limit is used for a channel.
pub const DEGENERATE_TOL: f64 = 1e-12;

pub const DEFAULT_DET_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct FundamentalState {
    pub k2: Complex64,
    pub phi: CMat,
    pub phi_prime: CMat,
    pub chi: CMat,
    pub chi_prime: CMat,
    pub x: f64,
}

impl FundamentalState {
    pub fn channels(&self) -> usize {
        self.phi.nrows()
    }

    /// `W = [[φ, χ], [φ′, χ′]]`.
    pub fn w(&self) -> CMat {
        crate::linalg::block2(&self.phi, &self.chi, &self.phi_prime, &self.chi_prime)
    }

    pub fn det_w(&self) -> Complex64 {
        det(&self.w())
    }

    /// Max entry of `φ′ᵀχ − φᵀχ′ + I`; zero for exact solutions of a
    /// symmetric potential.
    pub fn wronskian_defect(&self) -> f64 {
        let n = self.channels();
        let m = self.phi_prime.transpose() * &self.chi - self.phi.transpose() * &self.chi_prime
            + identity(n);
        max_abs(&m)
    }

    pub fn max_imag(&self) -> f64 {
        [&self.phi, &self.phi_prime, &self.chi, &self.chi_prime]
            .iter()
            .flat_map(|m| m.iter())
            .fold(0.0_f64, |acc, z| acc.max(z.im.abs()))
    }

    fn check_finite(&self) -> Result<()> {
        for m in [&self.phi, &self.phi_prime, &self.chi, &self.chi_prime] {
            if !is_finite(m) || max_abs(m) > OVERFLOW_LIMIT {
                return Err(ScatterError::NonFiniteState { x: self.x });
            }
        }
        Ok(())
    }

    /// Left-multiply `W` by the block propagator `[[a, b], [cc, d]]`.
    fn apply(&self, a: &CMat, b: &CMat, cc: &CMat, d: &CMat, x1: f64) -> FundamentalState {
        FundamentalState {
            k2: self.k2,
            phi: a * &self.phi + b * &self.phi_prime,
            chi: a * &self.chi + b * &self.chi_prime,
            phi_prime: cc * &self.phi + d * &self.phi_prime,
            chi_prime: cc * &self.chi + d * &self.chi_prime,
            x: x1,
        }
    }
}

/// State at `x = −R`: `φ = χ′ = I`, `χ = φ′ = 0`.
pub fn initial_state(n: usize, k2: Complex64, range: f64) -> FundamentalState {
    FundamentalState {
        k2,
        phi: identity(n),
        phi_prime: CMat::zeros(n, n),
        chi: CMat::zeros(n, n),
        chi_prime: identity(n),
        x: -range,
    }
}

/// Per-channel propagator entries `(cosh κΔ, sinh(κΔ)/κ, κ sinh κΔ)` for
/// `κ² = μ`, written with real trigonometric or hyperbolic functions when
/// `μ` is real.
fn channel_propagator(mu: Complex64, dx: f64) -> (Complex64, Complex64, Complex64) {
    if mu.im == 0.0 {
        let m = mu.re;
        if m.abs() < DEGENERATE_TOL {
            (c(1.0), c(dx), c(m * dx))
        } else if m > 0.0 {
            let kappa = m.sqrt();
            let (sh, ch) = ((kappa * dx).sinh(), (kappa * dx).cosh());
            (c(ch), c(sh / kappa), c(kappa * sh))
        } else {
            let kappa = (-m).sqrt();
            let (sn, cs) = (kappa * dx).sin_cos();
            (c(cs), c(sn / kappa), c(-kappa * sn))
        }
    } else if mu.norm() < DEGENERATE_TOL {
        (c(1.0), c(dx), mu * dx)
    } else {
        let kappa = mu.sqrt();
        let arg = kappa * dx;
        (arg.cosh(), arg.sinh() / kappa, kappa * arg.sinh())
    }
}

/// Advance through a region of constant potential `v0` up to `x1`.
pub fn step_constant(state: &FundamentalState, v0: &RMat, x1: f64) -> Result<FundamentalState> {
    let dx = x1 - state.x;
    if dx < 0.0 {
        return Err(ScatterError::InvalidArgument(format!(
            "step_constant target {x1} lies behind the current position {}",
            state.x
        )));
    }
    if dx == 0.0 {
        return Ok(FundamentalState { x: x1, ..state.clone() });
    }
    let n = state.channels();
    let next = if v0.iter().all(|&v| v == 0.0) {
        let (a, b, l) = channel_propagator(-state.k2, dx);
        let id = identity(n);
        state.apply(&(&id * a), &(&id * b), &(&id * l), &(&id * a), x1)
    } else {
        let (u, d) = orthogonal_diagonalize(v0)?;
        let uc = to_complex(&u);
        let ut = uc.transpose();
        let mut ca = CMat::zeros(n, n);
        let mut sb = CMat::zeros(n, n);
        let mut lc = CMat::zeros(n, n);
        for (i, v) in d.iter().enumerate() {
            let (a, b, l) = channel_propagator(c(*v) - state.k2, dx);
            ca[(i, i)] = a;
            sb[(i, i)] = b;
            lc[(i, i)] = l;
        }
        let ca = &uc * ca * &ut;
        let sb = &uc * sb * &ut;
        let lc = &uc * lc * &ut;
        state.apply(&ca, &sb, &lc, &ca, x1)
    };
    next.check_finite()?;
    Ok(next)
}

/// Derivative jump across `δ(x − x₀)λ`: `φ′ += λφ`, `χ′ += λχ`.
pub fn step_delta(state: &FundamentalState, strength: &RMat) -> FundamentalState {
    let lam = to_complex(strength);
    FundamentalState {
        phi_prime: &state.phi_prime + &lam * &state.phi,
        chi_prime: &state.chi_prime + &lam * &state.chi,
        ..state.clone()
    }
}

/// Running record of `|det W − 1|` and step counts during a propagation.
#[derive(Clone, Copy, Debug, Default)]
pub struct Audit {
    pub max_det_deviation: f64,
    pub steps: usize,
}

impl Audit {
    fn record(&mut self, state: &FundamentalState) {
        self.record_det((state.det_w() - c(1.0)).norm());
    }

    fn record_det(&mut self, dev: f64) {
        if dev > self.max_det_deviation || dev.is_nan() {
            self.max_det_deviation = dev;
        }
        self.steps += 1;
    }
}

/// Classical fourth-order integration of `W′ = F(x)W` from `state.x` to
/// `x1` with steps of `h`, the last one shortened to land on `x1`.
pub fn step_ode<F>(state: &FundamentalState, evaluator: F, x1: f64, h: f64) -> Result<FundamentalState>
where
    F: Fn(f64) -> RMat,
{
    let mut audit = Audit::default();
    step_ode_audited(state, &evaluator, x1, h, &mut audit)
}

pub(crate) fn step_ode_audited<F>(
    state: &FundamentalState,
    evaluator: &F,
    x1: f64,
    h: f64,
    audit: &mut Audit,
) -> Result<FundamentalState>
where
    F: Fn(f64) -> RMat + ?Sized,
{
    if !(h > 0.0) {
        return Err(ScatterError::InvalidArgument(format!("ODE step must be positive, got {h}")));
    }
    if x1 < state.x {
        return Err(ScatterError::InvalidArgument(format!(
            "step_ode target {x1} lies behind the current position {}",
            state.x
        )));
    }
    let n = state.channels();
    let total = x1 - state.x;
    let full_steps = (total / h).floor() as usize;
    let remainder = total - full_steps as f64 * h;
    let mut steps: Vec<f64> = vec![h; full_steps];
    if remainder > 1e-14 * h.max(1.0) {
        steps.push(remainder);
    }
    if steps.is_empty() {
        return Ok(FundamentalState { x: x1, ..state.clone() });
    }

    // top = [φ χ], bottom = [φ′ χ′]; top′ = bottom, bottom′ = (V − k²) top.
    let (top, bot) = if state.k2.im == 0.0 && state.max_imag() == 0.0 {
        let to_real = |m: &CMat| m.map(|z| z.re);
        let top = hstack(&to_real(&state.phi), &to_real(&state.chi));
        let bot = hstack(&to_real(&state.phi_prime), &to_real(&state.chi_prime));
        let (t, b) = rk4(top, bot, state.x, &steps, state.k2.re, evaluator, audit)?;
        (t.map(c), b.map(c))
    } else {
        let top = hstack(&state.phi, &state.chi);
        let bot = hstack(&state.phi_prime, &state.chi_prime);
        rk4(top, bot, state.x, &steps, state.k2, evaluator, audit)?
    };
    Ok(FundamentalState {
        k2: state.k2,
        phi: top.view((0, 0), (n, n)).into_owned(),
        chi: top.view((0, n), (n, n)).into_owned(),
        phi_prime: bot.view((0, 0), (n, n)).into_owned(),
        chi_prime: bot.view((0, n), (n, n)).into_owned(),
        x: x1,
    })
}

fn hstack<T: ComplexField + Copy>(a: &DMatrix<T>, b: &DMatrix<T>) -> DMatrix<T> {
    let n = a.nrows();
    let mut m = DMatrix::zeros(n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(a);
    m.view_mut((0, n), (n, n)).copy_from(b);
    m
}

/// RK4 on the `[top; bottom]` split in the scalar type of the state, with
/// `det W` audited after every step.
fn rk4<T, F>(
    mut top: DMatrix<T>,
    mut bot: DMatrix<T>,
    x0: f64,
    steps: &[f64],
    k2: T,
    evaluator: &F,
    audit: &mut Audit,
) -> Result<(DMatrix<T>, DMatrix<T>)>
where
    T: ComplexField<RealField = f64> + Copy,
    F: Fn(f64) -> RMat + ?Sized,
{
    let n = top.nrows();
    let shifted = |x: f64| -> DMatrix<T> {
        let mut a = evaluator(x).map(T::from_real);
        for i in 0..n {
            a[(i, i)] -= k2;
        }
        a
    };
    let r = |v: f64| T::from_real(v);
    let mut w = DMatrix::<T>::zeros(2 * n, 2 * n);
    let mut x = x0;
    let mut a0 = shifted(x);
    for &dh in steps {
        let am = shifted(x + 0.5 * dh);
        let a1 = shifted(x + dh);

        let k1t = bot.clone();
        let k1b = &a0 * &top;
        let k2t = &bot + &k1b * r(0.5 * dh);
        let k2b = &am * (&top + &k1t * r(0.5 * dh));
        let k3t = &bot + &k2b * r(0.5 * dh);
        let k3b = &am * (&top + &k2t * r(0.5 * dh));
        let k4t = &bot + &k3b * r(dh);
        let k4b = &a1 * (&top + &k3t * r(dh));

        let sixth = r(dh / 6.0);
        top += (k1t + (k2t + k3t) * r(2.0) + k4t) * sixth;
        bot += (k1b + (k2b + k3b) * r(2.0) + k4b) * sixth;
        x += dh;
        a0 = a1;

        if top.iter().chain(bot.iter()).any(|z| !z.is_finite() || z.modulus() > OVERFLOW_LIMIT) {
            return Err(ScatterError::NonFiniteState { x });
        }
        w.view_mut((0, 0), (n, 2 * n)).copy_from(&top);
        w.view_mut((n, 0), (n, 2 * n)).copy_from(&bot);
        audit.record_det((w.clone().determinant() - T::one()).modulus());
    }
    Ok((top, bot))
}

/// How regions of constant potential are propagated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PropagationMode {
    /// Exact block propagator per segment.
    ClosedForm,
    /// RK4 everywhere except delta jumps. `None` picks the default step.
    Ode { h: Option<f64> },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PropagationOptions {
    pub mode: PropagationMode,
    pub det_tolerance: f64,
}

impl Default for PropagationOptions {
    fn default() -> Self {
        PropagationOptions {
            mode: PropagationMode::ClosedForm,
            det_tolerance: DEFAULT_DET_TOL,
        }
    }
}

impl PropagationOptions {
    pub fn ode(h: Option<f64>) -> Self {
        PropagationOptions {
            mode: PropagationMode::Ode { h },
            ..Default::default()
        }
    }
}

#[derive(Clone, Debug)]
pub struct PropagationReport {
    pub state: FundamentalState,
    pub max_det_deviation: f64,
    pub steps: usize,
    /// Set when `max_det_deviation` exceeded the configured tolerance.
    pub det_warning: bool,
}

/// Default RK4 step: `1e-3·2R`, tightened so that at most `0.01` radians of
/// local phase accumulate per step at large `|k²|` or deep potentials.
pub fn default_ode_step(pot: &ValidatedPotential, k2: Complex64) -> f64 {
    let base = match pot.sampled() {
        Some(s) => s.step.min(2e-3 * pot.range()),
        None => 2e-3 * pot.range(),
    };
    let vmax = potential_scale(pot);
    let local = (k2.norm() + vmax).sqrt();
    if local > 0.0 {
        base.min(0.01 / local)
    } else {
        base
    }
}

/// Largest entry magnitude of the regular part of the potential.
fn potential_scale(pot: &ValidatedPotential) -> f64 {
    match pot.sampled() {
        Some(s) => {
            let r = pot.range();
            (0..=64)
                .map(|i| (s.evaluator)(-r + 2.0 * r * i as f64 / 64.0).amax())
                .fold(0.0, f64::max)
        }
        None => pot
            .segments()
            .iter()
            .map(|s| s.matrix.amax() * s.matrix.nrows() as f64)
            .fold(0.0, f64::max),
    }
}

/// Propagate from `−R` to `R` across every region of the potential.
pub fn fundamental_at_range(pot: &ValidatedPotential, k2: Complex64) -> Result<PropagationReport> {
    fundamental_at_range_with(pot, k2, &PropagationOptions::default())
}

pub fn fundamental_at_range_with(
    pot: &ValidatedPotential,
    k2: Complex64,
    opts: &PropagationOptions,
) -> Result<PropagationReport> {
    let n = pot.channels();
    let r = pot.range();
    let mut audit = Audit::default();
    let mut state = initial_state(n, k2, r);

    if let Some(sampled) = pot.sampled() {
        let h = match opts.mode {
            PropagationMode::Ode { h: Some(h) } => h,
            _ => default_ode_step(pot, k2),
        };
        let eval = |x: f64| (sampled.evaluator)(x);
        state = step_ode_audited(&state, &eval, r, h, &mut audit)?;
        return Ok(finish(state, audit, opts));
    }

    let zero = RMat::zeros(n, n);
    let ode_h = match opts.mode {
        PropagationMode::ClosedForm => None,
        PropagationMode::Ode { h } => Some(h.unwrap_or_else(|| default_ode_step(pot, k2))),
    };
    let advance = |state: &FundamentalState, v0: &RMat, x1: f64, audit: &mut Audit| -> Result<FundamentalState> {
        if x1 <= state.x {
            return Ok(state.clone());
        }
        match ode_h {
            None => {
                let next = step_constant(state, v0, x1)?;
                audit.record(&next);
                Ok(next)
            }
            Some(h) => {
                let eval = |_x: f64| v0.clone();
                step_ode_audited(state, &eval, x1, h, audit)
            }
        }
    };

    // Left-to-right sweep. A delta sitting on a segment boundary is applied
    // after the segment ending there and before the one starting there.
    let segments = pot.segments();
    let deltas = pot.deltas();
    let mut di = 0;
    for seg in segments {
        while di < deltas.len() && deltas[di].position <= seg.lo {
            state = advance(&state, &zero, deltas[di].position, &mut audit)?;
            state = step_delta(&state, &deltas[di].strength);
            di += 1;
        }
        state = advance(&state, &zero, seg.lo, &mut audit)?;
        // Deltas strictly inside the segment split it.
        while di < deltas.len() && deltas[di].position < seg.hi {
            state = advance(&state, &seg.matrix, deltas[di].position, &mut audit)?;
            state = step_delta(&state, &deltas[di].strength);
            di += 1;
        }
        state = advance(&state, &seg.matrix, seg.hi, &mut audit)?;
    }
    while di < deltas.len() {
        state = advance(&state, &zero, deltas[di].position, &mut audit)?;
        state = step_delta(&state, &deltas[di].strength);
        di += 1;
    }
    state = advance(&state, &zero, r, &mut audit)?;
    state.check_finite()?;
    audit.record(&state);
    Ok(finish(state, audit, opts))
}

fn finish(state: FundamentalState, audit: Audit, opts: &PropagationOptions) -> PropagationReport {
    PropagationReport {
        state,
        max_det_deviation: audit.max_det_deviation,
        steps: audit.steps,
        det_warning: !(audit.max_det_deviation <= opts.det_tolerance),
    }
}
