//! Reflection and transmission amplitude matrices and the S matrix.
//!
//! For a wave incident from the left, `ψ ~ e^{ikx} + ρ e^{−ikx}` on the left
//! and `τ e^{ikx}` on the right; the tilded pair `ρ̃`, `τ̃` describes
//! incidence from the right. All four follow from the fundamental solutions
//! at `x = R` through the core matrix
//! `D(k) = k²χ + ik(χ′ + φ) − φ′`.


use crate::error::{Result, ScatterError};
use crate::linalg::{block2, c, identity, inverse_with_condition, max_abs, real_part, to_complex, CMat, RMat, I};
use crate::potential::{ParityClass, ValidatedPotential};
use crate::propagator::{fundamental_at_range_with, FundamentalState, PropagationOptions};

/// Condition estimate above which `D(k)` counts as singular.
pub const CORE_CONDITION_LIMIT: f64 = 1e14;

pub const DEFAULT_THRESHOLD_KS: [f64; 3] = [2e-3, 1e-3, 5e-4];

/// Imaginary parts allowed in an extrapolated threshold amplitude.
pub const THRESHOLD_REALNESS_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct AmplitudeSet {
    pub k: f64,
    pub rho: CMat,
    pub rho_tilde: CMat,
    pub tau: CMat,
    pub tau_tilde: CMat,
}

impl AmplitudeSet {
    /// No scattering: `ρ = ρ̃ = 0`, `τ = τ̃ = I`.
    pub fn free(n: usize, k: f64) -> Self {
        AmplitudeSet {
            k,
            rho: CMat::zeros(n, n),
            rho_tilde: CMat::zeros(n, n),
            tau: identity(n),
            tau_tilde: identity(n),
        }
    }

    pub fn channels(&self) -> usize {
        self.rho.nrows()
    }

    pub fn s_matrix(&self) -> SMatrix {
        s_matrix(self)
    }

    /// Shortcut for `check_constraints(self, parity)`.
    pub fn constraints(&self, parity: ParityClass) -> ConstraintReport {
        check_constraints(self, parity)
    }
}

/// `S = [[τ, ρ̃], [ρ, τ̃]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SMatrix {
    pub k: f64,
    pub s: CMat,
}

impl SMatrix {
    /// `max(‖S†S − I‖, ‖SS† − I‖)` in the entrywise max norm.
    pub fn unitarity_residual(&self) -> f64 {
        let n = self.s.nrows();
        let id = identity(n);
        let sh = self.s.adjoint();
        max_abs(&(&sh * &self.s - &id)).max(max_abs(&(&self.s * &sh - &id)))
    }
}

pub fn s_matrix(a: &AmplitudeSet) -> SMatrix {
    SMatrix {
        k: a.k,
        s: block2(&a.tau, &a.rho_tilde, &a.rho, &a.tau_tilde),
    }
}

/// Amplitudes from the fundamental solutions at `x = R`.
pub fn amplitudes_from_fundamental(state: &FundamentalState, k: f64, range: f64) -> Result<AmplitudeSet> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(ScatterError::InvalidArgument(format!(
            "wavenumber must be positive, got {k}"
        )));
    }
    amplitude_formulas(state, k, range)
}

/// The defining formulas evaluated at a signed, nonzero `k`.
pub(crate) fn amplitude_formulas(state: &FundamentalState, k: f64, range: f64) -> Result<AmplitudeSet> {
    let ik = I * k;
    let k2 = c(k * k);
    let (phi, dphi, chi, dchi) = (&state.phi, &state.phi_prime, &state.chi, &state.chi_prime);

    let core = chi * k2 + (dchi + phi) * ik - dphi;
    let (core_inv, condition) = inverse_with_condition(&core)
        .ok_or(ScatterError::SingularCore { k, condition: f64::INFINITY })?;
    if condition > CORE_CONDITION_LIMIT {
        return Err(ScatterError::SingularCore { k, condition });
    }
    let phase = (-2.0 * ik * range).exp();

    let num_left = chi * k2 + (dchi - phi) * ik + dphi;
    let num_right = chi * k2 - (dchi - phi) * ik + dphi;

    let rho = &core_inv * num_left * phase;
    let rho_tilde = num_right * &core_inv * phase;
    let tau_tilde = &core_inv * (2.0 * ik * phase);
    let tau = tau_tilde.transpose();
    Ok(AmplitudeSet {
        k,
        rho,
        rho_tilde,
        tau,
        tau_tilde,
    })
}

/// Propagate the potential at `k² ` and convert to amplitudes.
pub fn scattering_amplitudes(pot: &ValidatedPotential, k: f64, opts: &PropagationOptions) -> Result<AmplitudeSet> {
    let report = fundamental_at_range_with(pot, c(k * k), opts)?;
    amplitudes_from_fundamental(&report.state, k, pot.range())
}

/// Delta potential `δ(x)λ` at the origin:
/// `ρ = ρ̃ = (2ik − λ)⁻¹λ`, `τ = τ̃ = 2ik(2ik − λ)⁻¹`.
pub fn closed_form_single_delta(lambda: &RMat, k: f64) -> AmplitudeSet {
    let n = lambda.nrows();
    let lam = to_complex(lambda);
    let denom = identity(n) * (2.0 * I * k) - &lam;
    let inv = denom
        .try_inverse()
        .expect("2ik - λ is invertible for real symmetric λ and k > 0");
    let rho = &inv * &lam;
    let tau = inv * (2.0 * I * k);
    AmplitudeSet {
        k,
        rho: rho.clone(),
        rho_tilde: rho,
        tau: tau.clone(),
        tau_tilde: tau,
    }
}

/// Two deltas, `λ` at `x = −a` and `λ̃` at `x = +a`, in closed form through
/// `Γ = (2ik − λ)λ⁻¹e^{−2ika} − (2ik − λ̃)⁻¹λ̃e^{2ika}`. Requires `λ⁻¹`.
///
/// `Γ` vanishes like `k` at threshold, so it is evaluated as `Γ = 2ik·H` with
/// `H = λ⁻¹e^{−2ika} − Be^{2ika} + (sin 2ka/k)·I` and `B = (2ik − λ̃)⁻¹`,
/// and the `2ik` is cancelled against the numerators:
///
/// ```text
/// ρ = [(2ik + λ)B − I − λq] H⁻¹ λ⁻¹
/// τ = 2ik e^{−2ika} B H⁻¹ λ⁻¹
/// ρ̃ = B H⁻¹ [I + λ⁻¹λ̃e^{−4ika} + λ̃q]
/// ```
///
/// where `q = (1 − e^{−4ika})/2ik = e^{−2ika} sin 2ka/k`.
pub fn closed_form_double_delta(lambda: &RMat, lambda_t: &RMat, a: f64, k: f64) -> Result<AmplitudeSet> {
    let n = lambda.nrows();
    let id = identity(n);
    let lam = to_complex(lambda);
    let lam_t = to_complex(lambda_t);
    let two_ik = 2.0 * I * k;
    let (lam_inv, cond) = inverse_with_condition(&lam).ok_or(ScatterError::SingularStrength)?;
    if cond > 1e12 {
        return Err(ScatterError::SingularStrength);
    }
    let b = (&id * two_ik - &lam_t)
        .try_inverse()
        .expect("2ik - λ̃ is invertible for k > 0");
    let em = (-I * 2.0 * k * a).exp(); // e^{−2ika}
    let sinc = (2.0 * k * a).sin() / k;
    let q = em * sinc;

    let h = &lam_inv * em - &b / em + &id * c(sinc);
    let h_inv = h.try_inverse().ok_or(ScatterError::SingularBlock { block: "Gamma" })?;

    let rho = ((&id * two_ik + &lam) * &b - &id - &lam * q) * &h_inv * &lam_inv;
    let tau = &b * &h_inv * &lam_inv * (two_ik * em);
    let rho_tilde = &b * &h_inv * (&id + &lam_inv * &lam_t * (em * em) + &lam_t * q);
    let tau_tilde = tau.transpose();
    Ok(AmplitudeSet {
        k,
        rho,
        rho_tilde,
        tau,
        tau_tilde,
    })
}

/// Max-norm residuals of the algebraic constraints on an amplitude set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstraintReport {
    /// `τ†τ + ρ†ρ = I`, `τ̃†τ̃ + ρ̃†ρ̃ = I`
    pub unitarity: f64,
    /// `ρ†τ̃ + τ†ρ̃ = 0`, `τ̃†ρ + ρ̃†τ = 0`
    pub orthogonality: f64,
    /// `τ̃ = τᵀ`, `ρ = ρᵀ`, `ρ̃ = ρ̃ᵀ`
    pub reciprocity: f64,
    /// `τ̃τ̃† + ρρ† = I`, `ττ† + ρ̃ρ̃† = I`
    pub row_unitarity: f64,
    /// `τρ† + ρ̃τ̃† = 0`, `ρτ† + τ̃ρ̃† = 0`
    pub row_orthogonality: f64,
    /// `S†S = SS† = I`
    pub s_unitarity: f64,
    /// `ρ = ρ̃`, `τ = τ̃`; only evaluated for parity-even potentials.
    pub parity: Option<f64>,
}

impl ConstraintReport {
    pub fn max_residual(&self) -> f64 {
        [
            self.unitarity,
            self.orthogonality,
            self.reciprocity,
            self.row_unitarity,
            self.row_orthogonality,
            self.s_unitarity,
            self.parity.unwrap_or(0.0),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub fn check_constraints(a: &AmplitudeSet, parity: ParityClass) -> ConstraintReport {
    let n = a.channels();
    let id = identity(n);
    let (r, rt, t, tt) = (&a.rho, &a.rho_tilde, &a.tau, &a.tau_tilde);
    let (rh, rth, th, tth) = (r.adjoint(), rt.adjoint(), t.adjoint(), tt.adjoint());

    let unitarity = max_abs(&(&th * t + &rh * r - &id)).max(max_abs(&(&tth * tt + &rth * rt - &id)));
    let orthogonality = max_abs(&(&rh * tt + &th * rt)).max(max_abs(&(&tth * r + &rth * t)));
    let reciprocity = max_abs(&(tt - t.transpose()))
        .max(max_abs(&(r - r.transpose())))
        .max(max_abs(&(rt - rt.transpose())));
    let row_unitarity = max_abs(&(tt * &tth + r * &rh - &id)).max(max_abs(&(t * &th + rt * &rth - &id)));
    let row_orthogonality = max_abs(&(t * &rh + rt * &tth)).max(max_abs(&(r * &th + tt * &rth)));
    let s_unitarity = s_matrix(a).unitarity_residual();
    let parity = match parity {
        ParityClass::Even => Some(max_abs(&(r - rt)).max(max_abs(&(t - tt)))),
        ParityClass::None => None,
    };
    ConstraintReport {
        unitarity,
        orthogonality,
        reciprocity,
        row_unitarity,
        row_orthogonality,
        s_unitarity,
        parity,
    }
}

/// Amplitudes at `k = 0`.
///
/// Without a half-bound state the limit is exactly `ρ = ρ̃ = −I`,
/// `τ = τ̃ = 0`. Otherwise the limit is extrapolated polynomially in `k`
/// (Neville) from amplitudes at the strictly decreasing `extrapolation_ks`;
/// with the default halving sequence this is Richardson extrapolation of
/// orders one and two. The result is real by construction; imaginary parts
/// larger than [`THRESHOLD_REALNESS_TOL`] are reported as instability.
pub fn threshold_amplitudes(pot: &ValidatedPotential, extrapolation_ks: &[f64]) -> Result<AmplitudeSet> {
    threshold_amplitudes_with(pot, extrapolation_ks, &PropagationOptions::default())
}

pub fn threshold_amplitudes_with(
    pot: &ValidatedPotential,
    extrapolation_ks: &[f64],
    opts: &PropagationOptions,
) -> Result<AmplitudeSet> {
    let n = pot.channels();
    let half = crate::spectrum::half_bound_count(pot)?;
    if half.count == 0 {
        return Ok(AmplitudeSet {
            k: 0.0,
            rho: -identity(n),
            rho_tilde: -identity(n),
            tau: CMat::zeros(n, n),
            tau_tilde: CMat::zeros(n, n),
        });
    }

    if extrapolation_ks.len() < 2 {
        return Err(ScatterError::InvalidArgument(
            "threshold extrapolation needs at least two wavenumbers".into(),
        ));
    }
    if extrapolation_ks.iter().any(|&k| !(k > 0.0))
        || extrapolation_ks.windows(2).any(|w| w[1] >= w[0])
    {
        return Err(ScatterError::InvalidArgument(
            "extrapolation wavenumbers must be positive and strictly decreasing".into(),
        ));
    }

    let samples = extrapolation_ks
        .iter()
        .map(|&k| scattering_amplitudes(pot, k, opts))
        .collect::<Result<Vec<_>>>()?;

    let pick = |f: fn(&AmplitudeSet) -> &CMat| -> Result<CMat> {
        let mats: Vec<&CMat> = samples.iter().map(f).collect();
        let full = neville_at_zero(extrapolation_ks, &mats);
        let m = extrapolation_ks.len();
        let lower = neville_at_zero(&extrapolation_ks[m - 2..], &mats[m - 2..]);
        let drift = max_abs(&(&full - &lower));
        if !drift.is_finite() || drift > 1e-2 * (1.0 + max_abs(&full)) {
            return Err(ScatterError::ExtrapolationUnstable(format!(
                "successive estimates differ by {drift:e}"
            )));
        }
        let imag = full.iter().fold(0.0_f64, |acc, z| acc.max(z.im.abs()));
        if imag > THRESHOLD_REALNESS_TOL {
            return Err(ScatterError::ExtrapolationUnstable(format!(
                "threshold amplitude keeps an imaginary part of {imag:e}"
            )));
        }
        Ok(to_complex(&real_part(&full)))
    };

    Ok(AmplitudeSet {
        k: 0.0,
        rho: pick(|a| &a.rho)?,
        rho_tilde: pick(|a| &a.rho_tilde)?,
        tau: pick(|a| &a.tau)?,
        tau_tilde: pick(|a| &a.tau_tilde)?,
    })
}

/// Entrywise polynomial extrapolation to `k = 0` through all samples.
fn neville_at_zero(ks: &[f64], values: &[&CMat]) -> CMat {
    let mut table: Vec<CMat> = values.iter().map(|m| (*m).clone()).collect();
    let m = ks.len();
    for level in 1..m {
        for i in 0..(m - level) {
            let (k_lo, k_hi) = (ks[i], ks[i + level]);
            // P(0) = (0 − k_hi)·P_i(0)/(k_lo − k_hi) + (k_lo − 0)·P_{i+1}(0)/(k_lo − k_hi)
            let w_lo = -k_hi / (k_lo - k_hi);
            let w_hi = k_lo / (k_lo - k_hi);
            table[i] = &table[i] * c(w_lo) + &table[i + 1] * c(w_hi);
        }
    }
    table.swap_remove(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::PotentialSpec;
    use num_complex::Complex64;
    use crate::propagator::{fundamental_at_range, initial_state, step_constant};

    fn scalar(v: f64) -> RMat {
        RMat::from_element(1, 1, v)
    }

    #[test]
    fn free_particle_has_no_scattering() {
        let pot = PotentialSpec::new(2, 1.5).validate().unwrap();
        for k in [0.1, 1.0, 7.3] {
            let a = scattering_amplitudes(&pot, k, &PropagationOptions::default()).unwrap();
            assert!(max_abs(&a.rho) < 1e-14);
            assert!(max_abs(&(&a.tau - identity(2))) < 1e-14);
            let s = s_matrix(&a);
            assert!(max_abs(&(&s.s - identity(4))) < 1e-14);
            let rep = check_constraints(&a, ParityClass::Even);
            assert!(rep.max_residual() < 1e-14);
        }
    }

    #[test]
    fn scalar_delta_closed_form_values() {
        let a = closed_form_single_delta(&scalar(-2.0), 1.0);
        // ρ = −2/(2i + 2) = (−1 + i)/2
        assert!((a.rho[(0, 0)] - Complex64::new(-0.5, 0.5)).norm() < 1e-15);
        assert!((a.tau[(0, 0)] - (c(1.0) + a.rho[(0, 0)])).norm() < 1e-15);
        assert!(s_matrix(&a).unitarity_residual() < 1e-15);

        let zero = closed_form_single_delta(&RMat::zeros(2, 2), 0.3);
        assert_eq!(zero.rho, CMat::zeros(2, 2));
        assert_eq!(zero.tau, identity(2));
    }

    #[test]
    fn scalar_square_well_matches_textbook_transmission() {
        // Scalar well of depth v0 < 0 on [−R, R]: with q = √(k² − v0) and L = 2R,
        // τ e^{ikL} = 1 / (cos qL − i (k² + q²)/(2kq) sin qL).
        let (v0, r, k): (f64, f64, f64) = (-3.0, 0.75, 1.2);
        let q = (k * k - v0).sqrt();
        let l = 2.0 * r;
        let expected = c(1.0)
            / (c((q * l).cos()) - I * ((k * k + q * q) / (2.0 * k * q) * (q * l).sin()))
            * (-I * k * l).exp();
        let s = step_constant(&initial_state(1, c(k * k), r), &scalar(v0), r).unwrap();
        let a = amplitudes_from_fundamental(&s, k, r).unwrap();
        assert!((a.tau[(0, 0)] - expected).norm() < 1e-13);
    }

    #[test]
    fn propagated_delta_matches_closed_form() {
        let lam = RMat::from_row_slice(2, 2, &[-1.5, 0.4, 0.4, 0.7]);
        let pot = PotentialSpec::new(2, 1.0).with_delta(0.0, lam.clone()).validate().unwrap();
        for k in [0.05, 0.9, 4.0] {
            let a = scattering_amplitudes(&pot, k, &PropagationOptions::default()).unwrap();
            let b = closed_form_single_delta(&lam, k);
            assert!(max_abs(&(&a.rho - &b.rho)) < 1e-12);
            assert!(max_abs(&(&a.rho_tilde - &b.rho_tilde)) < 1e-12);
            assert!(max_abs(&(&a.tau - &b.tau)) < 1e-12);
            assert!(max_abs(&(&a.tau_tilde - &b.tau_tilde)) < 1e-12);
        }
    }

    #[test]
    fn corrupted_tau_fails_unitarity() {
        let mut a = closed_form_single_delta(&scalar(-2.0), 1.0);
        a.tau[(0, 0)] += c(1e-3);
        let rep = check_constraints(&a, ParityClass::None);
        assert!(rep.unitarity >= 1e-3 * 0.99);
    }

    #[test]
    fn nonpositive_k_is_rejected() {
        let s = fundamental_at_range(&PotentialSpec::new(1, 1.0).validate().unwrap(), c(0.0))
            .unwrap()
            .state;
        assert!(amplitudes_from_fundamental(&s, 0.0, 1.0).is_err());
        assert!(amplitudes_from_fundamental(&s, -1.0, 1.0).is_err());
    }

    #[test]
    fn negative_k_gives_conjugate_amplitudes() {
        let pot = PotentialSpec::new(2, 1.0)
            .with_segment(-1.0, 0.3, RMat::from_row_slice(2, 2, &[-2.0, 0.5, 0.5, 1.0]))
            .validate()
            .unwrap();
        let k = 0.8;
        let s = fundamental_at_range(&pot, c(k * k)).unwrap().state;
        let plus = amplitude_formulas(&s, k, 1.0).unwrap();
        let minus = amplitude_formulas(&s, -k, 1.0).unwrap();
        assert!(max_abs(&(&minus.rho.map(|z| z.conj()) - &plus.rho)) < 1e-13);
        assert!(max_abs(&(&minus.tau.map(|z| z.conj()) - &plus.tau)) < 1e-13);
        // ρ itself is not real at k > 0
        assert!(max_abs(&(&plus.rho.map(|z| z.conj()) - &plus.rho)) > 1e-3);
    }

    #[test]
    fn generic_well_threshold_is_total_reflection() {
        let pot = PotentialSpec::new(1, 1.0)
            .with_segment(-1.0, 1.0, scalar(-1.0))
            .validate()
            .unwrap();
        let a = threshold_amplitudes(&pot, &DEFAULT_THRESHOLD_KS).unwrap();
        assert_eq!(a.rho[(0, 0)], c(-1.0));
        assert_eq!(a.tau[(0, 0)], c(0.0));
    }

    #[test]
    fn neville_recovers_polynomial() {
        let ks = [0.4, 0.2, 0.1];
        let vals: Vec<CMat> = ks
            .iter()
            .map(|&k| CMat::from_element(1, 1, c(3.0 - 2.0 * k + 5.0 * k * k)))
            .collect();
        let refs: Vec<&CMat> = vals.iter().collect();
        let p0 = neville_at_zero(&ks, &refs);
        assert!((p0[(0, 0)] - c(3.0)).norm() < 1e-13);
    }
}
