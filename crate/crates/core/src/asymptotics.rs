//! Large-`k` forms of the fundamental solutions at `x = R`.
//!
//! Iterating the integral equations once gives
//!
//! ```text
//! φ ≈ I cos 2kR + (1/k)  ∫ sin k(R−x′) V(x′) cos k(x′+R) dx′
//! χ ≈ I sin 2kR/k + (1/k²) ∫ sin k(R−x′) V(x′) sin k(x′+R) dx′
//! ```
//!
//! With `Q = ∫‖V‖ + Σ‖λ_j‖` the Gronwall bounds are
//! `‖φ − I cos 2kR‖ ≤ (Q/k)e^{Q/k}`, `‖χ − I sin 2kR/k‖ ≤ (Q/k²)e^{Q/k}`,
//! and the first-order remainders are at most `(Q²/2k²)e^{Q/k}` and
//! `(Q²/2k³)e^{Q/k}` in the induced infinity norm.

use crate::error::{Result, ScatterError};
use crate::linalg::{c, norm_inf, norm_inf_real, to_complex, CMat};
use crate::potential::ValidatedPotential;
use crate::propagator::fundamental_at_range;

#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticSample {
    pub k: f64,
    /// `k·‖φ − I cos 2kR‖`
    pub phi_leading: f64,
    /// `k²·‖χ − I sin 2kR/k‖`
    pub chi_leading: f64,
    /// `k²·‖φ − first-order form‖`
    pub phi_remainder: f64,
    /// `k³·‖χ − first-order form‖`
    pub chi_remainder: f64,
    /// `Q e^{Q/k}`, bound for the leading columns.
    pub leading_bound: f64,
    /// `(Q²/2) e^{Q/k}`, bound for the remainder columns.
    pub remainder_bound: f64,
}

impl AsymptoticSample {
    pub fn within_bounds(&self) -> bool {
        self.phi_leading <= self.leading_bound
            && self.chi_leading <= self.leading_bound
            && self.phi_remainder <= self.remainder_bound
            && self.chi_remainder <= self.remainder_bound
    }
}

/// `Q = ∫‖V‖∞ dx + Σ‖λ_j‖∞`.
pub fn total_strength(pot: &ValidatedPotential) -> f64 {
    let seg: f64 = pot.segments().iter().map(|s| (s.hi - s.lo) * norm_inf_real(&s.matrix)).sum();
    let del: f64 = pot.deltas().iter().map(|d| norm_inf_real(&d.strength)).sum();
    seg + del
}

/// First-order forms of `φ(k, R)` and `χ(k, R)`.
pub fn first_order_forms(pot: &ValidatedPotential, k: f64) -> Result<(CMat, CMat)> {
    if pot.sampled().is_some() {
        return Err(ScatterError::InvalidPotential(
            "first-order forms need a segment/delta potential".into(),
        ));
    }
    let n = pot.channels();
    let r = pot.range();
    let (s2, c2) = (2.0 * k * r).sin_cos();
    let mut phi = CMat::identity(n, n) * c(c2);
    let mut chi = CMat::identity(n, n) * c(s2 / k);
    for s in pot.segments() {
        let (lo, hi) = (s.lo, s.hi);
        let ip = 0.5 * ((hi - lo) * s2 + ((2.0 * k * hi).cos() - (2.0 * k * lo).cos()) / (2.0 * k));
        let ic = 0.5 * (((2.0 * k * hi).sin() - (2.0 * k * lo).sin()) / (2.0 * k) - (hi - lo) * c2);
        let v = to_complex(&s.matrix);
        phi += &v * c(ip / k);
        chi += &v * c(ic / (k * k));
    }
    for d in pot.deltas() {
        let p = d.position;
        let w = (k * (r - p)).sin();
        let v = to_complex(&d.strength);
        phi += &v * c(w * (k * (p + r)).cos() / k);
        chi += &v * c(w * (k * (p + r)).sin() / (k * k));
    }
    Ok((phi, chi))
}

pub fn asymptotic_sample(pot: &ValidatedPotential, k: f64) -> Result<AsymptoticSample> {
    let n = pot.channels();
    let r = pot.range();
    let st = fundamental_at_range(pot, c(k * k))?.state;
    let (phi1, chi1) = first_order_forms(pot, k)?;
    let id = CMat::identity(n, n);
    let q = total_strength(pot);
    let growth = (q / k).exp();
    Ok(AsymptoticSample {
        k,
        phi_leading: k * norm_inf(&(&st.phi - &id * c((2.0 * k * r).cos()))),
        chi_leading: k * k * norm_inf(&(&st.chi - &id * c((2.0 * k * r).sin() / k))),
        phi_remainder: k * k * norm_inf(&(&st.phi - &phi1)),
        chi_remainder: k * k * k * norm_inf(&(&st.chi - &chi1)),
        leading_bound: q * growth,
        remainder_bound: 0.5 * q * q * growth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::RMat;
    use crate::potential::PotentialSpec;

    #[test]
    fn free_particle_is_exact() {
        let pot = PotentialSpec::new(2, 1.5).validate().unwrap();
        let s = asymptotic_sample(&pot, 40.0).unwrap();
        assert!(s.phi_leading < 1e-12 && s.chi_remainder < 1e-9);
        assert_eq!(s.leading_bound, 0.0);
    }

    #[test]
    fn barrier_within_bounds() {
        let v = RMat::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let pot = PotentialSpec::new(2, 1.0).with_segment(-1.0, 0.4, v).validate().unwrap();
        for k in [20.0, 50.0, 100.0, 200.0] {
            let s = asymptotic_sample(&pot, k).unwrap();
            assert!(s.within_bounds(), "{s:?}");
            // the first-order term accounts for most of the deviation
            assert!(s.phi_remainder / k < 0.1 * s.phi_leading.max(1e-3));
        }
    }

    #[test]
    fn single_delta_first_order_form() {
        // one delta at p: φ(R) = cos 2kR + λ sin k(R−p) cos k(p+R)/k exactly
        let pot = PotentialSpec::new(1, 1.0)
            .with_delta(0.3, RMat::from_element(1, 1, 1.7))
            .validate()
            .unwrap();
        let st = fundamental_at_range(&pot, c(9.0)).unwrap().state;
        let (phi1, chi1) = first_order_forms(&pot, 3.0).unwrap();
        assert!((st.phi[(0, 0)] - phi1[(0, 0)]).norm() < 1e-14);
        assert!((st.chi[(0, 0)] - chi1[(0, 0)]).norm() < 1e-14);
    }
}
