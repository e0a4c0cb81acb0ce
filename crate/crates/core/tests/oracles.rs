//! Library results against independent scalar formulas.

use coupled_scatter::amplitudes::{closed_form_single_delta, scattering_amplitudes};
use coupled_scatter::linalg::{max_abs, CMat, RMat};
use coupled_scatter::models::{constant_block, double_delta, single_delta};
use coupled_scatter::propagator::PropagationOptions;
use coupled_scatter::spectrum::default_spectrum;
use num_complex::Complex64;

fn i() -> Complex64 {
    Complex64::new(0.0, 1.0)
}

/// Plane-wave transmission/reflection of a scalar step `V0` on `[−a, a]`.
fn square_scalar(v0: f64, a: f64, k: f64) -> (Complex64, Complex64) {
    let q = Complex64::new(k * k - v0, 0.0).sqrt();
    let kk = Complex64::new(k, 0.0);
    let (s, cs) = ((2.0 * a * q).sin(), (2.0 * a * q).cos());
    let den = cs - i() * (kk * kk + q * q) / (2.0 * kk * q) * s;
    let phase = (-2.0 * i() * k * a).exp();
    let t = phase / den;
    let r = i() * (q * q - kk * kk) / (2.0 * kk * q) * s * phase / den;
    (t, r)
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    assert!(f(lo) * f(hi) < 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(lo) * f(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn scalar_delta_matches_textbook() {
    for (lam, k) in [(-2.0, 0.3), (-2.0, 1.0), (3.0, 0.7), (0.5, 5.0)] {
        let a = closed_form_single_delta(&RMat::from_element(1, 1, lam), k);
        let den = 2.0 * i() * k - lam;
        let rho = lam / den;
        let tau = 2.0 * i() * k / den;
        assert!((a.rho[(0, 0)] - rho).norm() < 1e-14);
        assert!((a.tau[(0, 0)] - tau).norm() < 1e-14);

        let pot = single_delta(RMat::from_element(1, 1, lam), 1.0).unwrap();
        let p = scattering_amplitudes(&pot, k, &PropagationOptions::default()).unwrap();
        assert!((p.rho[(0, 0)] - rho).norm() < 1e-12);
        assert!((p.tau[(0, 0)] - tau).norm() < 1e-12);
    }
}

#[test]
fn scalar_square_well_and_barrier() {
    // below and above the barrier top, and a well
    for (v0, k) in [(2.0, 0.8), (2.0, 2.5), (-3.0, 0.4), (-3.0, 4.0)] {
        let pot = constant_block(RMat::from_element(1, 1, v0), 1.0).unwrap();
        let (t, r) = square_scalar(v0, 1.0, k);
        for opts in [PropagationOptions::default(), PropagationOptions::ode(Some(1e-3))] {
            let a = scattering_amplitudes(&pot, k, &opts).unwrap();
            assert!((a.tau[(0, 0)] - t).norm() < 1e-8, "v0={v0} k={k} tau {} vs {t}", a.tau[(0, 0)]);
            assert!((a.rho[(0, 0)] - r).norm() < 1e-8, "v0={v0} k={k} rho {} vs {r}", a.rho[(0, 0)]);
            assert!((a.rho_tilde[(0, 0)] - r).norm() < 1e-8);
        }
    }
}

#[test]
fn decoupled_channels_are_independent() {
    let v = RMat::from_diagonal(&nalgebra::DVector::from_vec(vec![1.5, -2.0]));
    let pot = constant_block(v, 1.0).unwrap();
    let a = scattering_amplitudes(&pot, 1.3, &PropagationOptions::default()).unwrap();
    for (ch, v0) in [(0, 1.5), (1, -2.0)] {
        let (t, r) = square_scalar(v0, 1.0, 1.3);
        assert!((a.tau[(ch, ch)] - t).norm() < 1e-12);
        assert!((a.rho[(ch, ch)] - r).norm() < 1e-12);
    }
    assert!(a.tau[(0, 1)].norm() < 1e-14 && a.rho[(1, 0)].norm() < 1e-14);
}

#[test]
fn rotated_channels_match_scalar_eigenchannels() {
    // V = U diag(v) Uᵀ on a segment: amplitudes are U diag(t_i) Uᵀ
    let (c, s) = (0.6_f64, 0.8_f64);
    let u = RMat::from_row_slice(2, 2, &[c, -s, s, c]);
    let d = [2.0, -1.0];
    let v = &u * RMat::from_diagonal(&nalgebra::DVector::from_vec(d.to_vec())) * u.transpose();
    let pot = constant_block(v, 1.0).unwrap();
    let k = 0.9;
    let a = scattering_amplitudes(&pot, k, &PropagationOptions::default()).unwrap();
    let uc = u.map(|x| Complex64::new(x, 0.0));
    let (t0, r0) = square_scalar(d[0], 1.0, k);
    let (t1, r1) = square_scalar(d[1], 1.0, k);
    let tau = &uc * CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![t0, t1])) * uc.transpose();
    let rho = &uc * CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![r0, r1])) * uc.transpose();
    assert!(max_abs(&(&a.tau - tau)) < 1e-12);
    assert!(max_abs(&(&a.rho - rho)) < 1e-12);
}

#[test]
fn scalar_double_delta_bound_states() {
    // strength λ at ±a: even 2α = −λ(1 + e^{−2αa}), odd 2α = −λ(1 − e^{−2αa})
    let (lam, a) = (-3.0, 1.0);
    let even = bisect(|x| 2.0 * x + lam * (1.0 + (-2.0 * x * a).exp()), 1e-6, 10.0);
    let odd = bisect(|x| 2.0 * x + lam * (1.0 - (-2.0 * x * a).exp()), 0.1, 10.0);
    let m = RMat::from_element(1, 1, lam);
    let pot = double_delta(m.clone(), m, a).unwrap();
    let spec = default_spectrum(&pot).unwrap();
    let alphas: Vec<f64> = spec.bound_states.iter().map(|s| s.alpha).collect();
    assert_eq!(alphas.len(), 2, "{alphas:?}");
    assert!((alphas[0] - odd).abs() < 1e-8, "{alphas:?} vs odd {odd}");
    assert!((alphas[1] - even).abs() < 1e-8, "{alphas:?} vs even {even}");
}

#[test]
fn scalar_square_well_bound_states() {
    // depth V0 on [−1, 1]: even κ = q tan q, odd κ = −q cot q, q² + κ² = V0
    let v0 = 6.0; // √V0 < π: exactly one even and one odd state
    let kappa = |q: f64| (v0 - q * q).sqrt();
    let mut expected = Vec::new();
    let w = v0.sqrt();
    let even = |q: f64| q * q.tan() - kappa(q);
    let odd = |q: f64| -q / q.tan() - kappa(q);
    expected.push(kappa(bisect(even, 1e-6, (std::f64::consts::FRAC_PI_2 - 1e-9).min(w))));
    expected.push(kappa(bisect(odd, std::f64::consts::FRAC_PI_2 + 1e-9, w - 1e-12)));
    let pot = constant_block(RMat::from_element(1, 1, -v0), 1.0).unwrap();
    let spec = default_spectrum(&pot).unwrap();
    let mut got: Vec<f64> = spec.bound_states.iter().map(|s| s.alpha).collect();
    got.sort_by(|a, b| b.partial_cmp(a).unwrap());
    assert_eq!(got.len(), 2, "{got:?}");
    for (g, e) in got.iter().zip(&expected) {
        assert!((g - e).abs() < 1e-8, "{got:?} vs {expected:?}");
    }
}
