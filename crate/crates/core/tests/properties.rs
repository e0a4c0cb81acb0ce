use coupled_scatter::amplitudes::{closed_form_single_delta, scattering_amplitudes};
use coupled_scatter::factorization::{
    amplitude_distance, amplitudes_from_factor, factor_from_amplitudes, translate_amplitudes,
};
use coupled_scatter::linalg::{c, RMat};
use coupled_scatter::potential::{orthogonal_diagonalize, ParityClass};
use coupled_scatter::propagator::{fundamental_at_range, PropagationOptions};
use coupled_scatter::PotentialSpec;
use proptest::prelude::*;

fn symmetric(n: usize) -> impl Strategy<Value = RMat> {
    prop::collection::vec(-3.0..3.0f64, n * n).prop_map(move |v| {
        let m = RMat::from_row_slice(n, n, &v);
        (&m + m.transpose()) * 0.5
    })
}

fn two_segment(a: RMat, b: RMat, split: f64) -> coupled_scatter::ValidatedPotential {
    PotentialSpec::new(a.nrows(), 1.0)
        .with_segment(-1.0, split, a)
        .with_segment(split, 1.0, b)
        .validate()
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn diagonalization_reconstructs(m in symmetric(3)) {
        let (u, d) = orthogonal_diagonalize(&m).unwrap();
        let back = &u * RMat::from_diagonal(&nalgebra::DVector::from_vec(d.clone())) * u.transpose();
        prop_assert!((back - &m).amax() < 1e-12);
        prop_assert!((u.transpose() * &u - RMat::identity(3, 3)).amax() < 1e-12);
        prop_assert!(d.windows(2).all(|w| w[0].abs() >= w[1].abs()));
    }

    #[test]
    fn delta_constraints_hold(l in symmetric(3), k in 0.05..20.0f64) {
        let a = closed_form_single_delta(&l, k);
        prop_assert!(a.constraints(ParityClass::Even).max_residual() < 1e-10);
    }

    #[test]
    fn segment_constraints_and_det(a in symmetric(2), b in symmetric(2), split in -0.8..0.8f64, k in 0.1..10.0f64) {
        let pot = two_segment(a, b, split);
        let amp = scattering_amplitudes(&pot, k, &PropagationOptions::default()).unwrap();
        let rep = amp.constraints(ParityClass::None);
        prop_assert!(rep.max_residual() < 1e-10, "{:?}", rep);
        let w = fundamental_at_range(&pot, c(k * k)).unwrap();
        prop_assert!((w.state.det_w() - c(1.0)).norm() < 1e-8);
        prop_assert!(w.state.wronskian_defect() < 1e-8);
    }

    #[test]
    fn factor_round_trip(a in symmetric(2), b in symmetric(2), split in -0.8..0.8f64, k in 0.2..10.0f64) {
        let amp = scattering_amplitudes(&two_segment(a, b, split), k, &PropagationOptions::default()).unwrap();
        let back = amplitudes_from_factor(&factor_from_amplitudes(&amp).unwrap()).unwrap();
        prop_assert!(amplitude_distance(&amp, &back) < 1e-9);
    }

    #[test]
    fn translation_matches_shifted_potential(a in symmetric(2), k in 0.2..5.0f64, d in -2.0..2.0f64) {
        let pot = PotentialSpec::new(2, 3.0).with_segment(-0.5, 0.5, a).validate().unwrap();
        let opts = PropagationOptions::default();
        let amp = scattering_amplitudes(&pot, k, &opts).unwrap();
        let moved = scattering_amplitudes(&pot.translated(d).unwrap(), k, &opts).unwrap();
        prop_assert!(amplitude_distance(&translate_amplitudes(&amp, d), &moved) < 1e-9);
        let there_and_back = translate_amplitudes(&translate_amplitudes(&amp, d), -d);
        prop_assert!(amplitude_distance(&there_and_back, &amp) < 1e-13);
    }
}
