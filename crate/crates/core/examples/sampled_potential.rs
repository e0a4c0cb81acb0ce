use coupled_scatter::amplitudes::scattering_amplitudes;
use coupled_scatter::levinson::{levinson_check_on, log_grid_descending};
use coupled_scatter::linalg::RMat;
use coupled_scatter::propagator::{fundamental_at_range_with, PropagationOptions};
use coupled_scatter::spectrum::default_spectrum;
use coupled_scatter::PotentialSpec;

fn main() {
    // smooth coupled well that vanishes at x = ±R
    let r = 2.0;
    let m = RMat::from_row_slice(2, 2, &[-2.0, 0.6, 0.6, -0.5]);
    let pot = PotentialSpec::new(2, r)
        .with_sampled(2e-3, move |x| {
            let u = 1.0 - (x / r).powi(2);
            &m * (u * u)
        })
        .validate()
        .unwrap();

    let opts = PropagationOptions::default();
    for k in [0.2, 1.0, 4.0] {
        let rep = fundamental_at_range_with(&pot, (k * k).into(), &opts).unwrap();
        let a = scattering_amplitudes(&pot, k, &opts).unwrap();
        println!(
            "k = {k:.1}: RK4 steps {}, max |det W - 1| = {:.1e}, unitarity {:.1e}",
            rep.steps,
            rep.max_det_deviation,
            a.s_matrix().unitarity_residual()
        );
    }

    let spec = default_spectrum(&pot).unwrap();
    for s in &spec.bound_states {
        println!("bound state alpha = {:.6}", s.alpha);
    }
    // this well is too deep for the default anchor at k = 100/(2R) = 25,
    // where eta is still about 0.11; anchor further out
    let grid = log_grid_descending(60.0, 1e-3, 800);
    let lev = levinson_check_on(&pot, &grid).unwrap();
    println!("eta(0) = {:.6}, predicted {:.6}", lev.eta0, lev.predicted);
}
