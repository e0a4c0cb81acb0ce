use coupled_scatter::amplitudes::{closed_form_single_delta, scattering_amplitudes};
use coupled_scatter::linalg::{max_abs, RMat};
use coupled_scatter::models::single_delta;
use coupled_scatter::PropagationOptions;

fn main() {
    let lambda = RMat::from_row_slice(2, 2, &[-1.0, 0.4, 0.4, 0.5]);
    let pot = single_delta(lambda.clone(), 1.0).unwrap();

    println!("{:>6} {:>12} {:>12} {:>10}", "k", "|rho11|", "|tau11|", "unitarity");
    for k in [0.1, 0.5, 1.0, 2.0, 5.0] {
        let a = scattering_amplitudes(&pot, k, &PropagationOptions::default()).unwrap();
        let exact = closed_form_single_delta(&lambda, k);
        assert!(max_abs(&(&a.rho - &exact.rho)) < 1e-12);
        println!(
            "{k:>6.2} {:>12.6} {:>12.6} {:>10.1e}",
            a.rho[(0, 0)].norm(),
            a.tau[(0, 0)].norm(),
            a.s_matrix().unitarity_residual()
        );
    }
}
