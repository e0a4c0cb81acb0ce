use coupled_scatter::amplitudes::scattering_amplitudes;
use coupled_scatter::factorization::{amplitude_distance, commuting_class_check, periodic_compose, periodic_potential};
use coupled_scatter::linalg::RMat;
use coupled_scatter::models::single_delta;
use coupled_scatter::PropagationOptions;

fn main() {
    let m = RMat::from_row_slice(2, 2, &[1.0, 0.5, 0.5, -1.0]);
    let cell = single_delta(&m * -1.2, 0.5).unwrap();
    println!("commuting class: {}", commuting_class_check(&cell));

    let k = 1.1;
    for copies in [1, 2, 5, 10, 20] {
        let fast = periodic_compose(&cell, copies, 1.0, k).unwrap();
        let full = periodic_potential(&cell, copies, 1.0).unwrap();
        let direct = scattering_amplitudes(&full, k, &PropagationOptions::default()).unwrap();
        let t = fast.tau.iter().map(|z| z.norm_sqr()).sum::<f64>() / 2.0;
        println!(
            "{copies:>3} cells: mean transmission {t:.6}, |composed - propagated| = {:.1e}",
            amplitude_distance(&fast, &direct)
        );
    }
}
