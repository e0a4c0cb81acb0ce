use coupled_scatter::amplitudes::scattering_amplitudes;
use coupled_scatter::linalg::RMat;
use coupled_scatter::models::constant_block;
use coupled_scatter::PropagationOptions;

fn main() {
    // N = 1 barrier of height 4 and width 2: compare with the textbook result
    let pot = constant_block(RMat::from_element(1, 1, 4.0), 1.0).unwrap();
    for k in [0.5, 1.5, 2.5, 3.0] {
        let a = scattering_amplitudes(&pot, k, &PropagationOptions::default()).unwrap();
        let t = a.tau[(0, 0)].norm_sqr();
        let q2 = k * k - 4.0;
        let textbook = if q2 < 0.0 {
            let kap = (-q2).sqrt();
            1.0 / (1.0 + (4.0f64).powi(2) * (2.0 * kap).sinh().powi(2) / (4.0 * k * k * kap * kap))
        } else {
            let q = q2.sqrt();
            1.0 / (1.0 + (4.0f64).powi(2) * (2.0 * q).sin().powi(2) / (4.0 * k * k * q * q))
        };
        println!("k = {k:.2}  T = {t:.8}  textbook = {textbook:.8}");
    }

    // coupled barrier, exact propagator vs RK4
    let v = RMat::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
    let pot = constant_block(v, 1.0).unwrap();
    let exact = scattering_amplitudes(&pot, 1.2, &PropagationOptions::default()).unwrap();
    let rk4 = scattering_amplitudes(&pot, 1.2, &PropagationOptions::ode(Some(1e-3))).unwrap();
    println!("coupled: |tau12| = {:.10} (exact) {:.10} (RK4)", exact.tau[(0, 1)].norm(), rk4.tau[(0, 1)].norm());
}
