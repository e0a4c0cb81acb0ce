use std::f64::consts::PI;

use coupled_scatter::levinson::{default_k_grid, levinson_check, phase_curve};
use coupled_scatter::models::coupled_double_delta;

fn main() {
    for a in [0.95, 1.0, 1.05] {
        let pot = coupled_double_delta(a).unwrap();
        let rep = levinson_check(&pot).unwrap();
        println!(
            "a = {a:.2}: eta(0)/pi = {:.5}, predicted {:.2} (n_b = {}, n = {}, N = {})",
            rep.eta0 / PI,
            rep.predicted / PI,
            rep.n_b,
            rep.n_half,
            rep.channels
        );
    }

    // a few points of the curve itself
    let pot = coupled_double_delta(1.05).unwrap();
    let curve = phase_curve(&pot, &default_k_grid(pot.range())).unwrap();
    for (k, eta) in curve.samples.iter().step_by(250) {
        println!("k = {k:>10.4}  eta/pi = {:+.4}", eta / PI);
    }
}
