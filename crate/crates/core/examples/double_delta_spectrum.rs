use coupled_scatter::models::coupled_double_delta;
use coupled_scatter::spectrum::{default_spectrum, reduced_determinant};

fn main() {
    for a in [0.95, 1.0, 1.05] {
        let pot = coupled_double_delta(a).unwrap();
        let rep = default_spectrum(&pot).unwrap();
        println!("a = {a:.2}: n_b = {}, n = {}", rep.n_b, rep.n_half);
        for s in &rep.bound_states {
            println!("  alpha = {:.6}  E = {:.6}  mult = {}", s.alpha, s.energy(), s.multiplicity);
        }
    }

    // the determinant function near the shallow root at a = 1.05
    let pot = coupled_double_delta(1.05).unwrap();
    for i in 0..=6 {
        let alpha = 0.01 + 0.005 * i as f64;
        println!("f({alpha:.3}) = {:+.3e}", reduced_determinant(&pot, alpha).unwrap());
    }
}
