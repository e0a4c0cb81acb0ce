use coupled_scatter::amplitudes::{threshold_amplitudes, DEFAULT_THRESHOLD_KS};
use coupled_scatter::levinson::threshold_trace_check;
use coupled_scatter::models::coupled_double_delta;

fn main() {
    for a in [0.95, 0.99, 1.0, 1.01, 1.05] {
        let pot = coupled_double_delta(a).unwrap();
        let t = threshold_amplitudes(&pot, &DEFAULT_THRESHOLD_KS).unwrap();
        let tr = threshold_trace_check(&pot).unwrap();
        println!(
            "a = {a:.2}  rho11(0) = {:+.6}  Tr[rho(0) + rho~(0)] = {:+.6}  n = {}",
            t.rho[(0, 0)].re,
            tr.trace,
            tr.n_half
        );
    }
}
