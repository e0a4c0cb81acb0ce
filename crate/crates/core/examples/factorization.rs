use coupled_scatter::amplitudes::{closed_form_double_delta, closed_form_single_delta};
use coupled_scatter::factorization::{
    amplitude_distance, amplitudes_from_factor, compose_factors, factor_from_amplitudes, translate_amplitudes,
};
use coupled_scatter::models::coupled_pair;

fn main() {
    let (l, lt) = coupled_pair();
    let a = 1.0;
    for k in [0.05, 0.5, 2.0, 10.0] {
        // each delta sits at the origin in its own frame; move them to ∓a
        let left = translate_amplitudes(&closed_form_single_delta(&l, k), -a);
        let right = translate_amplitudes(&closed_form_single_delta(&lt, k), a);
        let f = compose_factors(&[factor_from_amplitudes(&left).unwrap(), factor_from_amplitudes(&right).unwrap()]).unwrap();
        let composed = amplitudes_from_factor(&f).unwrap();
        let exact = closed_form_double_delta(&l, &lt, a, k).unwrap();

        let g = compose_factors(&[factor_from_amplitudes(&right).unwrap(), factor_from_amplitudes(&left).unwrap()]).unwrap();
        let swapped = amplitudes_from_factor(&g).unwrap();
        println!(
            "k = {k:>5.2}  |composed - closed form| = {:.1e}  |swapped order - closed form| = {:.1e}",
            amplitude_distance(&composed, &exact),
            amplitude_distance(&swapped, &exact)
        );
    }
}
