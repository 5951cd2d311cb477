//! Powers, logarithms and exponentials of truncated power series.
//!
//! Run with `cargo run --example series_powers`.

use moment_phase::series::{
    accumulate_powers, neg_log_one_minus_weights, series_exp, series_pow, series_pow_zero_free, FormalSeries,
};
use num_complex::Complex64;

fn show(name: &str, s: &FormalSeries) {
    let parts: Vec<String> = s
        .iter()
        .filter(|(_, c)| c.norm() > 0.0)
        .map(|(i, c)| format!("{:?}:{}", i.entries(), c.re))
        .collect();
    println!("{name:>16} = {}", parts.join("  "));
}

fn main() -> moment_phase::Result<()> {
    // (1 + 2z + 3z²)³ up to z⁴ by the Miller-Nakos recursion
    let a = FormalSeries::univariate_real(4, &[1.0, 2.0, 3.0]);
    show("(1+2z+3z²)^3", &series_pow(&a, 3)?);

    // zero free term: (z + z²)² keeps only degrees >= 2
    let s = FormalSeries::univariate_real(5, &[0.0, 1.0, 1.0]);
    show("(z+z²)^2", &series_pow_zero_free(&s, 2)?);

    // −log(1 − S) = Σ S^k/k, then exp brings back 1/(1 − S)
    let l = accumulate_powers(&s, &neg_log_one_minus_weights(5))?;
    show("-log(1-z-z²)", &l);
    show("exp of that", &series_exp(&l)?);

    // two variables: (1 + x + y)² to total degree 2
    let b = FormalSeries::from_terms(
        2,
        2,
        [
            (vec![0, 0], Complex64::new(1.0, 0.0)),
            (vec![1, 0], Complex64::new(1.0, 0.0)),
            (vec![0, 1], Complex64::new(1.0, 0.0)),
        ],
    )?;
    show("(1+x+y)^2", &series_pow(&b, 2)?);
    Ok(())
}
