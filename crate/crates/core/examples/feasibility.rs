//! Hankel feasibility, one-step moment extensions and the recurrence for
//! exponential weights.
//!
//! Run with `cargo run --release --example feasibility`.

use moment_phase::conditioning::{extend_exp_weight, hankel_feasibility, max_extension, min_extension, PowerMoments};
use moment_phase::maxent::{fime_solve, FimeOptions, MaxentProblem};

fn main() -> moment_phase::Result<()> {
    for values in [vec![1.0, 1.0, 2.0, 6.0], vec![1.0, 0.5, 0.25], vec![1.0, 0.0, -1.0]] {
        println!(
            "{values:?}: {:?}",
            hankel_feasibility(&PowerMoments::half_line(values.clone()))
        );
    }

    let gamma = PowerMoments::half_line(vec![1.0, 1.0, 2.0, 6.0]);
    println!(
        "smallest admissible next moment of (1, 1, 2, 6): {}",
        min_extension(&gamma)?
    );

    let uniform = PowerMoments::interval(vec![1.0, 0.5, 0.25 + 1.0 / 12.0], 0.0, 1.0);
    let sol = fime_solve(
        &MaxentProblem::from_power_moments(&uniform.values, 0.0, 1.0, 128)?,
        &FimeOptions::default(),
    )?;
    println!(
        "next moment of the maxent density for (1, 1/2, 1/3): {:.6} (uniform: 0.25)",
        max_extension(&uniform, &sol)?
    );

    // exp(−x) on [0, ∞): γ_k = k!
    let g = extend_exp_weight(&[0.0, -1.0], &[1.0], 10)?;
    println!("moments of exp(-x): {:?}", g.values);
    Ok(())
}
