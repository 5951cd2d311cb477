//! The maximum-entropy solver on uniform moments, with its convergence trace.
//!
//! Run with `cargo run --release --example fime_uniform`.

use moment_phase::maxent::{fime_solve, FimeOptions, Init, MaxentProblem};

fn main() -> moment_phase::Result<()> {
    let moments: Vec<f64> = (0..5).map(|k| 1.0 / (k as f64 + 1.0)).collect();
    let problem = MaxentProblem::from_power_moments(&moments, 0.0, 1.0, 201)?;

    for init in [Init::Zero, Init::Random { seed: 7 }] {
        let opts = FimeOptions {
            init,
            trace: true,
            ..Default::default()
        };
        let sol = fime_solve(&problem, &opts)?;
        println!(
            "{init:?}: converged={} in {} updates",
            sol.dual.converged, sol.dual.iterations
        );
        for p in sol.trace.iter().step_by((sol.trace.len() / 6).max(1)) {
            println!(
                "  {:>6} updates  residual {:.3e}  dual {:.9}",
                p.updates, p.residual, p.dual_objective
            );
        }
        let sup = sol.density.iter().map(|d| (d - 1.0).abs()).fold(0.0, f64::max);
        println!("  sup |p - 1| at the nodes: {sup:.2e}");
        println!("  alpha = {:.4?}", sol.dual.alpha);
    }
    Ok(())
}
