//! Why conditioning is needed: raw moments of a point mass have no
//! maximum-entropy density, the conditioned ones do.
//!
//! Run with `cargo run --release --example negative_control`.

use moment_phase::conditioning::{condition_line, PowerMoments};
use moment_phase::maxent::{fime_solve, FimeOptions, MaxentProblem};

fn main() -> moment_phase::Result<()> {
    let raw = PowerMoments::interval(vec![1.0, 0.0, 0.0, 0.0], 0.0, 1.0);
    let opts = FimeOptions::default();
    let direct = fime_solve(&MaxentProblem::from_power_moments(&raw.values, 0.0, 1.0, 256)?, &opts)?;
    println!(
        "raw moments:         converged={} residual {:.2e} after {} updates",
        direct.dual.converged, direct.dual.residual_norm, direct.dual.iterations
    );
    println!("  alpha grows without bound: {:.1?}", direct.dual.alpha);

    let phi = condition_line(&raw)?;
    let cond = fime_solve(&MaxentProblem::from_power_moments(&phi.values, 0.0, 1.0, 256)?, &opts)?;
    println!(
        "conditioned moments: converged={} residual {:.2e} after {} updates",
        cond.dual.converged, cond.dual.residual_norm, cond.dual.iterations
    );
    Ok(())
}
