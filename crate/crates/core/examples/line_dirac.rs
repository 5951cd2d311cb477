//! A point mass on the line: its moments are singular for maxent, but the
//! conditioned moments are those of the indicator `χ_[0,c]`.
//!
//! Run with `cargo run --release --example line_dirac`.

use moment_phase::conditioning::{condition_line, phase_support_bracket, PowerMoments};
use moment_phase::maxent::{fime_solve, FimeOptions, MaxentProblem};
use moment_phase::transform::{invert_line, Domain, GridFunction, DEFAULT_PAD};

fn main() -> moment_phase::Result<()> {
    let c = 2.0;
    let mut gamma = vec![0.0; 9];
    gamma[0] = c;
    let raw = PowerMoments::interval(gamma, 0.0, 0.0);

    let phi = condition_line(&raw)?;
    for (n, v) in phi.values.iter().enumerate() {
        println!(
            "a_phi({n}) = {v:<10.6} c^(n+1)/(n+1) = {:.6}",
            c.powi(n as i32 + 1) / (n as f64 + 1.0)
        );
    }

    let (end, upper) = phase_support_bracket(&raw)?.expect("interval support");
    println!("phase support ends in [{end}, {upper}]");

    let problem = MaxentProblem::from_power_moments(&phi.values, 0.0, end, 256)?;
    let sol = fime_solve(&problem, &FimeOptions::default())?;
    println!(
        "maxent: converged={} after {} updates, residual {:.1e}",
        sol.dual.converged, sol.dual.iterations, sol.dual.residual_norm
    );

    // the phase is ≈ 1 everywhere, so the recovered density vanishes: all
    // the mass sits at the left end point
    let grid = GridFunction::from_fn(Domain::Interval { a: 0.0, b: end }, 256, |x| sol.density_at(x).min(1.0))?;
    let inv = invert_line(&grid, DEFAULT_PAD)?;
    let peak = inv.density.values.iter().copied().fold(0.0, f64::max);
    println!("max density on the grid: {peak:.3e}");
    Ok(())
}
