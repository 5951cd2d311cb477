//! Trigonometric moments on the circle: conditioning of a point mass, and a
//! full reconstruction of a smoothed one.
//!
//! Run with `cargo run --release --example circle_point_mass`.

use std::f64::consts::PI;

use moment_phase::conditioning::{condition_circle, TrigMoments};
use moment_phase::formats::grid_from_csv;
use moment_phase::pipeline::{run_pipeline, PipelineConfig, PipelineKind};
use num_complex::Complex64;

fn main() -> moment_phase::Result<()> {
    let theta0 = 0.7;
    let tau: Vec<Complex64> = (0..=6)
        .map(|n| Complex64::from_polar(1.0, -(n as f64) * theta0))
        .collect();
    let phi = condition_circle(&TrigMoments::new(tau))?;
    for (k, t) in phi.values.iter().enumerate() {
        println!("tau_phi({k}) = {t:.6}");
    }

    // wrapped Gaussian of mass m around θ0
    let (m, sigma) = (1.0, 0.5);
    let values: Vec<[f64; 2]> = (0..=10)
        .map(|n| {
            let n = n as f64;
            let r = m / (2.0 * PI) * (-0.5 * n * n * sigma * sigma).exp();
            [r * (n * theta0).cos(), -r * (n * theta0).sin()]
        })
        .collect();
    let input = serde_json::json!({"kind": "trig", "values": values});
    let config = PipelineConfig {
        pipeline: PipelineKind::Circle,
        grid: 256,
        max_sweeps: 1_000_000,
        clip_phase: true,
        ..Default::default()
    };
    let out = run_pipeline(&config, input.to_string().as_bytes())?;
    let rho = grid_from_csv(
        &out.artifacts
            .iter()
            .find(|a| a.name == "density.csv")
            .expect("density")
            .contents,
    )?;
    let (peak, at) = rho
        .values
        .iter()
        .zip(rho.points())
        .fold((f64::MIN, 0.0), |acc, (v, t)| if *v > acc.0 { (*v, t) } else { acc });
    println!(
        "status {:?}: mass {:.4}, peak {peak:.4} at θ = {at:.3}",
        out.report.status,
        rho.integral()
    );
    Ok(())
}
