//! End to end on the measure whose phase is `½χ_[0,1]`: the density is
//! `(1/π) sqrt((1−x)/x)`.
//!
//! Run with `cargo run --release --example beta_jump`.

use std::f64::consts::PI;

use moment_phase::conditioning::{unconditioned_line, PowerMoments};
use moment_phase::formats::grid_from_csv;
use moment_phase::pipeline::{run_pipeline, PipelineConfig};

fn main() -> moment_phase::Result<()> {
    let a_phi: Vec<f64> = (0..=12).map(|n| 0.5 / (n as f64 + 1.0)).collect();
    let a_mu = unconditioned_line(&PowerMoments::half_line(a_phi))?;
    println!("power moments: {:.5?}", a_mu.values);

    let input = serde_json::json!({"kind": "power", "support": {"interval": [0.0, 1.0]}, "values": a_mu.values});
    let config = PipelineConfig {
        max_sweeps: 2_000_000,
        ..Default::default()
    };
    let out = run_pipeline(&config, input.to_string().as_bytes())?;
    println!(
        "status {:?}, phase domain {:?}",
        out.report.status, out.report.phase_interval
    );

    let csv = &out
        .artifacts
        .iter()
        .find(|a| a.name == "density.csv")
        .expect("density")
        .contents;
    let rho = grid_from_csv(csv)?;
    println!("{:>8} {:>12} {:>12}", "x", "recovered", "exact");
    for (x, r) in rho.points().iter().zip(&rho.values).step_by(128) {
        println!("{x:>8.4} {r:>12.6} {:>12.6}", ((1.0 - x) / x).sqrt() / PI);
    }
    println!("mass {:.5}", rho.integral());
    Ok(())
}
