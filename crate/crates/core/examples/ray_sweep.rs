//! Parallel sweep over directions for a 3D measure; every ray keeps the
//! total mass as its zeroth phase moment.
//!
//! Run with `cargo run --release --example ray_sweep`.

use moment_phase::conditioning::MultiMoments;
use moment_phase::maxent::FimeOptions;
use moment_phase::raybeam::{sweep_rays, CutoffRule, Normalization, RayDirection, RayOptions};

fn main() -> moment_phase::Result<()> {
    // uniform on the unit cube: γ_α = Π 1/(α_i + 1)
    let order = 6;
    let mut values = std::collections::BTreeMap::new();
    for d in 0..=order {
        for idx in moment_phase::series::indices_of_degree(3, d) {
            values.insert(
                idx.clone(),
                idx.entries().iter().map(|e| 1.0 / (*e as f64 + 1.0)).product(),
            );
        }
    }
    let gamma = MultiMoments::new(3, order, values)?;
    let directions = [[1.0, 1.0, 1.0], [1.0, 2.0, 3.0], [0.5, 0.5, 2.0], [3.0, 1.0, 0.2]]
        .iter()
        .map(|y| RayDirection::new(y.to_vec(), Normalization::L2))
        .collect::<moment_phase::Result<Vec<_>>>()?;
    let opts = RayOptions {
        order,
        grid: 512,
        cutoff: CutoffRule::SupportBound,
        fime: FimeOptions {
            max_updates: 1_000_000,
            ..Default::default()
        },
        ..Default::default()
    };
    for slice in sweep_rays(&gamma, &directions, &opts) {
        let s = slice?;
        let peak = s.radon_values.values.iter().copied().fold(f64::MIN, f64::max);
        println!(
            "y = {:.3?}: c_0 = {:.12}, T = {:.3}, converged={}, slice peak {peak:.3}",
            s.direction.y, s.phase_moments[0], s.cutoff, s.solver.converged
        );
    }
    Ok(())
}
