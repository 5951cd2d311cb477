//! A Radon slice of the uniform density on the unit square along p = (1, 1),
//! from the exact phase and from moments with each cutoff rule.
//!
//! Run with `cargo run --release --example radon_slice`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use moment_phase::conditioning::MultiMoments;
use moment_phase::maxent::FimeOptions;
use moment_phase::raybeam::{radon_slice, reconstruct_ray, CutoffRule, Normalization, RayDirection, RayOptions};
use moment_phase::series::indices_of_degree;
use moment_phase::transform::{Domain, GridFunction};

fn triangle(t: f64) -> f64 {
    (1.0 - (t - 1.0).abs()).max(0.0)
}

fn slice_error(r: &GridFunction) -> f64 {
    r.points()
        .iter()
        .zip(&r.values)
        .filter(|(t, _)| **t > 0.1 && **t < 1.9)
        .map(|(t, v)| (v - triangle(*t)).abs())
        .fold(0.0, f64::max)
}

fn main() -> moment_phase::Result<()> {
    // closed-form phase of the push-forward: (1/π) arg(1 + Cμ_p)
    let cauchy_re = |x: f64| x * ((1.0 - x) / x).abs().ln() + (2.0 - x) * ((2.0 - x) / (1.0 - x)).abs().ln();
    let xi = GridFunction::from_fn(Domain::Interval { a: 0.0, b: 4.0 }, 1024, |x| {
        (PI * triangle(x)).atan2(1.0 + cauchy_re(x)).rem_euclid(2.0 * PI) / PI
    })?;
    println!("exact phase: L∞ error {:.2e}", slice_error(&radon_slice(&xi, 4, 8)?));

    let order = 12;
    let mut values = BTreeMap::new();
    for d in 0..=order {
        for idx in indices_of_degree(2, d) {
            let e = idx.entries();
            values.insert(idx.clone(), 1.0 / ((e[0] + 1) * (e[1] + 1)) as f64);
        }
    }
    let gamma = MultiMoments::new(2, order, values)?;
    let p = RayDirection::new(vec![1.0, 1.0], Normalization::None)?;
    for cutoff in [CutoffRule::Heuristic, CutoffRule::SupportBound, CutoffRule::Fixed(2.18)] {
        let opts = RayOptions {
            order,
            cutoff,
            fime: FimeOptions {
                max_updates: 2_000_000,
                ..Default::default()
            },
            ..Default::default()
        };
        let s = reconstruct_ray(&gamma, &p, &opts)?;
        println!(
            "{cutoff:?}: T = {:.4}, converged={}, L∞ error {:.3}",
            s.cutoff,
            s.solver.converged,
            slice_error(&s.radon_values)
        );
    }
    Ok(())
}
