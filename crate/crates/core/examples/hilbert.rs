//! The two line Hilbert kernels and the circle transform.
//!
//! Run with `cargo run --release --example hilbert`.

use std::f64::consts::PI;

use moment_phase::transform::{hilbert_circle, hilbert_line_with, Domain, GridFunction, LineKernel};

fn max_err(f: &GridFunction, exact: impl Fn(f64) -> f64, skip: impl Fn(f64) -> bool) -> f64 {
    f.points()
        .iter()
        .zip(&f.values)
        .filter(|(x, _)| !skip(**x))
        .map(|(x, v)| (v - exact(*x)).abs())
        .fold(0.0, f64::max)
}

fn main() -> moment_phase::Result<()> {
    let step = GridFunction::from_fn(Domain::Interval { a: -1.0, b: 3.0 }, 1024, |x| {
        if (0.0..1.0).contains(&x) {
            1.0
        } else {
            0.0
        }
    })?;
    let packet = GridFunction::from_fn(Domain::Interval { a: -20.0, b: 20.0 }, 1024, |x| {
        (8.0 * x).cos() * (-x * x / 2.0).exp()
    })?;
    let near_jump = |x: f64| x.abs() < 0.02 || (x - 1.0).abs() < 0.02;
    for kernel in [LineKernel::PiecewiseConstant, LineKernel::Spectral] {
        let hs = hilbert_line_with(&step, 4, kernel)?;
        let hp = hilbert_line_with(&packet, 4, kernel)?;
        println!(
            "{kernel:?}: step error {:.1e}, packet error {:.1e}",
            max_err(&hs, |x| ((1.0 - x) / x).abs().ln() / PI, near_jump),
            max_err(&hp, |x| -(8.0 * x).sin() * (-x * x / 2.0).exp(), |_| false),
        );
    }

    let c = GridFunction::from_fn(Domain::Circle, 16, |t| t.cos())?;
    let h = hilbert_circle(&c)?;
    println!("circle: H cos + sin = {:.1e}", max_err(&h, |t| -t.sin(), |_| false));
    Ok(())
}
