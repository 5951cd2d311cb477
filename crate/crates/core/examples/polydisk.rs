//! Multivariate conditioning through generating series.
//!
//! Run with `cargo run --example polydisk`.

use moment_phase::conditioning::{
    condition_polydisk, polydisk_generating_series, unconditioned_polydisk, MultiMoments,
};

fn main() -> moment_phase::Result<()> {
    let mu = MultiMoments::from_atoms(&[(1.0, vec![0.5, 0.2]), (0.5, vec![0.1, 0.7])], 3)?;
    let b = polydisk_generating_series(&mu)?;
    let phi = condition_polydisk(&mu)?;
    println!("{:>8} {:>22} {:>22}", "index", "B", "phase moment");
    for ((idx, gb), (_, p)) in b.iter().zip(phi.iter()) {
        println!("{:>8} {:>22.6} {:>22.6}", format!("{:?}", idx.entries()), gb, p);
    }
    let back = unconditioned_polydisk(&phi)?;
    let err = back
        .iter()
        .zip(b.iter())
        .map(|((_, x), (_, y))| (x - y).norm())
        .fold(0.0, f64::max);
    println!("round trip error {err:.1e}");
    Ok(())
}
