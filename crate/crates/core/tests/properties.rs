//! Randomized invariants checked against independent oracles.

mod common;

use std::collections::HashMap;

use moment_phase::conditioning::*;
use moment_phase::raybeam::*;
use moment_phase::series::{indices_of_degree, series_pow, FormalSeries, MultiIndex};
use moment_phase::transform::*;
use num_complex::Complex64;
use proptest::prelude::*;

fn atoms_1d() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.05f64..1.0, 0.0f64..1.0), 1..5)
}

fn power_moments(atoms: &[(f64, f64)], n: usize) -> Vec<f64> {
    (0..=n)
        .map(|k| atoms.iter().map(|(w, x)| w * x.powi(k as i32)).sum())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn series_pow_matches_repeated_convolution(
        dim in 1usize..=3,
        order in 0u32..=5,
        k in 0u32..=5,
        seed in prop::collection::vec(-1.0f64..1.0, 112),
        free in 0.3f64..2.0,
    ) {
        let mut terms = HashMap::new();
        let mut it = seed.iter();
        for deg in 0..=order {
            for idx in indices_of_degree(dim, deg) {
                terms.insert(idx.entries().to_vec(), Complex64::new(*it.next().unwrap(), *it.next().unwrap()));
            }
        }
        terms.insert(vec![0; dim], Complex64::new(free, 0.1));
        let s = FormalSeries::from_terms(dim, order, terms.iter().map(|(i, c)| (MultiIndex::new(i.clone()), *c))).unwrap();
        let want = common::brute_pow(&terms, dim, k, order);
        let scale = want.values().map(|c| c.norm()).fold(1.0, f64::max);
        prop_assert!(common::max_diff(&series_pow(&s, k).unwrap(), &want) <= 1e-12 * scale);
    }

    #[test]
    fn line_conditioning_round_trips(atoms in atoms_1d()) {
        let gamma = power_moments(&atoms, 8);
        let phi = condition_line(&PowerMoments::half_line(gamma.clone())).unwrap();
        prop_assert!((phi.values[0] - gamma[0]).abs() <= 1e-14 * gamma[0]);
        let back = unconditioned_line(&phi).unwrap();
        for (x, y) in back.values.iter().zip(&gamma) {
            prop_assert!((x - y).abs() <= 1e-10 * gamma[0].max(1.0));
        }
    }

    #[test]
    fn line_conditioning_is_triangular(atoms in atoms_1d(), cut in 1usize..8) {
        // a_φ(n) depends on a_μ(0..=n) only
        let gamma = power_moments(&atoms, 8);
        let full = condition_line(&PowerMoments::half_line(gamma.clone())).unwrap().values;
        let head = condition_line(&PowerMoments::half_line(gamma[..=cut].to_vec())).unwrap().values;
        for (x, y) in head.iter().zip(&full) {
            prop_assert!((x - y).abs() <= 1e-12 * y.abs().max(1.0));
        }
    }

    #[test]
    fn atomic_moments_are_hankel_feasible(atoms in atoms_1d()) {
        let gamma = power_moments(&atoms, 6);
        let f = hankel_feasibility(&PowerMoments::half_line(gamma));
        prop_assert_ne!(f, Feasibility::Infeasible);
    }

    #[test]
    fn verblunsky_and_homogeneity(
        y in prop::collection::vec(0.05f64..3.0, 3),
        lambda in 0.5f64..3.0,
        pts in prop::collection::vec((0.1f64..1.0, 0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0), 1..4),
    ) {
        let atoms: Vec<(f64, Vec<f64>)> = pts.iter().map(|(w, a, b, c)| (*w, vec![*a, *b, *c])).collect();
        let gamma = MultiMoments::from_atoms(&atoms, 6).unwrap();
        let d = RayDirection::new(y.clone(), Normalization::None).unwrap();
        let m = pushforward_moments(&gamma, &d, 6).unwrap();
        let c = ray_phase_moments(&m).unwrap();
        prop_assert!((c[0] - gamma.total_mass).abs() <= 1e-12 * gamma.total_mass);
        let scaled = RayDirection::new(y.iter().map(|v| v * lambda).collect(), Normalization::None).unwrap();
        let ms = pushforward_moments(&gamma, &scaled, 6).unwrap();
        for (k, (a, b)) in ms.iter().zip(&m).enumerate() {
            prop_assert!((a - lambda.powi(k as i32) * b).abs() <= 1e-12 * a.abs().max(1.0));
        }
        prop_assert!(c.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn circle_hilbert_is_an_anti_involution(coef in prop::collection::vec(-1.0f64..1.0, 16)) {
        let f = GridFunction::from_fn(Domain::Circle, 64, |t| {
            coef.chunks(2)
                .enumerate()
                .map(|(k, ab)| ab[0] * ((k + 1) as f64 * t).cos() + ab[1] * ((k + 1) as f64 * t).sin())
                .sum()
        })
        .unwrap();
        let hh = hilbert_circle(&hilbert_circle(&f).unwrap()).unwrap();
        for (x, y) in hh.values.iter().zip(&f.values) {
            prop_assert!((x + y).abs() <= 1e-12);
        }
    }
}

#[test]
fn spectral_line_hilbert_is_an_anti_involution() {
    // band-limited packet well inside the window; the piecewise-constant
    // kernel is exact for steps instead and aliases smooth oscillations
    let d = Domain::Interval { a: -20.0, b: 20.0 };
    let f = GridFunction::from_fn(d, 1024, |x| (8.0 * x).cos() * (-x * x / 2.0).exp()).unwrap();
    let h = hilbert_line_with(&f, 4, LineKernel::Spectral).unwrap();
    let hh = hilbert_line_with(&h, 4, LineKernel::Spectral).unwrap();
    let err = hh
        .values
        .iter()
        .zip(&f.values)
        .map(|(x, y)| (x + y).abs())
        .fold(0.0, f64::max);
    assert!(err < 1e-6, "{err:e}");
}

#[test]
fn circle_hilbert_matches_principal_value_quadrature() {
    let f = |t: f64| (2.0 * t).sin() + 0.5 * t.cos();
    let g = GridFunction::from_fn(Domain::Circle, 64, f).unwrap();
    let h = hilbert_circle(&g).unwrap();
    for (t, v) in g.points().iter().zip(&h.values).step_by(5) {
        assert!((v - common::circle_pv(f, *t, 100_000)).abs() < 1e-6);
    }
    // constants are annihilated exactly
    let c = hilbert_circle(&GridFunction::from_fn(Domain::Circle, 64, |_| 0.7).unwrap()).unwrap();
    assert!(c.values.iter().all(|v| *v == 0.0));
}
