//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;

use moment_phase::series::FormalSeries;
use num_complex::Complex64;

/// Truncated product by direct double loop over index vectors.
pub fn brute_mul(
    a: &HashMap<Vec<u32>, Complex64>,
    b: &HashMap<Vec<u32>, Complex64>,
    order: u32,
) -> HashMap<Vec<u32>, Complex64> {
    let mut out = HashMap::new();
    for (i, x) in a {
        for (j, y) in b {
            let k: Vec<u32> = i.iter().zip(j).map(|(p, q)| p + q).collect();
            if k.iter().sum::<u32>() <= order {
                *out.entry(k).or_insert(Complex64::default()) += x * y;
            }
        }
    }
    out
}

/// `a^k` by repeated convolution.
pub fn brute_pow(a: &HashMap<Vec<u32>, Complex64>, dim: usize, k: u32, order: u32) -> HashMap<Vec<u32>, Complex64> {
    let mut acc = HashMap::from([(vec![0; dim], Complex64::new(1.0, 0.0))]);
    for _ in 0..k {
        acc = brute_mul(&acc, a, order);
    }
    acc
}

pub fn to_map(s: &FormalSeries) -> HashMap<Vec<u32>, Complex64> {
    s.iter().map(|(i, c)| (i.entries().to_vec(), c)).collect()
}

/// Largest coefficient difference between a series and a map.
pub fn max_diff(s: &FormalSeries, m: &HashMap<Vec<u32>, Complex64>) -> f64 {
    s.iter()
        .map(|(i, c)| (c - m.get(i.entries()).copied().unwrap_or_default()).norm())
        .fold(0.0, f64::max)
}

/// Conjugate function by midpoint quadrature of the symmetrized principal
/// value integral, with the sign convention `H cos = −sin`:
/// `Hf(θ) = −(1/2π) ∫_0^π [f(θ−s) − f(θ+s)] cot(s/2) ds`.
pub fn circle_pv(f: impl Fn(f64) -> f64, theta: f64, n: usize) -> f64 {
    let h = std::f64::consts::PI / n as f64;
    let mut acc = 0.0;
    for j in 0..n {
        let s = (j as f64 + 0.5) * h;
        acc += (f(theta - s) - f(theta + s)) / (0.5 * s).tan();
    }
    -acc * h / (2.0 * std::f64::consts::PI)
}

/// Push-forward density of the unit square under `x ↦ x_1 + x_2`, by
/// midpoint quadrature along the line `x_1 + x_2 = t`.
pub fn square_slice(t: f64, n: usize) -> f64 {
    let h = 1.0 / n as f64;
    (0..n)
        .filter(|j| {
            let x2 = t - (*j as f64 + 0.5) * h;
            (0.0..=1.0).contains(&x2)
        })
        .count() as f64
        * h
}
