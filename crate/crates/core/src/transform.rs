//! Hilbert transforms on uniform grids and the pointwise inversion formulas.
//!
//! Conventions: on the line `Hφ(x) = (1/π) PV ∫ φ(t)/(t − x) dt`, whose
//! Fourier multiplier is `+i·sgn(ω)`; on the circle
//! `Hφ(θ) = (1/2π) PV ∫ cot((σ − θ)/2) φ(σ) dσ`, multiplier `+i·sgn(n)`.
//! Both send `cos` to `−sin`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sign `s` in `exp(s·π·Hφ)` of the line inversion. Fixed by the
/// β-jump oracle: for `φ = β·χ_[0,1]` the density is
/// `(1/π)((1−x)/x)^β sin(πβ)`, which needs `s = +1` with the kernel above.
pub const LINE_SIGN: f64 = 1.0;

/// Slack on the phase range checks.
pub const RANGE_TOLERANCE: f64 = 1e-6;

/// Negative densities below this are reported.
pub const NEGATIVITY_TOLERANCE: f64 = 1e-8;

/// Default zero-padding factor.
pub const DEFAULT_PAD: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    /// Cell-centred grid `x_j = a + (j + ½)(b − a)/G`.
    Interval { a: f64, b: f64 },
    /// `θ_j = −π + 2πj/G`.
    Circle,
}

/// Real samples on a uniform grid of power-of-two size.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub domain: Domain,
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn new(domain: Domain, values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 || !values.len().is_power_of_two() {
            return Err(Error::GridNotPowerOfTwo(values.len()));
        }
        if let Domain::Interval { a, b } = domain {
            if !(a < b) || !a.is_finite() || !b.is_finite() {
                return Err(Error::InvalidInterval(a, b));
            }
        }
        Ok(GridFunction { domain, values })
    }

    /// Samples `f` at the grid points.
    pub fn from_fn(domain: Domain, g: usize, mut f: impl FnMut(f64) -> f64) -> Result<Self> {
        let probe = GridFunction {
            domain,
            values: vec![0.0; g],
        };
        let values = (0..g).map(|j| f(probe.point(j))).collect();
        Self::new(domain, values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        match self.domain {
            Domain::Interval { a, b } => (b - a) / self.len() as f64,
            Domain::Circle => 2.0 * PI / self.len() as f64,
        }
    }

    pub fn point(&self, j: usize) -> f64 {
        let h = self.spacing();
        match self.domain {
            Domain::Interval { a, .. } => a + (j as f64 + 0.5) * h,
            Domain::Circle => -PI + j as f64 * h,
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.point(j)).collect()
    }

    /// Midpoint-rule integral over the grid.
    pub fn integral(&self) -> f64 {
        self.spacing() * self.values.iter().sum::<f64>()
    }

    fn with_values(&self, values: Vec<f64>) -> GridFunction {
        GridFunction {
            domain: self.domain,
            values,
        }
    }
}

/// Discretization of the line Hilbert transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LineKernel {
    /// Exact PV integral of a piecewise-constant interpolant,
    /// `K_m = (1/π) ln|(m + ½)/(m − ½)|`, applied as a linear convolution.
    #[default]
    PiecewiseConstant,
    /// Zero-padded FFT with the `i·sgn(ω)` multiplier; spectrally accurate
    /// for smooth data, Gibbs-limited at jumps.
    Spectral,
}

fn check_pad(pad: usize, min: usize) -> Result<()> {
    if pad < min {
        return Err(Error::PadFactor { min, got: pad });
    }
    Ok(())
}

fn interval_of(f: &GridFunction) -> Result<(f64, f64)> {
    match f.domain {
        Domain::Interval { a, b } => Ok((a, b)),
        Domain::Circle => Err(Error::WrongDomain { expected: "interval" }),
    }
}

/// Line Hilbert transform with the default kernel; `φ` is zero outside its
/// interval.
pub fn hilbert_line(phi: &GridFunction, pad: usize) -> Result<GridFunction> {
    hilbert_line_with(phi, pad, LineKernel::default())
}

pub fn hilbert_line_with(phi: &GridFunction, pad: usize, kernel: LineKernel) -> Result<GridFunction> {
    interval_of(phi)?;
    let g = phi.len();
    let n = pad * g;
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut buf: Vec<Complex64> = vec![Complex64::default(); n];
    for (b, v) in buf.iter_mut().zip(&phi.values) {
        *b = Complex64::new(*v, 0.0);
    }
    fwd.process(&mut buf);
    match kernel {
        LineKernel::PiecewiseConstant => {
            check_pad(pad, 2)?;
            // result_j = Σ_k K_{k−j} φ_k, i.e. convolution with K_{−m}
            let mut ker = vec![Complex64::default(); n];
            for m in 1..g {
                let km = ((m as f64 + 0.5) / (m as f64 - 0.5)).ln() / PI;
                ker[m] = Complex64::new(-km, 0.0);
                ker[n - m] = Complex64::new(km, 0.0);
            }
            fwd.process(&mut ker);
            for (b, k) in buf.iter_mut().zip(&ker) {
                *b *= k;
            }
        }
        LineKernel::Spectral => {
            check_pad(pad, 1)?;
            apply_sign_multiplier(&mut buf);
        }
    }
    inv.process(&mut buf);
    let scale = 1.0 / n as f64;
    Ok(phi.with_values(buf[..g].iter().map(|c| c.re * scale).collect()))
}

/// Multiplies bin `n` by `i·sgn(n)`; DC and Nyquist are annihilated.
fn apply_sign_multiplier(buf: &mut [Complex64]) {
    let n = buf.len();
    let i = Complex64::new(0.0, 1.0);
    buf[0] = Complex64::default();
    for (k, b) in buf.iter_mut().enumerate().skip(1) {
        if 2 * k < n {
            *b *= i;
        } else if 2 * k > n {
            *b *= -i;
        } else {
            *b = Complex64::default();
        }
    }
}

/// Circle Hilbert transform by the `i·sgn(n)` multiplier.
pub fn hilbert_circle(phi: &GridFunction) -> Result<GridFunction> {
    if phi.domain != Domain::Circle {
        return Err(Error::WrongDomain { expected: "circle" });
    }
    let g = phi.len();
    // constants are annihilated; removing one keeps constant input exactly zero
    let reference = phi.values[0];
    let mut buf: Vec<Complex64> = phi.values.iter().map(|v| Complex64::new(v - reference, 0.0)).collect();
    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_forward(g).process(&mut buf);
    apply_sign_multiplier(&mut buf);
    planner.plan_fft_inverse(g).process(&mut buf);
    let scale = 1.0 / g as f64;
    Ok(phi.with_values(buf.iter().map(|c| c.re * scale).collect()))
}

/// A reconstructed density with negativity diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Inversion {
    pub density: GridFunction,
    /// Smallest value before clipping.
    pub min_raw: f64,
    /// Number of grid points set to zero.
    pub clipped: usize,
    /// True when some value fell below `−NEGATIVITY_TOLERANCE`.
    pub negativity_flag: bool,
}

fn check_range(f: &GridFunction, upper: f64) -> Result<()> {
    for (j, &v) in f.values.iter().enumerate() {
        if !(v >= -RANGE_TOLERANCE && v <= upper + RANGE_TOLERANCE) {
            return Err(Error::PhaseOutOfRange {
                x: f.point(j),
                value: v,
                upper,
            });
        }
    }
    Ok(())
}

/// `ρ(x) = (1/π) exp[s·π·Hφ(x)] sin(πφ(x))` for a phase with values in `[0, 1]`.
/// Negative values are clipped to zero.
pub fn invert_line(phi: &GridFunction, pad: usize) -> Result<Inversion> {
    check_range(phi, 1.0)?;
    let h = hilbert_line(phi, pad)?;
    let raw: Vec<f64> = phi
        .values
        .iter()
        .zip(&h.values)
        .map(|(&p, &hp)| (LINE_SIGN * PI * hp).exp() * (PI * p).sin() / PI)
        .collect();
    let min_raw = raw.iter().copied().fold(f64::INFINITY, f64::min);
    let clipped = raw.iter().filter(|&&v| v < 0.0).count();
    let values = raw.into_iter().map(|v| v.max(0.0)).collect();
    Ok(Inversion {
        density: phi.with_values(values),
        min_raw,
        clipped,
        negativity_flag: min_raw < -NEGATIVITY_TOLERANCE,
    })
}

/// `ρ(θ) = τ₀(2 e^{Hφ(θ)} sin φ(θ) − 1)` for a circle phase in `[0, π]`.
/// Values are returned unclipped; negativity is only flagged.
pub fn invert_circle(phi: &GridFunction, tau0: f64) -> Result<Inversion> {
    if !(tau0 > 0.0) {
        return Err(Error::InvalidTau0 { re: tau0, im: 0.0 });
    }
    check_range(phi, PI)?;
    let h = hilbert_circle(phi)?;
    let values: Vec<f64> = phi
        .values
        .iter()
        .zip(&h.values)
        .map(|(&p, &hp)| tau0 * (2.0 * hp.exp() * p.sin() - 1.0))
        .collect();
    let min_raw = values.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(Inversion {
        density: phi.with_values(values),
        min_raw,
        clipped: 0,
        negativity_flag: min_raw < -NEGATIVITY_TOLERANCE,
    })
}

/// Average of the two boundary limits of `exp Cξ`, minus one:
/// `f(t) = exp[s·π·Hξ(t)] cos(πξ(t)) − 1`.
pub fn cauchy_boundary_avg(xi: &GridFunction, pad: usize) -> Result<GridFunction> {
    check_range(xi, 1.0)?;
    let h = hilbert_line(xi, pad)?;
    Ok(xi.with_values(
        xi.values
            .iter()
            .zip(&h.values)
            .map(|(&x, &hx)| (LINE_SIGN * PI * hx).exp() * (PI * x).cos() - 1.0)
            .collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step(a: f64, b: f64, g: usize, c: f64, level: f64) -> GridFunction {
        GridFunction::from_fn(
            Domain::Interval { a, b },
            g,
            |x| if x > 0.0 && x < c { level } else { 0.0 },
        )
        .unwrap()
    }

    #[test]
    fn grid_validation() {
        assert_eq!(
            GridFunction::new(Domain::Circle, vec![0.0; 12]),
            Err(Error::GridNotPowerOfTwo(12))
        );
        let f = GridFunction::new(Domain::Interval { a: 0.0, b: 1.0 }, vec![0.0; 4]).unwrap();
        assert_eq!(f.points(), vec![0.125, 0.375, 0.625, 0.875]);
        let c = GridFunction::new(Domain::Circle, vec![0.0; 4]).unwrap();
        assert_eq!(c.point(0), -PI);
        assert!((c.point(2)).abs() < 1e-15);
    }

    #[test]
    fn zero_in_zero_out() {
        let f = GridFunction::new(Domain::Interval { a: -1.0, b: 1.0 }, vec![0.0; 64]).unwrap();
        assert!(hilbert_line(&f, 4).unwrap().values.iter().all(|&v| v == 0.0));
        assert!(invert_line(&f, 4).unwrap().density.values.iter().all(|&v| v == 0.0));
        assert!(cauchy_boundary_avg(&f, 4).unwrap().values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn step_hilbert_is_exact_for_aligned_jumps() {
        // [−1, 2] with 1024 cells puts 0 and 1 on cell edges
        let f = step(-1.0, 3.0, 1024, 1.0, 0.5);
        let h = hilbert_line(&f, 4).unwrap();
        for (x, v) in f.points().iter().zip(&h.values) {
            let expect = 0.5 / PI * ((1.0 - x) / x).abs().ln();
            assert!((v - expect).abs() < 1e-10, "x={x}");
        }
    }

    #[test]
    fn pad_must_allow_linear_convolution() {
        let f = step(-1.0, 3.0, 64, 1.0, 1.0);
        assert_eq!(hilbert_line(&f, 1), Err(Error::PadFactor { min: 2, got: 1 }));
    }

    #[test]
    fn spectral_kernel_on_smooth_packet() {
        let d = Domain::Interval { a: -20.0, b: 20.0 };
        let w = 8.0;
        let f = GridFunction::from_fn(d, 1024, |x| (w * x).cos() * (-x * x / 2.0).exp()).unwrap();
        let h = hilbert_line_with(&f, 4, LineKernel::Spectral).unwrap();
        // for a packet with bandwidth well below w: H(cos·g) ≈ −sin·g
        for (x, v) in f.points().iter().zip(&h.values) {
            let expect = -(w * x).sin() * (-x * x / 2.0).exp();
            assert!((v - expect).abs() < 1e-6);
        }
    }

    #[test]
    fn circle_cos_goes_to_minus_sin() {
        let f = GridFunction::from_fn(Domain::Circle, 64, |t| t.cos()).unwrap();
        let h = hilbert_circle(&f).unwrap();
        for (t, v) in f.points().iter().zip(&h.values) {
            assert!((v + t.sin()).abs() < 1e-13);
        }
        let c = GridFunction::new(Domain::Circle, vec![0.7; 64]).unwrap();
        assert!(hilbert_circle(&c).unwrap().values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn wrong_domains() {
        let c = GridFunction::new(Domain::Circle, vec![0.0; 8]).unwrap();
        assert_eq!(hilbert_line(&c, 4), Err(Error::WrongDomain { expected: "interval" }));
        let l = GridFunction::new(Domain::Interval { a: 0.0, b: 1.0 }, vec![0.0; 8]).unwrap();
        assert_eq!(hilbert_circle(&l), Err(Error::WrongDomain { expected: "circle" }));
    }

    #[test]
    fn beta_jump_inversion() {
        let beta = 0.5;
        let f = step(-1.0, 3.0, 1024, 1.0, beta);
        let inv = invert_line(&f, 4).unwrap();
        for (x, r) in f.points().iter().zip(&inv.density.values) {
            let expect = if *x > 0.0 && *x < 1.0 {
                ((1.0 - x) / x).powf(beta) * (PI * beta).sin() / PI
            } else {
                0.0
            };
            assert!((r - expect).abs() < 1e-9 * expect.max(1.0), "x={x}");
        }
    }

    #[test]
    fn full_step_gives_zero_density() {
        let f = step(-1.0, 3.0, 256, 2.0, 1.0);
        let inv = invert_line(&f, 4).unwrap();
        assert!(inv.density.values.iter().all(|&v| v.abs() < 1e-12));
    }

    #[test]
    fn line_range_errors() {
        let f = step(-1.0, 3.0, 64, 1.0, 1.1);
        assert!(matches!(invert_line(&f, 4), Err(Error::PhaseOutOfRange { .. })));
        assert!(matches!(cauchy_boundary_avg(&f, 4), Err(Error::PhaseOutOfRange { .. })));
    }

    #[test]
    fn circle_inversion_examples() {
        let half = GridFunction::new(Domain::Circle, vec![PI / 2.0; 128]).unwrap();
        let inv = invert_circle(&half, 0.3).unwrap();
        assert!(inv.density.values.iter().all(|&v| v == 0.3));

        let zero = GridFunction::new(Domain::Circle, vec![0.0; 128]).unwrap();
        let inv = invert_circle(&zero, 0.3).unwrap();
        assert!(inv.density.values.iter().all(|&v| v == -0.3));
        assert!(inv.negativity_flag);

        assert!(matches!(invert_circle(&half, 0.0), Err(Error::InvalidTau0 { .. })));
    }

    #[test]
    fn boundary_average_of_full_step() {
        // exp Cχ_[0,c](z) = (z − c)/z; averaged boundary value is (t − c)/t
        let c = 1.0;
        let f = step(-1.0, 3.0, 1024, c, 1.0);
        let avg = cauchy_boundary_avg(&f, 4).unwrap();
        for (t, v) in f.points().iter().zip(&avg.values) {
            let expect = (t - c) / t - 1.0;
            assert!((v - expect).abs() < 1e-8 * expect.abs().max(1.0), "t={t}");
        }
    }
}
