//! Moment conditioning: triangular maps from the moments of a measure to the
//! moments of its bounded phase function, plus Hankel-type feasibility tools.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maxent::MaxentSolution;
use crate::series::{
    accumulate_powers, binomial, factorial, log_one_plus_weights, neg_log_one_minus_weights, series_exp, FormalSeries,
    MultiIndex,
};

/// Tolerance on imaginary residue when a transform must come out real.
pub const REAL_TOLERANCE: f64 = 1e-10;

/// Where the measure (or phase) lives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Support {
    HalfLine,
    Interval([f64; 2]),
}

/// Real power moments `γ_0..γ_N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerMoments {
    pub values: Vec<f64>,
    pub support: Support,
}

impl PowerMoments {
    pub fn new(values: Vec<f64>, support: Support) -> Self {
        PowerMoments { values, support }
    }

    pub fn half_line(values: Vec<f64>) -> Self {
        Self::new(values, Support::HalfLine)
    }

    pub fn interval(values: Vec<f64>, a: f64, b: f64) -> Self {
        Self::new(values, Support::Interval([a, b]))
    }

    pub fn order(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    pub fn mass(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    fn check_mass(&self) -> Result<f64> {
        let g0 = *self.values.first().ok_or(Error::EmptyMoments)?;
        if !(g0 > 0.0) {
            return Err(Error::NonPositiveMass(g0));
        }
        Ok(g0)
    }
}

/// Complex trigonometric moments `τ(0)..τ(M)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigMoments {
    pub values: Vec<Complex64>,
}

impl TrigMoments {
    pub fn new(values: Vec<Complex64>) -> Self {
        TrigMoments { values }
    }

    pub fn order(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    /// `τ(0)`, checked real and positive.
    pub fn tau0(&self) -> Result<f64> {
        let t0 = *self.values.first().ok_or(Error::EmptyMoments)?;
        if !(t0.re > 0.0) || t0.im.abs() > REAL_TOLERANCE * t0.re.abs().max(1.0) {
            return Err(Error::InvalidTau0 { re: t0.re, im: t0.im });
        }
        Ok(t0.re)
    }
}

/// Multivariate moments `γ_α` for `|α| <= order`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiMoments {
    pub dimension: usize,
    pub order: u32,
    pub values: BTreeMap<MultiIndex, f64>,
    pub total_mass: f64,
}

impl MultiMoments {
    /// Builds the container; the total mass is read from the zero index.
    pub fn new(dimension: usize, order: u32, values: BTreeMap<MultiIndex, f64>) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        if let Some(bad) = values.keys().find(|k| k.dim() != dimension) {
            return Err(Error::DimensionMismatch {
                expected: dimension,
                got: bad.dim(),
            });
        }
        let total_mass = *values
            .get(&MultiIndex::zero(dimension))
            .ok_or_else(|| Error::MissingMoment(vec![0; dimension]))?;
        Ok(MultiMoments {
            dimension,
            order,
            values,
            total_mass,
        })
    }

    /// Moments of the atomic measure `Σ c_i δ_{x_i}` up to total degree `order`.
    pub fn from_atoms(atoms: &[(f64, Vec<f64>)], order: u32) -> Result<Self> {
        let dim = atoms.first().map(|a| a.1.len()).ok_or(Error::EmptyMoments)?;
        let mut values = BTreeMap::new();
        for deg in 0..=order {
            for idx in crate::series::indices_of_degree(dim, deg) {
                let v = atoms.iter().map(|(c, x)| c * idx.monomial(x)).sum();
                values.insert(idx, v);
            }
        }
        Self::new(dim, order, values)
    }

    pub fn get(&self, idx: &MultiIndex) -> Result<f64> {
        self.values
            .get(idx)
            .copied()
            .ok_or_else(|| Error::MissingMoment(idx.entries().to_vec()))
    }
}

/// `a_φ(0..N)` from `a_μ(0..N)` on the line, summing powers up to `N+1`.
pub fn condition_line(a_mu: &PowerMoments) -> Result<PowerMoments> {
    let limit = a_mu.values.len() as u32;
    condition_line_with_limit(a_mu, limit)
}

/// Line conditioning with an explicit upper summation limit `K`:
/// `a_φ(n)` is the coefficient of `w^{n+1}` in `Σ_{k=1}^{K} S^k / k`,
/// `S = Σ a_μ(n) w^{n+1}`, `w = 1/z`.
///
/// `K = N` drops the last term; for a point mass at the origin this
/// loses `a_φ(N)` entirely.
pub fn condition_line_with_limit(a_mu: &PowerMoments, limit: u32) -> Result<PowerMoments> {
    a_mu.check_mass()?;
    let n = a_mu.values.len();
    let s = shifted_series(&a_mu.values);
    let l = accumulate_powers(&s, &neg_log_one_minus_weights(limit))?;
    let values = real_tail(&l, n)?;
    Ok(PowerMoments::new(values, Support::HalfLine))
}

/// Inverse of [`condition_line`]: `a_μ` as the coefficients of
/// `1 − exp(−Σ a_φ(n) w^{n+1})`.
pub fn unconditioned_line(a_phi: &PowerMoments) -> Result<PowerMoments> {
    if a_phi.values.is_empty() {
        return Err(Error::EmptyMoments);
    }
    let n = a_phi.values.len();
    let s = shifted_series(&a_phi.values).scale(Complex64::new(-1.0, 0.0));
    let e = series_exp(&s)?;
    let values = real_tail(&e, n)?.into_iter().map(|x| -x).collect();
    Ok(PowerMoments::new(values, a_phi.support))
}

/// Lower bound on the right end `X` of the support of a phase with
/// `0 <= ξ <= 1` on `[origin, X]`, from its moments `c_k = ∫ t^k ξ(t) dt`.
///
/// For fixed mass `c_0`, the `k`-th moment about `origin` is largest when all
/// the mass sits at the right end, so it is at most
/// `(Y^{k+1} − (Y − c_0)^{k+1})/(k+1)` with `Y = X − origin`; each `k` gives
/// a bound and the largest is returned. Exact for `ξ = χ_[origin, X]`.
pub fn phase_support_lower_bound(c: &[f64], origin: f64) -> Result<f64> {
    let c0 = *c.first().ok_or(Error::EmptyMoments)?;
    if !(c0 > 0.0) {
        return Err(Error::NonPositiveMass(c0));
    }
    let mut best = c0;
    for k in 1..c.len() {
        // moment about the origin
        let ck: f64 = (0..=k)
            .map(|j| binomial(k as u32, j as u32) * c[j] * (-origin).powi((k - j) as i32))
            .sum();
        let p = k as i32 + 1;
        let f = |y: f64| (y.powi(p) - (y - c0).max(0.0).powi(p)) / p as f64 - ck;
        let mut hi = best.max(1.0);
        while f(hi) < 0.0 {
            hi *= 2.0;
            if !hi.is_finite() {
                return Err(Error::DegenerateCutoff(c.to_vec()));
            }
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        best = best.max(hi);
    }
    Ok(origin + best)
}

/// Bracket for the right end of the phase support of a measure on `[a, b]`.
///
/// Left of `a` the phase vanishes; right of `b` it is 1 up to the root of
/// `1 + Cμ(x) = 0`, which is at most `b + γ_0`. The lower end takes `b` as
/// the end of the measure's support and raises it to
/// [`phase_support_lower_bound`] of the conditioned moments. Maxent needs the
/// phase domain to end at the support: beyond it the phase is zero and the
/// dual problem has no finite optimum.
pub fn phase_support_bracket(a_mu: &PowerMoments) -> Result<Option<(f64, f64)>> {
    let g0 = a_mu.check_mass()?;
    let Support::Interval([a, b]) = a_mu.support else {
        return Ok(None);
    };
    let c = condition_line(a_mu)?.values;
    let lo = phase_support_lower_bound(&c, a)?.max(b);
    Ok(Some((lo.min(b + g0), b + g0)))
}

fn shifted_series(values: &[f64]) -> FormalSeries {
    let mut coeffs = vec![Complex64::default()];
    coeffs.extend(values.iter().map(|&x| Complex64::new(x, 0.0)));
    FormalSeries::univariate(values.len() as u32, &coeffs)
}

fn real_tail(s: &FormalSeries, n: usize) -> Result<Vec<f64>> {
    let tail = &s.coefficients()[1..=n];
    let scale = tail.iter().map(|c| c.norm()).fold(1.0, f64::max);
    let im = tail.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    if im > REAL_TOLERANCE * scale {
        return Err(Error::ImaginaryResidue(im));
    }
    Ok(tail.iter().map(|c| c.re).collect())
}

/// Circle conditioning: `τ_φ(0) = π/2` and, for `k >= 1`, `τ_φ(k)` is the
/// coefficient of `z^k` in `(i/2) Σ ((−1)^j / j) S^j`,
/// `S = Σ_{n>=1} τ_μ(n)/τ_μ(0) z^n`.
pub fn condition_circle(tau_mu: &TrigMoments) -> Result<TrigMoments> {
    let t0 = tau_mu.tau0()?;
    let m = tau_mu.order() as u32;
    let mut values = vec![Complex64::new(FRAC_PI_2, 0.0)];
    if m == 0 {
        return Ok(TrigMoments::new(values));
    }
    let mut coeffs = vec![Complex64::default()];
    coeffs.extend(tau_mu.values[1..].iter().map(|t| t / t0));
    let s = FormalSeries::univariate(m, &coeffs);
    // −log(1+S) with weights (−1)^j/j
    let weights: Vec<Complex64> = log_one_plus_weights(m).into_iter().map(|w| -w).collect();
    let l = accumulate_powers(&s, &weights)?;
    let half_i = Complex64::new(0.0, 0.5);
    values.extend(l.coefficients()[1..].iter().map(|c| c * half_i));
    Ok(TrigMoments::new(values))
}

/// Inverse of [`condition_circle`]: `1 + Σ τ̂(n) z^n = exp(2i Σ_{k>=1} τ_φ(k) z^k)`.
/// Returns the normalized moments `τ̂(0..M)` with `τ̂(0) = 1`.
pub fn unconditioned_circle(tau_phi: &TrigMoments) -> Result<Vec<Complex64>> {
    let m = tau_phi.order() as u32;
    let mut coeffs = vec![Complex64::default()];
    coeffs.extend(tau_phi.values.iter().skip(1).map(|t| t * Complex64::new(0.0, 2.0)));
    let s = FormalSeries::univariate(m, &coeffs);
    Ok(series_exp(&s)?.coefficients().to_vec())
}

/// The normalized generating series `B(z) = Σ (|α|!/α!) a_μ(α) z^α / μ(Δ)`.
pub fn polydisk_generating_series(a_mu: &MultiMoments) -> Result<FormalSeries> {
    if !(a_mu.total_mass > 0.0) {
        return Err(Error::NonPositiveMass(a_mu.total_mass));
    }
    let mut b = FormalSeries::zero(a_mu.dimension, a_mu.order);
    for idx in b.indices().to_vec() {
        let g = a_mu.get(&idx)?;
        let multinomial = factorial(idx.degree()) / idx.factorial();
        b.set(idx.entries(), Complex64::new(multinomial * g / a_mu.total_mass, 0.0))?;
    }
    Ok(b)
}

/// Polydisk conditioning: `a_φ(α) = [log B]_α / (2i)` for `α ≠ 0` and
/// `a_φ(0) = π/2`. Only indices with non-negative entries are stored; the
/// mixed-sign coefficients of the phase vanish.
pub fn condition_polydisk(a_mu: &MultiMoments) -> Result<FormalSeries> {
    let b = polydisk_generating_series(a_mu)?;
    let one = FormalSeries::one(b.dimension(), b.order());
    let l = accumulate_powers(&(&b - &one), &log_one_plus_weights(b.order()))?;
    let mut phi = l.scale(Complex64::new(0.0, -0.5));
    phi.set(&vec![0; b.dimension()], Complex64::new(FRAC_PI_2, 0.0))?;
    Ok(phi)
}

/// Inverse of [`condition_polydisk`]: returns `B = exp(2i (a_φ − π/2))`.
pub fn unconditioned_polydisk(a_phi: &FormalSeries) -> Result<FormalSeries> {
    let mut s = a_phi.scale(Complex64::new(0.0, 2.0));
    s.set(&vec![0; s.dimension()], Complex64::default())?;
    series_exp(&s)
}

/// Hankel feasibility verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Feasibility {
    FeasibleInterior,
    Boundary,
    Infeasible,
}

/// Eigenvalue threshold is `1e-10 · max |γ|`.
pub const HANKEL_RELATIVE_TOLERANCE: f64 = 1e-10;

fn hankel(gamma: &[f64], size: usize, shift: usize) -> DMatrix<f64> {
    DMatrix::from_fn(size, size, |i, j| gamma[i + j + shift])
}

/// Classifies `γ_0..γ_L` by the spectra of `[γ_{i+j}]` and `[γ_{i+j+1}]`.
pub fn hankel_feasibility(gamma: &PowerMoments) -> Feasibility {
    let g = &gamma.values;
    if g.is_empty() {
        return Feasibility::Boundary;
    }
    let l = g.len() - 1;
    let tol = HANKEL_RELATIVE_TOLERANCE * g.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let blocks = [hankel(g, l / 2 + 1, 0), hankel(g, l.div_ceil(2), 1)];
    let mut verdict = Feasibility::FeasibleInterior;
    for h in blocks.iter().filter(|h| h.nrows() > 0) {
        let min = h.clone().symmetric_eigenvalues().min();
        if min < -tol {
            return Feasibility::Infeasible;
        }
        if min <= tol {
            verdict = Feasibility::Boundary;
        }
    }
    verdict
}

/// Lower one-step completion: the `γ̃_{2n}` that makes the `(n+1)×(n+1)`
/// Hankel determinant vanish, `γ̃_{2n} = vᵀ H_n⁻¹ v` with
/// `v = (γ_n, …, γ_{2n−1})`.
pub fn min_extension(gamma: &PowerMoments) -> Result<f64> {
    let g = &gamma.values;
    if g.is_empty() {
        return Err(Error::EmptyMoments);
    }
    if !g.len().is_multiple_of(2) {
        return Err(Error::OddMomentCount(g.len()));
    }
    let n = g.len() / 2;
    let h = hankel(g, n, 0);
    let v = DVector::from_column_slice(&g[n..2 * n]);
    let chol = h.cholesky().ok_or(Error::SingularHankel)?;
    let x = chol.solve(&v);
    Ok(v.dot(&x))
}

/// Upper completion: `∫ x^n p(x) dx` for the solved maximum-entropy density
/// matching `γ_0..γ_{n−1}`.
pub fn max_extension(gamma: &PowerMoments, solution: &MaxentSolution) -> Result<f64> {
    if gamma.values.is_empty() {
        return Err(Error::EmptyMoments);
    }
    if !solution.dual.converged {
        return Err(Error::NotConverged {
            iterations: solution.dual.iterations,
            residual: solution.dual.residual_norm,
        });
    }
    let n = gamma.values.len() as i32;
    Ok(solution.integrate(|x| x.powi(n)))
}

/// Extends the moments of `exp(P(x))`, `P = Σ σ_i x^i`, by the recurrence
/// `(k+1)γ_k + Σ_{i=1}^{n} i σ_i γ_{k+i} = 0`.
pub fn extend_exp_weight(sigma: &[f64], seed: &[f64], count: usize) -> Result<PowerMoments> {
    let n = sigma.len().saturating_sub(1);
    let lead = *sigma.last().ok_or(Error::ZeroLeadingCoefficient)?;
    if n == 0 || lead == 0.0 {
        return Err(Error::ZeroLeadingCoefficient);
    }
    if seed.len() != n {
        return Err(Error::SeedLength {
            degree: n,
            got: seed.len(),
        });
    }
    let mut g = seed.to_vec();
    for k in 0..count {
        let mut acc = (k as f64 + 1.0) * g[k];
        for (i, s) in sigma.iter().enumerate().take(n).skip(1) {
            acc += i as f64 * s * g[k + i];
        }
        g.push(-acc / (n as f64 * lead));
    }
    Ok(PowerMoments::half_line(g))
}
