//! Ray sweep for multivariate moments on the positive orthant.
//!
//! For a direction `y` the push-forward of the measure under `x ↦ y·x` is a
//! measure on `[0, ∞)`. Its moments are mixed from the multivariate moments,
//! conditioned like any line problem, and the recovered phase `ξ_y` yields
//! the Radon slice through `Rμ = −(1/π) H f` with `f` the averaged boundary
//! value of `exp Cξ_y − 1`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conditioning::{condition_line, phase_support_lower_bound, MultiMoments, PowerMoments};
use crate::error::{Error, Result};
use crate::maxent::{fime_solve, DualSolution, FimeOptions, MaxentProblem};
use crate::series::{factorial, indices_of_degree};
use crate::transform::{cauchy_boundary_avg, hilbert_line, Domain, GridFunction, DEFAULT_PAD};

/// How a direction was normalized before use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    #[default]
    None,
    L1,
    L2,
}

/// A direction strictly inside the positive orthant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayDirection {
    pub y: Vec<f64>,
    pub normalization: Normalization,
}

impl RayDirection {
    pub fn new(y: Vec<f64>, normalization: Normalization) -> Result<Self> {
        if y.is_empty() || y.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidDirection(y));
        }
        let norm = match normalization {
            Normalization::None => 1.0,
            Normalization::L1 => y.iter().sum(),
            Normalization::L2 => y.iter().map(|v| v * v).sum::<f64>().sqrt(),
        };
        Ok(RayDirection {
            y: y.into_iter().map(|v| v / norm).collect(),
            normalization,
        })
    }

    pub fn dim(&self) -> usize {
        self.y.len()
    }
}

/// `m_k = Σ_{|α|=k} (k!/α!) y^α γ_α`, `k = 0..=n`.
pub fn pushforward_moments(gamma: &MultiMoments, y: &RayDirection, n: u32) -> Result<Vec<f64>> {
    if y.dim() != gamma.dimension {
        return Err(Error::DimensionMismatch {
            expected: gamma.dimension,
            got: y.dim(),
        });
    }
    (0..=n)
        .map(|k| {
            let kf = factorial(k);
            indices_of_degree(gamma.dimension, k)
                .iter()
                .map(|idx| Ok(kf / idx.factorial() * idx.monomial(&y.y) * gamma.get(idx)?))
                .sum()
        })
        .collect()
}

/// Phase moments `c_j = ∫ t^j ξ_y(t) dt` of the push-forward.
pub fn ray_phase_moments(m: &[f64]) -> Result<Vec<f64>> {
    Ok(condition_line(&PowerMoments::half_line(m.to_vec()))?.values)
}

/// Cutoff `T = c_1/c_0 + 6·sqrt(c_2/c_0)` for the phase domain `[0, T]`.
pub fn phase_cutoff(c: &[f64]) -> Result<f64> {
    if c.len() < 3 || !(c[0] > 0.0) || !(c[2] > 0.0) {
        return Err(Error::DegenerateCutoff(c.to_vec()));
    }
    let t = c[1] / c[0] + 6.0 * (c[2] / c[0]).sqrt();
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::DegenerateCutoff(c.to_vec()));
    }
    Ok(t)
}

/// How the per-ray phase domain `[0, T]` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutoffRule {
    /// `T = c_1/c_0 + 6·sqrt(c_2/c_0)`.
    #[default]
    Heuristic,
    /// `T` = [`phase_support_lower_bound`]. Much tighter when the phase
    /// ends in a jump, at the price of possibly cutting a sliver of support.
    SupportBound,
    /// A known `T`, e.g. when the support of `ξ_y` is available.
    Fixed(f64),
}

/// Radon slice `−(1/π) H f` from a phase on an interval grid.
///
/// The phase is embedded in a window `extension` times wider. The slowly
/// decaying part of `f`, asymptotically `−m_0/(t − t_0)`, is replaced by the
/// Lorentzian `−m_0 (t−t_0)/((t−t_0)² + b²)` whose Hilbert transform is
/// known in closed form, so truncating the window costs little.
pub fn radon_slice(xi: &GridFunction, pad: usize, extension: usize) -> Result<GridFunction> {
    let (a, b) = match xi.domain {
        Domain::Interval { a, b } => (a, b),
        Domain::Circle => return Err(Error::WrongDomain { expected: "interval" }),
    };
    if extension == 0 || !extension.is_power_of_two() {
        return Err(Error::GridNotPowerOfTwo(extension));
    }
    let g = xi.len();
    let t0 = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let m0 = xi.integral();
    let offset = (extension - 1) * g / 2;
    let mut ext = vec![0.0; extension * g];
    ext[offset..offset + g].copy_from_slice(&xi.values);
    let span = extension as f64 * (b - a);
    let ext = GridFunction::new(
        Domain::Interval {
            a: t0 - 0.5 * span,
            b: t0 + 0.5 * span,
        },
        ext,
    )?;
    let f = cauchy_boundary_avg(&ext, pad)?;
    let pts = ext.points();
    let lorentz = |t: f64| (t - t0).powi(2) + half * half;
    let residual: Vec<f64> = f
        .values
        .iter()
        .zip(&pts)
        .map(|(v, &t)| v + m0 * (t - t0) / lorentz(t))
        .collect();
    let hr = hilbert_line(&GridFunction::new(ext.domain, residual)?, pad)?;
    let values = hr.values[offset..offset + g]
        .iter()
        .zip(&pts[offset..offset + g])
        .map(|(h, &t)| -(h - m0 * half / lorentz(t)) / std::f64::consts::PI)
        .collect();
    GridFunction::new(xi.domain, values)
}

/// Settings for a per-ray reconstruction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayOptions {
    /// Push-forward order `n`; moments up to total degree `n` must exist.
    pub order: u32,
    pub grid: usize,
    pub nodes: usize,
    pub pad: usize,
    pub extension: usize,
    pub cutoff: CutoffRule,
    pub fime: FimeOptions,
}

impl Default for RayOptions {
    fn default() -> Self {
        RayOptions {
            order: 8,
            grid: 1024,
            nodes: 256,
            pad: DEFAULT_PAD,
            extension: 8,
            cutoff: CutoffRule::Heuristic,
            fime: FimeOptions::default(),
        }
    }
}

/// Everything computed along one direction.
#[derive(Debug, Clone, PartialEq)]
pub struct RaySlice {
    pub direction: RayDirection,
    pub pushforward_moments: Vec<f64>,
    pub phase_moments: Vec<f64>,
    pub cutoff: f64,
    pub solver: DualSolution,
    /// Grid points where the maxent phase left `[0, 1]` and was clipped.
    pub phase_clipped: usize,
    pub phase_grid: GridFunction,
    pub radon_values: GridFunction,
}

/// Push-forward, conditioning, maxent on `[0, T]` and the Radon slice.
pub fn reconstruct_ray(gamma: &MultiMoments, direction: &RayDirection, opts: &RayOptions) -> Result<RaySlice> {
    let m = pushforward_moments(gamma, direction, opts.order)?;
    let c = ray_phase_moments(&m)?;
    let cutoff = match opts.cutoff {
        CutoffRule::Heuristic => phase_cutoff(&c)?,
        CutoffRule::SupportBound => phase_support_lower_bound(&c, 0.0)?,
        CutoffRule::Fixed(t) if t > 0.0 && t.is_finite() => t,
        CutoffRule::Fixed(_) => return Err(Error::DegenerateCutoff(c)),
    };
    let problem = MaxentProblem::from_power_moments(&c, 0.0, cutoff, opts.nodes)?;
    let sol = fime_solve(&problem, &opts.fime)?;
    let mut phase_clipped = 0;
    let phase_grid = GridFunction::from_fn(Domain::Interval { a: 0.0, b: cutoff }, opts.grid, |t| {
        let v = sol.density_at(t);
        if v > 1.0 {
            phase_clipped += 1;
        }
        v.min(1.0)
    })?;
    let radon_values = radon_slice(&phase_grid, opts.pad, opts.extension)?;
    Ok(RaySlice {
        direction: direction.clone(),
        pushforward_moments: m,
        phase_moments: c,
        cutoff,
        solver: sol.dual,
        phase_clipped,
        phase_grid,
        radon_values,
    })
}

/// Reconstructs every ray in parallel; results keep the input order.
pub fn sweep_rays(gamma: &MultiMoments, directions: &[RayDirection], opts: &RayOptions) -> Vec<Result<RaySlice>> {
    directions.par_iter().map(|d| reconstruct_ray(gamma, d, opts)).collect()
}
