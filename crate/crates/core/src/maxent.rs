//! Fast iterative maximum-entropy (FIME) solver.
//!
//! The density is discretized on quadrature nodes as `p_j = exp[(Aᵀα)_j − 1]`
//! and the dual variables are updated one row at a time by the multiplicative
//! correction `λ = ln(μ′_i / [A′p̃]_i)` on a preconditioned system whose
//! entries lie in `(0, 1)`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponent cap used when evaluating `exp`.
pub const EXPONENT_CAP: f64 = 700.0;

/// Quadrature rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Midpoint,
    GaussLegendre,
}

/// Nodes and positive weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quadrature {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Quadrature {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Composite midpoint or Gauss-Legendre rule with `k` nodes on `[a, b]`.
pub fn build_quadrature(a: f64, b: f64, k: usize, rule: Rule) -> Result<Quadrature> {
    if k < 2 {
        return Err(Error::TooFewNodes(k));
    }
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidInterval(a, b));
    }
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    Ok(match rule {
        Rule::Midpoint => {
            let h = (b - a) / k as f64;
            Quadrature {
                nodes: (0..k).map(|j| a + (j as f64 + 0.5) * h).collect(),
                weights: vec![h; k],
            }
        }
        Rule::GaussLegendre => {
            let (x, w) = gauss_legendre_reference(k);
            Quadrature {
                nodes: x.iter().map(|t| mid + half * t).collect(),
                weights: w.iter().map(|v| half * v).collect(),
            }
        }
    })
}

/// Equispaced rule on the circle: `θ_j = −π + 2πj/G`, weights `2π/G`.
pub fn circle_quadrature(g: usize) -> Result<Quadrature> {
    if g < 2 {
        return Err(Error::TooFewNodes(g));
    }
    let h = 2.0 * PI / g as f64;
    Ok(Quadrature {
        nodes: (0..g).map(|j| -PI + j as f64 * h).collect(),
        weights: vec![h; g],
    })
}

/// `P_n(x)` and `P_n'(x)` by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss-Legendre nodes (increasing) and weights on `[−1, 1]`.
fn gauss_legendre_reference(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Basis functions `T_i`; row 0 is always the constant 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    /// `x^i`, `i = 0..=N`.
    Monomial,
    /// Legendre polynomials shifted to `[a, b]`, `i = 0..=N`.
    Legendre { a: f64, b: f64 },
    /// `1, cos θ, sin θ, …, cos Mθ, sin Mθ`.
    Trigonometric,
}

impl Basis {
    /// Number of rows for order `n`.
    pub fn rows(&self, n: usize) -> usize {
        match self {
            Basis::Trigonometric => 2 * n + 1,
            _ => n + 1,
        }
    }

    /// All basis values at `x` for order `n`.
    pub fn eval(&self, n: usize, x: f64) -> Vec<f64> {
        match *self {
            Basis::Monomial => {
                let mut v = Vec::with_capacity(n + 1);
                let mut p = 1.0;
                for _ in 0..=n {
                    v.push(p);
                    p *= x;
                }
                v
            }
            Basis::Legendre { a, b } => {
                let s = (2.0 * x - a - b) / (b - a);
                let mut v = vec![1.0];
                if n >= 1 {
                    v.push(s);
                }
                for k in 1..n {
                    let kf = k as f64;
                    v.push(((2.0 * kf + 1.0) * s * v[k] - kf * v[k - 1]) / (kf + 1.0));
                }
                v
            }
            Basis::Trigonometric => {
                let mut v = vec![1.0];
                for k in 1..=n {
                    let (s, c) = (k as f64 * x).sin_cos();
                    v.push(c);
                    v.push(s);
                }
                v
            }
        }
    }
}

/// Dense matrix `a_ij = T_i(x_j)`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisMatrix {
    pub basis: Basis,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<f64>,
}

impl BasisMatrix {
    pub fn new(basis: Basis, order: usize, nodes: &[f64]) -> Self {
        let rows = basis.rows(order);
        let cols = nodes.len();
        let mut entries = vec![0.0; rows * cols];
        for (j, &x) in nodes.iter().enumerate() {
            for (i, v) in basis.eval(order, x).into_iter().enumerate() {
                entries[i * cols + j] = v;
            }
        }
        BasisMatrix {
            basis,
            rows,
            cols,
            entries,
        }
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    /// `A · v`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, x)| a * x).sum())
            .collect()
    }

    /// `Aᵀ · α`.
    pub fn apply_transpose(&self, alpha: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for (i, &al) in alpha.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += al * a;
            }
        }
        out
    }
}

/// Converts power moments `∫x^k dμ` to moments against the Legendre
/// polynomials shifted to `[a, b]`.
pub fn legendre_moments(power: &[f64], a: f64, b: f64) -> Vec<f64> {
    let n = power.len();
    if n == 0 {
        return Vec::new();
    }
    let scale = 2.0 / (b - a);
    let shift = -(a + b) / (b - a);
    // polynomial coefficients of P_i(s(x)) in powers of x
    let mut polys: Vec<Vec<f64>> = vec![vec![1.0]];
    if n > 1 {
        polys.push(vec![shift, scale]);
    }
    for k in 1..n.saturating_sub(1) {
        let kf = k as f64;
        let mut next = vec![0.0; k + 2];
        for (d, c) in polys[k].iter().enumerate() {
            next[d] += (2.0 * kf + 1.0) * shift * c;
            next[d + 1] += (2.0 * kf + 1.0) * scale * c;
        }
        for (d, c) in polys[k - 1].iter().enumerate() {
            next[d] -= kf * c;
        }
        for c in &mut next {
            *c /= kf + 1.0;
        }
        polys.push(next);
    }
    polys
        .iter()
        .map(|p| p.iter().zip(power).map(|(c, m)| c * m).sum())
        .collect()
}

/// Real moments against the trigonometric basis from complex moments
/// `τ(k) = (1/2π) ∫ f e^{−ikθ} dθ`.
pub fn trig_real_moments(tau: &[num_complex::Complex64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * tau.len());
    for (k, t) in tau.iter().enumerate() {
        out.push(2.0 * PI * t.re);
        if k > 0 {
            out.push(-2.0 * PI * t.im);
        }
    }
    out
}

/// Alternative scalings of the preconditioning step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scaling {
    /// `t_i = 1/(M_i + δ)`.
    #[default]
    Unit,
    /// `t_i = 1/(N (M_i + δ))`, slower in practice.
    RowCount,
}

/// Offsets, scales and factors of the preconditioning map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreconditionMeta {
    pub offsets: Vec<f64>,
    pub scales: Vec<f64>,
    pub factors: Vec<f64>,
    pub delta: f64,
}

/// `a′_ij = t_i(u_i + a_ij)` and `μ′_i = t_i(u_i + μ_i)` with
/// `u_i = δ − min_j a_ij`, `M_i = max_j(u_i + a_ij)`, `t_i = 1/(M_i + δ)`.
///
/// `μ` must be normalized so that the constant row carries `μ_0 = 1`;
/// otherwise `u_i + μ_i` is not the moment of `u_i + T_i`.
pub fn precondition(
    a: &BasisMatrix,
    mu: &[f64],
    delta: f64,
    scaling: Scaling,
) -> Result<(BasisMatrix, Vec<f64>, PreconditionMeta)> {
    if !(delta > 0.0) {
        return Err(Error::InvalidDelta(delta));
    }
    if mu.len() != a.rows {
        return Err(Error::LengthMismatch {
            what: "moments",
            expected: a.rows,
            got: mu.len(),
        });
    }
    let n = (a.rows - 1).max(1) as f64;
    let mut out = a.clone();
    let mut mu_c = Vec::with_capacity(a.rows);
    let mut meta = PreconditionMeta {
        offsets: Vec::new(),
        scales: Vec::new(),
        factors: Vec::new(),
        delta,
    };
    for i in 0..a.rows {
        let row = a.row(i);
        if row.iter().all(|&v| v == 0.0) {
            return Err(Error::DegenerateRow(i));
        }
        let min = row.iter().copied().fold(f64::INFINITY, f64::min);
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let u = delta - min;
        let m = u + max;
        let t = match scaling {
            Scaling::Unit => 1.0 / (m + delta),
            Scaling::RowCount => 1.0 / (n * (m + delta)),
        };
        for v in &mut out.entries[i * a.cols..(i + 1) * a.cols] {
            *v = t * (u + *v);
        }
        let mc = t * (u + mu[i]);
        if !(mc > 0.0) {
            return Err(Error::NonPositiveConditionedMoment { index: i, value: mc });
        }
        mu_c.push(mc);
        meta.offsets.push(u);
        meta.scales.push(m);
        meta.factors.push(t);
    }
    Ok((out, mu_c, meta))
}

/// Densities at the nodes and whether the exponent hit [`EXPONENT_CAP`].
#[derive(Debug, Clone, PartialEq)]
pub struct PrimalValues {
    /// `p_j = exp[(Aᵀα)_j − 1]`.
    pub density: Vec<f64>,
    /// `p̃_j = w_j p_j`.
    pub weighted: Vec<f64>,
    pub clamped: bool,
}

/// Evaluates the primal density for dual variables `alpha`.
pub fn primal_eval(alpha: &[f64], a: &BasisMatrix, quad: &Quadrature) -> Result<PrimalValues> {
    if alpha.len() != a.rows {
        return Err(Error::LengthMismatch {
            what: "alpha",
            expected: a.rows,
            got: alpha.len(),
        });
    }
    if quad.len() != a.cols {
        return Err(Error::LengthMismatch {
            what: "quadrature nodes",
            expected: a.cols,
            got: quad.len(),
        });
    }
    let mut clamped = false;
    let density: Vec<f64> = a
        .apply_transpose(alpha)
        .into_iter()
        .map(|e| capped_exp(e - 1.0, &mut clamped))
        .collect();
    let weighted = density.iter().zip(&quad.weights).map(|(p, w)| p * w).collect();
    Ok(PrimalValues {
        density,
        weighted,
        clamped,
    })
}

fn capped_exp(e: f64, clamped: &mut bool) -> f64 {
    if e > EXPONENT_CAP {
        *clamped = true;
        EXPONENT_CAP.exp()
    } else {
        e.exp()
    }
}

/// Constraint deviation `h_i = [A p̃]_i − μ_i` and its Euclidean norm.
pub fn constraint_residual(alpha: &[f64], a: &BasisMatrix, quad: &Quadrature, mu: &[f64]) -> Result<(Vec<f64>, f64)> {
    let p = primal_eval(alpha, a, quad)?;
    let h: Vec<f64> = a.apply(&p.weighted).iter().zip(mu).map(|(x, m)| x - m).collect();
    let norm = h.iter().map(|x| x * x).sum::<f64>().sqrt();
    Ok((h, norm))
}

/// A discretized entropy problem: basis of a given order, quadrature and
/// target moments `∫ T_i ρ`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxentProblem {
    pub basis: Basis,
    pub order: usize,
    pub quadrature: Quadrature,
    pub moments: Vec<f64>,
}

impl MaxentProblem {
    pub fn new(basis: Basis, order: usize, quadrature: Quadrature, moments: Vec<f64>) -> Result<Self> {
        let rows = basis.rows(order);
        if moments.len() != rows {
            return Err(Error::LengthMismatch {
                what: "moments",
                expected: rows,
                got: moments.len(),
            });
        }
        if moments.is_empty() {
            return Err(Error::EmptyMoments);
        }
        Ok(MaxentProblem {
            basis,
            order,
            quadrature,
            moments,
        })
    }

    /// Power moments `γ_0..γ_N` on `[a, b]`, solved in the shifted Legendre
    /// basis with `k` Gauss nodes.
    pub fn from_power_moments(power: &[f64], a: f64, b: f64, k: usize) -> Result<Self> {
        if power.is_empty() {
            return Err(Error::EmptyMoments);
        }
        let quad = build_quadrature(a, b, k, Rule::GaussLegendre)?;
        Self::new(
            Basis::Legendre { a, b },
            power.len() - 1,
            quad,
            legendre_moments(power, a, b),
        )
    }

    pub fn matrix(&self) -> BasisMatrix {
        BasisMatrix::new(self.basis, self.order, &self.quadrature.nodes)
    }
}

/// Dual initialization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Init {
    #[default]
    Zero,
    Random {
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FimeOptions {
    /// Stop once the unconditioned residual norm drops below this.
    pub tolerance: f64,
    /// Budget of single-coordinate updates.
    pub max_updates: usize,
    pub delta: f64,
    pub scaling: Scaling,
    pub init: Init,
    /// Record residual and dual objective after every sweep.
    pub trace: bool,
}

impl Default for FimeOptions {
    fn default() -> Self {
        FimeOptions {
            tolerance: 1e-9,
            max_updates: 100_000,
            delta: 1.0,
            scaling: Scaling::Unit,
            init: Init::Zero,
            trace: false,
        }
    }
}

/// Dual variables in the original basis, with convergence status.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualSolution {
    pub converged: bool,
    pub iterations: usize,
    pub residual_norm: f64,
    pub alpha: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub updates: usize,
    pub residual: f64,
    /// `1ᵀp̃ − μ′ᵀα′` on the preconditioned problem.
    pub dual_objective: f64,
}

/// Output of [`fime_solve`].
#[derive(Debug, Clone, PartialEq)]
pub struct MaxentSolution {
    pub dual: DualSolution,
    pub meta: PreconditionMeta,
    pub basis: Basis,
    pub order: usize,
    pub quadrature: Quadrature,
    /// Density at the quadrature nodes.
    pub density: Vec<f64>,
    pub clamped: bool,
    pub trace: Vec<TracePoint>,
}

impl MaxentSolution {
    /// `exp(Σ α_i T_i(x) − 1)`.
    pub fn density_at(&self, x: f64) -> f64 {
        let e: f64 = self
            .basis
            .eval(self.order, x)
            .iter()
            .zip(&self.dual.alpha)
            .map(|(t, a)| t * a)
            .sum();
        (e - 1.0).min(EXPONENT_CAP).exp()
    }

    /// Quadrature of `f · ρ` on the solver nodes.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.quadrature
            .nodes
            .iter()
            .zip(&self.quadrature.weights)
            .zip(&self.density)
            .map(|((&x, &w), &p)| w * p * f(x))
            .sum()
    }
}

/// Runs cyclic FIME updates until the unconditioned residual falls below
/// the tolerance or the update budget is spent.
///
/// Non-convergence is reported through `converged = false`; it is the
/// expected outcome for moments on the boundary of the moment cone.
pub fn fime_solve(problem: &MaxentProblem, opts: &FimeOptions) -> Result<MaxentSolution> {
    let quad = &problem.quadrature;
    let a = problem.matrix();
    let mass = problem.moments[0];
    if !(mass > 0.0) {
        return Err(Error::NonPositiveMass(mass));
    }
    let mu_n: Vec<f64> = problem.moments.iter().map(|m| m / mass).collect();
    let (ac, mu_c, meta) = precondition(&a, &mu_n, opts.delta, opts.scaling)?;
    let rows = a.rows;
    let cols = a.cols;

    let mut alpha_c = match opts.init {
        Init::Zero => vec![0.0; rows],
        Init::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..rows).map(|_| rng.gen_range(-0.05..0.05)).collect()
        }
    };
    let mut exponent: Vec<f64> = ac.apply_transpose(&alpha_c).iter().map(|e| e - 1.0).collect();
    let mut clamped = false;
    let mut weighted: Vec<f64> = exponent
        .iter()
        .zip(&quad.weights)
        .map(|(&e, w)| w * capped_exp(e, &mut clamped))
        .collect();

    let residual_of = |weighted: &[f64]| -> f64 {
        a.apply(weighted)
            .iter()
            .zip(&problem.moments)
            .map(|(x, m)| (mass * x - m).powi(2))
            .sum::<f64>()
            .sqrt()
    };

    let mut residual = residual_of(&weighted);
    let mut converged = residual < opts.tolerance;
    let mut updates = 0;
    let mut trace = Vec::new();
    while !converged && updates < opts.max_updates {
        let i = updates % rows;
        let row = ac.row(i);
        let s: f64 = row.iter().zip(&weighted).map(|(r, q)| r * q).sum();
        if !(s > 0.0 && s.is_finite()) {
            break;
        }
        let lambda = (mu_c[i] / s).ln();
        alpha_c[i] += lambda;
        for j in 0..cols {
            exponent[j] += lambda * row[j];
            weighted[j] = quad.weights[j] * capped_exp(exponent[j], &mut clamped);
        }
        updates += 1;
        if i == rows - 1 {
            residual = residual_of(&weighted);
            converged = residual < opts.tolerance;
            if opts.trace {
                let obj = weighted.iter().sum::<f64>() - mu_c.iter().zip(&alpha_c).map(|(m, x)| m * x).sum::<f64>();
                trace.push(TracePoint {
                    updates,
                    residual,
                    dual_objective: obj,
                });
            }
        }
    }
    if !converged {
        residual = residual_of(&weighted);
        converged = residual < opts.tolerance;
    }

    // back to the original basis: Σ α′_i t_i (u_i + T_i) = Σ α_i T_i, row 0 ≡ 1
    let mut alpha: Vec<f64> = alpha_c.iter().zip(&meta.factors).map(|(x, t)| x * t).collect();
    alpha[0] += alpha_c
        .iter()
        .zip(meta.factors.iter().zip(&meta.offsets))
        .map(|(x, (t, u))| x * t * u)
        .sum::<f64>()
        + mass.ln();
    let density = weighted.iter().zip(&quad.weights).map(|(q, w)| mass * q / w).collect();
    log::debug!("fime: {updates} updates, residual {residual:e}, converged {converged}");
    Ok(MaxentSolution {
        dual: DualSolution {
            converged,
            iterations: updates,
            residual_norm: residual,
            alpha,
        },
        meta,
        basis: problem.basis,
        order: problem.order,
        quadrature: quad.clone(),
        density,
        clamped,
        trace,
    })
}
