//! Truncated multivariate formal power series.
//!
//! Coefficients are stored densely for every multi-index of total degree at
//! most the truncation order, in graded-lexicographic order. Every power
//! computed here is triangular: an output coefficient of degree `n` only
//! reads input coefficients of degree `<= n`, so truncating the input never
//! changes the low-degree part of the output.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A multi-index `(α_1, …, α_d)` of non-negative integers.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        MultiIndex(entries)
    }

    pub fn zero(dim: usize) -> Self {
        MultiIndex(vec![0; dim])
    }

    /// The unit index `e_i`.
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = vec![0; dim];
        v[i] = 1;
        MultiIndex(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Total degree `|α|`.
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &MultiIndex) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `α!` as a float.
    pub fn factorial(&self) -> f64 {
        self.0.iter().map(|&a| factorial(a)).product()
    }

    /// `|γ/μ| = Σ_{i : μ_i ≠ 0} γ_i / μ_i`.
    pub fn ratio_sum(&self, mu: &MultiIndex) -> f64 {
        self.0
            .iter()
            .zip(&mu.0)
            .filter(|(_, &m)| m != 0)
            .map(|(&g, &m)| g as f64 / m as f64)
            .sum()
    }

    /// Number of nonzero entries, `|α/α|`.
    pub fn support_size(&self) -> usize {
        self.0.iter().filter(|&&a| a != 0).count()
    }

    /// `x^α` for a real point.
    pub fn monomial(&self, x: &[f64]) -> f64 {
        self.0.iter().zip(x).map(|(&a, &xi)| xi.powi(a as i32)).product()
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex(v)
    }
}

impl From<&[u32]> for MultiIndex {
    fn from(v: &[u32]) -> Self {
        MultiIndex(v.to_vec())
    }
}

pub(crate) fn factorial(n: u32) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

pub(crate) fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Enumerates all multi-indices of dimension `dim` with total degree `deg`,
/// in lexicographically decreasing order.
pub fn indices_of_degree(dim: usize, deg: u32) -> Vec<MultiIndex> {
    fn rec(dim: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if prefix.len() + 1 == dim {
            prefix.push(left);
            out.push(MultiIndex(prefix.clone()));
            prefix.pop();
            return;
        }
        for a in (0..=left).rev() {
            prefix.push(a);
            rec(dim, left - a, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if dim == 0 {
        return out;
    }
    rec(dim, deg, &mut Vec::with_capacity(dim), &mut out);
    out
}

/// Index layout shared by all series of the same dimension and order.
#[derive(Debug)]
struct Layout {
    dim: usize,
    order: u32,
    indices: Vec<MultiIndex>,
    lookup: HashMap<MultiIndex, usize>,
}

impl Layout {
    fn new(dim: usize, order: u32) -> Self {
        let indices: Vec<MultiIndex> = (0..=order).flat_map(|deg| indices_of_degree(dim, deg)).collect();
        let lookup = indices.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
        Layout {
            dim,
            order,
            indices,
            lookup,
        }
    }

    fn position(&self, idx: &MultiIndex) -> Option<usize> {
        self.lookup.get(idx).copied()
    }

    /// Difference index `μ - γ` for `γ <= μ`.
    fn difference(&self, mu: &MultiIndex, gamma: &MultiIndex) -> usize {
        let diff: Vec<u32> = mu.0.iter().zip(&gamma.0).map(|(m, g)| m - g).collect();
        self.lookup[&MultiIndex(diff)]
    }
}

/// Truncated power series in `dim` variables with complex coefficients.
#[derive(Clone)]
pub struct FormalSeries {
    layout: Arc<Layout>,
    coeffs: Vec<Complex64>,
}

impl fmt::Debug for FormalSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FormalSeries")
            .field("dimension", &self.layout.dim)
            .field("order", &self.layout.order)
            .field("coefficients", &self.coeffs)
            .finish()
    }
}

impl PartialEq for FormalSeries {
    fn eq(&self, other: &Self) -> bool {
        self.layout.dim == other.layout.dim && self.layout.order == other.layout.order && self.coeffs == other.coeffs
    }
}

impl FormalSeries {
    /// The zero series.
    ///
    /// Panics if `dim == 0`.
    pub fn zero(dim: usize, order: u32) -> Self {
        assert!(dim > 0, "series dimension must be positive");
        let layout = Arc::new(Layout::new(dim, order));
        let coeffs = vec![Complex64::new(0.0, 0.0); layout.indices.len()];
        FormalSeries { layout, coeffs }
    }

    pub fn constant(dim: usize, order: u32, c: Complex64) -> Self {
        let mut s = Self::zero(dim, order);
        s.coeffs[0] = c;
        s
    }

    pub fn one(dim: usize, order: u32) -> Self {
        Self::constant(dim, order, Complex64::new(1.0, 0.0))
    }

    /// Builds a series from `(index, coefficient)` terms; terms above the
    /// truncation order are dropped.
    pub fn from_terms<I, M>(dim: usize, order: u32, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (M, Complex64)>,
        M: Into<MultiIndex>,
    {
        let mut s = Self::zero(dim, order);
        for (idx, c) in terms {
            let idx = idx.into();
            if idx.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: idx.dim(),
                });
            }
            if let Some(p) = s.layout.position(&idx) {
                s.coeffs[p] += c;
            }
        }
        Ok(s)
    }

    /// Univariate series `Σ c_n z^n` truncated at `order`.
    pub fn univariate(order: u32, coeffs: &[Complex64]) -> Self {
        let mut s = Self::zero(1, order);
        for (n, c) in coeffs.iter().enumerate().take(order as usize + 1) {
            s.coeffs[n] = *c;
        }
        s
    }

    pub fn univariate_real(order: u32, coeffs: &[f64]) -> Self {
        let c: Vec<Complex64> = coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::univariate(order, &c)
    }

    pub fn dimension(&self) -> usize {
        self.layout.dim
    }

    pub fn order(&self) -> u32 {
        self.layout.order
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn free_term(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// Coefficient at `idx`; zero for indices beyond the truncation order.
    pub fn coeff(&self, idx: &[u32]) -> Complex64 {
        self.layout
            .position(&MultiIndex(idx.to_vec()))
            .map(|p| self.coeffs[p])
            .unwrap_or_default()
    }

    pub fn set(&mut self, idx: &[u32], c: Complex64) -> Result<()> {
        if idx.len() != self.layout.dim {
            return Err(Error::DimensionMismatch {
                expected: self.layout.dim,
                got: idx.len(),
            });
        }
        if let Some(p) = self.layout.position(&MultiIndex(idx.to_vec())) {
            self.coeffs[p] = c;
        }
        Ok(())
    }

    /// Coefficients in graded order (univariate: `c_0, c_1, …`).
    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.layout.indices
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, Complex64)> + '_ {
        self.layout.indices.iter().zip(self.coeffs.iter().copied())
    }

    /// Largest `|Im c|` over all coefficients.
    pub fn max_imaginary(&self) -> f64 {
        self.coeffs.iter().map(|c| c.im.abs()).fold(0.0, f64::max)
    }

    /// Re-truncates to a (possibly different) order.
    pub fn truncated(&self, order: u32) -> Self {
        let mut out = Self::zero(self.layout.dim, order);
        for (p, idx) in out.layout.clone().indices.iter().enumerate() {
            if let Some(q) = self.layout.position(idx) {
                out.coeffs[p] = self.coeffs[q];
            }
        }
        out
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|x| x * c)
    }

    fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        FormalSeries {
            layout: self.layout.clone(),
            coeffs: self.coeffs.iter().map(|&x| f(x)).collect(),
        }
    }

    fn check_compatible(&self, other: &Self) {
        assert_eq!(self.layout.dim, other.layout.dim, "series dimension mismatch");
        assert_eq!(self.layout.order, other.layout.order, "series order mismatch");
    }

    /// Truncated Cauchy product.
    pub fn mul_truncated(&self, other: &Self) -> Self {
        self.check_compatible(other);
        let layout = &self.layout;
        let mut out = Self::zero(layout.dim, layout.order);
        for (p, a) in self.coeffs.iter().enumerate() {
            if *a == Complex64::default() {
                continue;
            }
            let ai = &layout.indices[p];
            let room = layout.order - ai.degree();
            for (q, b) in other.coeffs.iter().enumerate() {
                let bi = &layout.indices[q];
                if bi.degree() > room {
                    break;
                }
                let sum: Vec<u32> = ai.0.iter().zip(&bi.0).map(|(x, y)| x + y).collect();
                let r = layout.lookup[&MultiIndex(sum)];
                out.coeffs[r] += a * b;
            }
        }
        out
    }

    /// Lowest total degree carrying a nonzero coefficient.
    fn valuation(&self) -> Option<u32> {
        self.iter()
            .find(|(_, c)| *c != Complex64::default())
            .map(|(i, _)| i.degree())
    }
}

impl Add for &FormalSeries {
    type Output = FormalSeries;
    fn add(self, rhs: &FormalSeries) -> FormalSeries {
        self.check_compatible(rhs);
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
        out
    }
}

impl Sub for &FormalSeries {
    type Output = FormalSeries;
    fn sub(self, rhs: &FormalSeries) -> FormalSeries {
        self.check_compatible(rhs);
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
        out
    }
}

impl Neg for &FormalSeries {
    type Output = FormalSeries;
    fn neg(self) -> FormalSeries {
        self.map(|x| -x)
    }
}

impl Mul for &FormalSeries {
    type Output = FormalSeries;
    fn mul(self, rhs: &FormalSeries) -> FormalSeries {
        self.mul_truncated(rhs)
    }
}

/// `A^k` by the Miller-Nakos recursion.
///
/// `b_0 = a_0^k`, and for `μ ≠ 0` in graded order
/// `b_μ = Σ_{0<γ≤μ} (1/a_0) [(k+1)|γ/μ| / |μ/μ| − 1] a_γ b_{μ−γ}`.
pub fn series_pow(a: &FormalSeries, k: u32) -> Result<FormalSeries> {
    let a0 = a.free_term();
    if a0 == Complex64::default() {
        return Err(Error::ZeroFreeTerm);
    }
    let layout = a.layout.clone();
    let mut b = FormalSeries {
        layout: layout.clone(),
        coeffs: vec![Complex64::default(); layout.indices.len()],
    };
    b.coeffs[0] = a0.powu(k);
    let kp1 = k as f64 + 1.0;
    let inv_a0 = a0.inv();
    for (p, mu) in layout.indices.iter().enumerate().skip(1) {
        let nz = mu.support_size() as f64;
        let deg = mu.degree();
        let mut acc = Complex64::default();
        for (q, gamma) in layout.indices.iter().enumerate().skip(1) {
            if gamma.degree() > deg {
                break;
            }
            let ag = a.coeffs[q];
            if ag == Complex64::default() || !gamma.le(mu) {
                continue;
            }
            let w = kp1 * gamma.ratio_sum(mu) / nz - 1.0;
            acc += ag * b.coeffs[layout.difference(mu, gamma)] * w;
        }
        b.coeffs[p] = acc * inv_a0;
    }
    Ok(b)
}

/// `S^k` for a series with zero free term, through the binomial expansion
/// `[(S+1) − 1]^k = Σ_j C(k,j)(−1)^{k−j}(S+1)^j` with each `(S+1)^j` taken by
/// [`series_pow`]. Coefficients of degree `< k` are zero by construction and
/// are set exactly.
pub fn series_pow_zero_free(s: &FormalSeries, k: u32) -> Result<FormalSeries> {
    check_zero_free(s)?;
    let shifted = s + &FormalSeries::one(s.dimension(), s.order());
    let mut out = FormalSeries::zero(s.dimension(), s.order());
    for j in 0..=k {
        let sign = if (k - j).is_multiple_of(2) { 1.0 } else { -1.0 };
        let pj = series_pow(&shifted, j)?;
        let c = sign * binomial(k, j);
        for (o, x) in out.coeffs.iter_mut().zip(&pj.coeffs) {
            *o += x * c;
        }
    }
    zero_below_degree(&mut out, k);
    Ok(out)
}

fn zero_below_degree(s: &mut FormalSeries, k: u32) {
    for (c, idx) in s.coeffs.iter_mut().zip(&s.layout.indices) {
        if idx.degree() < k {
            *c = Complex64::default();
        } else {
            break;
        }
    }
}

fn check_zero_free(s: &FormalSeries) -> Result<()> {
    if s.free_term() != Complex64::default() {
        return Err(Error::NonzeroFreeTerm);
    }
    Ok(())
}

/// Powers `S^1, …, S^K` of a zero-free-term series.
///
/// Univariate series are factored as `S = z^v T` with `T(0) ≠ 0` so that each
/// power is a single Miller-Nakos run on `T`; this avoids the cancellation of
/// the alternating binomial sum. Multivariate series use the binomial route.
fn zero_free_powers(s: &FormalSeries, count: u32) -> Result<Vec<FormalSeries>> {
    let dim = s.dimension();
    let order = s.order();
    let Some(v) = s.valuation() else {
        return Ok(vec![FormalSeries::zero(dim, order); count as usize]);
    };
    if dim == 1 {
        let tail: Vec<Complex64> = s.coeffs[v as usize..].to_vec();
        let t = FormalSeries::univariate(order - v, &tail);
        let mut out = Vec::with_capacity(count as usize);
        for k in 1..=count {
            let shift = v * k;
            let mut sk = FormalSeries::zero(1, order);
            if shift <= order {
                let tk = series_pow(&t.truncated(order - shift), k)?;
                sk.coeffs[shift as usize..].copy_from_slice(&tk.coeffs);
            }
            out.push(sk);
        }
        return Ok(out);
    }

    let shifted = s + &FormalSeries::one(dim, order);
    let lifted: Vec<FormalSeries> = (0..=count).map(|j| series_pow(&shifted, j)).collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(count as usize);
    for k in 1..=count {
        let mut sk = FormalSeries::zero(dim, order);
        if k <= order {
            for (j, pj) in lifted.iter().enumerate().take(k as usize + 1) {
                let j = j as u32;
                let c = if (k - j).is_multiple_of(2) { 1.0 } else { -1.0 } * binomial(k, j);
                for (o, x) in sk.coeffs.iter_mut().zip(&pj.coeffs) {
                    *o += x * c;
                }
            }
            zero_below_degree(&mut sk, k);
        }
        out.push(sk);
    }
    Ok(out)
}

/// `Σ_{k=1}^{K} w_k S^k`, truncated, with `K = weights.len()`.
///
/// With `w_k = 1/k` this is `−log(1−S)`; with `w_k = (−1)^{k+1}/k` it is
/// `log(1+S)`.
pub fn accumulate_powers(s: &FormalSeries, weights: &[Complex64]) -> Result<FormalSeries> {
    check_zero_free(s)?;
    let powers = zero_free_powers(s, weights.len() as u32)?;
    let mut out = FormalSeries::zero(s.dimension(), s.order());
    for (w, sk) in weights.iter().zip(&powers) {
        for (o, x) in out.coeffs.iter_mut().zip(&sk.coeffs) {
            *o += x * w;
        }
    }
    Ok(out)
}

/// Weights `1/k` for `k = 1..=count` (the `−log(1−S)` series).
pub fn neg_log_one_minus_weights(count: u32) -> Vec<Complex64> {
    (1..=count).map(|k| Complex64::new(1.0 / k as f64, 0.0)).collect()
}

/// Weights `(−1)^{k+1}/k` for `k = 1..=count` (the `log(1+S)` series).
pub fn log_one_plus_weights(count: u32) -> Vec<Complex64> {
    (1..=count)
        .map(|k| {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            Complex64::new(sign / k as f64, 0.0)
        })
        .collect()
}

/// `exp(S) = Σ_{k=0}^{N} S^k / k!` for a zero-free-term series.
pub fn series_exp(s: &FormalSeries) -> Result<FormalSeries> {
    check_zero_free(s)?;
    let weights: Vec<Complex64> = (1..=s.order())
        .map(|k| Complex64::new(1.0 / factorial(k), 0.0))
        .collect();
    let mut out = accumulate_powers(s, &weights)?;
    out.coeffs[0] += Complex64::new(1.0, 0.0);
    Ok(out)
}

/// JSON form: `{ "dimension", "order", "coefficients": [[index, re, im], …] }`.
#[derive(Serialize, Deserialize)]
struct SeriesRepr {
    dimension: usize,
    order: u32,
    coefficients: Vec<(Vec<u32>, f64, f64)>,
}

impl Serialize for FormalSeries {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesRepr {
            dimension: self.dimension(),
            order: self.order(),
            coefficients: self
                .iter()
                .filter(|(_, c)| *c != Complex64::default())
                .map(|(i, c)| (i.0.clone(), c.re, c.im))
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FormalSeries {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = SeriesRepr::deserialize(deserializer)?;
        if repr.dimension == 0 {
            return Err(serde::de::Error::custom("series dimension must be positive"));
        }
        FormalSeries::from_terms(
            repr.dimension,
            repr.order,
            repr.coefficients
                .into_iter()
                .map(|(i, re, im)| (MultiIndex(i), Complex64::new(re, im))),
        )
        .map_err(serde::de::Error::custom)
    }
}
