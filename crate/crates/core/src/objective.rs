//! Finite-sum objectives `f(x) = (1/n) Σ f_i(x)` and the counted query channel.
//!
//! Solvers only see component values through [`evaluate_component`], which
//! bumps a [`QueryCounter`] by one per call. Gradients are available to test
//! oracles and the reference minimizer through [`GradientOracle`], never to
//! the zeroth-order solvers themselves.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};
use crate::point::Point;

/// `n` component functions over R^d with smoothness metadata.
///
/// `component` must be pure: the same `(i, x)` always gives the same value.
/// Indices are zero-based.
pub trait FiniteSum: Send + Sync {
    fn num_components(&self) -> usize;

    fn dim(&self) -> usize;

    /// Raw, uncounted value of `f_i(x)`. Solvers go through
    /// [`evaluate_component`] instead.
    fn component(&self, i: usize, x: &[f64]) -> f64;

    /// Per-component gradient Lipschitz constant `L`.
    fn smoothness(&self) -> f64;

    /// Strong convexity constant `τ` of the average; 0 for merely convex.
    fn strong_convexity(&self) -> f64;
}

/// Analytic gradients, for test oracles and reference minimization.
pub trait GradientOracle: FiniteSum {
    fn component_gradient(&self, i: usize, x: &[f64]) -> Vec<f64>;

    fn gradient(&self, x: &Point) -> Point {
        let n = self.num_components();
        let mut acc = vec![0.0; self.dim()];
        for i in 0..n {
            for (a, g) in acc.iter_mut().zip(self.component_gradient(i, x.as_slice())) {
                *a += g;
            }
        }
        let inv = 1.0 / n as f64;
        Point::from_raw(acc.into_iter().map(|a| a * inv).collect())
    }
}

/// Checks the structural invariants `n, d ≥ 1`, `L > 0`, `0 ≤ τ ≤ L`.
pub fn validate_objective(obj: &(impl FiniteSum + ?Sized)) -> Result<()> {
    let (n, d) = (obj.num_components(), obj.dim());
    let (l, tau) = (obj.smoothness(), obj.strong_convexity());
    if n == 0 || d == 0 {
        return Err(Error::InvalidObjective(format!(
            "need n, d >= 1, got n = {n}, d = {d}"
        )));
    }
    if !(l.is_finite() && l > 0.0) {
        return Err(Error::InvalidObjective(format!(
            "smoothness L = {l} must be positive"
        )));
    }
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(Error::InvalidObjective(format!(
            "tau = {tau} must be non-negative"
        )));
    }
    if tau > l {
        return Err(Error::InvalidObjective(format!(
            "tau = {tau} exceeds L = {l}"
        )));
    }
    Ok(())
}

/// Number of single-component evaluations performed so far.
#[derive(Debug, Default)]
pub struct QueryCounter {
    total: AtomicU64,
}

impl QueryCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn total(&self) -> u64 {
        self.total.load(Ordering::Relaxed)
    }

    pub(crate) fn add(&self, queries: u64) {
        self.total.fetch_add(queries, Ordering::Relaxed);
    }
}

/// `f_i(x)` through the counted channel.
pub fn evaluate_component(
    obj: &(impl FiniteSum + ?Sized),
    i: usize,
    x: &Point,
    counter: &QueryCounter,
) -> Result<f64> {
    let n = obj.num_components();
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, n });
    }
    if x.dim() != obj.dim() {
        return Err(Error::DimensionMismatch {
            expected: obj.dim(),
            found: x.dim(),
        });
    }
    if let Some(j) = x.as_slice().iter().position(|c| !c.is_finite()) {
        return Err(Error::NonFinite { coordinate: j });
    }
    counter.add(1);
    Ok(obj.component(i, x.as_slice()))
}

/// `f(x) = (1/n) Σ f_i(x)`, counting `n` queries.
pub fn full_objective(
    obj: &(impl FiniteSum + ?Sized),
    x: &Point,
    counter: &QueryCounter,
) -> Result<f64> {
    let n = obj.num_components();
    let mut sum = 0.0;
    for i in 0..n {
        sum += evaluate_component(obj, i, x, counter)?;
    }
    Ok(sum / n as f64)
}

/// `f(x)` through the reporting side channel: no queries are counted.
pub fn full_objective_uncounted(obj: &(impl FiniteSum + ?Sized), x: &Point) -> f64 {
    let n = obj.num_components();
    (0..n).map(|i| obj.component(i, x.as_slice())).sum::<f64>() / n as f64
}
