//! Deterministic accelerated ZO-Nesterov.
//!
//! Every step spends `2n` queries on a two-point estimate of `∇f(y_k)` with
//! one Gaussian direction shared by all components, then
//!
//! ```text
//! x_{k+1} = y_k − h g_k
//! y_{k+1} = x_{k+1} + β_k (x_{k+1} − x_k)
//! ```
//!
//! The momentum sequence is a stand-in (`β_k = k/(k+3)` by default) and is
//! labelled as such in the trace metadata.

use crate::error::{Error, Result, SolveError};
use crate::estimators::EstimatorConfig;
use crate::objective::{validate_objective, FiniteSum, GradientOracle, QueryCounter};
use crate::point::Point;
use crate::rng::RngStream;
use crate::source::{Exact, GradientSource, ZerothOrder};
use crate::trace::{ReportOptions, RunTrace, TraceBuilder};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum NesterovMomentum {
    /// `β_k = k/(k+3)`, k counted from 0.
    #[default]
    Standard,
    /// `β_k = 0`: plain zeroth-order gradient descent.
    None,
    Constant(f64),
}

impl NesterovMomentum {
    pub fn beta(self, k: u64) -> f64 {
        match self {
            NesterovMomentum::Standard => k as f64 / (k as f64 + 3.0),
            NesterovMomentum::None => 0.0,
            NesterovMomentum::Constant(b) => b,
        }
    }

    fn label(self) -> String {
        match self {
            NesterovMomentum::Standard => "k/(k+3) (stand-in)".into(),
            NesterovMomentum::None => "0".into(),
            NesterovMomentum::Constant(b) => format!("{b} (constant)"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NesterovConfig {
    /// Step size `h`.
    pub step: f64,
    /// Query budgets at which to record; record `j` is taken after
    /// `max(1, round(Q_j / 2n))` steps.
    pub checkpoints: Vec<u64>,
    pub momentum: NesterovMomentum,
    pub seed: u64,
    pub estimator: EstimatorConfig,
    pub report: ReportOptions,
}

impl NesterovConfig {
    pub fn new(step: f64, checkpoints: Vec<u64>, seed: u64) -> Self {
        Self {
            step,
            checkpoints,
            momentum: NesterovMomentum::default(),
            seed,
            estimator: EstimatorConfig::default(),
            report: ReportOptions::default(),
        }
    }

    /// Records every `steps` steps, `records` times.
    pub fn every(step: f64, steps: u64, records: usize, n: usize, seed: u64) -> Self {
        let per = 2 * n as u64 * steps;
        Self::new(step, (1..=records as u64).map(|j| j * per).collect(), seed)
    }

    /// Records at the query counts nearest to another run's epoch
    /// boundaries.
    pub fn matching(step: f64, other: &RunTrace, seed: u64) -> Self {
        Self::new(
            step,
            other.records.iter().map(|r| r.queries).collect(),
            seed,
        )
    }

    /// `1 / (4(d+4)L)`
    pub fn default_step(d: usize, l: f64) -> f64 {
        1.0 / (4.0 * (d as f64 + 4.0) * l)
    }

    /// Step counts matching the checkpoints.
    pub fn step_counts(&self, n: usize) -> Vec<u64> {
        let per_step = 2.0 * n as f64;
        self.checkpoints
            .iter()
            .map(|&q| ((q as f64 / per_step).round() as u64).max(1))
            .collect()
    }

    fn validate(&self) -> Result<()> {
        if !(self.step.is_finite() && self.step >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "step = {} must be >= 0",
                self.step
            )));
        }
        if self.checkpoints.is_empty() {
            return Err(Error::InvalidParameter(
                "need at least one checkpoint".into(),
            ));
        }
        if self.checkpoints.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidParameter(
                "checkpoints must be non-decreasing".into(),
            ));
        }
        Ok(())
    }
}

pub fn zo_nesterov<F: FiniteSum + ?Sized>(
    obj: &F,
    x0: &Point,
    cfg: &NesterovConfig,
) -> Result<RunTrace, SolveError> {
    validate_objective(obj)?;
    run(&ZerothOrder(obj), x0, cfg, "zo-nesterov")
}

/// First-order Nesterov through the same recursion (`g_k = ∇f(y_k)`).
pub fn zo_nesterov_exact<G: GradientOracle + ?Sized>(
    obj: &G,
    x0: &Point,
    cfg: &NesterovConfig,
) -> Result<RunTrace, SolveError> {
    validate_objective(obj)?;
    run(&Exact(obj), x0, cfg, "nesterov-exact")
}

fn run<S: GradientSource + ?Sized>(
    src: &S,
    x0: &Point,
    cfg: &NesterovConfig,
    label: &str,
) -> Result<RunTrace, SolveError> {
    cfg.validate()?;
    let (n, d) = (src.num_components(), src.dim());
    if x0.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: x0.dim(),
        }
        .into());
    }
    let echo = vec![
        ("step".into(), cfg.step.to_string()),
        ("momentum".into(), cfg.momentum.label()),
        ("mu".into(), cfg.estimator.mu().to_string()),
        ("seed".into(), cfg.seed.to_string()),
    ];
    let counter = QueryCounter::new();
    let mut rng = RngStream::new(cfg.seed);
    let mut trace = TraceBuilder::new(label, cfg.seed, echo, cfg.report, src.value(x0), x0);
    let mut x = x0.clone();
    let mut y = x0.clone();
    let mut k = 0u64;

    for target in cfg.step_counts(n) {
        while k < target {
            let u = rng.gaussian(d);
            let g = match src.shared_direction(&y, &u, &cfg.estimator, &counter) {
                Ok(g) => g,
                Err(Error::NonFinite { .. }) => return Err(diverged(trace, k)),
                Err(e) => return Err(e.into()),
            };
            let x_next = y.offset(-cfg.step, &g);
            let beta = cfg.momentum.beta(k);
            y = Point::combination(&[(1.0 + beta, &x_next), (-beta, &x)]);
            x = x_next;
            k += 1;
            if !(x.is_finite() && y.is_finite()) {
                return Err(diverged(trace, k));
            }
        }
        let value = src.value(&x);
        if !value.is_finite() {
            return Err(diverged(trace, k));
        }
        trace.push(value, counter.total(), &x);
    }
    Ok(trace.finish())
}

fn diverged(trace: TraceBuilder, k: u64) -> SolveError {
    SolveError::Diverged {
        epoch: trace.epochs() + 1,
        diagnostic: format!("non-finite iterate after step {k}"),
        partial: Box::new(trace.finish()),
    }
}
