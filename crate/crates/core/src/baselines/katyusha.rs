//! Simplified ZO-Katyusha.
//!
//! Each epoch restarts from `x_0 = y_0 = x̃`, runs
//!
//! ```text
//! y_t = y_{t−1} − γ G_t        G_t from the draws at x_{t−1} and x̃
//! x_t = x̃ + α (y_t − x̃)
//! ```
//!
//! and sets the next pivot to the plain mean of `x_1..x_T`. The momentum
//! `p₀` fixes `α = 1 − p₀` and `γ = η / α`.

use super::BaselineConfig;
use crate::error::{Error, Result, SolveError};
use crate::estimators::EstimatorFlavor;
use crate::objective::{validate_objective, FiniteSum, GradientOracle, QueryCounter};
use crate::point::Point;
use crate::rng::RngStream;
use crate::source::{batch_vr_gradient, draw_batch, Exact, GradientSource, ZerothOrder};
use crate::trace::{RunTrace, TraceBuilder};

#[derive(Clone, Debug, PartialEq)]
pub struct KatyushaConfig {
    pub base: BaselineConfig,
    /// Katyusha momentum `p₀`; the coupling is `α₀ = 1 − p₀`.
    pub p0: f64,
}

impl KatyushaConfig {
    pub fn new(base: BaselineConfig) -> Self {
        Self { base, p0: 0.5 }
    }

    pub fn alpha(&self) -> f64 {
        1.0 - self.p0
    }

    pub fn gamma(&self) -> f64 {
        self.base.eta / self.alpha()
    }

    fn validate(&self, n: usize) -> Result<()> {
        self.base.validate(n)?;
        if !(self.p0.is_finite() && (0.0..1.0).contains(&self.p0)) {
            return Err(Error::InvalidParameter(format!(
                "p0 = {} must lie in [0, 1)",
                self.p0
            )));
        }
        Ok(())
    }
}

/// One inner step: `(y_t, x_t)`.
pub(crate) fn katyusha_step(
    y_prev: &Point,
    pivot: &Point,
    g: &Point,
    gamma: f64,
    alpha: f64,
) -> (Point, Point) {
    let y = y_prev.offset(-gamma, g);
    let x = Point::combination(&[(1.0 - alpha, pivot), (alpha, &y)]);
    (y, x)
}

pub fn zo_katyusha<F: FiniteSum + ?Sized>(
    obj: &F,
    x0: &Point,
    cfg: &KatyushaConfig,
) -> Result<RunTrace, SolveError> {
    validate_objective(obj)?;
    run(&ZerothOrder(obj), x0, cfg, "zo-katyusha")
}

/// First-order simplified Katyusha through the same recursion.
pub fn zo_katyusha_exact<G: GradientOracle + ?Sized>(
    obj: &G,
    x0: &Point,
    cfg: &KatyushaConfig,
) -> Result<RunTrace, SolveError> {
    validate_objective(obj)?;
    run(&Exact(obj), x0, cfg, "katyusha-exact")
}

fn run<S: GradientSource + ?Sized>(
    src: &S,
    x0: &Point,
    cfg: &KatyushaConfig,
    label: &str,
) -> Result<RunTrace, SolveError> {
    let (n, d) = (src.num_components(), src.dim());
    cfg.validate(n)?;
    if x0.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: x0.dim(),
        }
        .into());
    }
    let base = &cfg.base;
    let (alpha, gamma) = (cfg.alpha(), cfg.gamma());
    let mut echo = base.echo();
    echo.push(("p0".into(), cfg.p0.to_string()));
    let counter = QueryCounter::new();
    let mut rng = RngStream::new(base.seed);
    let mut trace = TraceBuilder::new(label, base.seed, echo, base.report, src.value(x0), x0);
    let mut pivot = x0.clone();

    for s in 1..=base.epochs {
        let pivotal = src.pivotal(
            &pivot,
            EstimatorFlavor::Coordinate,
            &base.estimator,
            &counter,
        )?;
        let steps = base.inner.batched(s, base.batch);
        let mut x = pivot.clone();
        let mut y = pivot.clone();
        let mut sum = Point::zeros(d);
        let mut failure = None;
        for t in 1..=steps {
            let draws = draw_batch(&mut rng, n, d, base.flavor, base.batch);
            let g = match batch_vr_gradient(
                src,
                &x,
                &pivot,
                &pivotal,
                &draws,
                &base.estimator,
                &counter,
            ) {
                Ok(g) => g,
                Err(Error::NonFinite { coordinate }) => {
                    failure = Some(format!(
                        "non-finite evaluation point (coordinate {coordinate})"
                    ));
                    break;
                }
                Err(e) => return Err(e.into()),
            };
            (y, x) = katyusha_step(&y, &pivot, &g, gamma, alpha);
            if !x.is_finite() {
                failure = Some(format!("iterate not finite at t = {t}"));
                break;
            }
            sum.axpy(1.0, &x);
        }
        let next = sum.scaled(1.0 / steps as f64);
        let value = src.value(&next);
        if failure.is_none() && !(next.is_finite() && value.is_finite()) {
            failure = Some(format!("objective value {value} at the epoch average"));
        }
        if let Some(diagnostic) = failure {
            return Err(SolveError::Diverged {
                epoch: s as usize,
                diagnostic,
                partial: Box::new(trace.finish()),
            });
        }
        pivot = next;
        trace.push(value, counter.total(), &pivot);
    }
    Ok(trace.finish())
}
