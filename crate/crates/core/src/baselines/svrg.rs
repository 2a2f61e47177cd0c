//! ZO-SVRG with a coordinate-wise pivot and randomized inner estimates.
//!
//! Per epoch: `g̃ = g_ν(x̃)` with `x̃` the last iterate, then `T_b(s)` steps
//! `x ← x − η G` with `G` the variance-reduced estimate.

use super::BaselineConfig;
use crate::error::{Error, SolveError};
use crate::estimators::EstimatorFlavor;
use crate::objective::{validate_objective, FiniteSum, GradientOracle, QueryCounter};
use crate::point::Point;
use crate::rng::RngStream;
use crate::source::{batch_vr_gradient, draw_batch, Exact, GradientSource, ZerothOrder};
use crate::trace::{RunTrace, TraceBuilder};

pub fn zo_svrg<F: FiniteSum + ?Sized>(
    obj: &F,
    x0: &Point,
    cfg: &BaselineConfig,
) -> Result<RunTrace, SolveError> {
    validate_objective(obj)?;
    run(&ZerothOrder(obj), x0, cfg, "zo-svrg")
}

/// Plain first-order SVRG: every estimate replaced by the analytic gradient.
pub fn zo_svrg_exact<G: GradientOracle + ?Sized>(
    obj: &G,
    x0: &Point,
    cfg: &BaselineConfig,
) -> Result<RunTrace, SolveError> {
    validate_objective(obj)?;
    run(&Exact(obj), x0, cfg, "svrg-exact")
}

fn run<S: GradientSource + ?Sized>(
    src: &S,
    x0: &Point,
    cfg: &BaselineConfig,
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
    let counter = QueryCounter::new();
    let mut rng = RngStream::new(cfg.seed);
    let mut trace = TraceBuilder::new(label, cfg.seed, cfg.echo(), cfg.report, src.value(x0), x0);
    let mut x = x0.clone();

    for s in 1..=cfg.epochs {
        let pivot = x.clone();
        let pivotal = src.pivotal(
            &pivot,
            EstimatorFlavor::Coordinate,
            &cfg.estimator,
            &counter,
        )?;
        let mut failure = None;
        for t in 1..=cfg.inner.batched(s, cfg.batch) {
            let draws = draw_batch(&mut rng, n, d, cfg.flavor, cfg.batch);
            let g = match batch_vr_gradient(
                src,
                &x,
                &pivot,
                &pivotal,
                &draws,
                &cfg.estimator,
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
            x.axpy(-cfg.eta, &g);
            if !x.is_finite() {
                failure = Some(format!("iterate not finite at t = {t}"));
                break;
            }
        }
        let value = src.value(&x);
        if failure.is_none() && !value.is_finite() {
            failure = Some(format!("objective value {value}"));
        }
        if let Some(diagnostic) = failure {
            return Err(SolveError::Diverged {
                epoch: s as usize,
                diagnostic,
                partial: Box::new(trace.finish()),
            });
        }
        trace.push(value, counter.total(), &x);
    }
    Ok(trace.finish())
}
