//! Gradient information as seen by the solvers.
//!
//! Solvers are written once against [`GradientSource`]. The zeroth-order
//! source routes everything through the counted estimators; the exact source
//! substitutes analytic gradients (no queries) so a solver can be compared
//! step by step with its first-order counterpart.

use crate::error::Result;
use crate::estimators::{
    coord_component_estimate, coord_full_estimate, gaussian_component_estimate, vr_inner_gradient,
    EstimatorConfig, EstimatorFlavor, PivotalGradient,
};
use crate::objective::{
    evaluate_component, full_objective_uncounted, FiniteSum, GradientOracle, QueryCounter,
};
use crate::point::Point;
use crate::rng::RngStream;

pub(crate) trait GradientSource {
    fn num_components(&self) -> usize;
    fn dim(&self) -> usize;

    /// Uncounted `f(x)`, for reporting.
    fn value(&self, x: &Point) -> f64;

    /// Full-gradient estimate at the pivot.
    fn pivotal(
        &self,
        x: &Point,
        flavor: EstimatorFlavor,
        cfg: &EstimatorConfig,
        counter: &QueryCounter,
    ) -> Result<PivotalGradient>;

    /// Estimate of `∇f_i(x)`; `direction` is `Some(u)` for the Gaussian
    /// estimator and `None` for the coordinate one.
    fn component(
        &self,
        i: usize,
        x: &Point,
        direction: Option<&Point>,
        cfg: &EstimatorConfig,
        counter: &QueryCounter,
    ) -> Result<Point>;

    /// Two-point Gaussian estimate of `∇f(x)` with one shared direction over
    /// all components: `2n` queries.
    fn shared_direction(
        &self,
        x: &Point,
        u: &Point,
        cfg: &EstimatorConfig,
        counter: &QueryCounter,
    ) -> Result<Point>;
}

pub(crate) struct ZerothOrder<'a, F: ?Sized>(pub &'a F);

impl<F: FiniteSum + ?Sized> GradientSource for ZerothOrder<'_, F> {
    fn num_components(&self) -> usize {
        self.0.num_components()
    }

    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn value(&self, x: &Point) -> f64 {
        full_objective_uncounted(self.0, x)
    }

    fn pivotal(
        &self,
        x: &Point,
        flavor: EstimatorFlavor,
        cfg: &EstimatorConfig,
        counter: &QueryCounter,
    ) -> Result<PivotalGradient> {
        coord_full_estimate(self.0, x, cfg, flavor, counter)
    }

    fn component(
        &self,
        i: usize,
        x: &Point,
        direction: Option<&Point>,
        cfg: &EstimatorConfig,
        counter: &QueryCounter,
    ) -> Result<Point> {
        match direction {
            Some(u) => gaussian_component_estimate(self.0, i, x, u, cfg, counter),
            None => coord_component_estimate(self.0, i, x, cfg, counter),
        }
    }

    fn shared_direction(
        &self,
        x: &Point,
        u: &Point,
        cfg: &EstimatorConfig,
        counter: &QueryCounter,
    ) -> Result<Point> {
        x.check_dim(u)?;
        let n = self.0.num_components();
        let shifted = x.offset(cfg.mu(), u);
        let mut diff = 0.0;
        for i in 0..n {
            let f_shifted = evaluate_component(self.0, i, &shifted, counter)?;
            let f_base = evaluate_component(self.0, i, x, counter)?;
            diff += f_shifted - f_base;
        }
        Ok(u.scaled(diff / n as f64 / cfg.mu()))
    }
}

pub(crate) struct Exact<'a, G: ?Sized>(pub &'a G);

impl<G: GradientOracle + ?Sized> GradientSource for Exact<'_, G> {
    fn num_components(&self) -> usize {
        self.0.num_components()
    }

    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn value(&self, x: &Point) -> f64 {
        full_objective_uncounted(self.0, x)
    }

    fn pivotal(
        &self,
        x: &Point,
        _flavor: EstimatorFlavor,
        _cfg: &EstimatorConfig,
        _counter: &QueryCounter,
    ) -> Result<PivotalGradient> {
        Ok(PivotalGradient {
            gradient: self.0.gradient(x),
            error_bound: 0.0,
        })
    }

    fn component(
        &self,
        i: usize,
        x: &Point,
        _direction: Option<&Point>,
        _cfg: &EstimatorConfig,
        _counter: &QueryCounter,
    ) -> Result<Point> {
        Point::new(self.0.component_gradient(i, x.as_slice()))
    }

    fn shared_direction(
        &self,
        x: &Point,
        _u: &Point,
        _cfg: &EstimatorConfig,
        _counter: &QueryCounter,
    ) -> Result<Point> {
        Ok(self.0.gradient(x))
    }
}

/// One inner-loop draw: a component index and, for the Gaussian estimator,
/// a direction.
pub(crate) struct Draw {
    pub index: usize,
    pub direction: Option<Point>,
}

/// Draws `batch` pairs serially: index first, then direction.
pub(crate) fn draw_batch(
    rng: &mut RngStream,
    n: usize,
    d: usize,
    flavor: EstimatorFlavor,
    batch: usize,
) -> Vec<Draw> {
    (0..batch)
        .map(|_| {
            let index = rng.index(n);
            let direction = match flavor {
                EstimatorFlavor::Gaussian => Some(rng.gaussian(d)),
                EstimatorFlavor::Coordinate => None,
            };
            Draw { index, direction }
        })
        .collect()
}

/// Mini-batch variance-reduced gradient: the batch means of the estimates at
/// `x_inner` and at `x_pivot` (same draws) fed to [`vr_inner_gradient`].
pub(crate) fn batch_vr_gradient<S: GradientSource + ?Sized>(
    src: &S,
    x_inner: &Point,
    x_pivot: &Point,
    pivotal: &PivotalGradient,
    draws: &[Draw],
    cfg: &EstimatorConfig,
    counter: &QueryCounter,
) -> Result<Point> {
    let d = x_inner.dim();
    let mut at_inner = Point::zeros(d);
    let mut at_pivot = Point::zeros(d);
    for draw in draws {
        let u = draw.direction.as_ref();
        at_inner.axpy(1.0, &src.component(draw.index, x_inner, u, cfg, counter)?);
        at_pivot.axpy(1.0, &src.component(draw.index, x_pivot, u, cfg, counter)?);
    }
    if draws.len() > 1 {
        let inv = 1.0 / draws.len() as f64;
        at_inner = at_inner.scaled(inv);
        at_pivot = at_pivot.scaled(inv);
    }
    vr_inner_gradient(&at_inner, &at_pivot, pivotal)
}
