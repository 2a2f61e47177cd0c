use crate::error::{Error, Result};
use crate::objective::{full_objective_uncounted, GradientOracle};
use crate::point::Point;

pub const DEFAULT_MAX_ITER: usize = 100_000;

#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceOptimum {
    pub x: Point,
    pub f: f64,
    pub iterations: usize,
    pub grad_norm: f64,
}

/// [`reference_optimum_from`] started at the origin.
pub fn reference_optimum<G: GradientOracle + ?Sized>(
    obj: &G,
    tol: f64,
    max_iter: usize,
) -> Result<ReferenceOptimum> {
    reference_optimum_from(obj, &Point::zeros(obj.dim()), tol, max_iter)
}

/// Accelerated gradient descent with analytic gradients and adaptive restart,
/// run until `‖∇f‖ ≤ tol`. Uses step `1/L` where `L` is the component
/// smoothness (an upper bound for the average).
///
/// Never touches a query counter.
pub fn reference_optimum_from<G: GradientOracle + ?Sized>(
    obj: &G,
    x0: &Point,
    tol: f64,
    max_iter: usize,
) -> Result<ReferenceOptimum> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tol = {tol} must be positive"
        )));
    }
    if x0.dim() != obj.dim() {
        return Err(Error::DimensionMismatch {
            expected: obj.dim(),
            found: x0.dim(),
        });
    }
    let step = 1.0 / obj.smoothness();
    let mut x = x0.clone();
    let mut y = x.clone();
    let mut t = 1.0_f64;
    let mut grad_norm = f64::INFINITY;

    for k in 0..max_iter {
        let gx = obj.gradient(&x);
        grad_norm = gx.norm();
        if grad_norm <= tol {
            return Ok(ReferenceOptimum {
                f: full_objective_uncounted(obj, &x),
                x,
                iterations: k,
                grad_norm,
            });
        }
        let gy = obj.gradient(&y);
        let x_next = y.offset(-step, &gy);
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        // restart the momentum whenever it points uphill
        if gy.dot(&x_next.sub(&x)) > 0.0 {
            t = 1.0;
            y = x_next.clone();
        } else {
            y = Point::combination(&[
                (1.0 + (t - 1.0) / t_next, &x_next),
                (-(t - 1.0) / t_next, &x),
            ]);
            t = t_next;
        }
        x = x_next;
        if !x.is_finite() {
            break;
        }
    }
    Err(Error::CapExceeded {
        iterations: max_iter,
        grad_norm,
    })
}
