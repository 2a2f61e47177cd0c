//! Zeroth-order gradient estimators.
//!
//! * Gaussian two-point: `g_μ(x, u, i) = (f_i(x + μu) − f_i(x)) / μ · u`, 2 queries.
//! * Coordinate central differences:
//!   `g_ν(x, i) = Σ_j (f_i(x + νe_j) − f_i(x − νe_j)) / (2ν) · e_j`, 2d queries.
//! * Variance-reduced inner gradient `G = g(x̲) − g(x̃) + g̃`.

use crate::error::{Error, Result};
use crate::objective::{evaluate_component, full_objective_uncounted, FiniteSum, QueryCounter};
use crate::point::Point;
use crate::rng::RngStream;

pub const DEFAULT_SMOOTHING: f64 = 1e-3;

/// Smoothing radius `mu` (Gaussian) and finite-difference step `nu` (coordinate).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EstimatorConfig {
    mu: f64,
    nu: f64,
}

impl EstimatorConfig {
    pub fn new(mu: f64, nu: f64) -> Result<Self> {
        for (name, v) in [("mu", mu), ("nu", nu)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(Self { mu, nu })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            mu: DEFAULT_SMOOTHING,
            nu: DEFAULT_SMOOTHING,
        }
    }
}

/// Which estimator drives the inner loop. The pivot always uses the
/// coordinate estimator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EstimatorFlavor {
    Gaussian,
    Coordinate,
}

impl EstimatorFlavor {
    /// Uniform bound `E` on the squared pivotal gradient error.
    pub fn pivotal_error_bound(self, l: f64, d: usize, cfg: &EstimatorConfig) -> f64 {
        match self {
            EstimatorFlavor::Gaussian => error_bound(l, d, cfg.mu, cfg.nu),
            EstimatorFlavor::Coordinate => coordinate_error_bound(l, d, cfg.nu),
        }
    }

    /// Queries spent by one inner-loop estimator pair (at `x̲` and at `x̃`).
    pub fn pair_cost(self, d: usize) -> u64 {
        match self {
            EstimatorFlavor::Gaussian => 4,
            EstimatorFlavor::Coordinate => 4 * d as u64,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EstimatorFlavor::Gaussian => "gaussian",
            EstimatorFlavor::Coordinate => "coordinate",
        }
    }
}

/// `‖g̃ − ∇f_μ(x̃)‖² ≤ 2L²dν² + μ²L²(d+3)³/2` when both estimators are in play.
pub fn error_bound(l: f64, d: usize, mu: f64, nu: f64) -> f64 {
    let d = d as f64;
    2.0 * l * l * d * nu * nu + mu * mu * l * l * (d + 3.0).powi(3) / 2.0
}

/// `‖g_ν(x, i) − ∇f_i(x)‖² ≤ L²dν²`.
pub fn coordinate_error_bound(l: f64, d: usize, nu: f64) -> f64 {
    l * l * d as f64 * nu * nu
}

/// Pivotal gradient `g̃^s` together with its error bound `E`.
#[derive(Clone, Debug, PartialEq)]
pub struct PivotalGradient {
    pub gradient: Point,
    pub error_bound: f64,
}

pub fn gaussian_component_estimate(
    obj: &(impl FiniteSum + ?Sized),
    i: usize,
    x: &Point,
    u: &Point,
    cfg: &EstimatorConfig,
    counter: &QueryCounter,
) -> Result<Point> {
    x.check_dim(u)?;
    let mu = cfg.mu;
    let shifted = x.offset(mu, u);
    let f_shifted = evaluate_component(obj, i, &shifted, counter)?;
    let f_base = evaluate_component(obj, i, x, counter)?;
    Ok(u.scaled((f_shifted - f_base) / mu))
}

pub fn coord_component_estimate(
    obj: &(impl FiniteSum + ?Sized),
    i: usize,
    x: &Point,
    cfg: &EstimatorConfig,
    counter: &QueryCounter,
) -> Result<Point> {
    let nu = cfg.nu;
    let d = x.dim();
    let mut probe = x.clone();
    let mut grad = vec![0.0; d];
    for (j, g) in grad.iter_mut().enumerate() {
        let base = x[j];
        probe.as_mut_slice()[j] = base + nu;
        let forward = evaluate_component(obj, i, &probe, counter)?;
        probe.as_mut_slice()[j] = base - nu;
        let backward = evaluate_component(obj, i, &probe, counter)?;
        probe.as_mut_slice()[j] = base;
        *g = (forward - backward) / (2.0 * nu);
    }
    Ok(Point::from_raw(grad))
}

/// `g_ν(x) = (1/n) Σ_i g_ν(x, i)`; `2dn` queries.
pub fn coord_full_estimate(
    obj: &(impl FiniteSum + ?Sized),
    x: &Point,
    cfg: &EstimatorConfig,
    flavor: EstimatorFlavor,
    counter: &QueryCounter,
) -> Result<PivotalGradient> {
    let n = obj.num_components();
    let mut acc = Point::zeros(x.dim());
    for i in 0..n {
        acc.axpy(1.0, &coord_component_estimate(obj, i, x, cfg, counter)?);
    }
    Ok(PivotalGradient {
        gradient: acc.scaled(1.0 / n as f64),
        error_bound: flavor.pivotal_error_bound(obj.smoothness(), x.dim(), cfg),
    })
}

/// `G = g_at_inner − g_at_pivot + g̃`. Both estimates must share their random
/// draws.
pub fn vr_inner_gradient(
    g_at_inner: &Point,
    g_at_pivot: &Point,
    pivotal: &PivotalGradient,
) -> Result<Point> {
    g_at_inner.check_dim(g_at_pivot)?;
    g_at_inner.check_dim(&pivotal.gradient)?;
    let coords = g_at_inner
        .as_slice()
        .iter()
        .zip(g_at_pivot.as_slice())
        .zip(pivotal.gradient.as_slice())
        .map(|((a, b), g)| a - b + g)
        .collect();
    Ok(Point::from_raw(coords))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    /// Standard error of `mean`.
    pub stderr: f64,
    pub samples: usize,
}

/// Monte-Carlo estimate of `f_μ(x) = E_u[f(x + μu)]`. Test oracle only;
/// evaluations are not counted.
pub fn smoothed_value_mc(
    obj: &(impl FiniteSum + ?Sized),
    x: &Point,
    cfg: &EstimatorConfig,
    samples: usize,
    rng: &mut RngStream,
) -> Result<MonteCarloEstimate> {
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be at least 1".into()));
    }
    // Welford
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for k in 0..samples {
        let u = rng.gaussian(x.dim());
        let v = full_objective_uncounted(obj, &x.offset(cfg.mu, &u));
        let delta = v - mean;
        mean += delta / (k + 1) as f64;
        m2 += delta * (v - mean);
    }
    let stderr = if samples > 1 {
        (m2 / (samples - 1) as f64 / samples as f64).sqrt()
    } else {
        0.0
    };
    Ok(MonteCarloEstimate {
        mean,
        stderr,
        samples,
    })
}
