//! ZO-Varag: accelerated variance-reduced zeroth-order descent.
//!
//! Each epoch takes a coordinate-wise full gradient at the pivot `x̃`, then
//! runs `T_b(s)` inner iterations over three sequences:
//!
//! ```text
//! x̲_t = [(1+τγ)(1−α−p) x̄_{t−1} + α x_{t−1} + (1+τγ) p x̃] / [1 + τγ(1−α)]
//! G_t = g(x̲_t) − g(x̃) + g̃                       (shared draws)
//! x_t = argmin_x γ[⟨G_t, x⟩ + τ/2 ‖x̲_t − x‖²] + ½‖x_{t−1} − x‖²
//! x̄_t = (1−α−p) x̄_{t−1} + α x_t + p x̃
//! ```
//!
//! and closes with `x̃^s = Σ θ_t x̄_t / Σ θ_t`.

use std::fmt;

use crate::error::{Error, Result, SolveError};
use crate::estimators::{EstimatorConfig, EstimatorFlavor, PivotalGradient};
use crate::objective::{validate_objective, FiniteSum, GradientOracle, QueryCounter};
use crate::point::Point;
use crate::rng::RngStream;
use crate::schedule::Schedule;
use crate::source::{batch_vr_gradient, draw_batch, Exact, GradientSource, ZerothOrder};
use crate::trace::{ReportOptions, RunTrace, TraceBuilder};

/// Which point anchors the next epoch.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum PivotOption {
    /// Option I: the θ-weighted average `x̃^{s−1}`.
    #[default]
    Averaged,
    /// Option II: the last aggregate `x̄^{s−1}`.
    LastAggregate,
}

impl PivotOption {
    pub fn number(self) -> u8 {
        match self {
            PivotOption::Averaged => 1,
            PivotOption::LastAggregate => 2,
        }
    }
}

impl fmt::Display for PivotOption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    /// Also fixes the inner estimator flavor and the batch size.
    pub schedule: Schedule,
    pub pivot: PivotOption,
    pub epochs: u32,
    pub seed: u64,
    pub estimator: EstimatorConfig,
    pub report: ReportOptions,
}

impl SolverConfig {
    pub fn new(schedule: Schedule, epochs: u32, seed: u64) -> Self {
        Self {
            schedule,
            pivot: PivotOption::default(),
            epochs,
            seed,
            estimator: EstimatorConfig::default(),
            report: ReportOptions::default(),
        }
    }

    pub fn flavor(&self) -> EstimatorFlavor {
        self.schedule.regime().flavor()
    }

    fn echo(&self) -> Vec<(String, String)> {
        let s = &self.schedule;
        vec![
            ("regime".into(), s.regime().to_string()),
            ("estimator".into(), self.flavor().name().into()),
            ("pivot".into(), self.pivot.to_string()),
            ("epochs".into(), self.epochs.to_string()),
            ("batch".into(), s.batch().to_string()),
            ("mu".into(), self.estimator.mu().to_string()),
            ("nu".into(), self.estimator.nu().to_string()),
            ("eta".into(), s.equivalent_step().to_string()),
            ("p".into(), s.momentum(1).to_string()),
            ("seed".into(), self.seed.to_string()),
        ]
    }
}

/// Iterates carried from one epoch to the next.
#[derive(Clone, Debug, PartialEq)]
pub struct EpochState {
    /// `x^s`
    pub x: Point,
    /// `x̄^s`
    pub x_bar: Point,
    /// `x̃^s`
    pub x_tilde: Point,
    /// `g̃^s` of the epoch that produced this state; `None` before epoch 1.
    pub pivotal: Option<PivotalGradient>,
    pub epoch: u32,
}

impl EpochState {
    pub fn initial(x0: &Point) -> Self {
        Self {
            x: x0.clone(),
            x_bar: x0.clone(),
            x_tilde: x0.clone(),
            pivotal: None,
            epoch: 0,
        }
    }
}

/// Everything an observer sees after inner iteration `t` of an epoch.
pub struct InnerStep<'a> {
    pub t: u64,
    pub pivot: &'a Point,
    pub pivotal: &'a PivotalGradient,
    pub x_under: &'a Point,
    pub gradient: &'a Point,
    pub x: &'a Point,
    pub x_bar: &'a Point,
    pub theta: f64,
}

pub trait InnerObserver {
    fn observe(&mut self, step: &InnerStep<'_>);
}

impl<F: FnMut(&InnerStep<'_>)> InnerObserver for F {
    fn observe(&mut self, step: &InnerStep<'_>) {
        self(step)
    }
}

struct Silent;

impl InnerObserver for Silent {
    fn observe(&mut self, _step: &InnerStep<'_>) {}
}

/// `x̲ = [(1+τγ)(1−α−p) x̄_prev + α x_prev + (1+τγ) p x̃] / [1 + τγ(1−α)]`
pub fn inner_extrapolate(
    x_bar_prev: &Point,
    x_prev: &Point,
    x_tilde: &Point,
    alpha: f64,
    p: f64,
    gamma: f64,
    tau: f64,
) -> Point {
    let lift = 1.0 + tau * gamma;
    let denom = 1.0 + tau * gamma * (1.0 - alpha);
    Point::combination(&[
        (lift * (1.0 - alpha - p) / denom, x_bar_prev),
        (alpha / denom, x_prev),
        (lift * p / denom, x_tilde),
    ])
}

/// Unique minimizer of `γ[⟨G, x⟩ + τ/2 ‖x_under − x‖²] + ½‖x_prev − x‖²`:
/// `(x_prev + γτ x_under − γ G) / (1 + γτ)`.
pub fn prox_step(x_prev: &Point, x_under: &Point, gradient: &Point, gamma: f64, tau: f64) -> Point {
    let denom = 1.0 + gamma * tau;
    Point::combination(&[
        (1.0 / denom, x_prev),
        (gamma * tau / denom, x_under),
        (-gamma / denom, gradient),
    ])
}

/// `x̄ = (1−α−p) x̄_prev + α x_t + p x̃`
pub fn inner_aggregate(
    x_bar_prev: &Point,
    x_t: &Point,
    x_tilde: &Point,
    alpha: f64,
    p: f64,
) -> Point {
    Point::combination(&[(1.0 - alpha - p, x_bar_prev), (alpha, x_t), (p, x_tilde)])
}

/// Queries spent by epoch `s`: `2dn + c·b·T_b(s)` with `c = 4` (Gaussian)
/// or `4d` (coordinate).
pub fn epoch_query_cost(schedule: &Schedule, s: u32) -> u64 {
    let (d, n) = (schedule.dim() as u64, schedule.num_components() as u64);
    let pair = schedule.regime().flavor().pair_cost(schedule.dim());
    2 * d * n + pair * schedule.batch() as u64 * schedule.batched_inner_length(s)
}

/// Why an epoch stopped early.
#[derive(Debug)]
pub enum EpochFailure {
    Invalid(Error),
    NonFinite(String),
}

impl From<Error> for EpochFailure {
    fn from(e: Error) -> Self {
        match e {
            Error::NonFinite { coordinate } => EpochFailure::NonFinite(format!(
                "non-finite evaluation point (coordinate {coordinate})"
            )),
            other => EpochFailure::Invalid(other),
        }
    }
}

impl fmt::Display for EpochFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EpochFailure::Invalid(e) => write!(f, "{e}"),
            EpochFailure::NonFinite(msg) => f.write_str(msg),
        }
    }
}

/// Runs epoch `state.epoch + 1` with zeroth-order estimates.
pub fn run_epoch<F: FiniteSum + ?Sized>(
    state: &EpochState,
    cfg: &SolverConfig,
    obj: &F,
    counter: &QueryCounter,
    rng: &mut RngStream,
) -> Result<EpochState, EpochFailure> {
    epoch(&ZerothOrder(obj), state, cfg, counter, rng, &mut Silent)
}

/// [`run_epoch`] reporting every inner iteration to `observer`.
pub fn run_epoch_observed<F: FiniteSum + ?Sized>(
    state: &EpochState,
    cfg: &SolverConfig,
    obj: &F,
    counter: &QueryCounter,
    rng: &mut RngStream,
    observer: &mut dyn InnerObserver,
) -> Result<EpochState, EpochFailure> {
    epoch(&ZerothOrder(obj), state, cfg, counter, rng, observer)
}

fn epoch<S: GradientSource + ?Sized>(
    src: &S,
    state: &EpochState,
    cfg: &SolverConfig,
    counter: &QueryCounter,
    rng: &mut RngStream,
    observer: &mut dyn InnerObserver,
) -> Result<EpochState, EpochFailure> {
    let sched = &cfg.schedule;
    let s = state.epoch + 1;
    let (alpha, gamma, p) = (sched.alpha(s), sched.gamma(s), sched.momentum(s));
    let tau = sched.update_tau();
    let flavor = sched.regime().flavor();
    let (n, d) = (src.num_components(), src.dim());

    let pivot = match cfg.pivot {
        PivotOption::Averaged => state.x_tilde.clone(),
        PivotOption::LastAggregate => state.x_bar.clone(),
    };
    let pivotal = src.pivotal(&pivot, flavor, &cfg.estimator, counter)?;
    if !pivotal.gradient.is_finite() {
        return Err(EpochFailure::NonFinite(
            "pivotal gradient is not finite".into(),
        ));
    }

    let weights = sched.theta_weights(s);
    let mut x = state.x.clone();
    let mut x_bar = pivot.clone();
    let mut weighted = Point::zeros(d);
    let mut weight_sum = 0.0;

    for (t, &theta) in (1..).zip(&weights.weights) {
        let x_under = inner_extrapolate(&x_bar, &x, &pivot, alpha, p, gamma, tau);
        if !x_under.is_finite() {
            return Err(EpochFailure::NonFinite(format!(
                "x_under not finite at t = {t}"
            )));
        }
        let draws = draw_batch(rng, n, d, flavor, sched.batch());
        let g = batch_vr_gradient(
            src,
            &x_under,
            &pivot,
            &pivotal,
            &draws,
            &cfg.estimator,
            counter,
        )?;
        x = prox_step(&x, &x_under, &g, gamma, tau);
        x_bar = inner_aggregate(&x_bar, &x, &pivot, alpha, p);
        if !(x.is_finite() && x_bar.is_finite()) {
            return Err(EpochFailure::NonFinite(format!(
                "iterate not finite at t = {t}"
            )));
        }
        weighted.axpy(theta, &x_bar);
        weight_sum += theta;
        observer.observe(&InnerStep {
            t,
            pivot: &pivot,
            pivotal: &pivotal,
            x_under: &x_under,
            gradient: &g,
            x: &x,
            x_bar: &x_bar,
            theta,
        });
    }

    let x_tilde = weighted.scaled(1.0 / weight_sum);
    if !x_tilde.is_finite() {
        return Err(EpochFailure::NonFinite("pivot average not finite".into()));
    }
    Ok(EpochState {
        x,
        x_bar,
        x_tilde,
        pivotal: Some(pivotal),
        epoch: s,
    })
}

/// Runs `cfg.epochs` epochs from `x0` and records `f(x̃^s)` after each.
pub fn optimize<F: FiniteSum + ?Sized>(
    obj: &F,
    x0: &Point,
    cfg: &SolverConfig,
) -> Result<RunTrace, SolveError> {
    validate_objective(obj)?;
    run(&ZerothOrder(obj), x0, cfg, "zo-varag")
}

/// Same recursion with every estimate replaced by the analytic gradient
/// (`∇f_i` for inner estimates, `∇f` at the pivot). No queries are counted.
pub fn optimize_with_exact_gradients<G: GradientOracle + ?Sized>(
    obj: &G,
    x0: &Point,
    cfg: &SolverConfig,
) -> Result<RunTrace, SolveError> {
    validate_objective(obj)?;
    run(&Exact(obj), x0, cfg, "varag-exact")
}

fn run<S: GradientSource + ?Sized>(
    src: &S,
    x0: &Point,
    cfg: &SolverConfig,
    label: &str,
) -> Result<RunTrace, SolveError> {
    check_inputs(src, x0, &cfg.schedule, cfg.epochs)?;
    let counter = QueryCounter::new();
    let mut rng = RngStream::new(cfg.seed);
    let mut trace = TraceBuilder::new(label, cfg.seed, cfg.echo(), cfg.report, src.value(x0), x0);
    let mut state = EpochState::initial(x0);
    for _ in 0..cfg.epochs {
        state = match epoch(src, &state, cfg, &counter, &mut rng, &mut Silent) {
            Ok(next) => next,
            Err(EpochFailure::Invalid(e)) => return Err(e.into()),
            Err(EpochFailure::NonFinite(diagnostic)) => {
                return Err(SolveError::Diverged {
                    epoch: trace.epochs() + 1,
                    diagnostic,
                    partial: Box::new(trace.finish()),
                })
            }
        };
        let value = src.value(&state.x_tilde);
        if !value.is_finite() {
            return Err(SolveError::Diverged {
                epoch: trace.epochs() + 1,
                diagnostic: format!("objective value {value} at the pivot average"),
                partial: Box::new(trace.finish()),
            });
        }
        trace.push(value, counter.total(), &state.x_tilde);
    }
    Ok(trace.finish())
}

pub(crate) fn check_inputs<S: GradientSource + ?Sized>(
    src: &S,
    x0: &Point,
    schedule: &Schedule,
    epochs: u32,
) -> Result<()> {
    if x0.dim() != src.dim() {
        return Err(Error::DimensionMismatch {
            expected: src.dim(),
            found: x0.dim(),
        });
    }
    if schedule.dim() != src.dim() || schedule.num_components() != src.num_components() {
        return Err(Error::InvalidParameter(format!(
            "schedule built for d = {}, n = {} but objective has d = {}, n = {}",
            schedule.dim(),
            schedule.num_components(),
            src.dim(),
            src.num_components()
        )));
    }
    if epochs == 0 {
        return Err(Error::InvalidParameter("need at least one epoch".into()));
    }
    Ok(())
}
