use proptest::prelude::*;

use zodfo::estimators::{coord_full_estimate, gaussian_component_estimate, vr_inner_gradient};
use zodfo::objective::full_objective_uncounted;
use zodfo::problems::{quadratic_objective, QuadraticObjective};
use zodfo::varag::{
    epoch_query_cost, inner_aggregate, inner_extrapolate, optimize, optimize_with_exact_gradients,
    prox_step, run_epoch, run_epoch_observed, EpochState, InnerStep,
};
use zodfo::{
    EstimatorConfig, FiniteSum, GradientOracle, PivotOption, Point, QueryCounter, Regime,
    RngStream, Schedule, SolveError, SolverConfig, Timing,
};

fn pt(v: &[f64]) -> Point {
    Point::new(v.to_vec()).unwrap()
}

fn scalar_quadratic() -> QuadraticObjective {
    QuadraticObjective::from_diagonals(vec![vec![1.0]], 1.0, 0.0).unwrap()
}

fn deterministic(cfg: &mut SolverConfig) {
    cfg.report.timing = Timing::Disabled;
}

#[test]
fn one_epoch_decreases_scalar_quadratic() {
    let q = scalar_quadratic();
    let sched = Schedule::new(Regime::CoordConvex, 1, 1, 1.0, 0.0, 1).unwrap();
    let trace = optimize(&q, &pt(&[1.0]), &SolverConfig::new(sched, 1, 0)).unwrap();
    // T = 1, α = p = ½, γ = 1/6: x̲ = 1, x_1 = 5/6, x̄_1 = 11/12
    let x = trace.final_point[0];
    assert!((x - 11.0 / 12.0).abs() < 1e-12, "x = {x}");
    assert!(trace.final_value().unwrap() < 0.5);
}

#[test]
fn first_inner_gradient_equals_pivotal() {
    let q = quadratic_objective(4, 9, 0.1, 1.0, 2).unwrap().objective;
    // in the convex regimes x̲_1 is an exact copy of the pivot
    for regime in [Regime::GaussConvex, Regime::CoordConvex] {
        let sched = Schedule::new(regime, 4, 9, 1.0, 0.0, 1).unwrap();
        let cfg = SolverConfig::new(sched, 1, 7);
        let mut rng = RngStream::new(7);
        let counter = QueryCounter::new();
        let mut first = None;
        let mut observer = |step: &InnerStep<'_>| {
            if step.t == 1 {
                first = Some((
                    step.x_under.clone(),
                    step.pivot.clone(),
                    step.gradient.clone(),
                    step.pivotal.gradient.clone(),
                ));
            }
        };
        let state = EpochState::initial(&pt(&[0.3, -0.1, 0.8, 0.5]));
        run_epoch_observed(&state, &cfg, &q, &counter, &mut rng, &mut observer).unwrap();
        let (x_under, pivot, g, g_tilde) = first.unwrap();
        assert_eq!(x_under, pivot, "{regime}");
        assert_eq!(g, g_tilde, "{regime}");
    }
}

#[test]
fn pivot_is_theta_weighted_mean_of_aggregates() {
    let q = quadratic_objective(3, 20, 0.05, 1.0, 4).unwrap().objective;
    for regime in [Regime::GaussStrongly, Regime::CoordConvex] {
        let sched = Schedule::new(regime, 3, 20, 1.0, 0.05, 2).unwrap();
        let cfg = SolverConfig::new(sched, 1, 1);
        let mut rng = RngStream::new(1);
        let counter = QueryCounter::new();
        // late epoch so that geometric weights are in play for the strongly regime
        let mut state = EpochState::initial(&pt(&[1.0, -1.0, 0.5]));
        state.epoch = cfg.schedule.s0() + 2;
        let mut seen: Vec<(f64, Point)> = Vec::new();
        let mut observer = |step: &InnerStep<'_>| seen.push((step.theta, step.x_bar.clone()));
        let next = run_epoch_observed(&state, &cfg, &q, &counter, &mut rng, &mut observer).unwrap();
        let total: f64 = seen.iter().map(|(w, _)| w).sum();
        let mut mean = Point::zeros(3);
        for (w, xb) in &seen {
            mean.axpy(w / total, xb);
        }
        let rel = mean.sub(&next.x_tilde).norm() / next.x_tilde.norm();
        assert!(rel <= 1e-12, "{regime}: {rel}");
        assert_eq!(
            seen.len() as u64,
            cfg.schedule.batched_inner_length(state.epoch + 1)
        );
    }
}

#[test]
fn single_epoch_matches_run_epoch() {
    let q = quadratic_objective(3, 10, 0.1, 1.0, 0).unwrap().objective;
    let sched = Schedule::new(Regime::GaussConvex, 3, 10, 1.0, 0.0, 1).unwrap();
    let cfg = SolverConfig::new(sched, 1, 11);
    let x0 = pt(&[0.2, 0.4, -0.6]);
    let trace = optimize(&q, &x0, &cfg).unwrap();
    let counter = QueryCounter::new();
    let state = run_epoch(
        &EpochState::initial(&x0),
        &cfg,
        &q,
        &counter,
        &mut RngStream::new(11),
    )
    .unwrap();
    assert_eq!(trace.final_point, state.x_tilde);
    assert_eq!(trace.total_queries(), counter.total());
    assert_eq!(trace.records.len(), 1);
    assert_eq!(state.epoch, 1);
    assert!(state.pivotal.is_some());
}

#[test]
fn pivot_options_diverge_after_first_epoch() {
    let q = quadratic_objective(4, 16, 0.05, 1.0, 5).unwrap().objective;
    let sched = Schedule::new(Regime::GaussConvex, 4, 16, 1.0, 0.0, 1).unwrap();
    let x0 = Point::filled(4, 0.5);
    let mut a = SolverConfig::new(sched, 4, 9);
    deterministic(&mut a);
    let mut b = a.clone();
    b.pivot = PivotOption::LastAggregate;
    let (ta, tb) = (
        optimize(&q, &x0, &a).unwrap(),
        optimize(&q, &x0, &b).unwrap(),
    );
    assert_eq!(ta.records[0], tb.records[0]);
    assert_ne!(ta.records[1].f_value, tb.records[1].f_value);
    assert_eq!(ta.total_queries(), tb.total_queries());
}

#[test]
fn strongly_convex_quadratic_linear_rate() {
    let q = quadratic_objective(5, 50, 0.1, 1.0, 0).unwrap().objective;
    let sched = Schedule::new(Regime::CoordStrongly, 5, 50, 1.0, 0.1, 1).unwrap();
    let mut cfg = SolverConfig::new(sched, 30, 3);
    cfg.report.f_star = Some(0.0);
    let x0 = Point::filled(5, 1.0 / 5f64.sqrt());
    let trace = optimize(&q, &x0, &cfg).unwrap();
    assert!(trace.final_subopt().unwrap() <= 1e-6 * trace.initial_value);
}

#[test]
fn queries_follow_closed_form_per_epoch() {
    let q = quadratic_objective(3, 6, 0.1, 1.0, 1).unwrap().objective;
    for regime in Regime::ALL {
        let sched = Schedule::new(regime, 3, 6, 1.0, 0.1, 2).unwrap();
        let trace = optimize(
            &q,
            &Point::filled(3, 1.0),
            &SolverConfig::new(sched.clone(), 9, 0),
        )
        .unwrap();
        let mut total = 0;
        for (s, rec) in (1..).zip(&trace.records) {
            total += epoch_query_cost(&sched, s);
            assert_eq!(rec.queries, total, "{regime} epoch {s}");
        }
    }
}

#[test]
fn seeded_runs_repeat() {
    let q = quadratic_objective(3, 12, 0.1, 1.0, 1).unwrap().objective;
    let sched = Schedule::new(Regime::GaussStrongly, 3, 12, 1.0, 0.1, 3).unwrap();
    let cfg = SolverConfig::new(sched, 8, 21);
    let x0 = Point::filled(3, 1.0);
    let (a, b) = (
        optimize(&q, &x0, &cfg).unwrap(),
        optimize(&q, &x0, &cfg).unwrap(),
    );
    assert!(a.same_outcome(&b));
    let mut other = cfg.clone();
    other.seed = 22;
    assert!(!a.same_outcome(&optimize(&q, &x0, &other).unwrap()));
}

#[test]
fn oversized_step_reports_divergence_with_partial_trace() {
    let q = quadratic_objective(3, 8, 0.1, 1.0, 1).unwrap().objective;
    let sched = Schedule::new(Regime::CoordConvex, 3, 8, 1.0, 0.0, 1)
        .unwrap()
        .with_equivalent_step(1e200)
        .unwrap();
    match optimize(
        &q,
        &Point::filled(3, 1.0),
        &SolverConfig::new(sched, 200, 0),
    ) {
        Err(SolveError::Diverged {
            epoch,
            partial,
            diagnostic,
        }) => {
            assert_eq!(partial.records.len() + 1, epoch);
            assert!(!diagnostic.is_empty());
            assert!(partial.records.iter().all(|r| r.f_value.is_finite()));
        }
        other => panic!("expected divergence, got {other:?}"),
    }
}

#[test]
fn mismatched_schedule_is_rejected() {
    let q = quadratic_objective(3, 8, 0.1, 1.0, 1).unwrap().objective;
    let sched = Schedule::new(Regime::CoordConvex, 4, 8, 1.0, 0.0, 1).unwrap();
    assert!(matches!(
        optimize(
            &q,
            &Point::zeros(3),
            &SolverConfig::new(sched.clone(), 1, 0)
        ),
        Err(SolveError::Invalid(_))
    ));
    assert!(matches!(
        optimize(&q, &Point::zeros(4), &SolverConfig::new(sched, 1, 0)),
        Err(SolveError::Invalid(_))
    ));
}

#[test]
fn single_component_exact_hook_is_gradient_at_extrapolation() {
    // n = 1: G_t = ∇f(x̲_t), so the exact run is deterministic in the seed
    let q = QuadraticObjective::from_diagonals(vec![vec![0.8, 0.3]], 1.0, 0.0).unwrap();
    let sched = Schedule::new(Regime::GaussConvex, 2, 1, 1.0, 0.0, 1).unwrap();
    let x0 = pt(&[1.0, 1.0]);
    let a =
        optimize_with_exact_gradients(&q, &x0, &SolverConfig::new(sched.clone(), 3, 1)).unwrap();
    let b = optimize_with_exact_gradients(&q, &x0, &SolverConfig::new(sched, 3, 2)).unwrap();
    assert_eq!(a.final_point, b.final_point);
    assert_eq!(a.total_queries(), 0);
}

// Variance of the variance-reduced estimate on quadratics.

/// `(1/n) Σ_i D_i` applied to `v`.
fn mean_hessian_apply(q: &QuadraticObjective, v: &Point) -> Point {
    let mean = q.mean_diagonal();
    Point::new(mean.iter().zip(v.as_slice()).map(|(h, v)| h * v).collect()).unwrap()
}

fn empirical_variance(
    q: &QuadraticObjective,
    x_under: &Point,
    pivot: &Point,
    draws: usize,
    rng: &mut RngStream,
) -> f64 {
    let cfg = EstimatorConfig::default();
    let counter = QueryCounter::new();
    let pivotal =
        coord_full_estimate(q, pivot, &cfg, zodfo::EstimatorFlavor::Gaussian, &counter).unwrap();
    // ∇f_μ = ∇f on a quadratic
    let target = q.gradient(x_under);
    let mut total = 0.0;
    for _ in 0..draws {
        let i = rng.index(q.num_components());
        let u = rng.gaussian(q.dim());
        let a = gaussian_component_estimate(q, i, x_under, &u, &cfg, &counter).unwrap();
        let b = gaussian_component_estimate(q, i, pivot, &u, &cfg, &counter).unwrap();
        total += vr_inner_gradient(&a, &b, &pivotal)
            .unwrap()
            .dist_sq(&target);
    }
    total / draws as f64
}

#[test]
fn vr_gradient_at_pivot_is_pivotal() {
    let q = quadratic_objective(4, 10, 0.1, 1.0, 8).unwrap().objective;
    let cfg = EstimatorConfig::default();
    let counter = QueryCounter::new();
    let x = pt(&[0.5, -0.2, 0.1, 1.0]);
    let pivotal =
        coord_full_estimate(&q, &x, &cfg, zodfo::EstimatorFlavor::Gaussian, &counter).unwrap();
    let mut rng = RngStream::new(4);
    for i in 0..10 {
        let u = rng.gaussian(4);
        let a = gaussian_component_estimate(&q, i, &x, &u, &cfg, &counter).unwrap();
        assert_eq!(
            vr_inner_gradient(&a, &a, &pivotal).unwrap(),
            pivotal.gradient
        );
    }
}

#[test]
fn variance_vanishes_at_the_pivot() {
    let q = quadratic_objective(4, 10, 0.1, 1.0, 8).unwrap().objective;
    let x = pt(&[0.5, -0.2, 0.1, 1.0]);
    let var = empirical_variance(&q, &x, &x, 500, &mut RngStream::new(0));
    assert!(var < 1e-18, "{var}");
}

#[test]
fn variance_respects_bound_near_pivot() {
    let (d, n) = (6, 15);
    let q = quadratic_objective(d, n, 0.05, 1.0, 9).unwrap().objective;
    let (l, mu) = (q.smoothness(), EstimatorConfig::default().mu());
    let mut rng = RngStream::new(10);
    for pair in 0..10 {
        let pivot = rng.gaussian(d);
        let x_under = pivot.add(&rng.gaussian(d).scaled(0.1));
        let delta = pivot.sub(&x_under);
        // f_μ(x̃) − f_μ(x̲) − ⟨∇f_μ(x̲), x̃ − x̲⟩ = ½ Δᵀ H Δ
        let bregman = 0.5 * delta.dot(&mean_hessian_apply(&q, &delta));
        let bound = 18.0 * mu * mu * l * l * ((d + 6) as f64).powi(3)
            + 8.0 * (d as f64 + 4.0) * l * bregman;
        let var = empirical_variance(&q, &x_under, &pivot, 20_000, &mut rng);
        assert!(
            var <= 1.5 * bound,
            "pair {pair}: variance {var} vs bound {bound}"
        );
    }
}

proptest! {
    #[test]
    fn prox_step_solves_its_subproblem(
        x_prev in prop::collection::vec(-5.0..5.0f64, 3),
        x_under in prop::collection::vec(-5.0..5.0f64, 3),
        g in prop::collection::vec(-5.0..5.0f64, 3),
        gamma in 0.01..2.0f64,
        tau in 0.0..2.0f64,
    ) {
        let (xp, xu, gp) = (pt(&x_prev), pt(&x_under), pt(&g));
        let x = prox_step(&xp, &xu, &gp, gamma, tau);
        let objective = |z: &Point| {
            gamma * (gp.dot(z) + tau / 2.0 * xu.dist_sq(z)) + 0.5 * xp.dist_sq(z)
        };
        for j in 0..3 {
            let foc = gamma * (g[j] + tau * (x[j] - x_under[j])) + (x[j] - x_prev[j]);
            prop_assert!(foc.abs() <= 1e-10);
            for h in [-1e-3, 1e-3] {
                let mut z = x.clone();
                z.as_mut_slice()[j] += h;
                prop_assert!(objective(&z) > objective(&x));
            }
        }
    }

    #[test]
    fn combinations_fix_equal_inputs(
        v in prop::collection::vec(-3.0..3.0f64, 1..5),
        alpha in 0.0..0.5f64,
        p in 0.0..0.5f64,
        gamma in 0.01..1.0f64,
        tau in 0.0..1.0f64,
    ) {
        let v = pt(&v);
        prop_assert!(inner_extrapolate(&v, &v, &v, alpha, p, gamma, tau).max_abs_diff(&v) <= 1e-12);
        prop_assert!(inner_aggregate(&v, &v, &v, alpha, p).max_abs_diff(&v) <= 1e-12);
    }
}

#[test]
fn reported_values_use_the_uncounted_channel() {
    let q = quadratic_objective(2, 5, 0.1, 1.0, 3).unwrap().objective;
    let sched = Schedule::new(Regime::CoordConvex, 2, 5, 1.0, 0.0, 1).unwrap();
    let trace = optimize(
        &q,
        &Point::filled(2, 1.0),
        &SolverConfig::new(sched.clone(), 3, 0),
    )
    .unwrap();
    let formula: u64 = (1..=3).map(|s| epoch_query_cost(&sched, s)).sum();
    assert_eq!(trace.total_queries(), formula);
    assert_eq!(
        trace.final_value().unwrap(),
        full_objective_uncounted(&q, &trace.final_point)
    );
}
