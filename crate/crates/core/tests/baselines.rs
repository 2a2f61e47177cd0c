use zodfo::baselines::{
    zo_katyusha, zo_katyusha_exact, zo_nesterov, zo_nesterov_exact, zo_svrg, zo_svrg_exact,
    BaselineConfig, InnerLength, KatyushaConfig, NesterovConfig,
};
use zodfo::problems::quadratic_objective;
use zodfo::varag::optimize;
use zodfo::{FiniteSum, GradientOracle, Point, Regime, RngStream, Schedule, SolverConfig, Timing};

/// `f_i(x) = ⟨c_i, x⟩`
struct Linear {
    rows: Vec<Vec<f64>>,
}

impl FiniteSum for Linear {
    fn num_components(&self) -> usize {
        self.rows.len()
    }

    fn dim(&self) -> usize {
        self.rows[0].len()
    }

    fn component(&self, i: usize, x: &[f64]) -> f64 {
        self.rows[i].iter().zip(x).map(|(c, x)| c * x).sum()
    }

    fn smoothness(&self) -> f64 {
        1.0
    }

    fn strong_convexity(&self) -> f64 {
        0.0
    }
}

impl GradientOracle for Linear {
    fn component_gradient(&self, i: usize, _: &[f64]) -> Vec<f64> {
        self.rows[i].clone()
    }
}

#[test]
fn exact_svrg_matches_hand_rolled_loop() {
    let q = quadratic_objective(3, 6, 0.1, 1.0, 2).unwrap().objective;
    let (n, d) = (6, 3);
    let eta = 0.3;
    let cfg = BaselineConfig::new(eta, 4, InnerLength::Fixed(4), 13);
    let x0 = Point::new(vec![1.0, -0.5, 0.25]).unwrap();
    let trace = zo_svrg_exact(&q, &x0, &cfg).unwrap();

    let mut rng = RngStream::new(13);
    let mut x = x0.clone();
    for rec in &trace.records {
        let pivot = x.clone();
        let g_tilde = q.gradient(&pivot);
        for _ in 0..4 {
            let i = rng.index(n);
            let _direction = rng.gaussian(d);
            let a = Point::new(q.component_gradient(i, x.as_slice())).unwrap();
            let b = Point::new(q.component_gradient(i, pivot.as_slice())).unwrap();
            x.axpy(-eta, &a.sub(&b).add(&g_tilde));
        }
        let f = zodfo::objective::full_objective_uncounted(&q, &x);
        assert!((rec.f_value - f).abs() <= 1e-12, "{} vs {f}", rec.f_value);
    }
    assert!(trace.final_point.max_abs_diff(&x) <= 1e-12);
}

#[test]
fn exact_svrg_converges_linearly() {
    let q = quadratic_objective(4, 10, 0.2, 1.0, 3).unwrap().objective;
    let mut cfg = BaselineConfig::new(1.0 / q.smoothness(), 15, InnerLength::Fixed(20), 1);
    cfg.report.f_star = Some(0.0);
    let trace = zo_svrg_exact(&q, &Point::filled(4, 0.5), &cfg).unwrap();
    assert!(trace.final_subopt().unwrap() <= 1e-10 * trace.initial_value);
    // every epoch contracts
    let mut prev = trace.initial_value;
    for rec in &trace.records {
        assert!(rec.f_value < prev);
        prev = rec.f_value;
    }
}

#[test]
fn zero_step_gives_flat_trace() {
    let q = quadratic_objective(3, 5, 0.1, 1.0, 0).unwrap().objective;
    let cfg = BaselineConfig::new(0.0, 3, InnerLength::Fixed(2), 0);
    let trace = zo_svrg(&q, &Point::filled(3, 1.0), &cfg).unwrap();
    assert!(trace
        .records
        .iter()
        .all(|r| r.f_value == trace.initial_value));
}

#[test]
fn svrg_queries_and_determinism() {
    let q = quadratic_objective(4, 8, 0.1, 1.0, 6).unwrap().objective;
    let mut cfg = BaselineConfig::new(0.01, 5, InnerLength::Doubling { s0: 3 }, 4);
    cfg.batch = 2;
    cfg.report.timing = Timing::Disabled;
    let x0 = Point::filled(4, 1.0);
    let a = zo_svrg(&q, &x0, &cfg).unwrap();
    let b = zo_svrg(&q, &x0, &cfg).unwrap();
    assert_eq!(a, b);
    let mut total = 0;
    for (s, rec) in (1..).zip(&a.records) {
        total += cfg.epoch_query_cost(4, 8, s);
        assert_eq!(rec.queries, total);
    }
}

#[test]
fn matching_copies_varag_schedule() {
    let sched = Schedule::new(Regime::CoordStrongly, 5, 40, 2.0, 0.1, 4).unwrap();
    let cfg = BaselineConfig::matching(&sched, 7, 3);
    assert_eq!(cfg.eta, sched.equivalent_step());
    assert_eq!(cfg.batch, 4);
    assert_eq!(cfg.flavor, zodfo::EstimatorFlavor::Coordinate);
    for s in 1..=12 {
        assert_eq!(
            cfg.inner.batched(s, cfg.batch),
            sched.batched_inner_length(s)
        );
    }
}

#[test]
fn katyusha_on_linear_objective_is_deterministic_descent() {
    let lin = Linear {
        rows: vec![vec![1.0, -2.0], vec![0.5, 0.0], vec![-0.3, 1.0]],
    };
    let g_bar = lin.gradient(&Point::zeros(2));
    let (eta, steps) = (0.1, 6u64);
    let x0 = Point::new(vec![0.4, 0.7]).unwrap();
    let check = |trace: zodfo::RunTrace| {
        // x_t = x̃ − tη ḡ, averaged over t = 1..T
        let expected = x0.offset(-eta * (steps + 1) as f64 / 2.0, &g_bar);
        assert!(
            trace.final_point.max_abs_diff(&expected) <= 1e-9,
            "{:?}",
            trace.final_point
        );
    };
    for p0 in [0.0, 0.5, 0.9] {
        let mut cfg =
            KatyushaConfig::new(BaselineConfig::new(eta, 1, InnerLength::Fixed(steps), 5));
        cfg.p0 = p0;
        check(zo_katyusha(&lin, &x0, &cfg).unwrap());
        check(zo_katyusha_exact(&lin, &x0, &cfg).unwrap());
    }
}

#[test]
fn katyusha_without_momentum_and_unit_epochs_is_svrg() {
    let q = quadratic_objective(3, 9, 0.1, 1.0, 7).unwrap().objective;
    let base = BaselineConfig::new(0.2, 10, InnerLength::Fixed(1), 8);
    let mut kat = KatyushaConfig::new(base.clone());
    kat.p0 = 0.0;
    let x0 = Point::filled(3, 0.8);
    let a = zo_katyusha_exact(&q, &x0, &kat).unwrap();
    let b = zo_svrg_exact(&q, &x0, &base).unwrap();
    assert!(a.final_point.max_abs_diff(&b.final_point) <= 1e-14);
}

#[test]
fn nesterov_exact_converges_and_counts_queries() {
    let q = quadratic_objective(4, 6, 0.1, 1.0, 1).unwrap().objective;
    let mut cfg = NesterovConfig::every(0.5, 20, 10, 6, 0);
    cfg.report.f_star = Some(0.0);
    let x0 = Point::filled(4, 1.0);
    let exact = zo_nesterov_exact(&q, &x0, &cfg).unwrap();
    assert!(exact.final_subopt().unwrap() <= 1e-8 * exact.initial_value);
    let zo = zo_nesterov(&q, &x0, &cfg).unwrap();
    assert_eq!(zo.total_queries(), 2 * 6 * 200);
    assert_eq!(exact.total_queries(), 0);
}

#[test]
fn nesterov_checkpoints_follow_another_trace() {
    let q = quadratic_objective(3, 5, 0.1, 1.0, 1).unwrap().objective;
    let sched = Schedule::new(Regime::GaussConvex, 3, 5, 1.0, 0.0, 1).unwrap();
    let varag = optimize(&q, &Point::filled(3, 1.0), &SolverConfig::new(sched, 6, 0)).unwrap();
    let cfg = NesterovConfig::matching(NesterovConfig::default_step(3, q.smoothness()), &varag, 0);
    let trace = zo_nesterov(&q, &Point::filled(3, 1.0), &cfg).unwrap();
    assert_eq!(trace.records.len(), varag.records.len());
    for (steps, rec) in cfg.step_counts(5).into_iter().zip(&trace.records) {
        assert_eq!(rec.queries, 10 * steps);
    }
}
