use std::fmt;
use std::path::{Path, PathBuf};

use log::{info, warn};
use zodfo::baselines::{
    zo_katyusha, zo_nesterov, zo_svrg, BaselineConfig, KatyushaConfig, NesterovConfig,
};
use zodfo::data_io::{load_dense_csv, load_libsvm, write_trace_csv};
use zodfo::problems::{
    quadratic_objective, reference_optimum, Dataset, LogisticObjective, RidgeObjective,
    DEFAULT_MAX_ITER,
};
use zodfo::varag::{epoch_query_cost, optimize};
use zodfo::{
    Error, EstimatorConfig, EstimatorFlavor, GradientOracle, PivotOption, Point, Regime,
    ReportOptions, RunTrace, Schedule, SolveError, SolverConfig, Timing,
};

use crate::args::{Estimator, FStar, Format, Problem, RunArgs, Solver, TimingMode};
use crate::error::CliError;
use crate::output::write_atomically;

/// Gradient-norm target for the f* precomputation.
pub const REFERENCE_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FStarSource {
    /// Known in closed form (synthetic quadratic).
    Exact,
    /// Analytic-gradient reference solve.
    Reference,
    /// The reference solve hit its iteration cap.
    Unavailable,
    None,
}

impl fmt::Display for FStarSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FStarSource::Exact => "exact",
            FStarSource::Reference => "reference",
            FStarSource::Unavailable => "unavailable",
            FStarSource::None => "none",
        })
    }
}

#[derive(Debug)]
pub struct Outcome {
    pub trace: RunTrace,
    pub out: PathBuf,
    pub f_star: Option<f64>,
    pub f_star_source: FStarSource,
    /// Set when the solver diverged; `trace` is then partial.
    pub diverged: Option<String>,
}

impl Outcome {
    pub fn summary(&self) -> String {
        let t = &self.trace;
        let value = t.final_value().unwrap_or(t.initial_value);
        let subopt = t
            .final_subopt()
            .map_or_else(|| "n/a".to_string(), |s| format!("{s:.3e}"));
        let status = match &self.diverged {
            Some(d) => format!(" DIVERGED ({d})"),
            None => String::new(),
        };
        format!(
            "{}: {} epochs, f = {value:.6e}, subopt = {subopt}, queries = {}, trace -> {}{status}",
            t.solver,
            t.records.len(),
            t.total_queries(),
            self.out.display()
        )
    }
}

fn config_error(e: impl fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

fn load_dataset(args: &RunArgs) -> Result<Dataset, CliError> {
    let path = args.dataset.as_deref().ok_or_else(|| {
        CliError::Config(format!("--dataset is required for {}", args.problem.name()))
    })?;
    let format = args.format.unwrap_or_else(|| guess_format(path));
    let loaded = match format {
        Format::Libsvm => load_libsvm(path, args.features),
        Format::Csv => load_dense_csv(path, args.label_column),
    };
    let mut data = loaded.map_err(|e| match e {
        Error::InvalidParameter(m) => CliError::Config(m),
        e => CliError::Data(format!("{}: {e}", path.display())),
    })?;
    if args.scale_features {
        data.scale_to_unit_max_norm();
    }
    info!(
        "loaded {} samples with {} features from {}",
        data.len(),
        data.dim(),
        path.display()
    );
    Ok(data)
}

fn guess_format(path: &Path) -> Format {
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("csv") => Format::Csv,
        _ => Format::Libsvm,
    }
}

/// Objective, starting point and closed-form optimum when known.
/// Objective, starting point and exact optimal value when known.
type Built = (Box<dyn GradientOracle>, Point, Option<f64>);

fn build_problem(args: &RunArgs) -> Result<Built, CliError> {
    match args.problem {
        Problem::Quadratic => {
            let p = quadratic_objective(
                args.dim,
                args.components,
                args.tau,
                args.smoothness,
                args.problem_seed,
            )
            .map_err(config_error)?;
            let x0 = Point::filled(args.dim, 1.0 / (args.dim as f64).sqrt());
            Ok((Box::new(p.objective), x0, Some(p.f_star)))
        }
        Problem::Logistic => {
            if !(args.lambda.is_finite() && args.lambda >= 0.0) {
                return Err(CliError::Config(format!(
                    "lambda = {} must be >= 0",
                    args.lambda
                )));
            }
            let data = load_dataset(args)?;
            let x0 = Point::zeros(data.dim());
            // the only remaining failure is a non-binary label
            let obj = LogisticObjective::new(data, args.lambda)
                .map_err(|e| CliError::Data(e.to_string()))?;
            Ok((Box::new(obj), x0, None))
        }
        Problem::Ridge => {
            let data = load_dataset(args)?;
            let x0 = Point::zeros(data.dim());
            let obj = RidgeObjective::new(data, args.lambda).map_err(config_error)?;
            Ok((Box::new(obj), x0, None))
        }
    }
}

fn resolve_f_star(
    args: &RunArgs,
    obj: &dyn GradientOracle,
    exact: Option<f64>,
) -> (Option<f64>, FStarSource) {
    if args.fstar == FStar::None {
        return (None, FStarSource::None);
    }
    if let Some(f) = exact {
        return (Some(f), FStarSource::Exact);
    }
    match reference_optimum(obj, REFERENCE_TOL, DEFAULT_MAX_ITER) {
        Ok(opt) => {
            info!(
                "reference optimum f* = {:.12e} after {} iterations",
                opt.f, opt.iterations
            );
            (Some(opt.f), FStarSource::Reference)
        }
        Err(e) => {
            warn!("no f* available, suboptimality column left empty: {e}");
            (None, FStarSource::Unavailable)
        }
    }
}

fn schedule_for(args: &RunArgs, obj: &dyn GradientOracle) -> Result<Schedule, CliError> {
    let flavor = match args.estimator {
        Estimator::Gaussian => EstimatorFlavor::Gaussian,
        Estimator::Coordinate => EstimatorFlavor::Coordinate,
    };
    let tau = obj.strong_convexity();
    let regime = Regime::new(flavor, tau > 0.0);
    let mut schedule = Schedule::new(
        regime,
        obj.dim(),
        obj.num_components(),
        obj.smoothness(),
        tau,
        args.batch,
    )
    .map_err(config_error)?;
    if let Some(eta) = args.eta {
        schedule = schedule.with_equivalent_step(eta).map_err(config_error)?;
    }
    schedule.with_momentum(args.p0).map_err(config_error)
}

fn checked_settings(
    args: &RunArgs,
    obj: &dyn GradientOracle,
) -> Result<(EstimatorConfig, Schedule), CliError> {
    if args.epochs == 0 {
        return Err(CliError::Config("--epochs must be at least 1".into()));
    }
    let estimator = EstimatorConfig::new(args.mu, args.nu).map_err(config_error)?;
    Ok((estimator, schedule_for(args, obj)?))
}

fn solve(
    args: &RunArgs,
    obj: &dyn GradientOracle,
    x0: &Point,
    report: ReportOptions,
) -> Result<Result<RunTrace, SolveError>, CliError> {
    let (estimator, schedule) = checked_settings(args, obj)?;
    let (seed, epochs) = (args.seed, args.epochs);
    let result = match args.solver {
        Solver::ZoVarag => {
            let mut cfg = SolverConfig::new(schedule, epochs, seed);
            cfg.pivot = if args.pivot == 2 {
                PivotOption::LastAggregate
            } else {
                PivotOption::Averaged
            };
            cfg.estimator = estimator;
            cfg.report = report;
            optimize(obj, x0, &cfg)
        }
        Solver::ZoSvrg | Solver::ZoKatyusha => {
            let mut base = BaselineConfig::matching(&schedule, epochs, seed);
            base.estimator = estimator;
            base.report = report;
            if args.solver == Solver::ZoSvrg {
                zo_svrg(obj, x0, &base)
            } else {
                let mut cfg = KatyushaConfig::new(base);
                cfg.p0 = args.p0;
                zo_katyusha(obj, x0, &cfg)
            }
        }
        Solver::ZoNesterov => {
            // one record per zo-varag epoch budget
            let mut total = 0;
            let checkpoints = (1..=epochs)
                .map(|s| {
                    total += epoch_query_cost(&schedule, s);
                    total
                })
                .collect();
            let step = args
                .eta
                .unwrap_or_else(|| NesterovConfig::default_step(obj.dim(), obj.smoothness()));
            let mut cfg = NesterovConfig::new(step, checkpoints, seed);
            cfg.estimator = estimator;
            cfg.report = report;
            zo_nesterov(obj, x0, &cfg)
        }
    };
    match result {
        Err(SolveError::Invalid(e)) => Err(config_error(e)),
        other => Ok(other),
    }
}

/// Builds the problem, solves it and writes the trace to `args.out`.
///
/// Divergence is not an error here: the partial trace is written and the
/// outcome carries the diagnostic.
pub fn run_experiment(args: &RunArgs) -> Result<Outcome, CliError> {
    let (obj, x0, exact) = build_problem(args)?;
    checked_settings(args, obj.as_ref())?;
    let (f_star, f_star_source) = resolve_f_star(args, obj.as_ref(), exact);
    let report = ReportOptions {
        f_star,
        timing: match args.timing {
            TimingMode::Wall => Timing::Wall,
            TimingMode::Off => Timing::Disabled,
        },
    };
    let (trace, diverged) = match solve(args, obj.as_ref(), &x0, report)? {
        Ok(trace) => (trace, None),
        Err(SolveError::Diverged {
            epoch,
            diagnostic,
            partial,
        }) => (*partial, Some(format!("epoch {epoch}: {diagnostic}"))),
        Err(SolveError::Invalid(e)) => return Err(config_error(e)),
    };
    write_atomically(&args.out, |sink| {
        write_trace_csv(&trace, sink).map_err(|e| CliError::Output {
            path: args.out.clone(),
            source: std::io::Error::other(e.to_string()),
        })
    })?;
    Ok(Outcome {
        trace,
        out: args.out.clone(),
        f_star,
        f_star_source,
        diverged,
    })
}
