//! Concrete finite-sum objectives and the reference minimizer for `f*`.

mod dataset;
mod logistic;
mod quadratic;
mod reference;
mod ridge;

use std::fmt;
use std::str::FromStr;

pub use dataset::Dataset;
pub use logistic::LogisticObjective;
pub use quadratic::{quadratic_objective, QuadraticObjective, QuadraticProblem};
pub use reference::{
    reference_optimum, reference_optimum_from, ReferenceOptimum, DEFAULT_MAX_ITER,
};
pub use ridge::RidgeObjective;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProblemKind {
    Logistic,
    Ridge,
    Quadratic,
}

impl ProblemKind {
    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::Logistic => "logistic",
            ProblemKind::Ridge => "ridge",
            ProblemKind::Quadratic => "quadratic",
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "logistic" => Ok(ProblemKind::Logistic),
            "ridge" => Ok(ProblemKind::Ridge),
            "quadratic" => Ok(ProblemKind::Quadratic),
            other => Err(format!(
                "unknown problem `{other}` (expected logistic, ridge or quadratic)"
            )),
        }
    }
}

fn dot(a: &[f64], x: &[f64]) -> f64 {
    a.iter().zip(x).map(|(a, x)| a * x).sum()
}

fn norm_sq(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

fn check_lambda(lambda: f64) -> crate::Result<()> {
    if lambda.is_finite() && lambda >= 0.0 {
        Ok(())
    } else {
        Err(crate::Error::InvalidParameter(format!(
            "lambda = {lambda} must be >= 0"
        )))
    }
}
