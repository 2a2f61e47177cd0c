//! Zeroth-order optimization for finite sums.
//!
//! The solvers only see component values `f_i(x)`, each costing one query.
//! [`varag`] holds the accelerated variance-reduced method; [`baselines`]
//! holds ZO-SVRG, a simplified ZO-Katyusha and ZO-Nesterov.

pub mod baselines;
pub mod data_io;
pub mod error;
pub mod estimators;
pub mod objective;
pub mod point;
pub mod problems;
pub mod rng;
pub mod schedule;
mod source;
pub mod trace;
pub mod varag;

pub use error::{Error, Result, SolveError};
pub use estimators::{EstimatorConfig, EstimatorFlavor, PivotalGradient};
pub use objective::{FiniteSum, GradientOracle, QueryCounter};
pub use point::Point;
pub use rng::RngStream;
pub use schedule::{Regime, Schedule};
pub use trace::{ReportOptions, RunTrace, Timing, TraceRecord};
pub use varag::{PivotOption, SolverConfig};
