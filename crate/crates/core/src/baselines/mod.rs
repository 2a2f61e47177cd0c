//! Comparison solvers built on the same estimators, counter and trace format
//! as ZO-Varag.

mod katyusha;
mod nesterov;
mod svrg;

pub use katyusha::{zo_katyusha, zo_katyusha_exact, KatyushaConfig};
pub use nesterov::{zo_nesterov, zo_nesterov_exact, NesterovConfig, NesterovMomentum};
pub use svrg::{zo_svrg, zo_svrg_exact};

use crate::error::{Error, Result};
use crate::estimators::{EstimatorConfig, EstimatorFlavor};
use crate::schedule::Schedule;
use crate::trace::ReportOptions;

/// Inner-loop length per epoch, before dividing by the batch size.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InnerLength {
    Fixed(u64),
    /// `T(s) = 2^{min(s, s0) − 1}`, the ZO-Varag epoch schedule.
    Doubling {
        s0: u32,
    },
}

impl InnerLength {
    pub fn like(schedule: &Schedule) -> Self {
        InnerLength::Doubling { s0: schedule.s0() }
    }

    pub fn at(self, s: u32) -> u64 {
        match self {
            InnerLength::Fixed(t) => t,
            InnerLength::Doubling { s0 } => 1 << (s.min(s0) - 1),
        }
    }

    /// `max(1, ⌈T(s)/b⌉)`
    pub fn batched(self, s: u32, batch: usize) -> u64 {
        self.at(s).div_ceil(batch as u64).max(1)
    }
}

/// Settings shared by ZO-SVRG and the simplified ZO-Katyusha.
#[derive(Clone, Debug, PartialEq)]
pub struct BaselineConfig {
    /// Equivalent step size `η`.
    pub eta: f64,
    pub epochs: u32,
    pub inner: InnerLength,
    pub batch: usize,
    /// Inner estimator; the pivot always uses coordinate differences.
    pub flavor: EstimatorFlavor,
    pub seed: u64,
    pub estimator: EstimatorConfig,
    pub report: ReportOptions,
}

impl BaselineConfig {
    pub fn new(eta: f64, epochs: u32, inner: InnerLength, seed: u64) -> Self {
        Self {
            eta,
            epochs,
            inner,
            batch: 1,
            flavor: EstimatorFlavor::Gaussian,
            seed,
            estimator: EstimatorConfig::default(),
            report: ReportOptions::default(),
        }
    }

    /// Step, epochs and inner lengths copied from a ZO-Varag schedule.
    pub fn matching(schedule: &Schedule, epochs: u32, seed: u64) -> Self {
        let mut cfg = Self::new(
            schedule.equivalent_step(),
            epochs,
            InnerLength::like(schedule),
            seed,
        );
        cfg.batch = schedule.batch();
        cfg.flavor = schedule.regime().flavor();
        cfg
    }

    fn validate(&self, n: usize) -> Result<()> {
        if !(self.eta.is_finite() && self.eta >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "eta = {} must be >= 0",
                self.eta
            )));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidParameter("need at least one epoch".into()));
        }
        if self.batch == 0 || self.batch > n {
            return Err(Error::InvalidParameter(format!(
                "batch {} outside 1..={n}",
                self.batch
            )));
        }
        match self.inner {
            InnerLength::Fixed(0) => {
                Err(Error::InvalidParameter("inner length must be >= 1".into()))
            }
            InnerLength::Doubling { s0: 0 } => {
                Err(Error::InvalidParameter("s0 must be >= 1".into()))
            }
            _ => Ok(()),
        }
    }

    /// Queries per epoch: the pivot plus `b` pairs per inner step.
    pub fn epoch_query_cost(&self, d: usize, n: usize, s: u32) -> u64 {
        2 * (d * n) as u64
            + self.flavor.pair_cost(d) * self.batch as u64 * self.inner.batched(s, self.batch)
    }

    fn echo(&self) -> Vec<(String, String)> {
        vec![
            ("eta".into(), self.eta.to_string()),
            ("epochs".into(), self.epochs.to_string()),
            ("batch".into(), self.batch.to_string()),
            ("estimator".into(), self.flavor.name().into()),
            ("mu".into(), self.estimator.mu().to_string()),
            ("nu".into(), self.estimator.nu().to_string()),
            ("seed".into(), self.seed.to_string()),
        ]
    }
}
