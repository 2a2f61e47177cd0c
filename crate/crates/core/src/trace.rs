//! Per-epoch run records shared by every solver.

use std::time::Instant;

use crate::point::Point;

/// How `elapsed_ms` is filled in.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Timing {
    #[default]
    Wall,
    /// Record 0 ms everywhere, making traces byte-reproducible.
    Disabled,
}

/// Reporting options common to all solvers.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ReportOptions {
    /// Known optimal value, used to fill in suboptimality.
    pub f_star: Option<f64>,
    pub timing: Timing,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRecord {
    pub epoch: usize,
    /// `f(x̃^s)`, evaluated through the uncounted channel.
    pub f_value: f64,
    pub subopt: Option<f64>,
    /// Cumulative component queries at the end of the epoch.
    pub queries: u64,
    pub elapsed_ms: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunTrace {
    pub solver: String,
    pub seed: u64,
    /// Echo of the solver configuration as `key=value` pairs.
    pub config: Vec<(String, String)>,
    pub f_star: Option<f64>,
    /// `f(x^0)`.
    pub initial_value: f64,
    pub records: Vec<TraceRecord>,
    /// Last reported iterate.
    pub final_point: Point,
}

impl RunTrace {
    pub fn total_queries(&self) -> u64 {
        self.records.last().map_or(0, |r| r.queries)
    }

    pub fn final_value(&self) -> Option<f64> {
        self.records.last().map(|r| r.f_value)
    }

    pub fn final_subopt(&self) -> Option<f64> {
        self.records.last().and_then(|r| r.subopt)
    }

    /// Equality ignoring `elapsed_ms`.
    pub fn same_outcome(&self, other: &RunTrace) -> bool {
        let strip = |t: &RunTrace| {
            let mut t = t.clone();
            t.records.iter_mut().for_each(|r| r.elapsed_ms = 0);
            t
        };
        strip(self) == strip(other)
    }

    /// First cumulative query count at which suboptimality drops to `target`.
    pub fn queries_to_reach(&self, target: f64) -> Option<u64> {
        self.records
            .iter()
            .find(|r| r.subopt.is_some_and(|s| s <= target))
            .map(|r| r.queries)
    }
}

/// Incrementally builds a [`RunTrace`].
pub(crate) struct TraceBuilder {
    trace: RunTrace,
    started: Instant,
    timing: Timing,
}

impl TraceBuilder {
    pub fn new(
        solver: &str,
        seed: u64,
        config: Vec<(String, String)>,
        report: ReportOptions,
        initial_value: f64,
        x0: &Point,
    ) -> Self {
        Self {
            trace: RunTrace {
                solver: solver.to_string(),
                seed,
                config,
                f_star: report.f_star,
                initial_value,
                records: Vec::new(),
                final_point: x0.clone(),
            },
            started: Instant::now(),
            timing: report.timing,
        }
    }

    pub fn epochs(&self) -> usize {
        self.trace.records.len()
    }

    pub fn push(&mut self, f_value: f64, queries: u64, point: &Point) {
        let epoch = self.trace.records.len() + 1;
        if let Some(last) = self.trace.records.last() {
            assert!(
                queries >= last.queries,
                "cumulative queries must not decrease"
            );
        }
        let elapsed_ms = match self.timing {
            Timing::Wall => self.started.elapsed().as_millis() as u64,
            Timing::Disabled => 0,
        };
        self.trace.records.push(TraceRecord {
            epoch,
            f_value,
            subopt: self.trace.f_star.map(|f| f_value - f),
            queries,
            elapsed_ms,
        });
        self.trace.final_point = point.clone();
    }

    pub fn finish(self) -> RunTrace {
        self.trace
    }
}
