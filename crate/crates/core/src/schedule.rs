//! Per-epoch parameters `{T_s, γ_s, α_s, p_s}` and averaging weights `{θ_t}`.
//!
//! Four regimes are supported, indexed by the inner estimator and by whether
//! strong convexity is exploited:
//!
//! | regime          | `s0`                     | `α_s γ_s`          | `α_s` for `s > s0`        |
//! |-----------------|--------------------------|--------------------|---------------------------|
//! | gauss-convex    | `⌊log₂((d+4)n)⌋ + 1`     | `1/(12(d+4)L)`     | `2/(s − s0 + 4)`          |
//! | gauss-strongly  | `⌊log₂((d+4)n)⌋ + 1`     | `1/(12(d+4)L)`     | `min(√(nτ/24L), 1/2)`     |
//! | coord-convex    | `⌊log₂ n⌋ + 1`           | `1/(12L)`          | `2/(s − s0 + 4)`          |
//! | coord-strongly  | `⌊log₂ n⌋ + 1`           | `1/(12L)`          | `min(√(nτ/12L), 1/2)`     |
//!
//! In every regime `α_s = 1/2` for `s ≤ s0`, `p_s = 1/2`, and the inner length
//! doubles as `T_s = 2^{s−1}` up to `s0` and stays at `T_{s0}` afterwards.
//! With a batch of `b` estimator pairs per step the inner loop runs
//! `max(1, ⌈T_s / b⌉)` times.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::estimators::EstimatorFlavor;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Regime {
    GaussConvex,
    GaussStrongly,
    CoordConvex,
    CoordStrongly,
}

impl Regime {
    pub const ALL: [Regime; 4] = [
        Regime::GaussConvex,
        Regime::GaussStrongly,
        Regime::CoordConvex,
        Regime::CoordStrongly,
    ];

    pub fn new(flavor: EstimatorFlavor, strongly_convex: bool) -> Self {
        match (flavor, strongly_convex) {
            (EstimatorFlavor::Gaussian, false) => Regime::GaussConvex,
            (EstimatorFlavor::Gaussian, true) => Regime::GaussStrongly,
            (EstimatorFlavor::Coordinate, false) => Regime::CoordConvex,
            (EstimatorFlavor::Coordinate, true) => Regime::CoordStrongly,
        }
    }

    pub fn flavor(self) -> EstimatorFlavor {
        match self {
            Regime::GaussConvex | Regime::GaussStrongly => EstimatorFlavor::Gaussian,
            Regime::CoordConvex | Regime::CoordStrongly => EstimatorFlavor::Coordinate,
        }
    }

    pub fn is_strongly_convex(self) -> bool {
        matches!(self, Regime::GaussStrongly | Regime::CoordStrongly)
    }

    /// Dimension factor `(d+4)` for the Gaussian regimes, `1` otherwise.
    pub fn dimension_factor(self, d: usize) -> f64 {
        match self.flavor() {
            EstimatorFlavor::Gaussian => d as f64 + 4.0,
            EstimatorFlavor::Coordinate => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Regime::GaussConvex => "gauss-convex",
            Regime::GaussStrongly => "gauss-strongly",
            Regime::CoordConvex => "coord-convex",
            Regime::CoordStrongly => "coord-strongly",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Regime::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown regime `{s}`")))
    }
}

/// Immutable parameter schedule for one run.
#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    regime: Regime,
    d: usize,
    n: usize,
    l: f64,
    tau: f64,
    batch: usize,
    s0: u32,
    /// `α_s γ_s`, constant across epochs.
    step_product: f64,
    momentum: f64,
}

impl Schedule {
    /// Canonical schedule for `regime`.
    pub fn new(regime: Regime, d: usize, n: usize, l: f64, tau: f64, batch: usize) -> Result<Self> {
        if d == 0 || n == 0 {
            return Err(Error::InvalidParameter(format!(
                "need d, n >= 1, got d = {d}, n = {n}"
            )));
        }
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "L must be positive, got {l}"
            )));
        }
        if !(tau.is_finite() && tau >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tau must be non-negative, got {tau}"
            )));
        }
        if tau > l {
            return Err(Error::InvalidParameter(format!(
                "tau = {tau} exceeds L = {l}"
            )));
        }
        if regime.is_strongly_convex() && tau == 0.0 {
            return Err(Error::InvalidParameter(format!(
                "regime {regime} requires tau > 0"
            )));
        }
        if batch == 0 || batch > n {
            return Err(Error::InvalidParameter(format!(
                "batch must lie in 1..={n}, got {batch}"
            )));
        }
        let s0 = match regime.flavor() {
            EstimatorFlavor::Gaussian => floor_log2((d as u64 + 4) * n as u64) + 1,
            EstimatorFlavor::Coordinate => floor_log2(n as u64) + 1,
        };
        Ok(Self {
            regime,
            d,
            n,
            l,
            tau,
            batch,
            s0,
            step_product: 1.0 / (12.0 * regime.dimension_factor(d) * l),
            momentum: 0.5,
        })
    }

    /// Rescales `γ_s` so that the equivalent step `α_s γ_s` equals `eta`.
    pub fn with_equivalent_step(mut self, eta: f64) -> Result<Self> {
        if !(eta.is_finite() && eta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "eta must be positive, got {eta}"
            )));
        }
        self.step_product = eta;
        Ok(self)
    }

    /// Overrides the momentum `p_s` (canonical value 1/2).
    pub fn with_momentum(mut self, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!(
                "momentum p must lie in [0, 1], got {p}"
            )));
        }
        self.momentum = p;
        Ok(self)
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn num_components(&self) -> usize {
        self.n
    }

    pub fn smoothness(&self) -> f64 {
        self.l
    }

    pub fn strong_convexity(&self) -> f64 {
        self.tau
    }

    pub fn batch(&self) -> usize {
        self.batch
    }

    pub fn s0(&self) -> u32 {
        self.s0
    }

    pub fn equivalent_step(&self) -> f64 {
        self.step_product
    }

    /// Un-batched inner length `T_s`.
    pub fn inner_length(&self, s: u32) -> u64 {
        assert!(s >= 1, "epochs are numbered from 1");
        1u64 << (s.min(self.s0) - 1)
    }

    /// Inner iterations actually run: `max(1, ⌈T_s / b⌉)`.
    pub fn batched_inner_length(&self, s: u32) -> u64 {
        self.inner_length(s).div_ceil(self.batch as u64).max(1)
    }

    pub fn alpha(&self, s: u32) -> f64 {
        assert!(s >= 1, "epochs are numbered from 1");
        if s <= self.s0 {
            return 0.5;
        }
        let (n, l, tau) = (self.n as f64, self.l, self.tau);
        match self.regime {
            Regime::GaussConvex | Regime::CoordConvex => 2.0 / ((s - self.s0) as f64 + 4.0),
            Regime::GaussStrongly => (n * tau / (24.0 * l)).sqrt().min(0.5),
            Regime::CoordStrongly => (n * tau / (12.0 * l)).sqrt().min(0.5),
        }
    }

    pub fn gamma(&self, s: u32) -> f64 {
        self.step_product / self.alpha(s)
    }

    pub fn momentum(&self, _s: u32) -> f64 {
        self.momentum
    }

    /// Strong-convexity constant used inside the updates: `τ` in the
    /// strongly convex regimes, 0 in the convex ones.
    pub fn update_tau(&self) -> f64 {
        if self.regime.is_strongly_convex() {
            self.tau
        } else {
            0.0
        }
    }

    /// Growth factor of `Γ_t`, when epoch `s` uses geometric weights.
    fn weight_growth(&self, s: u32) -> Option<f64> {
        if s <= self.s0 || !self.regime.is_strongly_convex() {
            return None;
        }
        let rate = self.tau * self.gamma(s);
        Some(match self.regime.flavor() {
            EstimatorFlavor::Gaussian => rate / 2.0,
            EstimatorFlavor::Coordinate => rate,
        })
    }

    /// Averaging weights for epoch `s`, one per batched inner iteration.
    pub fn theta_weights(&self, s: u32) -> ThetaWeights {
        let len = self.batched_inner_length(s) as usize;
        let (alpha, gamma, p) = (self.alpha(s), self.gamma(s), self.momentum(s));
        match self.weight_growth(s) {
            None => {
                let ratio = gamma / alpha;
                let mut weights = vec![ratio * (alpha + p); len];
                weights[len - 1] = ratio;
                ThetaWeights {
                    weights,
                    growth: None,
                    log_scale: 0.0,
                }
            }
            Some(rate) => geometric_weights(len, rate, 1.0 - alpha - p),
        }
    }
}

/// `θ_t = Γ_{t−1} − c Γ_t` for `t < T`, `θ_T = Γ_{T−1}`, with `Γ_t = (1+rate)^t`.
/// Weights are rescaled by `exp(−log_scale)` when `Γ` would overflow.
fn geometric_weights(len: usize, rate: f64, c: f64) -> ThetaWeights {
    let log_growth = rate.ln_1p();
    let factor = 1.0 - c * (1.0 + rate);
    let top = (len as f64 - 1.0) * log_growth;
    let log_scale = if top > 600.0 { top } else { 0.0 };
    let mut weights: Vec<f64> = (0..len)
        .map(|t| ((t as f64) * log_growth - log_scale).exp())
        .collect();
    for w in weights.iter_mut().take(len - 1) {
        *w *= factor;
    }
    ThetaWeights {
        weights,
        growth: Some(1.0 + rate),
        log_scale,
    }
}

fn floor_log2(x: u64) -> u32 {
    debug_assert!(x > 0);
    63 - x.leading_zeros()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThetaWeights {
    pub weights: Vec<f64>,
    /// `1 + τγ_s/2` (Gaussian) or `1 + τγ_s` (coordinate) when the weights are
    /// geometric, `None` when uniform.
    pub growth: Option<f64>,
    /// The stored weights equal the nominal ones times `exp(−log_scale)`.
    pub log_scale: f64,
}

impl ThetaWeights {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Whether every nominal weight is positive. After rescaling, the
    /// earliest weights may underflow to zero; that is not a violation.
    pub fn all_positive(&self) -> bool {
        let rescaled = self.log_scale > 0.0;
        let signs_ok = self
            .weights
            .iter()
            .all(|&w| w.is_finite() && (w > 0.0 || (rescaled && w == 0.0)));
        let len = self.weights.len();
        signs_ok
            && self.weights[len.saturating_sub(2)..]
                .iter()
                .all(|&w| w > 0.0)
    }
}

/// Both step-size conditions evaluated at one epoch.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpochCheck {
    pub epoch: u32,
    /// `1 + τγ_s − Lα_sγ_s`, must be `> 0`.
    pub denominator: f64,
    /// `p_s − 4 c L α_s γ_s / (1 + τγ_s − Lα_sγ_s)` with `c = d+4` or 1, must be `≥ 0`.
    pub momentum_margin: f64,
    pub weights_positive: bool,
}

impl EpochCheck {
    pub fn passed(&self) -> bool {
        self.denominator > 0.0 && self.momentum_margin >= 0.0 && self.weights_positive
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub epochs: Vec<EpochCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.epochs.iter().all(EpochCheck::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &EpochCheck> {
        self.epochs.iter().filter(|c| !c.passed())
    }
}

/// Evaluates the step-size conditions for epochs `1..=horizon`, using the
/// supplied `d`, `L`, `τ`.
pub fn validate_schedule(
    sched: &Schedule,
    d: usize,
    l: f64,
    tau: f64,
    horizon: u32,
) -> ValidationReport {
    let factor = sched.regime.dimension_factor(d);
    let epochs = (1..=horizon)
        .map(|s| {
            let (alpha, gamma, p) = (sched.alpha(s), sched.gamma(s), sched.momentum(s));
            let denominator = 1.0 + tau * gamma - l * alpha * gamma;
            let momentum_margin = p - 4.0 * factor * l * alpha * gamma / denominator;
            EpochCheck {
                epoch: s,
                denominator,
                momentum_margin,
                weights_positive: weights_positive(sched, s),
            }
        })
        .collect();
    ValidationReport { epochs }
}

/// Positivity of θ without materializing long weight vectors.
fn weights_positive(sched: &Schedule, s: u32) -> bool {
    match sched.weight_growth(s) {
        None => {
            let ratio = sched.gamma(s) / sched.alpha(s);
            ratio > 0.0 && (sched.alpha(s) + sched.momentum(s)) > 0.0
        }
        Some(rate) => {
            let c = 1.0 - sched.alpha(s) - sched.momentum(s);
            sched.batched_inner_length(s) == 1 || 1.0 - c * (1.0 + rate) > 0.0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s0_and_lengths() {
        let s = Schedule::new(Regime::GaussConvex, 10, 442, 1.0, 0.0, 1).unwrap();
        assert_eq!(s.s0(), 13);
        assert_eq!(s.inner_length(1), 1);
        assert_eq!(s.inner_length(13), 4096);
        assert_eq!(s.inner_length(20), 4096);
        let c = Schedule::new(Regime::CoordConvex, 10, 442, 1.0, 0.0, 1).unwrap();
        assert_eq!(c.s0(), 9);
        assert_eq!(c.inner_length(9), 256);
    }

    #[test]
    fn canonical_gauss_convex_parameters() {
        let s = Schedule::new(Regime::GaussConvex, 10, 442, 1.0, 0.0, 1).unwrap();
        assert_eq!(s.alpha(1), 0.5);
        assert!((s.gamma(5) - 1.0 / 84.0).abs() < 1e-15);
        assert!((s.alpha(14) - 0.4).abs() < 1e-15);
        assert_eq!(s.momentum(3), 0.5);
        let w = s.theta_weights(3);
        assert_eq!(w.len(), 4);
        assert!(w.weights.iter().all(|t| (t - 1.0 / 42.0).abs() < 1e-15));
    }

    #[test]
    fn strongly_alpha_formulas() {
        let g = Schedule::new(Regime::GaussStrongly, 2, 6, 1.0, 0.5, 1).unwrap();
        assert!((g.alpha(g.s0() + 1) - (6.0f64 * 0.5 / 24.0).sqrt()).abs() < 1e-15);
        let c = Schedule::new(Regime::CoordStrongly, 2, 6, 1.0, 0.5, 1).unwrap();
        assert_eq!(c.alpha(c.s0() + 1), 0.5);
        assert!((c.gamma(1) * c.alpha(1) - 1.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn geometric_weights_hand_values() {
        // τγ/2 = 0.1, α + p = 1, T = 3
        let w = geometric_weights(3, 0.1, 0.0);
        let expected = [1.0, 1.1, 1.21];
        for (a, b) in w.weights.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(geometric_weights(1, 0.3, 0.2).weights, vec![1.0]);
    }

    #[test]
    fn overflowing_weights_are_rescaled() {
        let w = geometric_weights(1 << 16, 0.05, 0.0);
        assert!(w.log_scale > 0.0);
        assert!(w.all_positive());
        assert_eq!(*w.weights.last().unwrap(), 1.0);
    }

    #[test]
    fn single_inner_step_weight() {
        let s = Schedule::new(Regime::CoordConvex, 3, 4, 2.0, 0.0, 1).unwrap();
        let w = s.theta_weights(1);
        assert_eq!(w.weights, vec![s.gamma(1) / s.alpha(1)]);
        let st = Schedule::new(Regime::CoordStrongly, 3, 4, 2.0, 1.0, 4).unwrap();
        assert_eq!(st.theta_weights(st.s0() + 1).weights, vec![1.0]);
    }

    #[test]
    fn batch_scaling() {
        let s = Schedule::new(Regime::GaussConvex, 10, 442, 1.0, 0.0, 5).unwrap();
        assert_eq!(s.batched_inner_length(1), 1);
        assert_eq!(s.batched_inner_length(13), 820);
        assert_eq!(s.theta_weights(13).len(), 820);
    }

    #[test]
    fn rejects_invalid_inputs() {
        assert!(Schedule::new(Regime::GaussStrongly, 2, 3, 1.0, 0.0, 1).is_err());
        assert!(Schedule::new(Regime::GaussConvex, 2, 3, 1.0, 2.0, 1).is_err());
        assert!(Schedule::new(Regime::GaussConvex, 2, 3, 1.0, 0.0, 4).is_err());
        assert!(Schedule::new(Regime::GaussConvex, 2, 3, 0.0, 0.0, 1).is_err());
        assert!(Schedule::new(Regime::GaussConvex, 0, 3, 1.0, 0.0, 1).is_err());
    }

    #[test]
    fn validation_of_canonical_and_broken_schedules() {
        let s = Schedule::new(Regime::GaussConvex, 10, 50, 1.0, 0.0, 1).unwrap();
        let report = validate_schedule(&s, 10, 1.0, 0.0, 40);
        assert!(report.passed());
        let c = report.epochs[0];
        assert!((c.denominator - (1.0 - 1.0 / 168.0)).abs() < 1e-15);
        assert!((c.momentum_margin - (0.5 - (1.0 / 3.0) / (1.0 - 1.0 / 168.0))).abs() < 1e-15);

        // γ_s = 1/(Lα_s)
        let broken = s.clone().with_equivalent_step(1.0).unwrap();
        let report = validate_schedule(&broken, 10, 1.0, 0.0, 3);
        assert!(!report.passed());
        let report = validate_schedule(&broken, 10, 1.0, 0.5, 3);
        assert!(report
            .epochs
            .iter()
            .all(|c| c.denominator > 0.0 && c.momentum_margin < 0.0));
    }

    #[test]
    fn regime_names_round_trip() {
        for r in Regime::ALL {
            assert_eq!(r.name().parse::<Regime>().unwrap(), r);
        }
    }
}
