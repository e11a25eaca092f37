//! Adaptive Gauss–Kronrod integration of complex-valued integrands on
//! intervals and rectangles.
//!
//! One subdivision tree is shared by the real and imaginary parts. Each
//! region carries `|K − G|` per component; the reported error is the larger
//! of the two component sums. Two refinement strategies are available:
//!
//! * [`Strategy::GlobalAdaptive`] keeps every leaf in a priority queue and
//!   always bisects the leaf with the largest error until the total error
//!   meets `max(abs_tol, rel_tol·|I|)`.
//! * [`Strategy::LocalAdaptive`] walks the tree depth-first and bisects a
//!   leaf only when its own error exceeds its share of the tolerance, the
//!   share being proportional to the leaf's length or area.
//!
//! Budget exhaustion is a soft failure: the best estimate is returned with
//! `converged == false`.

mod adaptive;
pub mod rule;

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

pub use adaptive::{Cell, RegionEstimate, RegionSet, Step};
pub use rule::RuleEstimate;

/// Complex integrand values and integrals.
pub type ComplexValue = Complex64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("invalid interval [{lo}, {hi}]: bounds must be finite with lo < hi")]
    InvalidDomain { lo: f64, hi: f64 },
    #[error("invalid quadrature config: {0}")]
    InvalidConfig(&'static str),
    #[error("integrand is not finite at x = {x}{}", y.map(|y| format!(", y = {y}")).unwrap_or_default())]
    NonFiniteIntegrand { x: f64, y: Option<f64> },
    #[error("integral did not converge: error estimate {err_est:e} exceeds tolerance {tolerance:e}")]
    NotConverged { err_est: f64, tolerance: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Strategy {
    #[default]
    GlobalAdaptive,
    LocalAdaptive,
}

impl Strategy {
    /// Short tag used in CSV records and on the command line.
    pub fn tag(self) -> &'static str {
        match self {
            Strategy::GlobalAdaptive => "global",
            Strategy::LocalAdaptive => "local",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "global" => Some(Strategy::GlobalAdaptive),
            "local" => Some(Strategy::LocalAdaptive),
            _ => None,
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Upper bound on the number of leaf regions.
    pub max_regions: usize,
    pub strategy: Strategy,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            rel_tol: 1e-6,
            abs_tol: 1e-12,
            max_regions: 100_000,
            strategy: Strategy::GlobalAdaptive,
        }
    }
}

impl QuadConfig {
    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn validate(&self) -> Result<(), QuadError> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(QuadError::InvalidConfig("rel_tol must be positive and finite"));
        }
        if !(self.abs_tol >= 0.0 && self.abs_tol.is_finite()) {
            return Err(QuadError::InvalidConfig("abs_tol must be non-negative and finite"));
        }
        if self.max_regions == 0 {
            return Err(QuadError::InvalidConfig("max_regions must be at least 1"));
        }
        Ok(())
    }

    /// Target error for an integral of magnitude `magnitude`.
    pub fn tolerance(&self, magnitude: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * magnitude)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: ComplexValue,
    pub err_est: f64,
    pub n_evals: usize,
    /// Leaf regions in the final subdivision.
    pub n_regions: usize,
    pub converged: bool,
}

impl QuadResult {
    /// Turns a soft non-convergence into an error.
    pub fn into_checked(self, cfg: &QuadConfig) -> Result<Self, QuadError> {
        if self.converged {
            Ok(self)
        } else {
            Err(QuadError::NotConverged {
                err_est: self.err_est,
                tolerance: cfg.tolerance(self.value.norm()),
            })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval1D {
    lo: f64,
    hi: f64,
}

impl Interval1D {
    pub fn new(lo: f64, hi: f64) -> Result<Self, QuadError> {
        if lo.is_finite() && hi.is_finite() && lo < hi {
            Ok(Interval1D { lo, hi })
        } else {
            Err(QuadError::InvalidDomain { lo, hi })
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    fn halves(&self) -> (Self, Self) {
        let m = self.midpoint();
        (Interval1D { lo: self.lo, hi: m }, Interval1D { lo: m, hi: self.hi })
    }
}

impl Cell for Interval1D {
    fn measure(&self) -> f64 {
        self.width()
    }

    fn bisect(&self, _axis_err: [f64; 2]) -> (Self, Self) {
        self.halves()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect2D {
    pub x: Interval1D,
    pub y: Interval1D,
}

impl Rect2D {
    pub fn new(x: Interval1D, y: Interval1D) -> Self {
        Rect2D { x, y }
    }
}

/// Ratio by which one axis's error must dominate to override the
/// longer-side split.
const SPLIT_BIAS: f64 = 2.0;

impl Cell for Rect2D {
    fn measure(&self) -> f64 {
        self.x.width() * self.y.width()
    }

    /// Halves the axis carrying clearly more of the error estimate;
    /// otherwise the longer side, x on ties.
    fn bisect(&self, axis_err: [f64; 2]) -> (Self, Self) {
        let [ex, ey] = axis_err;
        let split_x = if ex > SPLIT_BIAS * ey {
            true
        } else if ey > SPLIT_BIAS * ex {
            false
        } else {
            self.x.width() >= self.y.width()
        };
        if split_x {
            let (a, b) = self.x.halves();
            (Rect2D { x: a, y: self.y }, Rect2D { x: b, y: self.y })
        } else {
            let (a, b) = self.y.halves();
            (Rect2D { x: self.x, y: a }, Rect2D { x: self.x, y: b })
        }
    }
}

/// Integrates `f` over `domain`.
pub fn integrate_1d<F>(mut f: F, domain: Interval1D, cfg: &QuadConfig) -> Result<QuadResult, QuadError>
where
    F: FnMut(f64) -> ComplexValue,
{
    cfg.validate()?;
    let mut estimate = |cell: &Interval1D| {
        rule::apply_1d(&mut f, cell).map(|r| (RegionEstimate::from_rule(&r), rule::POINTS_1D))
    };
    let (root, n) = estimate(&domain)?;
    RegionSet::new(cfg, domain, root, n).run(&mut estimate)
}

/// Integrates `f(x, y)` over the rectangle `domain`.
pub fn integrate_2d<F>(mut f: F, domain: Rect2D, cfg: &QuadConfig) -> Result<QuadResult, QuadError>
where
    F: FnMut(f64, f64) -> ComplexValue,
{
    cfg.validate()?;
    let mut estimate = |cell: &Rect2D| {
        rule::apply_2d(&mut f, cell).map(|r| (RegionEstimate::from_rule(&r), rule::POINTS_2D))
    };
    let (root, n) = estimate(&domain)?;
    RegionSet::new(cfg, domain, root, n).run(&mut estimate)
}
