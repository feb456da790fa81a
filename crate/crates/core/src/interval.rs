//! Interval records shared by every method.

use core::fmt;

/// Which procedure produced an interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MethodTag {
    /// QFCV with an `m`-dimensional auxiliary function.
    Qfcv { m: usize },
    FcvNaive,
    FcvAutocov,
    FcvScaling,
    /// ACI-DF wrapped around QFCV.
    Aqfcv,
    /// The Monte-Carlo marginal quantile band.
    Oracle,
    /// Any user-defined constructor.
    Custom,
}

impl fmt::Display for MethodTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MethodTag::Qfcv { m } => write!(f, "QFCV({m})"),
            MethodTag::FcvNaive => f.write_str("FCV"),
            MethodTag::FcvAutocov => f.write_str("FCV(c)"),
            MethodTag::FcvScaling => f.write_str("FCV(p)"),
            MethodTag::Aqfcv => f.write_str("AQFCV"),
            MethodTag::Oracle => f.write_str("ORACLE"),
            MethodTag::Custom => f.write_str("CUSTOM"),
        }
    }
}

/// An interval for a (stochastic or expected) test error.
///
/// The whole line is `(-inf, inf)`; the empty set is represented by
/// `lo = inf, hi = -inf` so that [`IntervalRecord::contains`] is always
/// false for it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalRecord {
    pub lo: f64,
    pub hi: f64,
    pub method: MethodTag,
    /// Nominal miscoverage `alpha` the interval was built for.
    pub alpha: f64,
    /// Time index the interval refers to (first index of its test window).
    pub t: usize,
}

impl IntervalRecord {
    pub fn new(lo: f64, hi: f64, method: MethodTag, alpha: f64, t: usize) -> Self {
        Self {
            lo,
            hi,
            method,
            alpha,
            t,
        }
    }

    pub fn full(method: MethodTag, alpha: f64, t: usize) -> Self {
        Self::new(f64::NEG_INFINITY, f64::INFINITY, method, alpha, t)
    }

    pub fn empty(method: MethodTag, alpha: f64, t: usize) -> Self {
        Self::new(f64::INFINITY, f64::NEG_INFINITY, method, alpha, t)
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn is_full(&self) -> bool {
        self.lo == f64::NEG_INFINITY && self.hi == f64::INFINITY
    }

    pub fn length(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.hi - self.lo
        }
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}
