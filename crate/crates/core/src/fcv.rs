//! Forward cross-validation: the mean fold validation error and its
//! CLT-based intervals.
//!
//! - naive: `SE = sqrt(gamma(0) / K)`, a confidence interval that ignores
//!   the correlation between folds;
//! - autocovariance-corrected (`FCV(c)`): adds the truncated, tapered sum
//!   of sample autocovariances;
//! - scaling-corrected (`FCV(p)`): `sqrt(K)` times the naive SE, a
//!   prediction interval on the scale of a single fold error.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::interval::{IntervalRecord, MethodTag};
use crate::normal::inv_normal_cdf;

/// Per-fold validation errors `E_1, ..., E_K` and their mean.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldErrors {
    e: Vec<f64>,
    mean: f64,
}

impl FoldErrors {
    pub fn new(e: Vec<f64>) -> Result<Self> {
        if e.is_empty() {
            return Err(Error::InsufficientFolds { k: 0, required: 1 });
        }
        if let Some(i) = e.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index: i + 1 });
        }
        let mean = e.iter().sum::<f64>() / e.len() as f64;
        Ok(Self { e, mean })
    }

    pub fn values(&self) -> &[f64] {
        &self.e
    }

    pub fn k(&self) -> usize {
        self.e.len()
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FcvVariant {
    #[default]
    Naive,
    Autocov,
    Scaling,
}

impl FcvVariant {
    pub fn tag(&self) -> MethodTag {
        match self {
            FcvVariant::Naive => MethodTag::FcvNaive,
            FcvVariant::Autocov => MethodTag::FcvAutocov,
            FcvVariant::Scaling => MethodTag::FcvScaling,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FcvConfig {
    pub variant: FcvVariant,
    pub alpha: f64,
    /// Truncation lag of the autocovariance sum; `None` uses `ceil(K^(1/3))`.
    pub k_trun: Option<usize>,
}

impl Default for FcvConfig {
    fn default() -> Self {
        Self {
            variant: FcvVariant::Naive,
            alpha: 0.1,
            k_trun: None,
        }
    }
}

impl FcvConfig {
    pub fn with_variant(variant: FcvVariant, alpha: f64) -> Self {
        Self {
            variant,
            alpha,
            k_trun: None,
        }
    }
}

/// `ceil(K^(1/3))`, capped at `K - 1`.
pub fn default_k_trun(k: usize) -> usize {
    let mut t = libm::ceil(libm::cbrt(k as f64)) as usize;
    // cbrt of a perfect cube may land a hair above the integer.
    if t > 1 && (t - 1) * (t - 1) * (t - 1) >= k {
        t -= 1;
    }
    t.min(k.saturating_sub(1))
}

/// The FCV point estimate, `mean(E)`.
pub fn fcv_point(e: &FoldErrors) -> f64 {
    e.mean
}

/// `gamma_hat(s) = 1/(K-s) sum_{i=1}^{K-s} (E_i - E_bar)(E_{i+s} - E_bar)`.
pub fn sample_autocov(e: &FoldErrors, s: usize) -> Result<f64> {
    let k = e.k();
    if s >= k {
        return Err(Error::param("lag", "autocovariance lag must be < K"));
    }
    let m = e.mean;
    let v = &e.e;
    let sum: f64 = (0..k - s).map(|i| (v[i] - m) * (v[i + s] - m)).sum();
    Ok(sum / (k - s) as f64)
}

/// Standard error of the chosen variant.
pub fn fcv_se(e: &FoldErrors, config: &FcvConfig) -> Result<f64> {
    let k = e.k();
    if k < 2 {
        return Err(Error::InsufficientFolds { k, required: 2 });
    }
    let kf = k as f64;
    let g0 = sample_autocov(e, 0)?;
    match config.variant {
        FcvVariant::Naive => Ok(libm::sqrt(g0) / libm::sqrt(kf)),
        FcvVariant::Scaling => Ok(libm::sqrt(g0)),
        FcvVariant::Autocov => {
            let trun = config.k_trun.unwrap_or_else(|| default_k_trun(k));
            if trun >= k {
                return Err(Error::param("k_trun", "must be < K"));
            }
            let mut r = g0;
            for s in 1..=trun {
                r += 2.0 * (1.0 - s as f64 / kf) * sample_autocov(e, s)?;
            }
            if r < 0.0 {
                return Err(Error::NegativeRadicand { radicand: r });
            }
            Ok(libm::sqrt(r) / libm::sqrt(kf))
        }
    }
}

/// `E_bar -/+ z_{1-alpha/2} SE`.
pub fn fcv_interval(e: &FoldErrors, config: &FcvConfig) -> Result<IntervalRecord> {
    if !(config.alpha > 0.0 && config.alpha < 1.0) {
        return Err(Error::param("alpha", "must lie strictly inside (0, 1)"));
    }
    let se = fcv_se(e, config)?;
    let z = inv_normal_cdf(1.0 - config.alpha / 2.0)?;
    let c = fcv_point(e);
    Ok(IntervalRecord::new(c - z * se, c + z * se, config.variant.tag(), config.alpha, 0))
}
