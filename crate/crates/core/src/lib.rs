//! Uncertainty intervals for the test error of time-series forecasters.
//!
//! The crate covers the whole pipeline behind quantile-based forward
//! cross-validation (QFCV):
//!
//! - [`layout`] builds the rolling (or expanding) train/validation/test
//!   windows and [`series`] stores the observed `(x_t, y_t)` stream.
//! - [`forecast`] holds the forecasters that are evaluated (ridge, Lasso,
//!   GARCH(1,1) and a training-mean baseline).
//! - [`qfcv`] computes per-fold `(Err_val, Err_test)` tuples and turns them
//!   into prediction intervals through linear quantile regression
//!   ([`quantreg`]).
//! - [`fcv`] implements the CLT-based forward cross-validation intervals.
//! - [`aci`] wraps any interval constructor in adaptive conformal inference
//!   with delayed feedback, which gives rolling intervals with time-average
//!   coverage under arbitrary nonstationarity.
//! - [`sim`] generates the seeded ARMA / nonstationary test beds.
//!
//! Everything here is `no_std` + `alloc`; IO, configuration and the
//! replication harness live in the `qfcv` crate.
//!
//! Time indices are 1-based throughout the public API, matching the usual
//! notation `z_1, ..., z_n`. Conversion to 0-based storage happens inside
//! [`series::TimeSeries`].

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod aci;
pub mod error;
pub mod fcv;
pub mod forecast;
pub mod interval;
pub mod layout;
mod linalg;
pub mod loss;
pub mod normal;
pub mod qfcv;
pub mod quantreg;
pub mod series;
pub mod sim;

pub use error::{Error, Result};
pub use interval::{IntervalRecord, MethodTag};
pub use layout::{FoldLayout, IndexRange, WindowScheme};
pub use loss::LossFn;
pub use series::{SeriesView, TimePoint, TimeSeries};
