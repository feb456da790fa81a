use alloc::boxed::Box;
use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("series of length {n} is too short: need at least {required} points")]
    SeriesTooShort { n: usize, required: usize },

    #[error("time index {index} is outside the series (length {len})")]
    MissingIndex { index: usize, len: usize },

    #[error("feature dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value at time index {index}")]
    NonFinite { index: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("singular normal equations; use a ridge penalty lambda > 0")]
    Singular,

    #[error("{what} did not converge after {iterations} iterations (last change {residual:e})")]
    NotConverged {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("{k} folds available, at least {required} needed")]
    InsufficientFolds { k: usize, required: usize },

    #[error("fold {fold}: {source}")]
    Fold {
        fold: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("autocovariance-corrected variance is negative ({radicand:e}); try a smaller K_trun")]
    NegativeRadicand { radicand: f64 },

    #[error(
        "GARCH optimizer left the feasible region; last feasible iterate \
         omega={omega:e} tau={tau} beta={beta}"
    )]
    GarchBoundary { omega: f64, tau: f64, beta: f64 },

    #[error("out-of-order time index: expected {expected}, got {got}")]
    OutOfOrder { expected: usize, got: usize },

    #[error("interval construction failed at t={t}: {source}")]
    Constructor {
        t: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn in_fold(self, fold: usize) -> Self {
        Error::Fold {
            fold,
            source: Box::new(self),
        }
    }
}
