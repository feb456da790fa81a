//! Pointwise losses `l(y_hat, y)`.

/// Loss used to score forecasts.
#[derive(Debug, Clone, Copy, Default)]
pub enum LossFn {
    #[default]
    Squared,
    Absolute,
    /// User-supplied loss. `nonnegative` enables the lower clamp at zero on
    /// intervals built from this loss.
    Custom {
        f: fn(f64, f64) -> f64,
        nonnegative: bool,
    },
}

impl PartialEq for LossFn {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (LossFn::Squared, LossFn::Squared) | (LossFn::Absolute, LossFn::Absolute) => true,
            (LossFn::Custom { f: a, nonnegative: x }, LossFn::Custom { f: b, nonnegative: y }) => {
                x == y && core::ptr::fn_addr_eq(*a, *b)
            }
            _ => false,
        }
    }
}

impl LossFn {
    #[inline]
    pub fn eval(&self, y_hat: f64, y: f64) -> f64 {
        match *self {
            LossFn::Squared => {
                let d = y_hat - y;
                d * d
            }
            LossFn::Absolute => (y_hat - y).abs(),
            LossFn::Custom { f, .. } => f(y_hat, y),
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        match *self {
            LossFn::Squared | LossFn::Absolute => true,
            LossFn::Custom { nonnegative, .. } => nonnegative,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            LossFn::Squared => "squared",
            LossFn::Absolute => "absolute",
            LossFn::Custom { .. } => "custom",
        }
    }
}
