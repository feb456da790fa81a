//! Fold windows for forward cross-validation.
//!
//! Fold `i` (1-based, `i = 1..=K`) of a rolling layout with spacing `delta`
//! and offset `o = (i - 1) * delta` uses
//!
//! ```text
//! D_i  = [o + 1,                o + n_tr]
//! V_i  = [o + n_tr + 1,         o + n_tr + n_val]
//! D_i* = [o + n_val + 1,        o + n_tr + n_val]
//! T_i  = [o + n_tr + n_val + 1, o + n_tr + n_val + n_te]
//! ```
//!
//! and the newest window ("star" sets) for a series observed up to `n` is
//! `D = [n - n_tr - n_val + 1, n - n_val]`, `V = [n - n_val + 1, n]`,
//! `D* = [n - n_tr + 1, n]`, `T = [n + 1, n + n_te]`. In the expanding
//! scheme every training window starts at index 1 instead.

use crate::error::{Error, Result};

/// Inclusive range of 1-based time indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IndexRange {
    pub start: usize,
    pub end: usize,
}

impl IndexRange {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start >= 1 && start <= end, "bad range {start}..={end}");
        Self { start, end }
    }

    pub fn len(&self) -> usize {
        self.end + 1 - self.start
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, t: usize) -> bool {
        self.start <= t && t <= self.end
    }

    pub fn iter(&self) -> core::ops::RangeInclusive<usize> {
        self.start..=self.end
    }

    pub fn shifted(&self, by: usize) -> Self {
        Self::new(self.start + by, self.end + by)
    }
}

/// How training windows move from fold to fold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WindowScheme {
    /// Fixed-size training window shifted by `delta` per fold.
    #[default]
    Rolling,
    /// Training window always starts at index 1 and grows by `delta`.
    Expanding,
}

impl WindowScheme {
    pub fn name(&self) -> &'static str {
        match self {
            WindowScheme::Rolling => "rolling",
            WindowScheme::Expanding => "expanding",
        }
    }
}

/// Window sizes shared by every fold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowSizes {
    pub n_tr: usize,
    pub n_val: usize,
    pub n_te: usize,
    pub delta: usize,
    pub scheme: WindowScheme,
}

impl WindowSizes {
    pub fn new(n_tr: usize, n_val: usize, n_te: usize, delta: usize) -> Self {
        Self {
            n_tr,
            n_val,
            n_te,
            delta,
            scheme: WindowScheme::Rolling,
        }
    }

    pub fn with_scheme(mut self, scheme: WindowScheme) -> Self {
        self.scheme = scheme;
        self
    }

    /// Smallest series length with one complete fold.
    pub fn min_len(&self) -> usize {
        self.n_tr + self.n_val + self.n_te
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("n_tr", self.n_tr),
            ("n_val", self.n_val),
            ("n_te", self.n_te),
            ("delta", self.delta),
        ] {
            if v == 0 {
                return Err(Error::param(name, "must be at least 1"));
            }
        }
        Ok(())
    }

    /// Number of complete folds in a series of length `n` (0 if none).
    pub fn fold_count(&self, n: usize) -> usize {
        if n < self.min_len() {
            0
        } else {
            (n - self.min_len()) / self.delta + 1
        }
    }

    /// Layout for a series of length `n`.
    pub fn layout(&self, n: usize) -> Result<FoldLayout> {
        build_fold_layout(n, self.n_tr, self.n_val, self.n_te, self.delta, self.scheme)
    }
}

/// Complete set of fold windows for a series of length `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FoldLayout {
    pub n: usize,
    pub sizes: WindowSizes,
    /// Number of folds `K`.
    pub k: usize,
}

/// Builds the fold layout, with `K = floor((n - n_tr - n_val - n_te) / delta) + 1`.
pub fn build_fold_layout(
    n: usize,
    n_tr: usize,
    n_val: usize,
    n_te: usize,
    delta: usize,
    scheme: WindowScheme,
) -> Result<FoldLayout> {
    let sizes = WindowSizes {
        n_tr,
        n_val,
        n_te,
        delta,
        scheme,
    };
    sizes.validate()?;
    if n < sizes.min_len() {
        return Err(Error::SeriesTooShort {
            n,
            required: sizes.min_len(),
        });
    }
    Ok(FoldLayout {
        n,
        sizes,
        k: sizes.fold_count(n),
    })
}

impl FoldLayout {
    fn offset(&self, i: usize) -> usize {
        debug_assert!(i >= 1 && i <= self.k, "fold {i} outside 1..={}", self.k);
        (i - 1) * self.sizes.delta
    }

    pub fn train(&self, i: usize) -> IndexRange {
        let o = self.offset(i);
        match self.sizes.scheme {
            WindowScheme::Rolling => IndexRange::new(o + 1, o + self.sizes.n_tr),
            WindowScheme::Expanding => IndexRange::new(1, o + self.sizes.n_tr),
        }
    }

    pub fn val(&self, i: usize) -> IndexRange {
        let o = self.offset(i) + self.sizes.n_tr;
        IndexRange::new(o + 1, o + self.sizes.n_val)
    }

    /// Training window of the model scored on `T_i`; it ends where `V_i` ends.
    pub fn train_star(&self, i: usize) -> IndexRange {
        let o = self.offset(i);
        let end = o + self.sizes.n_tr + self.sizes.n_val;
        match self.sizes.scheme {
            WindowScheme::Rolling => IndexRange::new(o + self.sizes.n_val + 1, end),
            WindowScheme::Expanding => IndexRange::new(1, end),
        }
    }

    pub fn test(&self, i: usize) -> IndexRange {
        let o = self.offset(i) + self.sizes.n_tr + self.sizes.n_val;
        IndexRange::new(o + 1, o + self.sizes.n_te)
    }

    /// `D`: training window paired with the newest validation window.
    pub fn star_train(&self) -> IndexRange {
        let end = self.n - self.sizes.n_val;
        match self.sizes.scheme {
            WindowScheme::Rolling => IndexRange::new(end + 1 - self.sizes.n_tr, end),
            WindowScheme::Expanding => IndexRange::new(1, end),
        }
    }

    /// `V`: the last `n_val` observed indices.
    pub fn star_val(&self) -> IndexRange {
        IndexRange::new(self.n - self.sizes.n_val + 1, self.n)
    }

    /// `D*`: training window of the deployed forecaster.
    pub fn star_train_full(&self) -> IndexRange {
        match self.sizes.scheme {
            WindowScheme::Rolling => IndexRange::new(self.n + 1 - self.sizes.n_tr, self.n),
            WindowScheme::Expanding => IndexRange::new(1, self.n),
        }
    }

    /// `T`: the unobserved test window `n+1..=n+n_te`.
    pub fn star_test(&self) -> IndexRange {
        IndexRange::new(self.n + 1, self.n + self.sizes.n_te)
    }
}
