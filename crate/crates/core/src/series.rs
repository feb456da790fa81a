//! Observed data stream `z_t = (x_t, y_t)`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::layout::IndexRange;

/// One observation: feature vector `x` and outcome `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimePoint {
    pub x: Vec<f64>,
    pub y: f64,
}

impl TimePoint {
    pub fn new(x: Vec<f64>, y: f64) -> Self {
        Self { x, y }
    }
}

/// Ordered series with a fixed feature dimension `p`, stored row-major.
///
/// Indices passed to accessors are 1-based.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    p: usize,
    x: Vec<f64>,
    y: Vec<f64>,
}

impl TimeSeries {
    pub fn new(p: usize) -> Self {
        Self {
            p,
            x: Vec::new(),
            y: Vec::new(),
        }
    }

    pub fn with_capacity(p: usize, n: usize) -> Self {
        Self {
            p,
            x: Vec::with_capacity(n * p),
            y: Vec::with_capacity(n),
        }
    }

    /// Builds a series from points, checking that every point has the same
    /// dimension and only finite values.
    pub fn from_points(points: &[TimePoint]) -> Result<Self> {
        let p = points.first().map_or(0, |pt| pt.x.len());
        let mut series = Self::with_capacity(p, points.len());
        for pt in points {
            series.push(&pt.x, pt.y)?;
        }
        Ok(series)
    }

    /// Builds a univariate series with the constant feature `x_t = 1`.
    pub fn from_outcomes(y: &[f64]) -> Result<Self> {
        let mut series = Self::with_capacity(1, y.len());
        for &v in y {
            series.push(&[1.0], v)?;
        }
        Ok(series)
    }

    pub fn push(&mut self, x: &[f64], y: f64) -> Result<()> {
        if x.len() != self.p {
            return Err(Error::DimensionMismatch {
                expected: self.p,
                got: x.len(),
            });
        }
        if !y.is_finite() || x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                index: self.len() + 1,
            });
        }
        self.x.extend_from_slice(x);
        self.y.push(y);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// Feature dimension.
    pub fn dim(&self) -> usize {
        self.p
    }

    pub fn x(&self, t: usize) -> &[f64] {
        let i = t - 1;
        &self.x[i * self.p..(i + 1) * self.p]
    }

    pub fn y(&self, t: usize) -> f64 {
        self.y[t - 1]
    }

    pub fn point(&self, t: usize) -> TimePoint {
        TimePoint::new(self.x(t).to_vec(), self.y(t))
    }

    pub fn outcomes(&self) -> &[f64] {
        &self.y
    }

    pub fn view(&self) -> SeriesView<'_> {
        SeriesView {
            p: self.p,
            first: 1,
            x: &self.x,
            y: &self.y,
        }
    }

    /// View of the indices in `range`, failing if any index is missing.
    pub fn window(&self, range: IndexRange) -> Result<SeriesView<'_>> {
        self.view().window(range)
    }

    /// View of `z_1, ..., z_n`.
    pub fn prefix(&self, n: usize) -> Result<SeriesView<'_>> {
        self.view().prefix(n)
    }
}

/// Borrowed, contiguous stretch of a [`TimeSeries`].
///
/// `first` is the 1-based index of the first row; rows are addressed either
/// by absolute time index ([`SeriesView::x_at`]) or by their position in
/// the view ([`SeriesView::x_row`]).
#[derive(Debug, Clone, Copy)]
pub struct SeriesView<'a> {
    p: usize,
    first: usize,
    x: &'a [f64],
    y: &'a [f64],
}

impl<'a> SeriesView<'a> {
    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    /// Absolute index of the first row.
    pub fn first_index(&self) -> usize {
        self.first
    }

    /// Absolute index of the last row.
    pub fn last_index(&self) -> usize {
        self.first + self.len() - 1
    }

    pub fn x_row(&self, j: usize) -> &'a [f64] {
        &self.x[j * self.p..(j + 1) * self.p]
    }

    pub fn y_row(&self, j: usize) -> f64 {
        self.y[j]
    }

    pub fn outcomes(&self) -> &'a [f64] {
        self.y
    }

    pub fn x_at(&self, t: usize) -> &'a [f64] {
        self.x_row(t - self.first)
    }

    pub fn y_at(&self, t: usize) -> f64 {
        self.y_row(t - self.first)
    }

    pub fn rows(&self) -> impl Iterator<Item = (&'a [f64], f64)> + '_ {
        let x = self.x;
        let p = self.p;
        self.y
            .iter()
            .enumerate()
            .map(move |(j, &y)| (&x[j * p..(j + 1) * p], y))
    }

    pub fn contains(&self, t: usize) -> bool {
        t >= self.first && t < self.first + self.len()
    }

    pub fn window(&self, range: IndexRange) -> Result<SeriesView<'a>> {
        for t in [range.start, range.end] {
            if !self.contains(t) {
                return Err(Error::MissingIndex {
                    index: t,
                    len: self.last_index(),
                });
            }
        }
        let lo = range.start - self.first;
        let hi = range.end - self.first + 1;
        Ok(SeriesView {
            p: self.p,
            first: range.start,
            x: &self.x[lo * self.p..hi * self.p],
            y: &self.y[lo..hi],
        })
    }

    pub fn prefix(&self, n: usize) -> Result<SeriesView<'a>> {
        if n == 0 {
            return Ok(SeriesView {
                p: self.p,
                first: self.first,
                x: &[],
                y: &[],
            });
        }
        self.window(IndexRange::new(self.first, self.first + n - 1))
    }

    pub fn to_series(&self) -> TimeSeries {
        TimeSeries {
            p: self.p,
            x: self.x.to_vec(),
            y: self.y.to_vec(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn rejects_ragged_points() {
        let pts = vec![TimePoint::new(vec![1.0, 2.0], 0.0), TimePoint::new(vec![1.0], 0.0)];
        assert_eq!(
            TimeSeries::from_points(&pts),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        );
    }

    #[test]
    fn rejects_nan() {
        let mut s = TimeSeries::new(1);
        s.push(&[1.0], 1.0).unwrap();
        assert_eq!(s.push(&[f64::NAN], 1.0), Err(Error::NonFinite { index: 2 }));
    }

    #[test]
    fn windows_are_one_based() {
        let s = TimeSeries::from_outcomes(&[10.0, 11.0, 12.0, 13.0]).unwrap();
        let w = s.window(IndexRange::new(2, 3)).unwrap();
        assert_eq!(w.outcomes(), &[11.0, 12.0]);
        assert_eq!(w.y_at(3), 12.0);
        assert_eq!(w.last_index(), 3);
        assert!(s.window(IndexRange::new(3, 5)).is_err());
        let sub = w.window(IndexRange::new(3, 3)).unwrap();
        assert_eq!(sub.outcomes(), &[12.0]);
    }
}
