//! Pinball loss, empirical quantiles and linear quantile regression.
//!
//! The regression is solved exactly as a linear program. With design `X`
//! (intercept column first) and level `b`, the dual problem
//!
//! ```text
//! max  y'a   s.t.  X'a = (1 - b) X'1,   0 <= a <= 1
//! ```
//!
//! is handled by a bounded-variable primal simplex; the simplex multipliers
//! of the optimal basis are the regression coefficients. The right-hand side
//! carries a lexicographic perturbation `(1 - b) X'1 + (eps, eps^2, ...)`,
//! which makes every pivot strictly improving (no cycling) and selects the
//! lexicographically smallest coefficient vector when the optimum is not
//! unique.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{independent_columns, Lu};

const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-10;
const LEX_TOL: f64 = 1e-11;
const RANK_TOL: f64 = 1e-10;

fn check_level(level: f64) -> Result<()> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(Error::param("level", "quantile level must lie strictly inside (0, 1)"))
    }
}

/// Rounds `v` to the nearest integer when it is one up to floating-point
/// noise, so that `K * level` products like `20 * 0.05` behave exactly.
pub(crate) fn snap_integer(v: f64) -> f64 {
    let r = libm::round(v);
    if (v - r).abs() <= 1e-9 * r.abs().max(1.0) {
        r
    } else {
        v
    }
}

/// `pinball_b(t) = b t` for `t > 0` and `(1 - b)(-t)` otherwise.
pub fn pinball(level: f64, t: f64) -> Result<f64> {
    check_level(level)?;
    Ok(pinball_unchecked(level, t))
}

#[inline]
pub(crate) fn pinball_unchecked(level: f64, t: f64) -> f64 {
    if t > 0.0 {
        level * t
    } else {
        (level - 1.0) * t
    }
}

/// Lower empirical quantile: the `ceil(K * level)`-th order statistic.
pub fn empirical_quantile(values: &[f64], level: f64) -> Result<f64> {
    check_level(level)?;
    if values.is_empty() {
        return Err(Error::param("values", "empirical quantile of an empty sample"));
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index: i });
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(sorted[quantile_rank(sorted.len(), level) - 1])
}

/// 1-based order-statistic rank used by [`empirical_quantile`].
pub fn quantile_rank(k: usize, level: f64) -> usize {
    let r = libm::ceil(snap_integer(k as f64 * level)) as usize;
    r.clamp(1, k)
}

/// An affine quantile function `x -> intercept + coefs . x`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearQuantileModel {
    pub level: f64,
    pub intercept: f64,
    pub coefs: Vec<f64>,
    /// Set when some feature column was linearly dependent on the others
    /// (or on the intercept) and was dropped with coefficient zero.
    pub rank_deficient: bool,
    /// Simplex pivots used by the fit.
    pub iterations: usize,
}

impl LinearQuantileModel {
    pub fn predict(&self, features: &[f64]) -> f64 {
        debug_assert_eq!(features.len(), self.coefs.len());
        self.intercept + self.coefs.iter().zip(features).map(|(c, f)| c * f).sum::<f64>()
    }

    /// Mean pinball loss of the model on row-major `features` (`K x m`).
    pub fn risk(&self, features: &[f64], targets: &[f64]) -> f64 {
        let m = self.coefs.len();
        let k = targets.len();
        let total: f64 = (0..k)
            .map(|i| {
                let f = &features[i * m..(i + 1) * m];
                pinball_unchecked(self.level, targets[i] - self.predict(f))
            })
            .sum();
        total / k as f64
    }
}

/// Mean pinball loss of the constant predictor `q`.
pub fn constant_risk(targets: &[f64], level: f64, q: f64) -> f64 {
    targets.iter().map(|&y| pinball_unchecked(level, y - q)).sum::<f64>() / targets.len() as f64
}

/// Fits `level`-quantile regression of `targets` on the row-major
/// `K x m` matrix `features`, always with an intercept. `m = 0` gives the
/// intercept-only model.
pub fn fit_linear_quantile(
    features: &[f64],
    m: usize,
    targets: &[f64],
    level: f64,
) -> Result<LinearQuantileModel> {
    check_level(level)?;
    let k = targets.len();
    if features.len() != k * m {
        return Err(Error::DimensionMismatch {
            expected: k * m,
            got: features.len(),
        });
    }
    if k < m + 2 {
        return Err(Error::InsufficientFolds { k, required: m + 2 });
    }
    if let Some(i) = targets.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index: i });
    }
    if let Some(i) = features.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index: i / m.max(1) });
    }

    let p = m + 1;
    // Scaled design (intercept first) and scaled targets.
    let mut col_scale = vec![1.0; p];
    for j in 0..m {
        let s = (0..k).map(|i| features[i * m + j].abs()).fold(0.0, f64::max);
        if s > 0.0 {
            col_scale[j + 1] = s;
        }
    }
    let y_scale = {
        let s = targets.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if s > 0.0 {
            s
        } else {
            1.0
        }
    };
    let mut x = vec![0.0; k * p];
    for i in 0..k {
        x[i * p] = 1.0;
        for j in 0..m {
            x[i * p + j + 1] = features[i * m + j] / col_scale[j + 1];
        }
    }
    let y: Vec<f64> = targets.iter().map(|v| v / y_scale).collect();

    let keep = independent_columns(&x, k, p, RANK_TOL);
    let rank_deficient = keep.len() < p;
    let q = keep.len();
    let xr: Vec<f64> = if rank_deficient {
        let mut v = Vec::with_capacity(k * q);
        for i in 0..k {
            for &j in &keep {
                v.push(x[i * p + j]);
            }
        }
        v
    } else {
        x
    };

    let (basis, iterations) = Simplex::new(&xr, &y, k, q, level).solve()?;

    // Recover coefficients from the unscaled data on the optimal basis so
    // that interpolated points are reproduced exactly.
    let mut bmat = vec![0.0; q * q];
    let mut rhs = vec![0.0; q];
    for (r, &row) in basis.iter().enumerate() {
        for (c, &j) in keep.iter().enumerate() {
            bmat[r * q + c] = if j == 0 { 1.0 } else { features[row * m + j - 1] };
        }
        rhs[r] = targets[row];
    }
    let lu = Lu::factor(bmat, q, 0.0).ok_or(Error::Singular)?;
    lu.solve(&mut rhs);
    let mut full = vec![0.0; p];
    for (c, &j) in keep.iter().enumerate() {
        full[j] = rhs[c];
    }
    Ok(LinearQuantileModel {
        level,
        intercept: full[0],
        coefs: full[1..].to_vec(),
        rank_deficient,
        iterations,
    })
}

/// Lexicographic `a < b` with a relative tolerance per component.
fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        let tol = LEX_TOL * (1.0 + x.abs().max(y.abs()));
        if x - y < -tol {
            return true;
        }
        if x - y > tol {
            return false;
        }
    }
    false
}

struct Simplex<'a> {
    x: &'a [f64],
    y: &'a [f64],
    k: usize,
    p: usize,
    c: Vec<f64>,
    /// Variables `0..k` are the dual weights `a_j`; `k..k + p` are the
    /// phase-one artificials.
    basis: Vec<usize>,
    at_upper: Vec<bool>,
    art_sign: Vec<f64>,
    is_basic: Vec<bool>,
}

enum Leave {
    Flip,
    Row { row: usize, to_upper: bool },
}

impl<'a> Simplex<'a> {
    fn new(x: &'a [f64], y: &'a [f64], k: usize, p: usize, level: f64) -> Self {
        let mut c = vec![0.0; p];
        for i in 0..k {
            for (j, cj) in c.iter_mut().enumerate() {
                *cj += x[i * p + j];
            }
        }
        for cj in c.iter_mut() {
            *cj = snap_integer(*cj * (1.0 - level));
        }
        // Start from the points above the unconditional quantile.
        let q = {
            let mut s = y.to_vec();
            s.sort_by(f64::total_cmp);
            s[quantile_rank(k, level) - 1]
        };
        let at_upper: Vec<bool> = y.iter().map(|&v| v > q).collect();
        let mut s = Simplex {
            x,
            y,
            k,
            p,
            c,
            basis: (k..k + p).collect(),
            at_upper,
            art_sign: vec![1.0; p],
            is_basic: vec![false; k + p],
        };
        let r0 = s.reduced_rhs();
        for j in 0..p {
            s.art_sign[j] = if r0[j] < 0.0 { -1.0 } else { 1.0 };
            s.is_basic[k + j] = true;
        }
        s
    }

    fn column(&self, v: usize, out: &mut [f64]) {
        if v < self.k {
            out.copy_from_slice(&self.x[v * self.p..(v + 1) * self.p]);
        } else {
            out.iter_mut().for_each(|o| *o = 0.0);
            out[v - self.k] = self.art_sign[v - self.k];
        }
    }

    /// `c - sum of columns of nonbasic variables sitting at their upper bound`.
    fn reduced_rhs(&self) -> Vec<f64> {
        let mut r = self.c.clone();
        for j in 0..self.k {
            if self.at_upper[j] && !self.is_basic[j] {
                for (rj, xj) in r.iter_mut().zip(&self.x[j * self.p..(j + 1) * self.p]) {
                    *rj -= xj;
                }
            }
        }
        r
    }

    fn factor(&self) -> Result<Lu> {
        let p = self.p;
        let mut b = vec![0.0; p * p];
        let mut col = vec![0.0; p];
        for (i, &v) in self.basis.iter().enumerate() {
            self.column(v, &mut col);
            for r in 0..p {
                b[r * p + i] = col[r];
            }
        }
        Lu::factor(b, p, 0.0).ok_or(Error::Singular)
    }

    fn cost(&self, v: usize, phase_one: bool) -> f64 {
        match (phase_one, v < self.k) {
            (true, true) => 0.0,
            (true, false) => -1.0,
            (false, true) => self.y[v],
            (false, false) => 0.0,
        }
    }

    /// Lexicographic basic values: row `i` is `(primary, B^{-1}[i, ..])`.
    fn basic_values(&self, lu: &Lu) -> Vec<Vec<f64>> {
        let p = self.p;
        let mut primary = self.reduced_rhs();
        lu.solve(&mut primary);
        let mut rows: Vec<Vec<f64>> = primary
            .iter()
            .map(|&v| {
                let mut r = vec![0.0; p + 1];
                r[0] = v;
                r
            })
            .collect();
        let mut e = vec![0.0; p];
        for col in 0..p {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[col] = 1.0;
            lu.solve(&mut e);
            for i in 0..p {
                rows[i][col + 1] = e[i];
            }
        }
        rows
    }

    fn pivot_loop(&mut self, phase_one: bool, iterations: &mut usize, cap: usize) -> Result<()> {
        let p = self.p;
        let mut col = vec![0.0; p];
        loop {
            if *iterations >= cap {
                return Err(Error::NotConverged {
                    what: "quantile regression simplex",
                    iterations: *iterations,
                    residual: f64::NAN,
                });
            }
            let lu = self.factor()?;
            let mut pi: Vec<f64> = self.basis.iter().map(|&v| self.cost(v, phase_one)).collect();
            lu.solve_transpose(&mut pi);

            let mut enter: Option<(usize, f64)> = None;
            for j in 0..self.k {
                if self.is_basic[j] {
                    continue;
                }
                let row = &self.x[j * p..(j + 1) * p];
                let d = self.cost(j, phase_one) - pi.iter().zip(row).map(|(a, b)| a * b).sum::<f64>();
                let gain = if self.at_upper[j] { -d } else { d };
                if gain > COST_TOL && enter.is_none_or(|(_, g)| gain > g) {
                    enter = Some((j, gain));
                }
            }
            let Some((j, _)) = enter else {
                return Ok(());
            };
            *iterations += 1;

            let dir = if self.at_upper[j] { -1.0 } else { 1.0 };
            self.column(j, &mut col);
            lu.solve(&mut col);
            let vals = self.basic_values(&lu);

            let mut best: Vec<f64> = vec![0.0; p + 1];
            best[0] = 1.0;
            let mut leave = Leave::Flip;
            for i in 0..p {
                let g = dir * col[i];
                let (ratio, to_upper) = if g > PIVOT_TOL {
                    (vals[i].iter().map(|v| v / g).collect::<Vec<f64>>(), false)
                } else if g < -PIVOT_TOL && self.basis[i] < self.k {
                    let h = -g;
                    let mut r: Vec<f64> = vals[i].iter().map(|v| -v / h).collect();
                    r[0] += 1.0 / h;
                    (r, true)
                } else {
                    continue;
                };
                if lex_less(&ratio, &best) {
                    best = ratio;
                    leave = Leave::Row { row: i, to_upper };
                }
            }

            match leave {
                Leave::Flip => self.at_upper[j] = !self.at_upper[j],
                Leave::Row { row, to_upper } => {
                    let out = self.basis[row];
                    self.is_basic[out] = false;
                    if out < self.k {
                        self.at_upper[out] = to_upper;
                    }
                    self.basis[row] = j;
                    self.is_basic[j] = true;
                    self.at_upper[j] = false;
                }
            }
        }
    }

    /// Pivots any artificial left in the basis (at level zero) out in
    /// favour of a structural variable.
    fn drive_out_artificials(&mut self) -> Result<()> {
        let p = self.p;
        for row in 0..p {
            if self.basis[row] < self.k {
                continue;
            }
            let lu = self.factor()?;
            let vals = self.basic_values(&lu);
            if vals[row][0].abs() > 1e-8 {
                return Err(Error::Degenerate(
                    "quantile regression linear program is infeasible".into(),
                ));
            }
            let mut e = vec![0.0; p];
            e[row] = 1.0;
            lu.solve_transpose(&mut e);
            let mut pick: Option<(usize, f64)> = None;
            for j in 0..self.k {
                if self.is_basic[j] {
                    continue;
                }
                let w: f64 = e.iter().zip(&self.x[j * p..(j + 1) * p]).map(|(a, b)| a * b).sum();
                if w.abs() > PIVOT_TOL && pick.is_none_or(|(_, b)| w.abs() > b) {
                    pick = Some((j, w.abs()));
                }
            }
            let (j, _) = pick.ok_or(Error::Singular)?;
            let out = self.basis[row];
            self.is_basic[out] = false;
            self.basis[row] = j;
            self.is_basic[j] = true;
            self.at_upper[j] = false;
        }
        Ok(())
    }

    fn solve(mut self) -> Result<(Vec<usize>, usize)> {
        let cap = 50 * (self.k + self.p) + 1000;
        let mut iterations = 0;
        self.pivot_loop(true, &mut iterations, cap)?;
        let lu = self.factor()?;
        let vals = self.basic_values(&lu);
        for (i, &v) in self.basis.iter().enumerate() {
            if v >= self.k && vals[i][0] > 1e-8 {
                return Err(Error::Degenerate(
                    "quantile regression linear program is infeasible".into(),
                ));
            }
        }
        self.drive_out_artificials()?;
        self.pivot_loop(false, &mut iterations, cap)?;
        Ok((self.basis, iterations))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pinball_values() {
        assert_eq!(pinball(0.5, 2.0).unwrap(), 1.0);
        assert!((pinball(0.9, 1.0).unwrap() - 0.9).abs() < 1e-15);
        assert!((pinball(0.9, -1.0).unwrap() - 0.1).abs() < 1e-15);
        assert!(pinball(1.0, 1.0).is_err());
        assert!(pinball(0.0, 1.0).is_err());
    }

    #[test]
    fn quantile_conventions() {
        assert_eq!(empirical_quantile(&[5.0, 1.0, 4.0, 2.0, 3.0], 0.5).unwrap(), 3.0);
        assert_eq!(empirical_quantile(&[2.0, 1.0], 0.5).unwrap(), 1.0);
        assert!(empirical_quantile(&[], 0.5).is_err());
        // 20 * 0.05 is 1.0000000000000002 in floating point.
        let v: Vec<f64> = (1..=20).map(f64::from).collect();
        assert_eq!(empirical_quantile(&v, 0.05).unwrap(), 1.0);
        assert_eq!(empirical_quantile(&v, 0.95).unwrap(), 19.0);
    }

    #[test]
    fn intercept_only_matches_order_statistic() {
        let y = [3.0, -1.0, 7.0, 2.0, 2.0, 10.0, 0.5, 4.0, 6.0, 1.0];
        for &b in &[0.05, 0.1, 0.25, 0.5, 0.7, 0.9, 0.95] {
            let fit = fit_linear_quantile(&[], 0, &y, b).unwrap();
            let q = empirical_quantile(&y, b).unwrap();
            assert_eq!(fit.intercept, q, "level {b}");
        }
    }

    #[test]
    fn interpolates_affine_targets() {
        let xs: Vec<f64> = (0..15).map(|i| (i as f64 * 0.37).sin()).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 1.5 - 2.0 * x).collect();
        for &b in &[0.05, 0.5, 0.95] {
            let fit = fit_linear_quantile(&xs, 1, &ys, b).unwrap();
            assert!(fit.risk(&xs, &ys) < 1e-12);
            assert!((fit.coefs[0] + 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn constant_feature_is_flagged() {
        let xs = [2.0; 8];
        let ys = [1.0, 5.0, 3.0, 2.0, 8.0, 4.0, 6.0, 7.0];
        let fit = fit_linear_quantile(&xs, 1, &ys, 0.5).unwrap();
        assert!(fit.rank_deficient);
        assert_eq!(fit.coefs[0], 0.0);
        assert_eq!(fit.intercept, 4.0);
    }

    #[test]
    fn too_few_rows() {
        assert!(matches!(
            fit_linear_quantile(&[1.0, 2.0], 1, &[1.0, 2.0], 0.5),
            Err(Error::InsufficientFolds { k: 2, required: 3 })
        ));
    }
}
