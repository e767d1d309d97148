//! One-dimensional minimization: grid scans with golden-section polish.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// `(3 − √5) / 2`, the golden-section interior fraction.
const GOLDEN_FRACTION: f64 = 0.381_966_011_250_105_2;
const MAX_GOLDEN_STEPS: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarMinimum<T> {
    pub x: T,
    pub value: T,
    pub evaluations: usize,
    /// The best grid sample sat on the first or last grid point.
    pub at_boundary: bool,
}

/// Golden-section search on `[lo, hi]` until the bracket is narrower than
/// `rel_tol` relative to its midpoint.
pub fn golden_section<T, F>(mut f: F, lo: T, hi: T, rel_tol: T) -> Result<ScalarMinimum<T>>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    if !(hi > lo) {
        return Err(Error::param("bracket", "upper bound must exceed lower bound"));
    }
    let r = T::lit(GOLDEN_FRACTION);
    let (mut a, mut b) = (lo, hi);
    let mut x1 = a + r * (b - a);
    let mut x2 = b - r * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    let mut evaluations = 2;
    let half = T::lit(0.5);

    for _ in 0..MAX_GOLDEN_STEPS {
        let mid = (a.abs() + b.abs()) * half;
        if b - a <= rel_tol * mid || b - a <= T::min_positive_value() {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = a + r * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = b - r * (b - a);
            f2 = f(x2)?;
        }
        evaluations += 1;
    }
    let (x, value) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    Ok(ScalarMinimum {
        x,
        value,
        evaluations,
        at_boundary: false,
    })
}

/// Samples `f` on `grid` and polishes the best sample by golden section
/// between its neighbours. Never returns a value worse than the best sample.
pub fn minimize_on_grid<T, F>(mut f: F, grid: &[T], rel_tol: T) -> Result<ScalarMinimum<T>>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    if grid.len() < 3 {
        return Err(Error::param("grid", "need at least 3 points"));
    }
    let mut best = (0, T::infinity());
    for (i, &x) in grid.iter().enumerate() {
        let v = f(x)?;
        if v < best.1 {
            best = (i, v);
        }
    }
    let (i, grid_value) = best;
    if !grid_value.is_finite() {
        return Err(Error::Domain("objective is not finite anywhere on the grid".into()));
    }
    let lo = grid[i.saturating_sub(1)];
    let hi = grid[(i + 1).min(grid.len() - 1)];
    let polished = golden_section(&mut f, lo, hi, rel_tol)?;
    let at_boundary = i == 0 || i == grid.len() - 1;
    let evaluations = grid.len() + polished.evaluations;
    Ok(if polished.value < grid_value {
        ScalarMinimum {
            evaluations,
            at_boundary,
            ..polished
        }
    } else {
        ScalarMinimum {
            x: grid[i],
            value: grid_value,
            evaluations,
            at_boundary,
        }
    })
}

/// Logarithmic grid from `lo` to `hi` inclusive with `per_decade` intervals
/// per factor of ten.
pub fn log_grid<T: Real>(lo: T, hi: T, per_decade: usize) -> Result<Vec<T>> {
    if !(lo > T::zero()) || !(hi > lo) || per_decade == 0 {
        return Err(Error::param("range", "need 0 < lo < hi and a positive density"));
    }
    let (l0, l1) = (lo.log10(), hi.log10());
    let n = ((l1 - l0) * T::lit(per_decade as f64)).ceil().to_usize().unwrap_or(1).max(1);
    Ok((0..=n)
        .map(|k| {
            let t = T::lit(k as f64 / n as f64);
            T::lit(10.0).powf(l0 * (T::one() - t) + l1 * t)
        })
        .collect())
}
