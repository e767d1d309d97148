use crate::error::{Error, Result};
use crate::scalar::Real;

/// Geometric growth of the offsets in each refined cluster.
const CLUSTER_RATIO: f64 = 1.1;
/// Finest spacing at a center, as a fraction of `linewidth_scale`.
const REFINEMENT: f64 = 0.1;

/// Frequency grid over `span` with `base_points` uniform samples, plus
/// logarithmically graded clusters around each center.
///
/// Cluster offsets start at `linewidth_scale / 10` and grow by 10% per point
/// until they reach the uniform spacing. Centers outside the span are
/// ignored. The result is strictly increasing and depends only on the inputs.
pub fn frequency_grid<T: Real>(
    centers: &[T],
    linewidth_scale: T,
    span: (T, T),
    base_points: usize,
) -> Result<Vec<T>> {
    let (lo, hi) = span;
    if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::param("span", "upper bound must exceed lower bound"));
    }
    if base_points < 2 {
        return Err(Error::param("base_points", "need at least 2 points"));
    }
    if !centers.is_empty() && !(linewidth_scale > T::zero()) {
        return Err(Error::param("linewidth_scale", "must be positive"));
    }

    let last = base_points - 1;
    let mut grid: Vec<T> = (0..base_points)
        .map(|i| {
            let t = T::lit(i as f64 / last as f64);
            lo * (T::one() - t) + hi * t
        })
        .collect();
    let spacing = (hi - lo) / T::lit(last as f64);

    for &c in centers.iter().filter(|c| **c >= lo && **c <= hi) {
        grid.push(c);
        let mut d = linewidth_scale * T::lit(REFINEMENT);
        while d < spacing {
            for x in [c - d, c + d] {
                if x > lo && x < hi {
                    grid.push(x);
                }
            }
            d = d * T::lit(CLUSTER_RATIO);
        }
    }

    grid.sort_by(|a, b| a.partial_cmp(b).expect("finite grid values"));
    grid.dedup();
    Ok(grid)
}
