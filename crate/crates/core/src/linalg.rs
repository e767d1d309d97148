//! Small dense linear solves by Gaussian elimination with partial pivoting.

use std::ops::{Div, Mul, Sub};

use num_traits::{Float, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};

/// Element type that can serve as a pivot: exposes a real magnitude.
pub trait Pivot: Copy + Zero + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> {
    type Mag: Real;
    fn magnitude(&self) -> Self::Mag;
}

impl<T: Real> Pivot for T {
    type Mag = T;
    fn magnitude(&self) -> T {
        self.abs()
    }
}

impl<T: Real> Pivot for Cplx<T> {
    type Mag = T;
    fn magnitude(&self) -> T {
        self.re.abs() + self.im.abs()
    }
}

/// Output of [`solve`].
#[derive(Debug, Clone, Copy)]
pub struct Solution<E: Pivot, const N: usize, const M: usize> {
    pub x: [[E; M]; N],
    pub determinant: E,
    /// Ratio of the largest to the smallest pivot magnitude.
    pub condition: E::Mag,
}

/// Solves `a * X = b` for `M` right-hand sides at once (columns of `b`).
pub fn solve<E: Pivot, const N: usize, const M: usize>(
    mut a: [[E; N]; N],
    mut b: [[E; M]; N],
) -> Result<Solution<E, N, M>> {
    let mut max_pivot = E::Mag::zero();
    let mut min_pivot = E::Mag::infinity();
    let mut odd_swaps = false;

    for col in 0..N {
        let (pivot_row, pivot_mag) = (col..N)
            .map(|r| (r, a[r][col].magnitude()))
            .fold((col, E::Mag::neg_infinity()), |best, cur| if cur.1 > best.1 { cur } else { best });
        if !(pivot_mag > E::Mag::zero()) || !pivot_mag.is_finite() {
            return Err(Error::Singular {
                condition: f64::INFINITY,
            });
        }
        if pivot_row != col {
            a.swap(col, pivot_row);
            b.swap(col, pivot_row);
            odd_swaps = !odd_swaps;
        }
        max_pivot = max_pivot.max(pivot_mag);
        min_pivot = min_pivot.min(pivot_mag);

        let p = a[col][col];
        for row in col + 1..N {
            let f = a[row][col] / p;
            if f.magnitude() == E::Mag::zero() {
                continue;
            }
            for k in col..N {
                a[row][k] = a[row][k] - f * a[col][k];
            }
            for k in 0..M {
                b[row][k] = b[row][k] - f * b[col][k];
            }
        }
    }

    let condition = max_pivot / min_pivot;
    if condition > <E::Mag as Real>::lit(1.0) / <E::Mag as Float>::epsilon() {
        return Err(Error::Singular {
            condition: condition.as_f64(),
        });
    }

    let mut determinant = a[0][0];
    for (k, row) in a.iter().enumerate().skip(1) {
        determinant = determinant * row[k];
    }
    if odd_swaps {
        determinant = E::zero() - determinant;
    }

    let mut x = [[E::zero(); M]; N];
    for row in (0..N).rev() {
        for k in 0..M {
            let mut acc = b[row][k];
            for j in row + 1..N {
                acc = acc - a[row][j] * x[j][k];
            }
            x[row][k] = acc / a[row][row];
        }
    }
    Ok(Solution {
        x,
        determinant,
        condition,
    })
}

/// Single right-hand-side convenience wrapper.
pub fn solve_vec<E: Pivot, const N: usize>(a: [[E; N]; N], b: [E; N]) -> Result<[E; N]> {
    let rhs = b.map(|v| [v]);
    Ok(solve::<E, N, 1>(a, rhs)?.x.map(|r| r[0]))
}
