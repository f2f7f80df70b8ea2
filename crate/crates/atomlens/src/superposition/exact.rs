//! Exact construction and solution of the flatness (cancellation) system.
//!
//! The coefficient of `xi^(2k+1)` in `phi_{2j+1}(xi)` splits into an exact
//! rational part (integer Hermite coefficients times Gaussian-series terms
//! `(-1/2)^p / p!`) and one irrational normalization per column. Solving
//! the homogeneous system on the rational parts keeps every pivot exact,
//! so the solution stays meaningful at orders where a naive f64
//! elimination would have lost all significance.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};

use crate::{Error, Result};

/// Coefficients of the physicists' Hermite polynomials `H_0 ..= H_max`:
/// `table[m][p]` multiplies `xi^p`. Built from
/// `H_{m+1} = 2 xi H_m - 2 m H_{m-1}`.
pub(super) fn hermite_coefficients(max: usize) -> Vec<Vec<BigInt>> {
    let mut table: Vec<Vec<BigInt>> = Vec::with_capacity(max + 1);
    table.push(vec![BigInt::one()]);
    if max == 0 {
        return table;
    }
    table.push(vec![BigInt::zero(), BigInt::from(2)]);
    for m in 1..max {
        let mut next = vec![BigInt::zero(); m + 2];
        for p in 0..=m {
            next[p + 1] += BigInt::from(2) * &table[m][p];
        }
        for p in 0..m {
            next[p] -= BigInt::from(2 * m as i64) * &table[m - 1][p];
        }
        table.push(next);
    }
    table
}

/// Rational part of the odd-power Taylor table: `g[k][j]` is the
/// coefficient of `xi^(2k+1)` in `H_{2j+1}(xi) exp(-xi^2 / 2)`,
/// for `k, j = 0 ..= j_max`.
pub(super) fn series_matrix(j_max: usize) -> Vec<Vec<BigRational>> {
    let hermite = hermite_coefficients(2 * j_max + 1);

    // gaussian[p] = (-1/2)^p / p!
    let mut gaussian = Vec::with_capacity(j_max + 1);
    gaussian.push(BigRational::one());
    for p in 1..=j_max {
        let step = BigRational::new(BigInt::from(-1), BigInt::from(2 * p as i64));
        let next = &gaussian[p - 1] * step;
        gaussian.push(next);
    }

    (0..=j_max)
        .map(|k| {
            (0..=j_max)
                .map(|j| {
                    let mut entry = BigRational::zero();
                    for i in 0..=j.min(k) {
                        let h = BigRational::from(hermite[2 * j + 1][2 * i + 1].clone());
                        entry += h * &gaussian[k - i];
                    }
                    entry
                })
                .collect()
        })
        .collect()
}

/// `2^(2j+1) * (2j+1)!` for `j = 0 ..= j_max`; the squared column scale
/// relating the rational system to the orthonormal Hermite functions.
pub(super) fn squared_column_scales(j_max: usize) -> Vec<BigInt> {
    let mut scales = Vec::with_capacity(j_max + 1);
    scales.push(BigInt::from(2));
    for j in 1..=j_max {
        let factor = BigInt::from(4 * (2 * j as i64) * (2 * j as i64 + 1));
        let next = &scales[j - 1] * factor;
        scales.push(next);
    }
    scales
}

/// Exact direction of the one-dimensional nullspace of the flatness
/// system, scaled so the first component is 1.
///
/// Rows `k = 1 ..= j_max` of the rational series matrix are eliminated
/// against the first column with exact partial pivoting; an exactly zero
/// pivot means the system genuinely lacks a unique direction.
pub(super) fn solve_scaled(j_max: usize) -> Result<Vec<BigRational>> {
    if j_max == 0 {
        return Ok(vec![BigRational::one()]);
    }
    let g = series_matrix(j_max);
    let n = j_max;

    // Augmented system for b_1 ..= b_J with b_0 = 1 moved to the rhs.
    let mut aug: Vec<Vec<BigRational>> = (1..=n)
        .map(|k| {
            let mut row: Vec<BigRational> = (1..=n).map(|j| g[k][j].clone()).collect();
            row.push(-g[k][0].clone());
            row
        })
        .collect();

    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&a, &b| aug[a][col].abs().cmp(&aug[b][col].abs()))
            .expect("column range is nonempty");
        if aug[pivot_row][col].is_zero() {
            return Err(Error::SingularSystem {
                j_max,
                detail: format!("exactly zero pivot while eliminating column {col}"),
            });
        }
        aug.swap(col, pivot_row);
        let pivot = aug[col].clone();
        for row in aug.iter_mut().skip(col + 1) {
            if row[col].is_zero() {
                continue;
            }
            let factor = &row[col] / &pivot[col];
            for c in col..=n {
                let delta = &factor * &pivot[c];
                row[c] -= delta;
            }
        }
    }

    let mut b = vec![BigRational::zero(); n];
    for row in (0..n).rev() {
        let mut acc = aug[row][n].clone();
        for c in (row + 1)..n {
            acc -= &aug[row][c] * &b[c];
        }
        b[row] = acc / &aug[row][row];
    }

    let mut scaled = Vec::with_capacity(n + 1);
    scaled.push(BigRational::one());
    scaled.extend(b);
    Ok(scaled)
}
