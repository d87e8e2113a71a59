//! Small dense rational linear algebra.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::Rational;

/// Solves `A x = b` for `A` with full column rank.
///
/// `a` is given row-major (`rows x cols`). Returns `None` when the system is
/// inconsistent or the columns are dependent.
pub fn solve(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();

    let mut r = 0;
    for c in 0..cols {
        let p = (r..rows).find(|&i| !m[i][c].is_zero())?;
        m.swap(r, p);
        let inv = m[r][c].recip();
        for v in m[r].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for k in c..=cols {
                    let delta = &f * &m[r][k];
                    m[i][k] -= delta;
                }
            }
        }
        r += 1;
    }
    // leftover rows must be consistent
    if m[r..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    Some((0..cols).map(|i| m[i][cols].clone()).collect())
}

/// Integer counterpart of [`solve`] by fraction-free elimination.
///
/// Returns `(y, d)` with `d > 0` and `x = y / d` the unique solution.
pub fn solve_integer(a: &[Vec<BigInt>], b: &[BigInt]) -> Option<(Vec<BigInt>, BigInt)> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    if cols > rows {
        return None;
    }
    let mut m: Vec<Vec<BigInt>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let mut prev = BigInt::one();
    for c in 0..cols {
        let p = (c..rows).find(|&i| !m[i][c].is_zero())?;
        m.swap(c, p);
        for i in c + 1..rows {
            for k in c + 1..=cols {
                let v = &m[i][k] * &m[c][c] - &m[i][c] * &m[c][k];
                m[i][k] = v / &prev;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[c][c].clone();
    }
    if m[cols..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    // back substitution on y = prev * x, which is integral by Cramer's rule
    let d = prev;
    let mut y = vec![BigInt::zero(); cols];
    for i in (0..cols).rev() {
        let mut acc = &d * &m[i][cols];
        for j in i + 1..cols {
            acc -= &m[i][j] * &y[j];
        }
        y[i] = acc / &m[i][i];
    }
    if d.is_negative() {
        Some((y.into_iter().map(|v| -v).collect(), -d))
    } else {
        Some((y, d))
    }
}

/// Rank over the rationals.
pub fn rank(a: &[Vec<Rational>]) -> usize {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut m = a.to_vec();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in (r + 1)..rows {
            if !m[i][c].is_zero() {
                let f = &m[i][c] / &m[r][c];
                for k in c..cols {
                    let delta = &f * &m[r][k];
                    m[i][k] -= delta;
                }
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

/// Inverse of a square rational matrix, if it exists.
pub fn inverse(a: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = a.len();
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| {
                if i == j {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero())?;
        m.swap(c, p);
        let inv = m[c][c].recip();
        for v in m[c].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..n {
            if i != c && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for k in 0..2 * n {
                    let delta = &f * &m[c][k];
                    m[i][k] -= delta;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n..].to_vec()).collect())
}
