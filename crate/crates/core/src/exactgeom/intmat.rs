use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    /// Builds a matrix from rows. Panics if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|row| row.iter().map(|&v| BigInt::from(v)).collect())
                .collect(),
        )
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<BigInt>]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        let mut m = Self::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), r, "ragged columns");
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<BigInt> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = BigInt::zero();
                for k in 0..self.cols {
                    acc += self.get(i, k) * other.get(k, j);
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            let v = -self.get(r, c).clone();
            self.set(r, c, v);
        }
    }

    fn negate_col(&mut self, c: usize) {
        for r in 0..self.rows {
            let v = -self.get(r, c).clone();
            self.set(r, c, v);
        }
    }

    /// row[target] -= q * row[src]
    fn sub_row_multiple(&mut self, target: usize, src: usize, q: &BigInt) {
        for c in 0..self.cols {
            let v = self.get(target, c) - q * self.get(src, c);
            self.set(target, c, v);
        }
    }

    /// col[target] += q * col[src]
    fn add_col_multiple(&mut self, target: usize, src: usize, q: &BigInt) {
        for r in 0..self.rows {
            let v = self.get(r, target) + q * self.get(r, src);
            self.set(r, target, v);
        }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries((0..self.rows).map(|r| {
                self.row(r)
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
            }))
            .finish()
    }
}

/// Row echelon form reached by unimodular row operations.
///
/// `transform * original == form`, and `inverse` is the integer inverse of
/// `transform`. Pivots are positive.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub form: IntMatrix,
    pub transform: IntMatrix,
    pub inverse: IntMatrix,
    /// Column index of the pivot in each nonzero row, in row order.
    pub pivots: Vec<usize>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Integer row echelon form by Euclidean row reduction.
pub fn row_echelon(m: &IntMatrix) -> Echelon {
    let mut form = m.clone();
    let mut transform = IntMatrix::identity(m.rows);
    let mut inverse = IntMatrix::identity(m.rows);
    let mut pivots = Vec::new();
    let mut r = 0;

    for c in 0..m.cols {
        if r == m.rows {
            break;
        }
        loop {
            // smallest nonzero entry at or below row r
            let best = (r..m.rows)
                .filter(|&i| !form.get(i, c).is_zero())
                .min_by(|&a, &b| form.get(a, c).abs().cmp(&form.get(b, c).abs()));
            let Some(p) = best else { break };
            form.swap_rows(r, p);
            transform.swap_rows(r, p);
            inverse.swap_cols(r, p);

            let mut done = true;
            for i in (r + 1)..m.rows {
                if form.get(i, c).is_zero() {
                    continue;
                }
                let q = form.get(i, c).div_floor(form.get(r, c));
                form.sub_row_multiple(i, r, &q);
                transform.sub_row_multiple(i, r, &q);
                inverse.add_col_multiple(r, i, &q);
                if !form.get(i, c).is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if form.get(r, c).is_zero() {
            continue;
        }
        if form.get(r, c).is_negative() {
            form.negate_row(r);
            transform.negate_row(r);
            inverse.negate_col(r);
        }
        pivots.push(c);
        r += 1;
    }

    Echelon {
        form,
        transform,
        inverse,
        pivots,
    }
}

/// Gcd of the absolute values of all `k x k` minors, `k = min(rows, cols)`.
///
/// Zero exactly when the matrix does not have full rank `k`.
pub fn maximal_minor_gcd(m: &IntMatrix) -> BigInt {
    if m.rows == 0 || m.cols == 0 {
        return BigInt::one();
    }
    // Row operations on the taller orientation preserve the gcd of its
    // maximal minors (Cauchy-Binet in both directions).
    let tall = if m.rows <= m.cols {
        m.transpose()
    } else {
        m.clone()
    };
    let ech = row_echelon(&tall);
    let k = tall.cols;
    if ech.rank() < k {
        return BigInt::zero();
    }
    (0..k).fold(BigInt::one(), |acc, i| acc * ech.form.get(i, ech.pivots[i]))
}

/// Extends the columns of `columns` (a `d x k` matrix) to a unimodular
/// `d x d` matrix whose first `k` columns are exactly the given ones.
///
/// Returns `None` when the columns are not part of a basis of `Z^d`.
pub fn extend_to_basis(columns: &IntMatrix) -> Option<IntMatrix> {
    let d = columns.rows;
    let k = columns.cols;
    if k > d {
        return None;
    }
    let ech = row_echelon(columns);
    if ech.rank() < k {
        return None;
    }
    // transform * A = [H; 0], H upper triangular with positive pivots.
    // A is primitive iff det H = 1.
    for i in 0..k {
        if !ech.form.get(i, ech.pivots[i]).is_one() {
            return None;
        }
    }
    let mut basis = ech.inverse;
    for j in 0..k {
        for i in 0..d {
            basis.set(i, j, columns.get(i, j).clone());
        }
    }
    Some(basis)
}
