use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// Dense integer matrix, row-major, arbitrary precision.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix")]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

#[derive(Deserialize)]
struct RawMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl TryFrom<RawMatrix> for IntMatrix {
    type Error = String;

    fn try_from(r: RawMatrix) -> std::result::Result<Self, String> {
        if r.rows * r.cols != r.data.len() {
            return Err(format!("{}×{} matrix with {} entries", r.rows, r.cols, r.data.len()));
        }
        Ok(IntMatrix { rows: r.rows, cols: r.cols, data: r.data })
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<BigInt>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length mismatch");
        IntMatrix { rows, cols, data }
    }

    pub fn from_i64(rows: usize, cols: usize, data: &[i64]) -> Self {
        Self::from_vec(rows, cols, data.iter().map(|&x| BigInt::from(x)).collect())
    }

    /// Builds a matrix from row slices; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r.iter().map(|&x| BigInt::from(x)));
        }
        Self::from_vec(rows.len(), cols, data)
    }

    pub fn from_big_rows(rows: &[Vec<BigInt>], cols: usize) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r.iter().cloned());
        }
        Self::from_vec(rows.len(), cols, data)
    }

    pub fn from_columns(rows: usize, columns: &[Vec<BigInt>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length mismatch");
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn diagonal(entries: &[BigInt]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, d) in entries.iter().enumerate() {
            m[(i, i)] = d.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in product");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(BigInt::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    pub fn add(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        IntMatrix::from_vec(self.rows, self.cols, data)
    }

    pub fn sub(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        IntMatrix::from_vec(self.rows, self.cols, data)
    }

    pub fn scale(&self, k: &BigInt) -> IntMatrix {
        let data = self.data.iter().map(|a| a * k).collect();
        IntMatrix::from_vec(self.rows, self.cols, data)
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &IntMatrix) -> IntMatrix {
        if self.rows == 0 {
            return other.clone();
        }
        if other.rows == 0 {
            return self.clone();
        }
        assert_eq!(self.cols, other.cols, "vstack column mismatch");
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        IntMatrix::from_vec(self.rows + other.rows, self.cols, data)
    }

    /// Places `other` to the right of `self`.
    pub fn hstack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        let mut m = IntMatrix::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..other.cols {
                m[(i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        m
    }

    pub fn select_rows(&self, idx: &[usize]) -> IntMatrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend(self.row(i).iter().cloned());
        }
        IntMatrix::from_vec(idx.len(), self.cols, data)
    }

    pub fn select_cols(&self, idx: &[usize]) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.rows, idx.len());
        for i in 0..self.rows {
            for (jj, &j) in idx.iter().enumerate() {
                m[(i, jj)] = self[(i, j)].clone();
            }
        }
        m
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += k * row[src]
    pub fn add_row_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = &self.data[src * self.cols + j] * k;
            self.data[dst * self.cols + j] += v;
        }
    }

    /// col[dst] += k * col[src]
    pub fn add_col_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = &self.data[i * self.cols + src] * k;
            self.data[i * self.cols + dst] += v;
        }
    }

    pub fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -std::mem::take(&mut self.data[i * self.cols + j]);
            self.data[i * self.cols + j] = v;
        }
    }

    pub fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = -std::mem::take(&mut self.data[i * self.cols + j]);
            self.data[i * self.cols + j] = v;
        }
    }

    /// Reduces row i modulo `moduli[i]` into [0, m); a zero modulus leaves the row alone.
    pub fn reduce_rows_mod(&mut self, moduli: &[BigInt]) {
        assert_eq!(moduli.len(), self.rows);
        for (i, m) in moduli.iter().enumerate() {
            if m.is_zero() {
                continue;
            }
            for j in 0..self.cols {
                let v = self.data[i * self.cols + j].mod_floor(m);
                self.data[i * self.cols + j] = v;
            }
        }
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !a[(i, k)].is_zero()) else {
                    return BigInt::zero();
                };
                a.swap_rows(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)]) / &prev;
                    a[(i, j)] = v;
                }
            }
            prev = a[(k, k)].clone();
        }
        sign * &a[(n - 1, n - 1)]
    }

    pub fn is_unimodular(&self) -> bool {
        self.rows == self.cols && self.det().abs().is_one()
    }

    pub fn max_abs(&self) -> BigInt {
        self.data.iter().map(|x| x.abs()).max().unwrap_or_default()
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_small() {
        let m = IntMatrix::from_rows(&[vec![2, 4], vec![4, 2]]);
        assert_eq!(m.det(), BigInt::from(-12));
        let z = IntMatrix::from_rows(&[vec![0, 1, 2], vec![0, 3, 4], vec![0, 5, 6]]);
        assert!(z.det().is_zero());
        let p = IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]]);
        assert_eq!(p.det(), BigInt::from(-1));
    }

    #[test]
    fn det_matches_cofactor_expansion_3x3() {
        let m = IntMatrix::from_rows(&[vec![3, -1, 7], vec![2, 5, -4], vec![-6, 1, 9]]);
        let e = |i: usize, j: usize| m[(i, j)].clone();
        let expect = e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1))
            - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
            + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0));
        assert_eq!(m.det(), expect);
    }

    #[test]
    fn stacking_and_products() {
        let a = IntMatrix::from_rows(&[vec![1, 2], vec![3, 4]]);
        let i = IntMatrix::identity(2);
        assert_eq!(a.mul(&i), a);
        assert_eq!(a.vstack(&i).rows(), 4);
        assert_eq!(a.hstack(&i).cols(), 4);
        assert_eq!(a.transpose().transpose(), a);
        assert_eq!(
            a.mul_vec(&[BigInt::from(1), BigInt::from(1)]),
            vec![BigInt::from(3), BigInt::from(7)]
        );
    }
}
