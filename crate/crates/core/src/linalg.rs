//! Dense exact linear algebra over the coefficient field.
//!
//! Elimination is Gauss–Jordan over canonical rational functions. In each
//! column the pivot is the non-zero candidate of smallest size, ties broken
//! by row index, so every run performs the same operations.

use std::fmt;

use crate::arith::RationalFunction;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<RationalFunction>>,
}

impl Matrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![vec![RationalFunction::zero(); cols]; rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.data[i][i] = RationalFunction::one();
        }
        m
    }

    pub fn from_rows(data: Vec<Vec<RationalFunction>>) -> Self {
        let rows = data.len();
        let cols = data.first().map_or(0, |r| r.len());
        assert!(data.iter().all(|r| r.len() == cols), "ragged matrix");
        Matrix { rows, cols, data }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<RationalFunction>], rows: usize) -> Self {
        let mut m = Self::zero(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length");
            for (i, x) in c.iter().enumerate() {
                m.data[i][j] = x.clone();
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

    pub fn get(&self, i: usize, j: usize) -> &RationalFunction {
        &self.data[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: RationalFunction) {
        self.data[i][j] = x;
    }

    pub fn row(&self, i: usize) -> &[RationalFunction] {
        &self.data[i]
    }

    pub fn column(&self, j: usize) -> Vec<RationalFunction> {
        self.data.iter().map(|r| r[j].clone()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Self::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j][i] = self.data[i][j].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut m = Self::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i][k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other.data[k][j];
                    if !b.is_zero() {
                        m.data[i][j] += a * b;
                    }
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[RationalFunction]) -> Vec<RationalFunction> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        self.data.iter().map(|r| dot(r, v)).collect()
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for j in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows)
                .filter(|&i| !self.data[i][j].is_zero())
                .min_by_key(|&i| (self.data[i][j].size(), i))
            else {
                continue;
            };
            self.data.swap(r, p);
            let inv = self.data[r][j].inv().expect("pivot is non-zero");
            for x in self.data[r].iter_mut().skip(j) {
                if !x.is_zero() {
                    *x = &*x * &inv;
                }
            }
            let pivot_row = self.data[r].clone();
            for (i, row) in self.data.iter_mut().enumerate() {
                if i == r || row[j].is_zero() {
                    continue;
                }
                let f = row[j].clone();
                for k in j..self.cols {
                    if !pivot_row[k].is_zero() {
                        row[k] = &row[k] - &(&f * &pivot_row[k]);
                    }
                }
            }
            pivots.push(j);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Some solution of `self * x = b`, free variables set to zero.
    pub fn solve(&self, b: &[RationalFunction]) -> Option<Vec<RationalFunction>> {
        assert_eq!(b.len(), self.rows, "right-hand side length");
        let mut aug = Self::zero(self.rows, self.cols + 1);
        for (i, bi) in b.iter().enumerate() {
            aug.data[i][..self.cols].clone_from_slice(&self.data[i]);
            aug.data[i][self.cols] = bi.clone();
        }
        let pivots = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![RationalFunction::zero(); self.cols];
        for (r, &j) in pivots.iter().enumerate() {
            x[j] = aug.data[r][self.cols].clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Matrix> {
        assert_eq!(self.rows, self.cols, "square matrix");
        let n = self.rows;
        let mut aug = Self::zero(n, 2 * n);
        for i in 0..n {
            aug.data[i][..n].clone_from_slice(&self.data[i]);
            aug.data[i][n + i] = RationalFunction::one();
        }
        let pivots = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(Matrix::from_rows(
            aug.data.into_iter().map(|r| r[n..].to_vec()).collect(),
        ))
    }

    /// A row vector `y` with `y * self = 0` and `y . b = 1`, which exists
    /// exactly when `b` is outside the column space.
    pub fn separating_functional(&self, b: &[RationalFunction]) -> Option<Vec<RationalFunction>> {
        assert_eq!(b.len(), self.rows, "vector length");
        let mut sys = self.transpose();
        sys.data.push(b.to_vec());
        sys.rows += 1;
        let mut rhs = vec![RationalFunction::zero(); sys.rows];
        rhs[sys.rows - 1] = RationalFunction::one();
        sys.solve(&rhs)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.iter().all(|x| x.is_zero()))
    }
}

pub fn dot(a: &[RationalFunction], b: &[RationalFunction]) -> RationalFunction {
    let mut s = RationalFunction::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            s += x * y;
        }
    }
    s
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.data {
            let cells: Vec<String> = r.iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Var;

    fn q() -> RationalFunction {
        RationalFunction::var(Var::Q)
    }

    fn int(n: i64) -> RationalFunction {
        RationalFunction::from_int(n)
    }

    #[test]
    fn inverse_round_trip() {
        let m = Matrix::from_rows(vec![vec![q(), int(1)], vec![int(1), q().pow(-1) + q()]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(2));
        let singular = Matrix::from_rows(vec![vec![q(), int(1)], vec![q().pow(2), q()]]);
        assert!(singular.inverse().is_none());
        assert_eq!(singular.rank(), 1);
    }

    #[test]
    fn solve_and_certify() {
        let a = Matrix::from_rows(vec![vec![int(1), q()], vec![q(), q().pow(2)], vec![int(0), int(0)]]);
        let b = vec![int(2), q() * int(2), int(0)];
        let x = a.solve(&b).unwrap();
        assert_eq!(a.mul_vec(&x), b);
        assert!(a.separating_functional(&b).is_none());
        let c = vec![int(1), int(0), int(0)];
        assert!(a.solve(&c).is_none());
        let y = a.separating_functional(&c).unwrap();
        for j in 0..a.cols() {
            assert!(dot(&y, &a.column(j)).is_zero());
        }
        assert_eq!(dot(&y, &c), int(1));
    }
}
