use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

/// Dense square matrix stored row-major. Entry `(i, j)` is the edge from
/// gene `j` into gene `i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Clone + Default> Matrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![T::default(); n * n],
        }
    }
}

impl<T: Clone> Matrix<T> {
    pub fn filled(n: usize, value: T) -> Self {
        Self {
            n,
            data: vec![value; n * n],
        }
    }

    /// Builds a matrix from nested rows. Panics if the rows are not square.
    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            assert_eq!(row.len(), n, "matrix rows must be square");
            data.extend(row.iter().cloned());
        }
        Self { n, data }
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.data.chunks(self.n.max(1)).take(self.n).map(|r| r.to_vec()).collect()
    }
}

impl<T> Matrix<T> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    /// Iterates `(i, j, &value)` in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &T)> {
        let n = self.n;
        self.data.iter().enumerate().map(move |(k, v)| (k / n, k % n, v))
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            n: self.n,
            data: self.data.iter().map(f).collect(),
        }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_round_trip() {
        let rows = vec![vec![1, 2], vec![3, 4]];
        let m = Matrix::from_rows(&rows);
        assert_eq!(m[(1, 0)], 3);
        assert_eq!(m.to_rows(), rows);
        assert_eq!(m.row(0), &[1, 2]);
    }

    #[test]
    fn empty_matrix() {
        let m: Matrix<f64> = Matrix::zeros(0);
        assert!(m.to_rows().is_empty());
        assert_eq!(m.entries().count(), 0);
    }
}
