//! Small dense matrices over [`Scalar`] with the handful of exact routines
//! the rest of the crate needs: Gaussian elimination, determinants, and
//! definiteness tests via principal minors. Everything here is sized for
//! desk-scale games (dimension ≤ ~10), so clarity beats asymptotics.

#![allow(clippy::needless_range_loop)] // indexed math over parallel arrays

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let r = rows.len();
        if r == 0 {
            return Err(Error::Input("matrix needs at least one row".into()));
        }
        let c = rows[0].len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != c {
                return Err(Error::Parse(format!(
                    "row {} has {} entries, expected {}",
                    i + 1,
                    row.len(),
                    c
                )));
            }
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn is_exact(&self) -> bool {
        self.data.iter().all(|s| s.is_exact())
    }

    pub fn entries(&self) -> impl Iterator<Item = &Scalar> {
        self.data.iter()
    }

    pub fn min_entry(&self) -> &Scalar {
        self.data.iter().min().expect("nonempty matrix")
    }

    pub fn max_entry(&self) -> &Scalar {
        self.data.iter().max().expect("nonempty matrix")
    }

    pub fn map(&self, f: impl Fn(&Scalar) -> Scalar) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// `x^T M y` for vectors of matching length.
    pub fn bilinear(&self, x: &[Scalar], y: &[Scalar]) -> Scalar {
        assert_eq!(x.len(), self.rows);
        assert_eq!(y.len(), self.cols);
        let mut acc = Scalar::zero();
        for i in 0..self.rows {
            if x[i].is_zero() {
                continue;
            }
            let mut row = Scalar::zero();
            for j in 0..self.cols {
                if !y[j].is_zero() {
                    row = row + self.get(i, j) * &y[j];
                }
            }
            acc = acc + x[i].clone() * row;
        }
        acc
    }

    /// `M y` as a vector.
    pub fn mul_vec(&self, y: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(y.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = Scalar::zero();
                for j in 0..self.cols {
                    if !y[j].is_zero() {
                        acc = acc + self.get(i, j) * &y[j];
                    }
                }
                acc
            })
            .collect()
    }

    /// Symmetric part `(M + M^T)/2`.
    pub fn symmetric_part(&self) -> Matrix {
        assert_eq!(self.rows, self.cols);
        let half = Scalar::ratio(1, 2);
        Matrix::from_fn(self.rows, self.cols, |i, j| {
            (self.get(i, j) + self.get(j, i)) * half.clone()
        })
    }

    /// Determinant by cofactor expansion; fine for the ≤ 6×6 blocks used here.
    pub fn determinant(&self) -> Scalar {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        match n {
            0 => Scalar::one(),
            1 => self.get(0, 0).clone(),
            2 => {
                self.get(0, 0) * self.get(1, 1) - self.get(0, 1) * self.get(1, 0)
            }
            _ => {
                let mut det = Scalar::zero();
                for j in 0..n {
                    if self.get(0, j).is_zero() {
                        continue;
                    }
                    let minor = Matrix::from_fn(n - 1, n - 1, |r, c| {
                        self.get(r + 1, if c < j { c } else { c + 1 }).clone()
                    });
                    let term = self.get(0, j) * &minor.determinant();
                    det = if j % 2 == 0 { det + term } else { det - term };
                }
                det
            }
        }
    }

    /// Principal submatrix selected by `idx` (indices strictly increasing).
    pub fn principal_submatrix(&self, idx: &[usize]) -> Matrix {
        Matrix::from_fn(idx.len(), idx.len(), |i, j| {
            self.get(idx[i], idx[j]).clone()
        })
    }
}

/// True iff the symmetric matrix is positive semidefinite: every principal
/// minor is ≥ 0 (up to `-tol`).
pub fn is_positive_semidefinite(m: &Matrix, tol: &Scalar) -> bool {
    assert_eq!(m.rows(), m.cols());
    let n = m.rows();
    let neg_tol = -tol.clone();
    for mask in 1u32..(1 << n) {
        let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        if m.principal_submatrix(&idx).determinant() < neg_tol {
            return false;
        }
    }
    true
}

/// True iff the symmetric matrix is positive definite: Sylvester's criterion
/// on leading principal minors (each > `tol`).
pub fn is_positive_definite(m: &Matrix, tol: &Scalar) -> bool {
    assert_eq!(m.rows(), m.cols());
    let n = m.rows();
    for k in 1..=n {
        let idx: Vec<usize> = (0..k).collect();
        if m.principal_submatrix(&idx).determinant() <= *tol {
            return false;
        }
    }
    true
}

/// Solves `A x = b` by Gauss–Jordan elimination with partial pivoting.
///
/// Returns the particular solution with free variables set to zero, together
/// with the number of free variables (0 means the solution is unique).
/// Returns `None` when the system is inconsistent.
pub fn solve_linear(a: &Matrix, b: &[Scalar]) -> Option<(Vec<Scalar>, usize)> {
    assert_eq!(a.rows(), b.len());
    let rows = a.rows();
    let cols = a.cols();
    let mut aug = Matrix::from_fn(rows, cols + 1, |i, j| {
        if j < cols {
            a.get(i, j).clone()
        } else {
            b[i].clone()
        }
    });
    let mut pivot_col_of_row = vec![usize::MAX; rows];
    let mut rank = 0;
    for col in 0..cols {
        // Partial pivot: largest |entry| below the current rank row.
        let pivot = (rank..rows)
            .filter(|&r| !aug.get(r, col).is_zero())
            .max_by(|&r1, &r2| aug.get(r1, col).abs().cmp(&aug.get(r2, col).abs()));
        let Some(piv) = pivot else { continue };
        if piv != rank {
            for j in 0..=cols {
                let tmp = aug.get(rank, j).clone();
                aug.set(rank, j, aug.get(piv, j).clone());
                aug.set(piv, j, tmp);
            }
        }
        let inv = aug.get(rank, col).recip();
        for j in col..=cols {
            let v = aug.get(rank, j) * &inv;
            aug.set(rank, j, v);
        }
        for r in 0..rows {
            if r != rank && !aug.get(r, col).is_zero() {
                let factor = aug.get(r, col).clone();
                for j in col..=cols {
                    let v = aug.get(r, j) - &(factor.clone() * aug.get(rank, j).clone());
                    aug.set(r, j, v);
                }
            }
        }
        pivot_col_of_row[rank] = col;
        rank += 1;
        if rank == rows {
            break;
        }
    }
    // Inconsistency: a zero row with nonzero rhs.
    for r in rank..rows {
        if !aug.get(r, cols).is_zero() {
            return None;
        }
    }
    let mut x = vec![Scalar::zero(); cols];
    for r in 0..rank {
        x[pivot_col_of_row[r]] = aug.get(r, cols).clone();
    }
    Some((x, cols - rank))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    #[test]
    fn determinant_small() {
        let m = Matrix::from_rows(vec![vec![s(1), s(2)], vec![s(3), s(4)]]).unwrap();
        assert_eq!(m.determinant(), s(-2));
        let id3 = Matrix::from_fn(3, 3, |i, j| if i == j { s(1) } else { s(0) });
        assert_eq!(id3.determinant(), s(1));
    }

    #[test]
    fn solve_unique_system() {
        // x + y = 3, x - y = 1  =>  x = 2, y = 1
        let a = Matrix::from_rows(vec![vec![s(1), s(1)], vec![s(1), s(-1)]]).unwrap();
        let (x, free) = solve_linear(&a, &[s(3), s(1)]).unwrap();
        assert_eq!(free, 0);
        assert_eq!(x, vec![s(2), s(1)]);
    }

    #[test]
    fn solve_underdetermined_and_inconsistent() {
        let a = Matrix::from_rows(vec![vec![s(1), s(1)]]).unwrap();
        let (_, free) = solve_linear(&a, &[s(1)]).unwrap();
        assert_eq!(free, 1);

        let a = Matrix::from_rows(vec![vec![s(1), s(1)], vec![s(2), s(2)]]).unwrap();
        assert!(solve_linear(&a, &[s(1), s(3)]).is_none());
    }

    #[test]
    fn definiteness_tests() {
        let tol = Scalar::zero();
        let psd = Matrix::from_rows(vec![vec![s(1), s(1)], vec![s(1), s(1)]]).unwrap();
        assert!(is_positive_semidefinite(&psd, &tol));
        assert!(!is_positive_definite(&psd, &tol));

        let pd = Matrix::from_rows(vec![vec![s(2), s(1)], vec![s(1), s(2)]]).unwrap();
        assert!(is_positive_definite(&pd, &tol));

        let indef = Matrix::from_rows(vec![vec![s(1), s(0)], vec![s(0), s(-1)]]).unwrap();
        assert!(!is_positive_semidefinite(&indef, &tol));
    }
}
