//! Dense real matrices with LU-based determinant, inverse and slicing.

use crate::error::NumericsError;

/// Relative pivot threshold below which a factorization is treated as singular.
pub const SINGULARITY_TOL: f64 = 1e-10;

/// Dense row-major matrix of finite `f64` entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self, NumericsError> {
        if rows == 0 || cols == 0 {
            return Err(NumericsError::Dimension(format!(
                "matrix must be at least 1x1, got {rows}x{cols}"
            )));
        }
        if entries.len() != rows * cols {
            return Err(NumericsError::Dimension(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if let Some(bad) = entries.iter().find(|v| !v.is_finite()) {
            return Err(NumericsError::NonFinite(*bad));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::new(rows, cols, vec![0.0; rows * cols]).expect("zeros is well-formed")
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, NumericsError> {
        let r = rows.len();
        let c = rows.first().map(|row| row.len()).unwrap_or(0);
        if rows.iter().any(|row| row.len() != c) {
            return Err(NumericsError::Dimension("ragged rows".into()));
        }
        Self::new(r, c, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix, NumericsError> {
        if self.cols != other.rows {
            return Err(NumericsError::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>, NumericsError> {
        if v.len() != self.cols {
            return Err(NumericsError::Dimension(format!(
                "cannot apply {}x{} to vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, x)| a * x).sum())
            .collect())
    }

    pub fn scale(&self, c: f64) -> Matrix {
        let entries = self.entries.iter().map(|v| c * v).collect();
        Matrix::new(self.rows, self.cols, entries).expect("scaled matrix stays well-formed")
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix, NumericsError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(NumericsError::Dimension("shape mismatch in add".into()));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Matrix::new(self.rows, self.cols, entries)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// Row-wise infinity norm.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    fn check_index_set(&self, set: &[usize], bound: usize) -> Result<(), NumericsError> {
        if set.is_empty() {
            return Err(NumericsError::Index("index set must be nonempty".into()));
        }
        for w in set.windows(2) {
            if w[0] >= w[1] {
                return Err(NumericsError::Index(
                    "index set must be sorted and duplicate-free".into(),
                ));
            }
        }
        if let Some(&bad) = set.iter().find(|&&i| i >= bound) {
            return Err(NumericsError::Index(format!(
                "index {bad} out of range for dimension {bound}"
            )));
        }
        Ok(())
    }

    /// Sub-matrix with the given (0-based, sorted) rows and columns.
    pub fn submatrix(&self, row_set: &[usize], col_set: &[usize]) -> Result<Matrix, NumericsError> {
        self.check_index_set(row_set, self.rows)?;
        self.check_index_set(col_set, self.cols)?;
        let mut entries = Vec::with_capacity(row_set.len() * col_set.len());
        for &i in row_set {
            for &j in col_set {
                entries.push(self[(i, j)]);
            }
        }
        Matrix::new(row_set.len(), col_set.len(), entries)
    }

    /// Principal sub-matrix on the given (0-based, sorted) index set.
    pub fn principal_submatrix(&self, index_set: &[usize]) -> Result<Matrix, NumericsError> {
        if !self.is_square() {
            return Err(NumericsError::Dimension(
                "principal submatrix requires a square matrix".into(),
            ));
        }
        self.submatrix(index_set, index_set)
    }

    /// LU factorization with partial pivoting; returns (LU, permutation, sign).
    fn lu(&self) -> Result<(Vec<f64>, Vec<usize>, f64), NumericsError> {
        if !self.is_square() {
            return Err(NumericsError::Dimension(format!(
                "LU requires a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut lu = self.entries.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let (pivot_row, pivot_abs) = (k..n)
                .map(|i| (i, lu[i * n + k].abs()))
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .expect("nonempty range");
            if pivot_row != k {
                for j in 0..n {
                    lu.swap(k * n + j, pivot_row * n + j);
                }
                perm.swap(k, pivot_row);
                sign = -sign;
            }
            if pivot_abs == 0.0 {
                continue;
            }
            let pivot = lu[k * n + k];
            for i in (k + 1)..n {
                let f = lu[i * n + k] / pivot;
                lu[i * n + k] = f;
                for j in (k + 1)..n {
                    lu[i * n + j] -= f * lu[k * n + j];
                }
            }
        }
        Ok((lu, perm, sign))
    }

    /// Determinant via LU with partial pivoting. A pivot smaller than
    /// `SINGULARITY_TOL` relative to the largest factor entry reports exact 0.
    pub fn determinant(&self) -> Result<f64, NumericsError> {
        let (lu, _, sign) = self.lu()?;
        let n = self.rows;
        let scale = lu.iter().fold(0.0f64, |acc, v| acc.max(v.abs())).max(1e-300);
        let mut det = sign;
        for k in 0..n {
            let pivot = lu[k * n + k];
            if pivot.abs() < SINGULARITY_TOL * scale {
                return Ok(0.0);
            }
            det *= pivot;
        }
        Ok(det)
    }

    /// Inverse via LU; errors with `Singular` when a pivot falls below the
    /// singularity threshold.
    pub fn invert(&self) -> Result<Matrix, NumericsError> {
        let (lu, perm, _) = self.lu()?;
        let n = self.rows;
        let scale = lu.iter().fold(0.0f64, |acc, v| acc.max(v.abs())).max(1e-300);
        for k in 0..n {
            if lu[k * n + k].abs() < SINGULARITY_TOL * scale {
                return Err(NumericsError::Singular);
            }
        }
        let mut inv = Matrix::zeros(n, n);
        let mut col = vec![0.0; n];
        for e in 0..n {
            for i in 0..n {
                col[i] = if perm[i] == e { 1.0 } else { 0.0 };
            }
            // forward substitution (unit lower triangular)
            for i in 1..n {
                for j in 0..i {
                    col[i] -= lu[i * n + j] * col[j];
                }
            }
            // back substitution
            for i in (0..n).rev() {
                for j in (i + 1)..n {
                    col[i] -= lu[i * n + j] * col[j];
                }
                col[i] /= lu[i * n + i];
            }
            for i in 0..n {
                inv[(i, e)] = col[i];
            }
        }
        Ok(inv)
    }

    /// Solve A x = b for square A.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>, NumericsError> {
        if b.len() != self.rows {
            return Err(NumericsError::Dimension("rhs length mismatch".into()));
        }
        let inv = self.invert()?;
        inv.matvec(b)
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.entries[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_determinant_is_one() {
        assert_eq!(Matrix::identity(3).determinant().unwrap(), 1.0);
    }

    #[test]
    fn rank_deficient_determinant_is_zero() {
        let a = Matrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert_eq!(a.determinant().unwrap(), 0.0);
    }

    #[test]
    fn diagonal_inverse() {
        let a = Matrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 4.0]]).unwrap();
        let inv = a.invert().unwrap();
        assert!((inv[(0, 0)] - 0.5).abs() < 1e-14);
        assert!((inv[(1, 1)] - 0.25).abs() < 1e-14);
        assert_eq!(inv[(0, 1)], 0.0);
    }

    #[test]
    fn identity_inverse_is_identity() {
        let inv = Matrix::identity(4).invert().unwrap();
        assert_eq!(inv, Matrix::identity(4));
    }

    #[test]
    fn singular_inverse_errors() {
        let a = Matrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert!(matches!(a.invert(), Err(NumericsError::Singular)));
    }

    #[test]
    fn non_square_determinant_errors() {
        let a = Matrix::new(2, 3, vec![0.0; 6]).unwrap();
        assert!(matches!(a.determinant(), Err(NumericsError::Dimension(_))));
    }

    #[test]
    fn nan_rejected_at_construction() {
        assert!(Matrix::new(1, 1, vec![f64::NAN]).is_err());
        assert!(Matrix::new(1, 1, vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn principal_submatrix_of_identity() {
        let a = Matrix::identity(3);
        let s = a.principal_submatrix(&[0, 2]).unwrap();
        assert_eq!(s, Matrix::identity(2));
    }

    #[test]
    fn principal_submatrix_single_index() {
        let a = Matrix::from_rows(&[
            vec![1.0, 2.0, 3.0],
            vec![4.0, 5.0, 6.0],
            vec![7.0, 8.0, 9.0],
        ])
        .unwrap();
        let s = a.principal_submatrix(&[1]).unwrap();
        assert_eq!(s.row(0), &[5.0]);
    }

    #[test]
    fn submatrix_row_slice() {
        let a = Matrix::identity(3);
        let s = a.submatrix(&[0], &[1, 2]).unwrap();
        assert_eq!(s.row(0), &[0.0, 0.0]);
    }

    #[test]
    fn submatrix_full_is_identity_of_slicing() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let s = a.submatrix(&[0, 1], &[0, 1]).unwrap();
        assert_eq!(s, a);
    }

    #[test]
    fn index_set_validation() {
        let a = Matrix::identity(3);
        assert!(a.principal_submatrix(&[]).is_err());
        assert!(a.principal_submatrix(&[2, 1]).is_err());
        assert!(a.principal_submatrix(&[0, 3]).is_err());
    }
}
