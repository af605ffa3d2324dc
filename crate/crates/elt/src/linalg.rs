//! Dense row-major matrices and the closed-form ridge solver used by
//! every linear observer in the crate.
//!
//! All arithmetic is f64. The solver factorizes the normal matrix
//! `D'D + lambda*I` with an unpivoted Cholesky decomposition and reports
//! an explicit singularity error instead of falling back to a
//! pseudo-inverse.

use crate::error::{EltError, Result};

/// Row-major dense matrix of finite f64 values.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl DataMatrix {
    /// Builds a matrix from row-major values, rejecting non-finite
    /// entries and length mismatches.
    pub fn from_vec(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(EltError::Shape(format!(
                "{}x{} matrix needs {} values, got {}",
                rows,
                cols,
                rows * cols,
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(EltError::NonFinite(format!(
                "entry {} of a {}x{} matrix",
                pos, rows, cols
            )));
        }
        Ok(Self { rows, cols, values })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, values: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.values[i * n + i] = 1.0;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.values[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.values[r * self.cols + c] = v;
    }

    /// Row `r` as a slice.
    pub fn row(&self, r: usize) -> &[f64] {
        &self.values[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> DataMatrix {
        let mut out = DataMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.values[c * self.rows + r] = self.values[r * self.cols + c];
            }
        }
        out
    }

    /// Standard matrix product.
    pub fn matmul(&self, other: &DataMatrix) -> Result<DataMatrix> {
        if self.cols != other.rows {
            return Err(EltError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = DataMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.values[r * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                let brow = &other.values[k * other.cols..(k + 1) * other.cols];
                let orow = &mut out.values[r * other.cols..(r + 1) * other.cols];
                for (o, b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Stacks `other` below `self`.
    pub fn concat_rows(&self, other: &DataMatrix) -> Result<DataMatrix> {
        if self.cols != other.cols {
            return Err(EltError::Shape(format!(
                "cannot stack {} cols over {} cols",
                self.cols, other.cols
            )));
        }
        let mut values = self.values.clone();
        values.extend_from_slice(&other.values);
        Ok(DataMatrix { rows: self.rows + other.rows, cols: self.cols, values })
    }

    /// Appends a column of ones (intercept column).
    pub fn with_intercept(&self) -> DataMatrix {
        let mut out = DataMatrix::zeros(self.rows, self.cols + 1);
        for r in 0..self.rows {
            out.values[r * (self.cols + 1)..r * (self.cols + 1) + self.cols]
                .copy_from_slice(self.row(r));
            out.values[r * (self.cols + 1) + self.cols] = 1.0;
        }
        out
    }

    /// Frobenius norm.
    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Keeps the rows whose indices are listed, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> DataMatrix {
        let mut values = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            values.extend_from_slice(self.row(i));
        }
        DataMatrix { rows: indices.len(), cols: self.cols, values }
    }
}

/// Coefficients of an L2-regularized least-squares fit.
#[derive(Debug, Clone)]
pub struct RidgeSolution {
    pub beta: DataMatrix,
    pub lambda: f64,
}

/// Solves `(D'D + lambda*I) beta = D'T` by Cholesky factorization.
///
/// With `lambda == 0` a singular normal matrix is an error; there is no
/// silent pseudo-inverse fallback.
pub fn ridge_solve(design: &DataMatrix, targets: &DataMatrix, lambda: f64) -> Result<RidgeSolution> {
    if design.rows() != targets.rows() {
        return Err(EltError::Shape(format!(
            "design has {} rows, targets {}",
            design.rows(),
            targets.rows()
        )));
    }
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(EltError::InvalidArgument(format!(
            "lambda must be finite and >= 0, got {lambda}"
        )));
    }
    let dt = design.transpose();
    let mut normal = dt.matmul(design)?;
    for i in 0..normal.rows() {
        let v = normal.get(i, i) + lambda;
        normal.set(i, i, v);
    }
    let rhs = dt.matmul(targets)?;

    let chol = cholesky(&normal).ok_or(EltError::SingularMatrix)?;
    let beta = cholesky_solve(&chol, &rhs);
    Ok(RidgeSolution { beta, lambda })
}

/// Lower-triangular Cholesky factor of a symmetric matrix, or `None`
/// when a pivot falls below the singularity threshold.
fn cholesky(a: &DataMatrix) -> Option<DataMatrix> {
    let n = a.rows();
    let scale = (0..n).map(|i| a.get(i, i).abs()).fold(0.0_f64, f64::max);
    let tol = 1e-12 * scale.max(1.0);
    let mut l = DataMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a.get(i, j);
            for k in 0..j {
                sum -= l.get(i, k) * l.get(j, k);
            }
            if i == j {
                if sum <= tol {
                    return None;
                }
                l.set(i, j, sum.sqrt());
            } else {
                l.set(i, j, sum / l.get(j, j));
            }
        }
    }
    Some(l)
}

/// Solves `L L' X = B` column by column given the Cholesky factor `L`.
fn cholesky_solve(l: &DataMatrix, b: &DataMatrix) -> DataMatrix {
    let n = l.rows();
    let mut x = DataMatrix::zeros(n, b.cols());
    let mut y = vec![0.0; n];
    for c in 0..b.cols() {
        // forward substitution
        for i in 0..n {
            let mut sum = b.get(i, c);
            for k in 0..i {
                sum -= l.get(i, k) * y[k];
            }
            y[i] = sum / l.get(i, i);
        }
        // back substitution with L'
        for i in (0..n).rev() {
            let mut sum = y[i];
            for k in i + 1..n {
                sum -= l.get(k, i) * x.get(k, c);
            }
            x.set(i, c, sum / l.get(i, i));
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DataMatrix {
        let values = (0..rows * cols).map(|_| rng.gen_range(-2.0..2.0)).collect();
        DataMatrix::from_vec(rows, cols, values).unwrap()
    }

    /// Naive triple-loop product, kept independent of `matmul`.
    fn matmul_oracle(a: &DataMatrix, b: &DataMatrix) -> DataMatrix {
        let mut out = DataMatrix::zeros(a.rows(), b.cols());
        for i in 0..a.rows() {
            for j in 0..b.cols() {
                let mut s = 0.0;
                for k in 0..a.cols() {
                    s += a.get(i, k) * b.get(k, j);
                }
                out.set(i, j, s);
            }
        }
        out
    }

    /// Solves (D'D + lambda I) beta = D'T by Gaussian elimination with
    /// partial pivoting; the independent route for checking ridge_solve.
    pub(crate) fn ridge_oracle(design: &DataMatrix, targets: &DataMatrix, lambda: f64) -> DataMatrix {
        let p = design.cols();
        let c = targets.cols();
        // build the augmented system
        let mut a = vec![vec![0.0; p + c]; p];
        for i in 0..p {
            for j in 0..p {
                let mut s = 0.0;
                for r in 0..design.rows() {
                    s += design.get(r, i) * design.get(r, j);
                }
                a[i][j] = s + if i == j { lambda } else { 0.0 };
            }
            for j in 0..c {
                let mut s = 0.0;
                for r in 0..design.rows() {
                    s += design.get(r, i) * targets.get(r, j);
                }
                a[i][p + j] = s;
            }
        }
        // elimination with partial pivoting
        for col in 0..p {
            let pivot = (col..p).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs())).unwrap();
            a.swap(col, pivot);
            let pv = a[col][col];
            assert!(pv.abs() > 1e-12, "oracle hit a singular system");
            for row in col + 1..p {
                let f = a[row][col] / pv;
                for k in col..p + c {
                    a[row][k] -= f * a[col][k];
                }
            }
        }
        let mut beta = DataMatrix::zeros(p, c);
        for j in 0..c {
            for i in (0..p).rev() {
                let mut s = a[i][p + j];
                for k in i + 1..p {
                    s -= a[i][k] * beta.get(k, j);
                }
                beta.set(i, j, s / a[i][i]);
            }
        }
        beta
    }

    /// Relative residual of the normal equations for a computed beta.
    pub(crate) fn normal_residual(design: &DataMatrix, targets: &DataMatrix, sol: &RidgeSolution) -> f64 {
        let dt = design.transpose();
        let mut lhs = dt.matmul(&design.matmul(&sol.beta).unwrap()).unwrap();
        for i in 0..lhs.rows() {
            for j in 0..lhs.cols() {
                let v = lhs.get(i, j) + sol.lambda * sol.beta.get(i, j);
                lhs.set(i, j, v);
            }
        }
        let rhs = dt.matmul(targets).unwrap();
        let mut diff = 0.0;
        for i in 0..lhs.rows() {
            for j in 0..lhs.cols() {
                let d = lhs.get(i, j) - rhs.get(i, j);
                diff += d * d;
            }
        }
        diff.sqrt() / rhs.frobenius_norm().max(1.0)
    }

    #[test]
    fn from_vec_rejects_bad_length_and_nan() {
        assert!(DataMatrix::from_vec(2, 2, vec![1.0; 3]).is_err());
        assert!(DataMatrix::from_vec(1, 2, vec![1.0, f64::NAN]).is_err());
        assert!(DataMatrix::from_vec(1, 2, vec![1.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn matmul_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = random_matrix(&mut rng, 3, 5);
        let prod = DataMatrix::identity(3).matmul(&m).unwrap();
        assert_eq!(prod, m);
    }

    #[test]
    fn matmul_hand_checked() {
        let a = DataMatrix::from_vec(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let b = DataMatrix::from_vec(2, 1, vec![1.0, 1.0]).unwrap();
        let p = a.matmul(&b).unwrap();
        assert_eq!(p.values(), &[3.0, 7.0]);
    }

    #[test]
    fn matmul_matches_triple_loop_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = random_matrix(&mut rng, 4, 3);
        let b = random_matrix(&mut rng, 3, 2);
        let fast = a.matmul(&b).unwrap();
        let slow = matmul_oracle(&a, &b);
        for i in 0..4 {
            for j in 0..2 {
                assert!((fast.get(i, j) - slow.get(i, j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn matmul_rejects_mismatch() {
        let a = DataMatrix::zeros(2, 3);
        let b = DataMatrix::zeros(2, 3);
        assert!(matches!(a.matmul(&b), Err(EltError::Shape(_))));
    }

    #[test]
    fn matmul_associative_on_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let a = random_matrix(&mut rng, 3, 3);
            let b = random_matrix(&mut rng, 3, 3);
            let c = random_matrix(&mut rng, 3, 3);
            let left = a.matmul(&b).unwrap().matmul(&c).unwrap();
            let right = a.matmul(&b.matmul(&c).unwrap()).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    assert!((left.get(i, j) - right.get(i, j)).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn ridge_identity_design_returns_targets() {
        let y = DataMatrix::from_vec(4, 1, vec![1.0, -2.0, 0.5, 3.0]).unwrap();
        let sol = ridge_solve(&DataMatrix::identity(4), &y, 0.0).unwrap();
        for i in 0..4 {
            assert!((sol.beta.get(i, 0) - y.get(i, 0)).abs() < 1e-12);
        }
    }

    #[test]
    fn ridge_huge_lambda_shrinks_to_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let d = random_matrix(&mut rng, 6, 3);
        let t = random_matrix(&mut rng, 6, 2);
        let sol = ridge_solve(&d, &t, 1e12).unwrap();
        for v in sol.beta.values() {
            assert!(v.abs() < 1e-6);
        }
    }

    #[test]
    fn ridge_matches_gaussian_elimination_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let d = random_matrix(&mut rng, 6, 3);
        let t = random_matrix(&mut rng, 6, 2);
        let sol = ridge_solve(&d, &t, 0.1).unwrap();
        let oracle = ridge_oracle(&d, &t, 0.1);
        for i in 0..3 {
            for j in 0..2 {
                assert!((sol.beta.get(i, j) - oracle.get(i, j)).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn ridge_singular_at_zero_lambda_errors() {
        // duplicate column makes D'D singular
        let d = DataMatrix::from_vec(3, 2, vec![1.0, 1.0, 2.0, 2.0, 3.0, 3.0]).unwrap();
        let t = DataMatrix::from_vec(3, 1, vec![1.0, 2.0, 3.0]).unwrap();
        assert!(matches!(ridge_solve(&d, &t, 0.0), Err(EltError::SingularMatrix)));
        // a positive lambda rescues the same system
        assert!(ridge_solve(&d, &t, 0.1).is_ok());
    }

    #[test]
    fn normal_equation_residual_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..10 {
            let d = random_matrix(&mut rng, 8, 4);
            let t = random_matrix(&mut rng, 8, 2);
            let sol = ridge_solve(&d, &t, 0.05).unwrap();
            assert!(normal_residual(&d, &t, &sol) <= 1e-8);
        }
    }

    #[test]
    fn shrinkage_monotone_in_lambda() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let d = random_matrix(&mut rng, 10, 4);
            let t = random_matrix(&mut rng, 10, 2);
            let mut prev = f64::INFINITY;
            for lambda in [0.01, 0.1, 1.0, 10.0] {
                let norm = ridge_solve(&d, &t, lambda).unwrap().beta.frobenius_norm();
                assert!(norm <= prev + 1e-12, "norm grew from {prev} to {norm} at lambda {lambda}");
                prev = norm;
            }
        }
    }
}
