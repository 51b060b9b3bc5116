//! Fixed-capacity dense vectors and matrices for systems with at most
//! [`MAX_DIM`] unknowns, plus the handful of direct solvers the scheme and
//! the corrector machinery need.
//!
//! Everything here is `Copy` and allocation free so that the per-interface
//! work in the time loop never touches the heap.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use crate::error::{Error, Result};

/// Largest state dimension supported by [`Vector`] and [`Matrix`].
pub const MAX_DIM: usize = 8;

/// Compatibility band for `Q b = 0` in [`constrained_solve`].
pub const COMPATIBILITY_TOL: f64 = 1e-9;

/// Residual band enforced on the output of [`constrained_solve`].
pub const CONSTRAINED_RESIDUAL_TOL: f64 = 1e-10;

/// Relative pivot threshold of [`solve_dense`].
pub const PIVOT_TOL: f64 = 1e-14;

#[derive(Clone, Copy, PartialEq)]
pub struct Vector {
    len: usize,
    data: [f64; MAX_DIM],
}

impl Vector {
    pub fn zeros(len: usize) -> Self {
        assert!(len <= MAX_DIM, "vector length {len} exceeds {MAX_DIM}");
        Vector { len, data: [0.0; MAX_DIM] }
    }

    pub fn from_slice(values: &[f64]) -> Self {
        let mut v = Vector::zeros(values.len());
        v.data[..values.len()].copy_from_slice(values);
        v
    }

    /// Unit vector `e_k` of length `len`.
    pub fn unit(len: usize, k: usize) -> Self {
        let mut v = Vector::zeros(len);
        v[k] = 1.0;
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data[..self.len]
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data[..self.len]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.as_slice().iter()
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        debug_assert_eq!(self.len, other.len);
        self.iter().zip(other.iter()).map(|(a, b)| a * b).sum()
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn norm_inf(&self) -> f64 {
        self.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.iter().all(|x| x.is_finite())
    }

    pub fn scale(&self, s: f64) -> Vector {
        let mut out = *self;
        out.as_mut_slice().iter_mut().for_each(|x| *x *= s);
        out
    }

    /// Concatenates two vectors.
    pub fn concat(&self, other: &Vector) -> Vector {
        let mut out = Vector::zeros(self.len + other.len);
        out.data[..self.len].copy_from_slice(self.as_slice());
        out.data[self.len..self.len + other.len].copy_from_slice(other.as_slice());
        out
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.iter()).finish()
    }
}

impl Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.as_slice()[i]
    }
}

impl IndexMut<usize> for Vector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.as_mut_slice()[i]
    }
}

impl Add for Vector {
    type Output = Vector;
    fn add(mut self, rhs: Vector) -> Vector {
        self += rhs;
        self
    }
}

impl AddAssign for Vector {
    fn add_assign(&mut self, rhs: Vector) {
        debug_assert_eq!(self.len, rhs.len);
        for i in 0..self.len {
            self.data[i] += rhs.data[i];
        }
    }
}

impl Sub for Vector {
    type Output = Vector;
    fn sub(mut self, rhs: Vector) -> Vector {
        self -= rhs;
        self
    }
}

impl SubAssign for Vector {
    fn sub_assign(&mut self, rhs: Vector) {
        debug_assert_eq!(self.len, rhs.len);
        for i in 0..self.len {
            self.data[i] -= rhs.data[i];
        }
    }
}

impl Neg for Vector {
    type Output = Vector;
    fn neg(self) -> Vector {
        self.scale(-1.0)
    }
}

impl Mul<Vector> for f64 {
    type Output = Vector;
    fn mul(self, v: Vector) -> Vector {
        v.scale(self)
    }
}

impl Mul<f64> for Vector {
    type Output = Vector;
    fn mul(self, s: f64) -> Vector {
        self.scale(s)
    }
}

/// Dense row-major matrix with at most `MAX_DIM` rows and columns.
#[derive(Clone, Copy, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: [[f64; MAX_DIM]; MAX_DIM],
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows <= MAX_DIM && cols <= MAX_DIM, "matrix {rows}x{cols} exceeds capacity");
        Matrix { rows, cols, data: [[0.0; MAX_DIM]; MAX_DIM] }
    }

    pub fn identity(n: usize) -> Self {
        Matrix::scalar(n, 1.0)
    }

    /// `s * I_n`.
    pub fn scalar(n: usize, s: f64) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i][i] = s;
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Matrix::zeros(diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m.data[i][i] = *d;
        }
        m
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = Matrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            assert_eq!(r.len(), cols, "ragged rows");
            m.data[i][..cols].copy_from_slice(r);
        }
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vector]) -> Self {
        let rows = cols.first().map_or(0, |c| c.len());
        let mut m = Matrix::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for i in 0..rows {
                m.data[i][j] = c[i];
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

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> Vector {
        Vector::from_slice(&self.data[i][..self.cols])
    }

    pub fn column(&self, j: usize) -> Vector {
        let mut v = Vector::zeros(self.rows);
        for i in 0..self.rows {
            v[i] = self.data[i][j];
        }
        v
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j][i] = self.data[i][j];
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &Vector) -> Vector {
        debug_assert_eq!(self.cols, v.len());
        let mut out = Vector::zeros(self.rows);
        for i in 0..self.rows {
            let mut acc = 0.0;
            for j in 0..self.cols {
                acc += self.data[i][j] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn mul_mat(&self, other: &Matrix) -> Matrix {
        debug_assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i][k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i][j] += a * other.data[k][j];
                }
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Matrix {
        let mut out = *self;
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[i][j] *= s;
            }
        }
        out
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.data[i][..self.cols].iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest absolute column sum.
    pub fn norm_one(&self) -> f64 {
        self.transpose().norm_inf()
    }

    pub fn max_abs(&self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                m = m.max(self.data[i][j].abs());
            }
        }
        m
    }

    pub fn is_finite(&self) -> bool {
        (0..self.rows).all(|i| self.data[i][..self.cols].iter().all(|x| x.is_finite()))
    }

    /// True when every off-diagonal entry is zero and the diagonal is constant.
    pub fn as_scalar(&self) -> Option<f64> {
        if !self.is_square() || self.rows == 0 {
            return None;
        }
        let s = self.data[0][0];
        for i in 0..self.rows {
            for j in 0..self.cols {
                let expect = if i == j { s } else { 0.0 };
                if self.data[i][j] != expect {
                    return None;
                }
            }
        }
        Some(s)
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::Singularity(format!("{}x{} matrix is not square", self.rows, self.cols)));
        }
        let n = self.rows;
        if let Some(s) = self.as_scalar() {
            if s.abs() <= f64::MIN_POSITIVE || !s.is_finite() {
                return Err(Error::Singularity(format!("scalar matrix {s:e} I is not invertible")));
            }
            return Ok(Matrix::scalar(n, 1.0 / s));
        }
        let mut a = *self;
        let mut inv = Matrix::identity(n);
        let scale = self.max_abs();
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&x, &y| a.data[x][col].abs().total_cmp(&a.data[y][col].abs()))
                .unwrap();
            if a.data[piv][col].abs() <= PIVOT_TOL * scale || !a.data[piv][col].is_finite() {
                return Err(Error::Singularity(format!("pivot {:e} in column {col}", a.data[piv][col])));
            }
            a.data.swap(col, piv);
            inv.data.swap(col, piv);
            let p = 1.0 / a.data[col][col];
            for j in 0..n {
                a.data[col][j] *= p;
                inv.data[col][j] *= p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a.data[r][col];
                if f == 0.0 {
                    continue;
                }
                for j in 0..n {
                    a.data[r][j] -= f * a.data[col][j];
                    inv.data[r][j] -= f * inv.data[col][j];
                }
            }
        }
        Ok(inv)
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[f64]> = (0..self.rows).map(|i| &self.data[i][..self.cols]).collect();
        f.debug_list().entries(rows).finish()
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i][j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i][j]
    }
}

impl Add for Matrix {
    type Output = Matrix;
    fn add(mut self, rhs: Matrix) -> Matrix {
        debug_assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        for i in 0..self.rows {
            for j in 0..self.cols {
                self.data[i][j] += rhs.data[i][j];
            }
        }
        self
    }
}

impl Sub for Matrix {
    type Output = Matrix;
    fn sub(self, rhs: Matrix) -> Matrix {
        self + rhs.scale(-1.0)
    }
}

impl Mul<Vector> for &Matrix {
    type Output = Vector;
    fn mul(self, v: Vector) -> Vector {
        self.mul_vec(&v)
    }
}

impl Mul for Matrix {
    type Output = Matrix;
    fn mul(self, rhs: Matrix) -> Matrix {
        self.mul_mat(&rhs)
    }
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
///
/// A pivot smaller than `PIVOT_TOL` times the largest row magnitude of `A`
/// is reported as [`Error::Singularity`].
pub fn solve_dense(a: &Matrix, b: &Vector) -> Result<Vector> {
    if !a.is_square() || a.rows() != b.len() {
        return Err(Error::Singularity(format!(
            "shape mismatch: {}x{} matrix, rhs of length {}",
            a.rows(),
            a.cols(),
            b.len()
        )));
    }
    let n = a.rows();
    let row_scale = (0..n).map(|i| a.row(i).norm_inf()).fold(0.0, f64::max);
    let mut m = *a;
    let mut x = *b;
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&p, &q| m[(p, col)].abs().total_cmp(&m[(q, col)].abs()))
            .unwrap();
        let pv = m[(piv, col)];
        if pv.abs() <= PIVOT_TOL * row_scale || !pv.is_finite() {
            return Err(Error::Singularity(format!("pivot {pv:e} in column {col}")));
        }
        if piv != col {
            m.data.swap(piv, col);
            x.data.swap(piv, col);
        }
        for r in col + 1..n {
            let f = m[(r, col)] / pv;
            if f == 0.0 {
                continue;
            }
            for j in col..n {
                m.data[r][j] -= f * m.data[col][j];
            }
            x.data[r] -= f * x.data[col];
        }
    }
    for i in (0..n).rev() {
        let mut acc = x[i];
        for j in i + 1..n {
            acc -= m[(i, j)] * x[j];
        }
        x[i] = acc / m[(i, i)];
    }
    Ok(x)
}

/// Solves `A x = b, Q x = 0` where `Q` spans the left null space of `A`.
///
/// Requires `dim ker A = rank Q = n`, `ker A ∩ im A = {0}` and `Q A = 0`;
/// under these conditions a solution exists and is unique exactly when
/// `Q b = 0`. The two equations are stacked into an `(N+n) x N` system and
/// solved in the least-squares sense with a column-pivoted Householder QR.
pub fn constrained_solve(a: &Matrix, q: &Matrix, b: &Vector) -> Result<Vector> {
    constrained_solve_with_left_null(a, q, q, b)
}

/// As [`constrained_solve`] when the left null space of `A` is spanned by
/// the rows of `P` rather than by those of `Q`.
///
/// Compatibility is then `P b = 0`; the solution still satisfies `Q x = 0`.
/// This covers `A = H B` with `H` symmetric positive definite and `Q B = 0`,
/// where `P = Q H^{-1}`.
pub fn constrained_solve_with_left_null(a: &Matrix, p: &Matrix, q: &Matrix, b: &Vector) -> Result<Vector> {
    let big_n = a.rows();
    let n = q.rows();
    if !a.is_square() || q.cols() != big_n || b.len() != big_n || p.cols() != big_n || p.rows() != n {
        return Err(Error::Singularity(format!(
            "shape mismatch: A {}x{}, Q {}x{}, b {}",
            a.rows(),
            a.cols(),
            q.rows(),
            q.cols(),
            b.len()
        )));
    }
    let pb = p.mul_vec(b);
    let tol = COMPATIBILITY_TOL * (1.0 + b.norm());
    if pb.norm() > tol {
        return Err(Error::Compatibility { residual: pb.norm(), tolerance: tol });
    }
    // Remove the admissible O(tol) component along range(P^T) = ker(A^T).
    let ppt = p.mul_mat(&p.transpose());
    let y = solve_dense(&ppt, &pb)
        .map_err(|_| Error::Singularity("left null space basis does not have full row rank".into()))?;
    let b_proj = *b - p.transpose().mul_vec(&y);

    let rows = big_n + n;
    let mut stacked = vec![0.0; rows * big_n];
    let mut rhs = vec![0.0; rows];
    for i in 0..big_n {
        for j in 0..big_n {
            stacked[i * big_n + j] = a[(i, j)];
        }
        rhs[i] = b_proj[i];
    }
    for i in 0..n {
        for j in 0..big_n {
            stacked[(big_n + i) * big_n + j] = q[(i, j)];
        }
    }
    let x = least_squares_qrcp(&mut stacked, &mut rhs, rows, big_n)?;

    let res = (a.mul_vec(&x) - b_proj).norm();
    if res > CONSTRAINED_RESIDUAL_TOL * (1.0 + b.norm()) {
        return Err(Error::Singularity(format!(
            "residual |Ax - b| = {res:e}; ker A and im A are not complementary"
        )));
    }
    let qx = q.mul_vec(&x).norm();
    if qx > CONSTRAINED_RESIDUAL_TOL * (1.0 + x.norm()) {
        return Err(Error::Singularity(format!("constraint residual |Qx| = {qx:e}")));
    }
    Ok(x)
}

/// Least-squares solve of a full-column-rank `rows x cols` system (row-major,
/// overwritten) by Householder QR with column pivoting.
fn least_squares_qrcp(m: &mut [f64], rhs: &mut [f64], rows: usize, cols: usize) -> Result<Vector> {
    let mut perm: Vec<usize> = (0..cols).collect();
    let mut col_norms: Vec<f64> = (0..cols)
        .map(|j| (0..rows).map(|i| m[i * cols + j].powi(2)).sum::<f64>())
        .collect();
    let mut r00 = 0.0;
    for k in 0..cols {
        // Pivot: remaining column with the largest norm.
        let p = (k..cols).max_by(|&x, &y| col_norms[x].total_cmp(&col_norms[y])).unwrap();
        if p != k {
            for i in 0..rows {
                m.swap(i * cols + k, i * cols + p);
            }
            col_norms.swap(k, p);
            perm.swap(k, p);
        }
        let alpha_sq: f64 = (k..rows).map(|i| m[i * cols + k].powi(2)).sum();
        let alpha = alpha_sq.sqrt();
        if k == 0 {
            r00 = alpha;
        }
        if alpha <= 1e-13 * r00 || alpha == 0.0 {
            return Err(Error::Singularity(format!(
                "stacked system is rank deficient (column {k} of {cols})"
            )));
        }
        let x0 = m[k * cols + k];
        let beta = if x0 >= 0.0 { -alpha } else { alpha };
        // v = x - beta e1, stored in place below the diagonal.
        let v0 = x0 - beta;
        let mut v = vec![0.0; rows - k];
        v[0] = v0;
        for i in k + 1..rows {
            v[i - k] = m[i * cols + k];
        }
        let vtv: f64 = v.iter().map(|x| x * x).sum();
        for j in k..cols {
            let s: f64 = (k..rows).map(|i| v[i - k] * m[i * cols + j]).sum();
            let f = 2.0 * s / vtv;
            for i in k..rows {
                m[i * cols + j] -= f * v[i - k];
            }
        }
        let s: f64 = (k..rows).map(|i| v[i - k] * rhs[i]).sum();
        let f = 2.0 * s / vtv;
        for i in k..rows {
            rhs[i] -= f * v[i - k];
        }
        for j in k + 1..cols {
            col_norms[j] = (k + 1..rows).map(|i| m[i * cols + j].powi(2)).sum();
        }
    }
    let mut z = vec![0.0; cols];
    for i in (0..cols).rev() {
        let mut acc = rhs[i];
        for j in i + 1..cols {
            acc -= m[i * cols + j] * z[j];
        }
        z[i] = acc / m[i * cols + i];
    }
    let mut x = Vector::zeros(cols);
    for (k, &p) in perm.iter().enumerate() {
        x[p] = z[k];
    }
    Ok(x)
}

/// Upper bound on the spectral radius of a square matrix.
///
/// Induced norms of any diagonally similar matrix bound the spectral radius,
/// so the matrix is first balanced (Osborne iteration) and the smallest of
/// the row-sum and column-sum norms before and after balancing is returned.
pub fn spectral_radius_bound(a: &Matrix) -> f64 {
    debug_assert!(a.is_square());
    let n = a.rows();
    let mut best = a.norm_inf().min(a.norm_one());
    if n < 2 || best == 0.0 {
        return best;
    }
    let mut m = *a;
    for _sweep in 0..16 {
        let mut changed = false;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += m[(j, i)].abs();
                    r += m[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let f = (r / c).sqrt();
            if (f - 1.0).abs() < 1e-3 {
                continue;
            }
            changed = true;
            // D^{-1} A D with D_ii = f: column i scaled by f, row i by 1/f.
            for j in 0..n {
                m[(j, i)] *= f;
                m[(i, j)] /= f;
            }
        }
        best = best.min(m.norm_inf()).min(m.norm_one());
        if !changed {
            break;
        }
    }
    best
}
