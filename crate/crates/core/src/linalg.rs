//! Small dense linear algebra: Householder least squares, cyclic Jacobi
//! eigenvalues, column scaling and a few helpers.
//!
//! Everything here works on row-major `f64` storage. Matrices in this crate
//! are a handful of columns wide, so no attempt is made at blocking.

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative threshold on `|R_jj|` below which a column is treated as
/// linearly dependent on its predecessors.
pub const RANK_RTOL: f64 = 1e-10;

/// Relative asymmetry tolerated by [`symmetric_eigenvalues`].
pub const SYMMETRY_RTOL: f64 = 1e-10;

const JACOBI_RTOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Dense row-major matrix of finite reals.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "matrix must be non-empty, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / cols,
                col: pos % cols,
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::new(r, c, rows.concat())
    }

    /// Builds a matrix from column vectors of equal length.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let c = columns.len();
        let r = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|col| col.len() != r) {
            return Err(Error::DimensionMismatch("columns differ in length".into()));
        }
        let mut data = Vec::with_capacity(r * c);
        for i in 0..r {
            for col in columns {
                data.push(col[i]);
            }
        }
        Self::new(r, c, data)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, values: &[f64]) {
        assert_eq!(values.len(), self.rows);
        for (i, v) in values.iter().enumerate() {
            self[(i, j)] = *v;
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self[(i, l)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(l, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), v)).collect())
    }

    /// `Xᵀ X`, accumulated directly without forming the transpose.
    pub fn gram(&self) -> Self {
        let k = self.cols;
        let mut g = Self::zeros(k, k);
        for i in 0..self.rows {
            let r = self.row(i);
            for a in 0..k {
                for b in a..k {
                    g[(a, b)] += r[a] * r[b];
                }
            }
        }
        for a in 0..k {
            for b in 0..a {
                g[(a, b)] = g[(b, a)];
            }
        }
        g
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        euclidean_norm(&self.data)
    }

    /// Drops the listed column and returns the remaining ones in order.
    pub fn without_column(&self, skip: usize) -> Self {
        let cols: Vec<usize> = (0..self.cols).filter(|&j| j != skip).collect();
        Self::from_fn(self.rows, cols.len(), |i, j| self[(i, cols[j])])
    }

    /// Stacks `times` copies of this matrix vertically.
    pub fn repeat_rows(&self, times: usize) -> Self {
        Self {
            rows: self.rows * times,
            cols: self.cols,
            data: self.data.repeat(times),
        }
    }

    pub fn is_symmetric(&self, rtol: f64) -> bool {
        self.rows == self.cols && self.max_asymmetry() <= rtol * self.max_abs()
    }

    fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn determinant(&self) -> Result<f64> {
        if self.rows != self.cols {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut det = 1.0;
        for c in 0..n {
            let p = (c..n)
                .max_by(|&x, &y| a[(x, c)].abs().total_cmp(&a[(y, c)].abs()))
                .unwrap_or(c);
            if a[(p, c)] == 0.0 {
                return Ok(0.0);
            }
            if p != c {
                for j in 0..n {
                    a.data.swap(p * n + j, c * n + j);
                }
                det = -det;
            }
            let pivot = a[(c, c)];
            det *= pivot;
            for r in (c + 1)..n {
                let f = a[(r, c)] / pivot;
                if f != 0.0 {
                    for j in c..n {
                        let v = a[(c, j)];
                        a[(r, j)] -= f * v;
                    }
                }
            }
        }
        Ok(det)
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `√(Σ vᵢ²)`, with rescaling so large or tiny entries do not overflow.
pub fn euclidean_norm(v: &[f64]) -> f64 {
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let ss: f64 = v.iter().map(|x| (x / scale) * (x / scale)).sum();
    scale * ss.sqrt()
}

/// Divides every column by its Euclidean norm.
pub fn unit_length_scale(x: &Matrix) -> Result<Matrix> {
    let norms: Vec<f64> = (0..x.cols()).map(|j| euclidean_norm(&x.column(j))).collect();
    if let Some(j) = norms.iter().position(|&n| n == 0.0) {
        return Err(Error::ZeroColumn(j));
    }
    Ok(Matrix::from_fn(x.rows(), x.cols(), |i, j| x[(i, j)] / norms[j]))
}

/// Householder QR factorisation of a tall matrix.
///
/// `R` is kept explicitly; `Q` only as its reflectors.
#[derive(Debug, Clone)]
pub struct Qr {
    reflectors: Vec<Vec<f64>>,
    r: Matrix,
    rows: usize,
}

impl Qr {
    pub fn factor(x: &Matrix) -> Result<Self> {
        let (n, k) = (x.rows(), x.cols());
        if n < k {
            return Err(Error::DimensionMismatch(format!(
                "least squares needs rows >= cols, got {n}x{k}"
            )));
        }
        let mut a = x.clone();
        let mut reflectors = Vec::with_capacity(k);
        for j in 0..k {
            let mut v: Vec<f64> = (j..n).map(|i| a[(i, j)]).collect();
            let norm = euclidean_norm(&v);
            if norm == 0.0 {
                reflectors.push(Vec::new());
                continue;
            }
            let alpha = if v[0] > 0.0 { -norm } else { norm };
            v[0] -= alpha;
            let vtv = dot(&v, &v);
            if vtv == 0.0 {
                reflectors.push(Vec::new());
                continue;
            }
            for c in j..k {
                let s: f64 = v.iter().enumerate().map(|(t, vt)| vt * a[(j + t, c)]).sum();
                let f = 2.0 * s / vtv;
                for (t, vt) in v.iter().enumerate() {
                    a[(j + t, c)] -= f * vt;
                }
            }
            reflectors.push(v);
        }
        let r = Matrix::from_fn(k, k, |i, j| if j >= i { a[(i, j)] } else { 0.0 });
        Ok(Self { reflectors, r, rows: n })
    }

    pub fn r(&self) -> &Matrix {
        &self.r
    }

    /// Number of diagonal entries of `R` above `RANK_RTOL · max|R_jj|`.
    pub fn rank(&self) -> usize {
        let k = self.r.cols();
        let biggest = (0..k).fold(0.0f64, |m, j| m.max(self.r[(j, j)].abs()));
        if biggest == 0.0 {
            return 0;
        }
        (0..k).filter(|&j| self.r[(j, j)].abs() > RANK_RTOL * biggest).count()
    }

    pub fn ensure_full_rank(&self) -> Result<()> {
        let rank = self.rank();
        let cols = self.r.cols();
        if rank < cols {
            return Err(Error::RankDeficient { rank, cols });
        }
        Ok(())
    }

    /// Applies `Qᵀ` to `y` in place.
    fn apply_qt(&self, y: &mut [f64]) {
        for (j, v) in self.reflectors.iter().enumerate() {
            if v.is_empty() {
                continue;
            }
            let vtv = dot(v, v);
            let s: f64 = v.iter().enumerate().map(|(t, vt)| vt * y[j + t]).sum();
            let f = 2.0 * s / vtv;
            for (t, vt) in v.iter().enumerate() {
                y[j + t] -= f * vt;
            }
        }
    }

    pub fn solve(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "design has {} rows but response has {}",
                self.rows,
                y.len()
            )));
        }
        self.ensure_full_rank()?;
        let mut qty = y.to_vec();
        self.apply_qt(&mut qty);
        let k = self.r.cols();
        let mut beta = vec![0.0; k];
        for i in (0..k).rev() {
            let tail: f64 = ((i + 1)..k).map(|j| self.r[(i, j)] * beta[j]).sum();
            beta[i] = (qty[i] - tail) / self.r[(i, i)];
        }
        Ok(beta)
    }

    /// `(XᵀX)⁻¹ = R⁻¹ R⁻ᵀ`.
    pub fn gram_inverse(&self) -> Result<Matrix> {
        self.ensure_full_rank()?;
        let k = self.r.cols();
        let mut rinv = Matrix::zeros(k, k);
        for i in (0..k).rev() {
            rinv[(i, i)] = 1.0 / self.r[(i, i)];
            for j in (i + 1)..k {
                let mut s = 0.0;
                for l in (i + 1)..=j {
                    s += self.r[(i, l)] * rinv[(l, j)];
                }
                rinv[(i, j)] = -s / self.r[(i, i)];
            }
        }
        let mut out = Matrix::zeros(k, k);
        for a in 0..k {
            for b in a..k {
                let s: f64 = (b..k).map(|l| rinv[(a, l)] * rinv[(b, l)]).sum();
                out[(a, b)] = s;
                out[(b, a)] = s;
            }
        }
        Ok(out)
    }
}

/// Least-squares solution of `X β ≈ y` through Householder QR.
pub fn solve_least_squares(x: &Matrix, y: &[f64]) -> Result<Vec<f64>> {
    if x.rows() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "design has {} rows but response has {}",
            x.rows(),
            y.len()
        )));
    }
    Qr::factor(x)?.solve(y)
}

/// All eigenvalues of a symmetric matrix, largest first, by cyclic Jacobi
/// rotations.
pub fn symmetric_eigenvalues(m: &Matrix) -> Result<Vec<f64>> {
    if m.rows() != m.cols() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let asym = m.max_asymmetry();
    if asym > SYMMETRY_RTOL * m.max_abs() {
        return Err(Error::NotSymmetric(asym));
    }
    let n = m.rows();
    // symmetrise so the rotations see an exactly symmetric input
    let mut a = Matrix::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]));
    let target = JACOBI_RTOL * a.frobenius_norm();

    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) <= target {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for r in 0..n {
                    let arp = a[(r, p)];
                    let arq = a[(r, q)];
                    a[(r, p)] = c * arp - s * arq;
                    a[(r, q)] = s * arp + c * arq;
                }
                for r in 0..n {
                    let apr = a[(p, r)];
                    let aqr = a[(q, r)];
                    a[(p, r)] = c * apr - s * aqr;
                    a[(q, r)] = s * apr + c * aqr;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
            }
        }
    }

    let mut eig: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    eig.sort_by(|x, y| y.total_cmp(x));
    Ok(eig)
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let mut s = 0.0;
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}
