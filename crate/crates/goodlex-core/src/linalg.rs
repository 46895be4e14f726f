//! Small dense-matrix kernels backing the PPMI-SVD embedding trainer:
//! row-major matrices, modified Gram-Schmidt orthonormalization, a
//! cyclic Jacobi eigensolver for symmetric matrices, and a seeded
//! randomized truncated SVD built from those pieces.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in &rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch {
                    expected: c,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Matrix { rows: r, cols: c, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// `self * other`.
    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    /// `self^T * other`.
    pub fn transpose_matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows, "row counts must agree");
        let mut out = Matrix::zeros(self.cols, other.cols);
        for k in 0..self.rows {
            for i in 0..self.cols {
                let a = self.get(k, i);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn transposed(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    /// Frobenius norm of `self - other`.
    pub fn frobenius_distance(&self, other: &Matrix) -> f64 {
        assert_eq!(self.rows, other.rows);
        assert_eq!(self.cols, other.cols);
        let mut sum = 0.0;
        for (a, b) in self.data.iter().zip(&other.data) {
            let d = a - b;
            sum += d * d;
        }
        libm::sqrt(sum)
    }
}

/// Orthonormalize the columns of `m` in place with modified
/// Gram-Schmidt, re-orthogonalized once for numerical safety. Columns
/// that vanish (rank deficiency) are left as zero columns.
pub fn orthonormalize_columns(m: &mut Matrix) {
    let (rows, cols) = (m.rows, m.cols);
    for j in 0..cols {
        for _pass in 0..2 {
            for k in 0..j {
                let mut dot = 0.0;
                for i in 0..rows {
                    dot += m.get(i, k) * m.get(i, j);
                }
                if dot != 0.0 {
                    for i in 0..rows {
                        let v = m.get(i, j) - dot * m.get(i, k);
                        m.set(i, j, v);
                    }
                }
            }
        }
        let mut norm = 0.0;
        for i in 0..rows {
            norm += m.get(i, j) * m.get(i, j);
        }
        norm = libm::sqrt(norm);
        if norm > 1e-12 {
            for i in 0..rows {
                m.set(i, j, m.get(i, j) / norm);
            }
        } else {
            for i in 0..rows {
                m.set(i, j, 0.0);
            }
        }
    }
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns `(eigenvalues, eigenvectors)` sorted by descending
/// eigenvalue; eigenvectors are the columns of the returned matrix.
pub fn jacobi_eigh(s: &Matrix) -> (Vec<f64>, Matrix) {
    assert_eq!(s.rows, s.cols, "matrix must be square");
    let n = s.rows;
    let mut a = s.clone();
    let mut v = Matrix::zeros(n, n);
    for i in 0..n {
        v.set(i, i, 1.0);
    }
    let mut scale = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            scale = scale.max(a.get(i, j).abs());
        }
    }
    if scale == 0.0 {
        return ((0..n).map(|_| 0.0).collect(), v);
    }
    let tol = 1e-14 * scale;
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off = off.max(a.get(i, j).abs());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq.abs() <= tol {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + libm::sqrt(1.0 + theta * theta))
                } else {
                    -1.0 / (-theta + libm::sqrt(1.0 + theta * theta))
                };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let sn = t * c;
                for i in 0..n {
                    let aip = a.get(i, p);
                    let aiq = a.get(i, q);
                    a.set(i, p, c * aip - sn * aiq);
                    a.set(i, q, sn * aip + c * aiq);
                }
                for j in 0..n {
                    let apj = a.get(p, j);
                    let aqj = a.get(q, j);
                    a.set(p, j, c * apj - sn * aqj);
                    a.set(q, j, sn * apj + c * aqj);
                }
                for i in 0..n {
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, c * vip - sn * viq);
                    v.set(i, q, sn * vip + c * viq);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a.get(j, j)
            .partial_cmp(&a.get(i, i))
            .expect("eigenvalues are finite")
            .then(i.cmp(&j))
    });
    let eigvals: Vec<f64> = order.iter().map(|&i| a.get(i, i)).collect();
    let mut vecs = Matrix::zeros(n, n);
    for (new_j, &old_j) in order.iter().enumerate() {
        for i in 0..n {
            vecs.set(i, new_j, v.get(i, old_j));
        }
    }
    (eigvals, vecs)
}

/// Truncated SVD `A ~ U diag(sigma) Vt` with `rank` components.
#[derive(Debug, Clone)]
pub struct Svd {
    /// `m x rank`, orthonormal columns.
    pub u: Matrix,
    /// Singular values, descending.
    pub sigma: Vec<f64>,
    /// `rank x n`.
    pub vt: Matrix,
}

impl Svd {
    /// `U diag(sigma) Vt`, for reconstruction checks.
    pub fn reconstruct(&self) -> Matrix {
        let mut scaled = self.u.clone();
        for i in 0..scaled.rows() {
            for j in 0..scaled.cols() {
                scaled.set(i, j, scaled.get(i, j) * self.sigma[j]);
            }
        }
        scaled.matmul(&self.vt)
    }
}

/// Seeded randomized truncated SVD (Halko-style range finder with power
/// iterations, then an exact eigendecomposition of the small projected
/// Gram matrix). Deterministic for a fixed seed.
pub fn randomized_svd(
    a: &Matrix,
    rank: usize,
    oversample: usize,
    power_iters: usize,
    seed: u64,
) -> Result<Svd> {
    if a.rows == 0 || a.cols == 0 {
        return Err(Error::EmptyVocabulary);
    }
    if rank == 0 {
        return Err(Error::InvalidConfig("svd rank must be >= 1".into()));
    }
    let l = (rank + oversample).min(a.rows).min(a.cols).max(1);
    let mut rng = <ChaCha20Rng as rand::SeedableRng>::seed_from_u64(seed);
    let mut omega = Matrix::zeros(a.cols, l);
    for i in 0..a.cols {
        for j in 0..l {
            omega.set(i, j, rng.sample(StandardNormal));
        }
    }
    let mut q = a.matmul(&omega);
    orthonormalize_columns(&mut q);
    for _ in 0..power_iters {
        let mut z = a.transpose_matmul(&q);
        orthonormalize_columns(&mut z);
        q = a.matmul(&z);
        orthonormalize_columns(&mut q);
    }
    // B = Q^T A (l x n); its right singular structure matches A's on the
    // captured range.
    let b = q.transpose_matmul(a);
    let gram = b.matmul(&b.transposed()); // l x l
    let (eigvals, w) = jacobi_eigh(&gram);
    let keep = rank.min(l);
    let mut sigma = Vec::with_capacity(keep);
    for lambda in eigvals.iter().take(keep) {
        sigma.push(libm::sqrt(lambda.max(0.0)));
    }
    // U = Q W[:, :keep]
    let mut w_trunc = Matrix::zeros(l, keep);
    for i in 0..l {
        for j in 0..keep {
            w_trunc.set(i, j, w.get(i, j));
        }
    }
    let u = q.matmul(&w_trunc);
    // V^T rows: v_j = B^T w_j / sigma_j.
    let wt_b = w_trunc.transpose_matmul(&b); // keep x n
    let mut vt = Matrix::zeros(keep, a.cols);
    for j in 0..keep {
        if sigma[j] > 1e-12 {
            for col in 0..a.cols {
                vt.set(j, col, wt_b.get(j, col) / sigma[j]);
            }
        }
    }
    Ok(Svd { u, sigma, vt })
}
