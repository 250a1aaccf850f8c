//! Small dense complex matrices sized for microphone-array work (2M x 2M,
//! typically 6 x 6). Row-major storage, no BLAS.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

pub use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixError {
    DimensionMismatch,
    NotHermitian,
    Singular,
    NoConvergence,
}

impl fmt::Display for MatrixError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixError::DimensionMismatch => write!(f, "matrix/vector dimension mismatch"),
            MatrixError::NotHermitian => write!(f, "matrix is not Hermitian within tolerance"),
            MatrixError::Singular => write!(f, "matrix is singular"),
            MatrixError::NoConvergence => write!(f, "eigensolver did not converge"),
        }
    }
}

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    n: usize,
    data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(n: usize) -> Self {
        CMat { n, data: vec![Complex64::ZERO; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::ONE;
        }
        m
    }

    pub fn from_rows(n: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), n * n, "row-major data must hold n*n entries");
        CMat { n, data }
    }

    /// Outer product v v^H scaled by `scale`.
    pub fn scaled_outer(v: &[Complex64], scale: f64) -> Self {
        let n = v.len();
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = v[i] * v[j].conj() * scale;
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|z| z.norm_sqr()).sum())
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// Quadratic form left^H A right.
    pub fn sandwich(&self, left: &[Complex64], right: &[Complex64]) -> Complex64 {
        let av = self.matvec(right);
        left.iter().zip(av.iter()).map(|(l, x)| l.conj() * x).sum()
    }

    pub fn add(&self, other: &CMat) -> CMat {
        assert_eq!(self.n, other.n);
        let data = self
            .data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a + b)
            .collect();
        CMat { n: self.n, data }
    }

    pub fn scale(&self, s: f64) -> CMat {
        CMat { n: self.n, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn max_abs_hermitian_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in 0..self.n {
                let d = (self[(i, j)] - self[(j, i)].conj()).norm();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        let scale = self.frobenius_norm().max(1.0);
        self.max_abs_hermitian_defect() <= rel_tol * scale
    }

    /// A <- (A + A^H) / 2.
    pub fn hermitian_symmetrize(&mut self) {
        for i in 0..self.n {
            for j in i..self.n {
                let avg = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
                self[(i, j)] = avg;
                self[(j, i)] = avg.conj();
            }
        }
    }

    /// Solve A x = b by LU with partial pivoting.
    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>, MatrixError> {
        if b.len() != self.n {
            return Err(MatrixError::DimensionMismatch);
        }
        let n = self.n;
        let mut a = self.data.clone();
        let mut x: Vec<Complex64> = b.to_vec();
        for col in 0..n {
            let (pivot_row, pivot_mag) = (col..n)
                .map(|r| (r, a[r * n + col].norm()))
                .fold((col, 0.0), |acc, it| if it.1 > acc.1 { it } else { acc });
            if pivot_mag < 1e-300 {
                return Err(MatrixError::Singular);
            }
            if pivot_row != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot_row * n + j);
                }
                x.swap(col, pivot_row);
            }
            let pivot = a[col * n + col];
            for r in col + 1..n {
                let factor = a[r * n + col] / pivot;
                if factor.norm() == 0.0 {
                    continue;
                }
                for j in col..n {
                    let v = a[col * n + j];
                    a[r * n + j] -= factor * v;
                }
                let xv = x[col];
                x[r] -= factor * xv;
            }
        }
        for col in (0..n).rev() {
            let mut acc = x[col];
            for j in col + 1..n {
                acc -= a[col * n + j] * x[j];
            }
            x[col] = acc / a[col * n + col];
        }
        Ok(x)
    }

    /// Eigendecomposition of a Hermitian matrix via cyclic complex Jacobi
    /// rotations. Eigenvalues ascending.
    pub fn eigh(&self) -> Result<Eigh, MatrixError> {
        if !self.is_hermitian(1e-8) {
            return Err(MatrixError::NotHermitian);
        }
        let n = self.n;
        let mut a = self.clone();
        a.hermitian_symmetrize();
        let mut v = CMat::identity(n);
        let scale = a.frobenius_norm().max(1e-300);
        for _sweep in 0..100 {
            let mut off = 0.0f64;
            for p in 0..n {
                for q in p + 1..n {
                    off += a[(p, q)].norm_sqr();
                }
            }
            if libm::sqrt(2.0 * off) <= 1e-14 * scale {
                let mut pairs: Vec<(f64, usize)> =
                    (0..n).map(|i| (a[(i, i)].re, i)).collect();
                pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
                let eigenvalues: Vec<f64> = pairs.iter().map(|p| p.0).collect();
                let mut vectors = CMat::zeros(n);
                for (new_col, &(_, old_col)) in pairs.iter().enumerate() {
                    for r in 0..n {
                        vectors[(r, new_col)] = v[(r, old_col)];
                    }
                }
                return Ok(Eigh { eigenvalues, vectors });
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a[(p, q)];
                    let r = apq.norm();
                    if r <= 1e-300 {
                        continue;
                    }
                    // Phase factor makes the pivot real, then a real
                    // Jacobi rotation annihilates it.
                    let phase = apq / r;
                    let app = a[(p, p)].re;
                    let aqq = a[(q, q)].re;
                    let theta = 0.5 * libm::atan2(2.0 * r, app - aqq);
                    let c = libm::cos(theta);
                    let s = libm::sin(theta);
                    // Column update A <- A U with U = [[c, -s],[s*e^{-ia}, c*e^{-ia}]]
                    // on columns (p, q); then A <- U^H A on rows (p, q).
                    let u_pp = Complex64::new(c, 0.0);
                    let u_pq = Complex64::new(-s, 0.0);
                    let u_qp = phase.conj() * s;
                    let u_qq = phase.conj() * c;
                    for row in 0..n {
                        let ap = a[(row, p)];
                        let aq = a[(row, q)];
                        a[(row, p)] = ap * u_pp + aq * u_qp;
                        a[(row, q)] = ap * u_pq + aq * u_qq;
                        let vp = v[(row, p)];
                        let vq = v[(row, q)];
                        v[(row, p)] = vp * u_pp + vq * u_qp;
                        v[(row, q)] = vp * u_pq + vq * u_qq;
                    }
                    for col in 0..n {
                        let ap = a[(p, col)];
                        let aq = a[(q, col)];
                        a[(p, col)] = u_pp.conj() * ap + u_qp.conj() * aq;
                        a[(q, col)] = u_pq.conj() * ap + u_qq.conj() * aq;
                    }
                }
            }
        }
        Err(MatrixError::NoConvergence)
    }
}

impl core::ops::Index<(usize, usize)> for CMat {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

/// Hermitian eigendecomposition A = V diag(eigenvalues) V^H.
#[derive(Debug, Clone)]
pub struct Eigh {
    pub eigenvalues: Vec<f64>,
    pub vectors: CMat,
}

impl Eigh {
    /// Factor C with C C^H = A, negative eigenvalues clipped to zero.
    pub fn psd_factor(&self) -> CMat {
        let n = self.eigenvalues.len();
        let mut c = CMat::zeros(n);
        for j in 0..n {
            let root = libm::sqrt(self.eigenvalues[j].max(0.0));
            for i in 0..n {
                c[(i, j)] = self.vectors[(i, j)] * root;
            }
        }
        c
    }
}
