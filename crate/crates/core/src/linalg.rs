//! Small dense real matrices, signature matrices and projective-coordinate
//! coset embeddings for `O(m,n)` and its compact dual `O(m+n)`.
//!
//! Everything here is sized for `m + n <= 4`; storage is a plain row-major
//! `Vec` and symmetric eigenproblems use cyclic Jacobi rotations.

use num_traits::Float;

use crate::measures::Spectrum;
use crate::Error;

/// Smallest eigenvalue of `1 - ZᵀZ` accepted for a hyperbolic coset point.
pub const PD_THRESHOLD: f64 = 1e-12;

/// The pair `(m, n)` labelling `O(m,n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct Signature {
    m: usize,
    n: usize,
}

impl Signature {
    pub fn new(m: usize, n: usize) -> Result<Self, Error> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidArgument(format!(
                "signature blocks must be positive, got ({m},{n})"
            )));
        }
        Ok(Self { m, n })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.m + self.n
    }
}

/// Dense real matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Float> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_diag(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_rows(rows: usize, cols: usize, data: Vec<T>) -> Result<Self, Error> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("matrix entries must be finite".into()));
        }
        Ok(Self { rows, cols, data })
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

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self, Error> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: rhs.rows,
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                for j in 0..rhs.cols {
                    out[(i, j)] = out[(i, j)] + a * rhs[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Result<Self, Error> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self, Error> {
        self.zip_with(rhs, |a, b| a - b)
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(T, T) -> T) -> Result<Self, Error> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                found: rhs.rows * rhs.cols,
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).fold(T::zero(), |s, i| s + self[(i, i)])
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Result<Self, Error> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: self.cols,
            });
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        let scale = self.max_abs().max(T::min_positive_value());
        let tiny = scale * T::epsilon() * T::from(n).unwrap();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| {
                    a[(i, col)]
                        .abs()
                        .partial_cmp(&a[(j, col)].abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap();
            if a[(pivot, col)].abs() <= tiny {
                return Err(Error::Singular);
            }
            if pivot != col {
                for j in 0..n {
                    a.data.swap(pivot * n + j, col * n + j);
                    inv.data.swap(pivot * n + j, col * n + j);
                }
            }
            let p = a[(col, col)];
            for j in 0..n {
                a[(col, j)] = a[(col, j)] / p;
                inv[(col, j)] = inv[(col, j)] / p;
            }
            for i in 0..n {
                if i == col {
                    continue;
                }
                let f = a[(i, col)];
                if f == T::zero() {
                    continue;
                }
                for j in 0..n {
                    a[(i, j)] = a[(i, j)] - f * a[(col, j)];
                    inv[(i, j)] = inv[(i, j)] - f * inv[(col, j)];
                }
            }
        }
        Ok(inv)
    }

    /// Determinant by LU with partial pivoting.
    pub fn det(&self) -> Result<T, Error> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: self.cols,
            });
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut det = T::one();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| {
                    a[(i, col)]
                        .abs()
                        .partial_cmp(&a[(j, col)].abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap();
            if a[(pivot, col)] == T::zero() {
                return Ok(T::zero());
            }
            if pivot != col {
                for j in 0..n {
                    a.data.swap(pivot * n + j, col * n + j);
                }
                det = -det;
            }
            let p = a[(col, col)];
            det = det * p;
            for i in col + 1..n {
                let f = a[(i, col)] / p;
                for j in col..n {
                    a[(i, j)] = a[(i, j)] - f * a[(col, j)];
                }
            }
        }
        Ok(det)
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Eigenvalues and orthonormal eigenvectors (columns) of a symmetric matrix.
pub fn symmetric_eigen<T: Float>(a: &Matrix<T>) -> Result<(Vec<T>, Matrix<T>), Error> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            found: a.cols(),
        });
    }
    let n = a.rows();
    let mut m = a.clone();
    let mut v = Matrix::identity(n);
    let two = T::one() + T::one();
    for _sweep in 0..64 {
        let off = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .fold(T::zero(), |s, (i, j)| s + m[(i, j)] * m[(i, j)]);
        if off <= T::epsilon() * T::epsilon() * m.max_abs().powi(2) || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (two * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    Ok((m.diagonal(), v))
}

/// `f(A)` for symmetric `A` through its eigendecomposition.
pub fn symmetric_apply<T: Float>(a: &Matrix<T>, f: impl Fn(T) -> T) -> Result<Matrix<T>, Error> {
    let (vals, vecs) = symmetric_eigen(a)?;
    let n = a.rows();
    let mut out = Matrix::zeros(n, n);
    for (k, &lam) in vals.iter().enumerate() {
        let fl = f(lam);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = out[(i, j)] + vecs[(i, k)] * fl * vecs[(j, k)];
            }
        }
    }
    Ok(out)
}

/// `diag(+1 × m, −1 × n)`.
pub fn signature_matrix<T: Float>(sig: Signature) -> Matrix<T> {
    let diag: Vec<T> = (0..sig.dim())
        .map(|i| if i < sig.m() { T::one() } else { -T::one() })
        .collect();
    Matrix::from_diag(&diag)
}

/// True iff `max |TᵀLT − L| < tol`.
pub fn is_pseudo_orthogonal<T: Float>(t: &Matrix<T>, sig: Signature, tol: T) -> Result<bool, Error> {
    if !t.is_square() || t.rows() != sig.dim() {
        return Err(Error::DimensionMismatch {
            expected: sig.dim(),
            found: t.rows(),
        });
    }
    let l = signature_matrix::<T>(sig);
    let tlt = t.transpose().matmul(&l)?.matmul(t)?;
    Ok(tlt.sub(&l)?.max_abs() < tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Curvature {
    /// Non-compact `O(m,n)/(O(m)×O(n))`, requires `1 − ZᵀZ > 0`.
    Hyperbolic,
    /// Compact `O(m+n)/(O(m)×O(n))`, any `Z`.
    Spherical,
}

/// Projective coordinate `Z` (an `m × n` matrix) on a rank-`min(m,n)` coset.
#[derive(Debug, Clone, PartialEq)]
pub struct CosetPoint<T> {
    z: Matrix<T>,
    curvature: Curvature,
}

impl<T: Float> CosetPoint<T> {
    pub fn new(z: Matrix<T>, curvature: Curvature) -> Result<Self, Error> {
        let p = Self { z, curvature };
        if curvature == Curvature::Hyperbolic {
            let g = p.gram_complement()?;
            let (vals, _) = symmetric_eigen(&g)?;
            let min = vals.iter().fold(T::infinity(), |m, &v| m.min(v));
            if !(min > T::from(PD_THRESHOLD).unwrap()) {
                return Err(Error::NotPositiveDefinite);
            }
        }
        Ok(p)
    }

    /// Column vector `Z = (z_1, …, z_m)ᵀ` for signatures `(m, 1)`.
    pub fn column(entries: &[T], curvature: Curvature) -> Result<Self, Error> {
        Self::new(Matrix::from_rows(entries.len(), 1, entries.to_vec())?, curvature)
    }

    pub fn z(&self) -> &Matrix<T> {
        &self.z
    }

    pub fn curvature(&self) -> Curvature {
        self.curvature
    }

    pub fn signature(&self) -> Signature {
        Signature {
            m: self.z.rows(),
            n: self.z.cols(),
        }
    }

    pub fn negated(&self) -> Self {
        Self {
            z: self.z.scale(-T::one()),
            curvature: self.curvature,
        }
    }

    fn sign(&self) -> T {
        match self.curvature {
            Curvature::Hyperbolic => -T::one(),
            Curvature::Spherical => T::one(),
        }
    }

    /// `1 ∓ ZᵀZ` (upper sign hyperbolic).
    pub fn gram_complement(&self) -> Result<Matrix<T>, Error> {
        let ztz = self.z.transpose().matmul(&self.z)?;
        Matrix::identity(self.z.cols()).add(&ztz.scale(self.sign()))
    }

    /// `1 ∓ ZZᵀ`.
    pub fn outer_complement(&self) -> Result<Matrix<T>, Error> {
        let zzt = self.z.matmul(&self.z.transpose())?;
        Matrix::identity(self.z.rows()).add(&zzt.scale(self.sign()))
    }
}

fn inv_sqrt<T: Float>(a: &Matrix<T>) -> Result<Matrix<T>, Error> {
    let (vals, _) = symmetric_eigen(a)?;
    if vals.iter().any(|&v| !(v > T::zero())) {
        return Err(Error::NotPositiveDefinite);
    }
    symmetric_apply(a, |l| T::one() / l.sqrt())
}

/// Coset representative `S(Z)`.
///
/// Hyperbolic: `[[(1−ZZᵀ)^{−½}, Z(1−ZᵀZ)^{−½}], [Zᵀ(1−ZZᵀ)^{−½}, (1−ZᵀZ)^{−½}]]`,
/// which satisfies `SᵀLS = L`. Spherical uses `1+ZZᵀ`, `1+ZᵀZ` and a minus sign
/// on the lower-left block so that `S` is orthogonal. In both cases
/// `S(−Z) = S(Z)⁻¹`.
pub fn coset_embed<T: Float>(zp: &CosetPoint<T>) -> Result<Matrix<T>, Error> {
    let z = zp.z();
    let (m, n) = (z.rows(), z.cols());
    let top_left = inv_sqrt(&zp.outer_complement()?)?;
    let bottom_right = inv_sqrt(&zp.gram_complement()?)?;
    let top_right = z.matmul(&bottom_right)?;
    let mut bottom_left = z.transpose().matmul(&top_left)?;
    if zp.curvature() == Curvature::Spherical {
        bottom_left = bottom_left.scale(-T::one());
    }
    let mut s = Matrix::zeros(m + n, m + n);
    for i in 0..m {
        for j in 0..m {
            s[(i, j)] = top_left[(i, j)];
        }
        for j in 0..n {
            s[(i, m + j)] = top_right[(i, j)];
        }
    }
    for i in 0..n {
        for j in 0..m {
            s[(m + i, j)] = bottom_left[(i, j)];
        }
        for j in 0..n {
            s[(m + i, m + j)] = bottom_right[(i, j)];
        }
    }
    Ok(s)
}

/// `Tr(S⁻¹ · diag(p) · S · diag(a))`.
pub fn conjugated_trace<T: Float>(s: &Matrix<T>, p: &Spectrum<T>, a_diag: &[T]) -> Result<T, Error> {
    let b = conjugated_couplings(s, a_diag)?;
    if p.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: b.len(),
            found: p.len(),
        });
    }
    Ok(p.iter().zip(&b).fold(T::zero(), |acc, (&pi, &bi)| acc + pi * bi))
}

/// Couplings `b_i = (S · diag(a) · S⁻¹)_{ii}`, so that
/// `Tr(S⁻¹ diag(p) S diag(a)) = Σ p_i b_i` for every spectrum `p`.
pub fn conjugated_couplings<T: Float>(s: &Matrix<T>, a_diag: &[T]) -> Result<Vec<T>, Error> {
    if !s.is_square() || s.rows() != a_diag.len() {
        return Err(Error::DimensionMismatch {
            expected: s.rows(),
            found: a_diag.len(),
        });
    }
    let s_inv = s.inverse()?;
    let sa = s.matmul(&Matrix::from_diag(a_diag))?;
    let n = s.rows();
    Ok((0..n)
        .map(|i| (0..n).fold(T::zero(), |acc, k| acc + sa[(i, k)] * s_inv[(k, i)]))
        .collect())
}
