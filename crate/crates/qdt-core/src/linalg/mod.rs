//! Dense complex linear algebra at desk scale.
//!
//! Everything downstream works with explicit matrices over `Complex64`:
//! states and operators live in spaces of a few dozen dimensions, so a
//! row-major `Vec` with unapologetic O(n^3) products is the right tool.
//! Composite spaces are capped at [`MAX_PRODUCT_DIMENSION`] to keep every
//! operation interactive.

mod eigen;

pub use eigen::{hermitian_eigen, hermitian_eigenvalues, HermitianEigen};

use crate::error::{QdtError, Result};
use num_complex::Complex64;

/// Default comparison tolerance for Hermiticity, normalization and trace
/// checks. Callers can pass their own where an operation takes `tol`.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Largest admissible dimension for a composite (tensor product) space.
pub const MAX_PRODUCT_DIMENSION: usize = 4096;

/// Which tensor factor an operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// A finite Hilbert space with distinct, human-readable basis labels.
///
/// Labels are display metadata: operator compatibility is decided by
/// dimension alone, so states built elsewhere interoperate with spaces
/// built here.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertSpace {
    dimension: usize,
    basis_labels: Vec<String>,
}

impl HilbertSpace {
    pub fn new(basis_labels: Vec<String>) -> Result<Self> {
        let dimension = basis_labels.len();
        if dimension == 0 || dimension > MAX_PRODUCT_DIMENSION {
            return Err(QdtError::DimensionGuardExceeded {
                dimension,
                max: MAX_PRODUCT_DIMENSION,
            });
        }
        for (i, a) in basis_labels.iter().enumerate() {
            if a.is_empty() || basis_labels[..i].contains(a) {
                return Err(QdtError::InvalidBasisLabels);
            }
        }
        Ok(Self {
            dimension,
            basis_labels,
        })
    }

    /// Space of the given dimension with numeric labels `"0"`, `"1"`, ...
    pub fn with_dimension(dimension: usize) -> Result<Self> {
        Self::new((0..dimension).map(|i| i.to_string()).collect())
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn basis_labels(&self) -> &[String] {
        &self.basis_labels
    }

    pub fn label(&self, index: usize) -> &str {
        &self.basis_labels[index]
    }
}

/// Dense complex matrix, row-major.
///
/// Construction validates shape and finiteness (no NaN or infinity ever
/// enters an operator); arithmetic assumes validated operands.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    /// Builds a matrix from row-major data, rejecting shape mismatches and
    /// non-finite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols || rows == 0 || cols == 0 {
            return Err(QdtError::ShapeMismatch {
                rows,
                cols,
                got: data.len(),
            });
        }
        for (k, z) in data.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(QdtError::NonFiniteEntry {
                    row: k / cols,
                    col: k % cols,
                });
            }
        }
        Ok(Self { rows, cols, data })
    }

    fn from_parts(rows: usize, cols: usize, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_parts(rows, cols, vec![Complex64::new(0.0, 0.0); rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix entry by entry; the closure must return finite values.
    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Complex64,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::new(rows, cols, data)
    }

    /// Column vector from amplitudes.
    pub fn column(entries: Vec<Complex64>) -> Result<Self> {
        let n = entries.len();
        Self::new(n, 1, entries)
    }

    /// Copy of column `index` as a column vector.
    pub fn column_vector(&self, index: usize) -> Result<Self> {
        if index >= self.cols {
            return Err(QdtError::IndexOutOfRange {
                index,
                dimension: self.cols,
            });
        }
        let entries = (0..self.rows).map(|i| self.get(i, index)).collect();
        Self::column(entries)
    }

    /// Standard basis column vector `|index>`.
    pub fn basis_column(dimension: usize, index: usize) -> Result<Self> {
        if index >= dimension {
            return Err(QdtError::IndexOutOfRange { index, dimension });
        }
        let mut m = Self::zeros(dimension, 1);
        m.data[index] = Complex64::new(1.0, 0.0);
        Ok(m)
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

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        assert!(row < self.rows && col < self.cols, "index out of bounds");
        self.data[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        assert!(row < self.rows && col < self.cols, "index out of bounds");
        assert!(value.re.is_finite() && value.im.is_finite());
        self.data[row * self.cols + col] = value;
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.require_same_shape(other, "matrix addition")?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self::from_parts(self.rows, self.cols, data))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.require_same_shape(other, "matrix subtraction")?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self::from_parts(self.rows, self.cols, data))
    }

    pub fn scale(&self, factor: impl Into<Complex64>) -> Self {
        let factor = factor.into();
        let data = self.data.iter().map(|a| a * factor).collect();
        Self::from_parts(self.rows, self.cols, data)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.data[i * self.cols + j].conj());
            }
        }
        Self::from_parts(self.cols, self.rows, data)
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(QdtError::DimensionMismatch {
                left: self.cols,
                right: other.rows,
                context: "matrix product",
            });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.data[i * self.cols + k];
                if aik == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out[i * other.cols + j] += aik * other.data[k * other.cols + j];
                }
            }
        }
        Ok(Self::from_parts(self.rows, other.cols, out))
    }

    /// Outer product `self * other^dagger` of two column vectors.
    pub fn outer(&self, other: &Self) -> Result<Self> {
        if self.cols != 1 || other.cols != 1 {
            return Err(QdtError::DimensionMismatch {
                left: self.cols,
                right: other.cols,
                context: "outer product needs column vectors",
            });
        }
        let mut out = Vec::with_capacity(self.rows * other.rows);
        for i in 0..self.rows {
            for j in 0..other.rows {
                out.push(self.data[i] * other.data[j].conj());
            }
        }
        Ok(Self::from_parts(self.rows, other.rows, out))
    }

    pub fn trace(&self) -> Result<Complex64> {
        if !self.is_square() {
            return Err(QdtError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let mut t = Complex64::new(0.0, 0.0);
        for i in 0..self.rows {
            t += self.data[i * self.cols + i];
        }
        Ok(t)
    }

    /// `Tr(self * other)` without materializing the product.
    pub fn trace_product(&self, other: &Self) -> Result<Complex64> {
        if self.cols != other.rows || self.rows != other.cols {
            return Err(QdtError::DimensionMismatch {
                left: self.cols,
                right: other.rows,
                context: "trace of product",
            });
        }
        let mut t = Complex64::new(0.0, 0.0);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t += self.data[i * self.cols + j] * other.data[j * other.cols + i];
            }
        }
        Ok(t)
    }

    /// Kronecker product, guarded by [`MAX_PRODUCT_DIMENSION`].
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let dimension = rows.max(cols);
        if dimension > MAX_PRODUCT_DIMENSION {
            return Err(QdtError::DimensionGuardExceeded {
                dimension,
                max: MAX_PRODUCT_DIMENSION,
            });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); rows * cols];
        for ia in 0..self.rows {
            for ja in 0..self.cols {
                let a = self.data[ia * self.cols + ja];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for ib in 0..other.rows {
                    for jb in 0..other.cols {
                        out[(ia * other.rows + ib) * cols + (ja * other.cols + jb)] =
                            a * other.data[ib * other.cols + jb];
                    }
                }
            }
        }
        Ok(Self::from_parts(rows, cols, out))
    }

    /// Traces out one factor of an operator on `A (x) B`, returning the
    /// reduced operator on the other. The full trace is preserved.
    pub fn partial_trace(&self, dims: (usize, usize), traced: Subsystem) -> Result<Self> {
        let (dim_a, dim_b) = dims;
        if !self.is_square() {
            return Err(QdtError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        if self.rows != dim_a * dim_b {
            return Err(QdtError::DimensionMismatch {
                left: self.rows,
                right: dim_a * dim_b,
                context: "partial trace factorization",
            });
        }
        match traced {
            Subsystem::B => {
                let mut out = Self::zeros(dim_a, dim_a);
                for m in 0..dim_a {
                    for n in 0..dim_a {
                        let mut s = Complex64::new(0.0, 0.0);
                        for b in 0..dim_b {
                            s += self.get(m * dim_b + b, n * dim_b + b);
                        }
                        out.data[m * dim_a + n] = s;
                    }
                }
                Ok(out)
            }
            Subsystem::A => {
                let mut out = Self::zeros(dim_b, dim_b);
                for m in 0..dim_b {
                    for n in 0..dim_b {
                        let mut s = Complex64::new(0.0, 0.0);
                        for a in 0..dim_a {
                            s += self.get(a * dim_b + m, a * dim_b + n);
                        }
                        out.data[m * dim_b + n] = s;
                    }
                }
                Ok(out)
            }
        }
    }

    /// Hilbert-Schmidt inner product `Tr(self^dagger * other)`, conjugate
    /// linear in `self`.
    pub fn hs_inner_product(&self, other: &Self) -> Result<Complex64> {
        self.require_same_shape(other, "Hilbert-Schmidt inner product")?;
        let mut s = Complex64::new(0.0, 0.0);
        for (a, b) in self.data.iter().zip(&other.data) {
            s += a.conj() * b;
        }
        Ok(s)
    }

    /// Hilbert-Schmidt (Frobenius) norm.
    pub fn hs_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Hilbert-Schmidt distance `||self - other||`.
    pub fn hs_distance(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.hs_norm())
    }

    /// Hermiticity within `tol`, measured as `||a - a^dagger||_HS`.
    pub fn is_hermitian(&self, tol: f64) -> Result<bool> {
        if !self.is_square() {
            return Err(QdtError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let mut dev_sq = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let d = self.data[i * self.cols + j] - self.data[j * self.cols + i].conj();
                dev_sq += d.norm_sqr();
            }
        }
        Ok(dev_sq.sqrt() <= tol)
    }

    /// Positive semidefiniteness within `tol`: all eigenvalues of the
    /// Hermitian part at least `-tol`. Errors on non-Hermitian input.
    pub fn is_positive_semidefinite(&self, tol: f64) -> Result<bool> {
        if !self.is_hermitian(tol)? {
            return Err(QdtError::NotHermitian { tol });
        }
        let values = hermitian_eigenvalues(self)?;
        Ok(values.first().is_none_or(|min| *min >= -tol))
    }

    /// Entrywise comparison through the Hilbert-Schmidt distance.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt()
                <= tol
    }

    fn require_same_shape(&self, other: &Self, context: &'static str) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(QdtError::DimensionMismatch {
                left: self.rows * self.cols,
                right: other.rows * other.cols,
                context,
            });
        }
        Ok(())
    }
}
