//! Dense complex linear algebra at desk scale.
//!
//! Everything here is sized for event-state systems of dimension at most a
//! few dozen: operations favor clarity and exact contract checks over raw
//! speed. Entries are `Complex64`; every public operation rejects non-finite
//! results instead of letting NaN propagate.

mod eigen;
mod polar;

pub use eigen::eigen;
pub use polar::{polar, PolarFactors};

use num_complex::Complex64;

use crate::cap::check_dim;
use crate::error::{Error, Result};

/// Scalar field for all state vectors and operators.
pub type Scalar = Complex64;

pub(crate) fn scalar(re: f64, im: f64) -> Scalar {
    Scalar::new(re, im)
}

/// Column vector with at least one entry.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector {
    entries: Vec<Scalar>,
}

impl Vector {
    pub fn new(entries: Vec<Scalar>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Validation("vector needs at least one entry".into()));
        }
        let v = Vector { entries };
        v.check_finite()?;
        Ok(v)
    }

    pub fn zeros(dim: usize) -> Self {
        Vector {
            entries: vec![Scalar::new(0.0, 0.0); dim.max(1)],
        }
    }

    /// Standard basis vector `e_idx` (0-based) in the given dimension.
    pub fn basis(dim: usize, idx: usize) -> Result<Self> {
        if idx >= dim {
            return Err(Error::Dimension(format!(
                "basis index {idx} out of range for dimension {dim}"
            )));
        }
        let mut v = Vector::zeros(dim);
        v.entries[idx] = Scalar::new(1.0, 0.0);
        Ok(v)
    }

    pub fn from_real(entries: &[f64]) -> Result<Self> {
        Vector::new(entries.iter().map(|&x| Scalar::new(x, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    pub fn entry(&self, i: usize) -> Scalar {
        self.entries[i]
    }

    pub fn set(&mut self, i: usize, value: Scalar) {
        self.entries[i] = value;
    }

    /// Inner product, conjugate-linear in `self`.
    pub fn inner(&self, other: &Vector) -> Result<Scalar> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension(format!(
                "inner product of dimensions {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&self) -> Result<Vector> {
        let n = self.norm();
        if n < 1e-12 {
            return Err(Error::Degeneracy("cannot normalize a zero vector".into()));
        }
        Ok(self.scale(Scalar::new(1.0 / n, 0.0)))
    }

    pub fn scale(&self, s: Scalar) -> Vector {
        Vector {
            entries: self.entries.iter().map(|e| e * s).collect(),
        }
    }

    pub fn add(&self, other: &Vector) -> Result<Vector> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension("vector addition dimension mismatch".into()));
        }
        Ok(Vector {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Vector) -> Result<Vector> {
        Ok(self.add(&other.scale(scalar(-1.0, 0.0)))?)
    }

    /// Squared moduli of the entries; the basis weights of a state vector.
    pub fn weights(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.norm_sqr()).collect()
    }

    pub fn check_finite(&self) -> Result<()> {
        if self.entries.iter().all(|e| e.re.is_finite() && e.im.is_finite()) {
            Ok(())
        } else {
            Err(Error::Numeric("vector has non-finite entries".into()))
        }
    }
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    entries: Vec<Scalar>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Scalar>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Validation("matrix needs at least one row and column".into()));
        }
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        let m = Matrix { rows, cols, entries };
        m.check_finite()?;
        Ok(m)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            entries: vec![Scalar::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Matrix::zeros(dim, dim);
        for i in 0..dim {
            m.set(i, i, Scalar::new(1.0, 0.0));
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let r = rows.len();
        if r == 0 {
            return Err(Error::Validation("matrix needs at least one row".into()));
        }
        let c = rows[0].len();
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows in matrix literal".into()));
        }
        Matrix::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Matrix::from_rows(
            rows.iter()
                .map(|row| row.iter().map(|&x| Scalar::new(x, 0.0)).collect())
                .collect(),
        )
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let mut m = Matrix::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m.set(i, i, Scalar::new(v, 0.0));
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

    pub fn entry(&self, i: usize, j: usize) -> Scalar {
        self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Scalar) {
        self.entries[i * self.cols + j] = value;
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.entry(i, k);
                // Skip structural zeros only. Testing `norm_sqr() == 0.0`
                // here would also skip every entry below sqrt(MIN_POSITIVE),
                // silently zeroing products of subnormal-range matrices.
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    let cur = out.entry(i, j);
                    out.set(i, j, cur + a * other.entry(k, j));
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &Vector) -> Result<Vector> {
        if self.cols != v.dim() {
            return Err(Error::Dimension(format!(
                "cannot apply {}x{} matrix to vector of dimension {}",
                self.rows,
                self.cols,
                v.dim()
            )));
        }
        let mut out = Vector::zeros(self.rows);
        for i in 0..self.rows {
            let mut acc = Scalar::new(0.0, 0.0);
            for j in 0..self.cols {
                acc += self.entry(i, j) * v.entry(j);
            }
            out.set(i, acc);
        }
        Ok(out)
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension("matrix addition shape mismatch".into()));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.add(&other.scale(scalar(-1.0, 0.0)))
    }

    pub fn scale(&self, s: Scalar) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e * s).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.entry(i, j).conj());
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.entry(i, j));
            }
        }
        out
    }

    pub fn trace(&self) -> Scalar {
        (0..self.rows.min(self.cols)).map(|i| self.entry(i, i)).sum()
    }

    /// Largest entry modulus; the distance measure used by projector checks.
    pub fn norm_inf(&self) -> f64 {
        self.entries.iter().map(|e| e.norm()).fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Matrix, tol: f64) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|(a, b)| (a - b).norm() <= tol)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        for i in 0..self.rows {
            for j in i..self.cols {
                if (self.entry(i, j) - self.entry(j, i).conj()).norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.entries.iter().all(|e| e.im.abs() <= tol)
    }

    /// Rank-one product `|v><w|`.
    pub fn outer(v: &Vector, w: &Vector) -> Matrix {
        let mut out = Matrix::zeros(v.dim(), w.dim());
        for i in 0..v.dim() {
            for j in 0..w.dim() {
                out.set(i, j, v.entry(i) * w.entry(j).conj());
            }
        }
        out
    }

    /// Determinant via LU elimination with partial pivoting.
    pub fn det(&self) -> Result<Scalar> {
        if !self.is_square() {
            return Err(Error::Dimension("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut det = Scalar::new(1.0, 0.0);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| {
                    a.entry(i, col)
                        .norm()
                        .partial_cmp(&a.entry(j, col).norm())
                        .unwrap()
                })
                .unwrap();
            if a.entry(pivot, col).norm() == 0.0 {
                return Ok(Scalar::new(0.0, 0.0));
            }
            if pivot != col {
                for j in 0..n {
                    let tmp = a.entry(col, j);
                    a.set(col, j, a.entry(pivot, j));
                    a.set(pivot, j, tmp);
                }
                det = -det;
            }
            let p = a.entry(col, col);
            det *= p;
            for i in col + 1..n {
                let f = a.entry(i, col) / p;
                for j in col..n {
                    let cur = a.entry(i, j);
                    a.set(i, j, cur - f * a.entry(col, j));
                }
            }
        }
        Ok(det)
    }

    pub fn check_finite(&self) -> Result<()> {
        if self.entries.iter().all(|e| e.re.is_finite() && e.im.is_finite()) {
            Ok(())
        } else {
            Err(Error::Numeric("matrix has non-finite entries".into()))
        }
    }
}

/// Kronecker product of two vectors.
///
/// Entry layout: `(a ⊗ b)[i*dim(b) + j] = a[i] * b[j]`.
pub fn tensor(a: &Vector, b: &Vector) -> Result<Vector> {
    let dim = a.dim() * b.dim();
    check_dim(dim, "tensor product of vectors")?;
    let mut out = Vector::zeros(dim);
    for i in 0..a.dim() {
        for j in 0..b.dim() {
            out.set(i * b.dim() + j, a.entry(i) * b.entry(j));
        }
    }
    Ok(out)
}

/// Kronecker product of two matrices.
pub fn tensor_matrix(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    check_dim(a.rows() * b.rows(), "tensor product rows")?;
    check_dim(a.cols() * b.cols(), "tensor product columns")?;
    let mut out = Matrix::zeros(a.rows() * b.rows(), a.cols() * b.cols());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let s = a.entry(i, j);
            // Structural zeros only; see the matching comment in `mul`.
            if s.re == 0.0 && s.im == 0.0 {
                continue;
            }
            for k in 0..b.rows() {
                for l in 0..b.cols() {
                    out.set(i * b.rows() + k, j * b.cols() + l, s * b.entry(k, l));
                }
            }
        }
    }
    Ok(out)
}

/// Concatenation of two vectors; the direct-sum combination of gate outputs.
pub fn direct_sum(a: &Vector, b: &Vector) -> Result<Vector> {
    check_dim(a.dim() + b.dim(), "direct sum")?;
    let mut entries = a.entries().to_vec();
    entries.extend_from_slice(b.entries());
    Vector::new(entries)
}

/// Entrywise product of two vectors of equal dimension.
pub fn hadamard(a: &Vector, b: &Vector) -> Result<Vector> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension(format!(
            "hadamard product of dimensions {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    Vector::new(
        a.entries()
            .iter()
            .zip(b.entries())
            .map(|(x, y)| x * y)
            .collect(),
    )
}

/// Orthogonalizes `v` against an orthonormal `basis` and returns the unit
/// residual, the next member of the extended basis.
///
/// Two projection passes keep the result orthonormal to working precision
/// even when `v` is nearly inside the span. A residual below 1e-9 means `v`
/// carries no new direction and is rejected as degenerate.
pub fn gram_schmidt_extend(basis: &[Vector], v: &Vector) -> Result<Vector> {
    for b in basis {
        if b.dim() != v.dim() {
            return Err(Error::Dimension("basis and vector dimensions differ".into()));
        }
    }
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate() {
            let g = a.inner(b)?;
            let expect = if i == j { 1.0 } else { 0.0 };
            if (g - scalar(expect, 0.0)).norm() > 1e-10 {
                return Err(Error::Domain(
                    "gram_schmidt_extend requires an orthonormal basis".into(),
                ));
            }
        }
    }
    let mut r = v.clone();
    for _ in 0..2 {
        for b in basis {
            let c = b.inner(&r)?;
            r = r.sub(&b.scale(c))?;
        }
    }
    let n = r.norm();
    if n < 1e-9 {
        return Err(Error::Degeneracy(
            "vector lies in the span of the basis".into(),
        ));
    }
    r.scale(scalar(1.0 / n, 0.0)).check_finite_ok()
}

impl Vector {
    fn check_finite_ok(self) -> Result<Vector> {
        self.check_finite()?;
        Ok(self)
    }
}

/// Shannon entropy, in bits, of a probability weight vector.
///
/// For the diagonal mixed states this machine produces, the von Neumann
/// entropy of the density operator reduces to exactly this sum.
pub fn von_neumann_entropy(weights: &[f64]) -> Result<f64> {
    if weights.is_empty() {
        return Err(Error::Domain("entropy of an empty weight vector".into()));
    }
    let mut sum = 0.0;
    for &w in weights {
        if !w.is_finite() || w < -1e-12 {
            return Err(Error::Domain(format!("negative or non-finite weight {w}")));
        }
        sum += w.max(0.0);
    }
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::Domain(format!(
            "weights must sum to 1 within 1e-9, got {sum}"
        )));
    }
    let mut s = 0.0;
    for &w in weights {
        if w > 0.0 {
            s -= w * w.log2();
        }
    }
    Ok(s.max(0.0))
}
