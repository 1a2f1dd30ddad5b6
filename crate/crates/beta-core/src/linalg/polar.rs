//! Polar decomposition of real square matrices.
//!
//! `M = Q S` with `Q` orthogonal (the rotation content) and `S` symmetric
//! positive semidefinite (the stretch content). `S` is the matrix square
//! root of `M^T M`, assembled from its eigendecomposition; `Q` follows by
//! inversion. The reported angle reads the rotation off the leading entry
//! of `Q`, clamped into the valid arccos domain.

use super::{eigen, scalar, Matrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct PolarFactors {
    /// Orthogonal factor `Q`.
    pub rotation: Matrix,
    /// Symmetric positive semidefinite factor `S`.
    pub stretch: Matrix,
    /// `acos` of the leading rotation entry, clamped to `[-1, 1]` first.
    pub theta: f64,
}

/// Polar factors of a real, square, invertible matrix.
///
/// Matrices that are singular within a relative conditioning tolerance of
/// 1e-10 are rejected: their rotation factor is not determined.
pub fn polar(m: &Matrix) -> Result<PolarFactors> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "polar decomposition of a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    if !m.is_real(1e-12) {
        return Err(Error::Domain(
            "polar decomposition expects a real matrix".into(),
        ));
    }
    let h = m.transpose().mul(m)?;
    let pairs = eigen(&h)?;
    if pairs.len() != m.rows() {
        return Err(Error::Numeric(
            "gram matrix eigendecomposition is incomplete".into(),
        ));
    }
    // Eigenvalues of M^T M are real and nonnegative up to roundoff.
    let sigmas: Vec<f64> = pairs
        .iter()
        .map(|(l, _)| l.re.max(0.0).sqrt())
        .collect();
    let sigma_max = sigmas.iter().cloned().fold(0.0f64, f64::max);
    let sigma_min = sigmas.iter().cloned().fold(f64::INFINITY, f64::min);
    if sigma_max <= 0.0 || sigma_min < 1e-10 * sigma_max {
        return Err(Error::Numeric(
            "matrix is singular within the conditioning tolerance 1e-10".into(),
        ));
    }
    let n = m.rows();
    let mut stretch = Matrix::zeros(n, n);
    let mut inv = Matrix::zeros(n, n);
    for ((_, v), sigma) in pairs.iter().zip(&sigmas) {
        let proj = Matrix::outer(v, v);
        stretch = stretch.add(&proj.scale(scalar(*sigma, 0.0)))?;
        inv = inv.add(&proj.scale(scalar(1.0 / sigma, 0.0)))?;
    }
    let rotation = m.mul(&inv)?;
    rotation.check_finite()?;
    let theta = rotation.entry(0, 0).re.clamp(-1.0, 1.0).acos();
    Ok(PolarFactors {
        rotation,
        stretch,
        theta,
    })
}
