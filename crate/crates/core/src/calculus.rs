//! Positive square root, modulus, and the square-root contraction bound.

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;
use crate::order::OrderTolerance;
use crate::spectral::{hermitian_norm, BlockSpectrum};

/// The unique positive square root of a PSD matrix.
///
/// Eigenvalues inside the tolerance band `[-(eps + rel‖A‖), 0)` are clamped
/// to zero; anything more negative is rejected.
pub fn sqrt_psd(a: &HermitianMatrix, tol: OrderTolerance) -> Result<HermitianMatrix> {
    sqrt_of_spectrum(&BlockSpectrum::new(a)?, tol)
}

pub(crate) fn sqrt_of_spectrum(
    spectrum: &BlockSpectrum,
    tol: OrderTolerance,
) -> Result<HermitianMatrix> {
    let min = spectrum.min_eigenvalue();
    let slack = tol.slack(spectrum.spectral_radius());
    if min < -slack {
        return Err(Error::NotPsd {
            min_eigenvalue: min,
            slack,
        });
    }
    Ok(spectrum.map(|l| l.max(0.0).sqrt()))
}

/// `|M| = √(M*M)`.
pub fn abs_op(m: &DenseMatrix) -> Result<HermitianMatrix> {
    m.require_square()?;
    let gram = HermitianMatrix::hermitian_part(&(&m.adjoint() * m))?;
    // A Gram matrix is PSD; only rounding can push eigenvalues below zero.
    let norm = hermitian_norm(&gram)?;
    let tol = OrderTolerance::new(0.0, 1e-12 * gram.dim() as f64)?;
    sqrt_psd(&gram, tol).map_err(|e| match e {
        Error::NotPsd { min_eigenvalue, .. } => Error::NotPsd {
            min_eigenvalue,
            slack: tol.slack(norm),
        },
        other => other,
    })
}

/// Both sides of `‖√B − √C‖ ≤ √‖B − C‖`.
pub fn sqrt_contraction_gap(
    b: &HermitianMatrix,
    c: &HermitianMatrix,
    tol: OrderTolerance,
) -> Result<(f64, f64)> {
    let diff = b.try_sub(c)?;
    let root_b = sqrt_psd(b, tol)?;
    let root_c = sqrt_psd(c, tol)?;
    let lhs = hermitian_norm(&root_b.try_sub(&root_c)?)?;
    let rhs = hermitian_norm(&diff)?.sqrt();
    Ok((lhs, rhs))
}
