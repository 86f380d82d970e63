//! Hermitian matrices stored as a packed lower triangle.

use crate::dense::{DenseMatrix, Scalar};
use crate::error::{Error, Result};

/// A finite-dimensional self-adjoint operator.
///
/// Only the lower triangle is stored; the upper triangle is its conjugate
/// mirror, so `A = A*` holds exactly. Diagonal entries are real.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    dim: usize,
    lower: Vec<Scalar>,
}

#[inline]
fn packed(i: usize, j: usize) -> usize {
    debug_assert!(j <= i);
    i * (i + 1) / 2 + j
}

impl HermitianMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            lower: vec![Scalar::new(0.0, 0.0); dim * (dim + 1) / 2],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scalar(dim, 1.0)
    }

    /// `alpha * I`.
    pub fn scalar(dim: usize, alpha: f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.lower[packed(i, i)] = Scalar::new(alpha, 0.0);
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.lower[packed(i, i)] = Scalar::new(d, 0.0);
        }
        m
    }

    /// Builds from a generator of the lower triangle `(i, j)` with `j <= i`.
    /// Imaginary parts of diagonal values are discarded.
    pub fn from_lower_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut lower = Vec::with_capacity(dim * (dim + 1) / 2);
        for i in 0..dim {
            for j in 0..=i {
                let z = f(i, j);
                lower.push(if i == j { Scalar::new(z.re, 0.0) } else { z });
            }
        }
        Self { dim, lower }
    }

    /// Accepts a dense matrix only if it is Hermitian to the last bit.
    pub fn try_from_dense(m: &DenseMatrix) -> Result<Self> {
        Self::try_from_dense_within(m, 0.0)
    }

    /// Accepts a dense matrix whose Hermitian defect is at most `tol`; the
    /// lower triangle is kept verbatim.
    pub fn try_from_dense_within(m: &DenseMatrix, tol: f64) -> Result<Self> {
        let dim = m.require_square()?;
        if dim == 0 {
            return Err(Error::Empty);
        }
        for i in 0..dim {
            for j in 0..=i {
                let gap = (m[(i, j)] - m[(j, i)].conj()).norm();
                if gap > tol {
                    return Err(Error::NotHermitian {
                        row: i,
                        col: j,
                        gap,
                    });
                }
            }
        }
        Ok(Self::from_lower_fn(dim, |i, j| m[(i, j)]))
    }

    /// `(M + M*) / 2` for an arbitrary square matrix.
    pub fn hermitian_part(m: &DenseMatrix) -> Result<Self> {
        let dim = m.require_square()?;
        Ok(Self::from_lower_fn(dim, |i, j| {
            (m[(i, j)] + m[(j, i)].conj()) * 0.5
        }))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        if j <= i {
            self.lower[packed(i, j)]
        } else {
            self.lower[packed(j, i)].conj()
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.lower[packed(i, i)].re).collect()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.dim, self.dim, |i, j| self.get(i, j))
    }

    fn require_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            })
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.require_same_dim(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.require_same_dim(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Scalar, Scalar) -> Scalar) -> Self {
        Self {
            dim: self.dim,
            lower: self
                .lower
                .iter()
                .zip(&other.lower)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            lower: self.lower.iter().map(|&z| z * factor).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(-1.0)
    }

    /// `A + alpha * I`.
    pub fn shift_diagonal(&self, alpha: f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.dim {
            out.lower[packed(i, i)].re += alpha;
        }
        out
    }

    /// The Hermitian square `A * A`, symmetrized from the dense product.
    pub fn square(&self) -> Self {
        let d = self.to_dense();
        Self::hermitian_part(&(&d * &d)).expect("square input")
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.to_dense().frobenius_norm()
    }

    pub fn apply(&self, x: &[Scalar]) -> Result<Vec<Scalar>> {
        self.to_dense().apply(x)
    }

    /// `<A x, x>`; real for Hermitian `A` up to rounding.
    pub fn quadratic_form(&self, x: &[Scalar]) -> Result<Scalar> {
        let ax = self.apply(x)?;
        Ok(crate::dense::inner(&ax, x))
    }

    pub fn is_zero(&self) -> bool {
        self.lower.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }
}

impl From<&HermitianMatrix> for DenseMatrix {
    fn from(h: &HermitianMatrix) -> Self {
        h.to_dense()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packed_layout_mirrors_upper_triangle() {
        let h = HermitianMatrix::from_lower_fn(3, |i, j| {
            Scalar::new((i * 3 + j) as f64, (i + j) as f64)
        });
        let d = h.to_dense();
        assert!(d.is_exactly_hermitian());
        assert_eq!(d[(0, 2)], Scalar::new(6.0, -2.0));
        assert_eq!(d[(1, 1)].im, 0.0);
    }

    #[test]
    fn dense_round_trip_requires_exact_symmetry() {
        let mut d = DenseMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 3.0]]).unwrap();
        let h = HermitianMatrix::try_from_dense(&d).unwrap();
        assert_eq!(h.to_dense(), d);
        d[(0, 1)] = Scalar::new(2.0, 1e-3);
        assert!(matches!(
            HermitianMatrix::try_from_dense(&d),
            Err(Error::NotHermitian { .. })
        ));
        assert!(HermitianMatrix::try_from_dense_within(&d, 1e-2).is_ok());
    }

    #[test]
    fn arithmetic_checks_dimensions() {
        let a = HermitianMatrix::identity(2);
        let b = HermitianMatrix::identity(3);
        assert!(a.try_sub(&b).is_err());
        assert_eq!(a.shift_diagonal(1.5).diagonal(), vec![2.5, 2.5]);
    }
}
