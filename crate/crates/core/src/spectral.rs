//! Block-aware spectral helpers and operator norms.
//!
//! Finite sections of banded operators split into many small independent
//! blocks once their rows are permuted. Everything here decomposes the
//! sparsity graph first and runs the Jacobi kernel block by block; a dense
//! matrix with one connected block is handled exactly as by [`eigh`].

use crate::dense::DenseMatrix;
use crate::eigh::{eigh, SpectralDecomposition};
use crate::error::Result;
use crate::hermitian::HermitianMatrix;

/// Spectral decomposition of each diagonal block of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct BlockSpectrum {
    dim: usize,
    blocks: Vec<(Vec<usize>, SpectralDecomposition)>,
}

impl BlockSpectrum {
    pub fn new(a: &HermitianMatrix) -> Result<Self> {
        let dense = a.to_dense();
        let components = dense.diagonal_blocks();
        let blocks = if components.len() == 1 {
            vec![(components.into_iter().next().unwrap(), eigh(a)?)]
        } else {
            components
                .into_iter()
                .map(|idx| {
                    let sub = HermitianMatrix::try_from_dense(&dense.principal_submatrix(&idx))?;
                    Ok((idx, eigh(&sub)?))
                })
                .collect::<Result<Vec<_>>>()?
        };
        Ok(Self {
            dim: a.dim(),
            blocks,
        })
    }

    pub fn blocks(&self) -> &[(Vec<usize>, SpectralDecomposition)] {
        &self.blocks
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.blocks
            .iter()
            .map(|(_, d)| d.min_eigenvalue())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.blocks
            .iter()
            .map(|(_, d)| d.max_eigenvalue())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn spectral_radius(&self) -> f64 {
        self.blocks
            .iter()
            .map(|(_, d)| d.spectral_radius())
            .fold(0.0, f64::max)
    }

    /// All eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut all: Vec<f64> = self
            .blocks
            .iter()
            .flat_map(|(_, d)| d.eigenvalues.iter().copied())
            .collect();
        all.sort_by(f64::total_cmp);
        all
    }

    /// Functional calculus `f(A)`, block diagonal in the same permutation.
    pub fn map(&self, f: impl Fn(f64) -> f64 + Copy) -> HermitianMatrix {
        if self.blocks.len() == 1 {
            return self.blocks[0].1.map(f);
        }
        let mut out = DenseMatrix::zeros(self.dim, self.dim);
        for (idx, d) in &self.blocks {
            let sub = d.map(f);
            for (a, &i) in idx.iter().enumerate() {
                for (b, &j) in idx.iter().enumerate() {
                    out[(i, j)] = sub.get(a, b);
                }
            }
        }
        HermitianMatrix::from_lower_fn(self.dim, |i, j| out[(i, j)])
    }
}

/// `‖A‖ = max |λ|` for Hermitian `A`.
pub fn hermitian_norm(a: &HermitianMatrix) -> Result<f64> {
    Ok(BlockSpectrum::new(a)?.spectral_radius())
}

/// Operator (spectral) norm of a square matrix: `√λ_max(M*M)`, or the
/// spectral radius directly when `M` is exactly Hermitian.
pub fn op_norm(m: &DenseMatrix) -> Result<f64> {
    m.require_square()?;
    if m.is_exactly_hermitian() {
        return hermitian_norm(&HermitianMatrix::try_from_dense(m)?);
    }
    let gram = HermitianMatrix::hermitian_part(&(&m.adjoint() * m))?;
    Ok(BlockSpectrum::new(&gram)?.max_eigenvalue().max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::Scalar;

    #[test]
    fn norms_of_small_matrices() {
        assert_eq!(
            op_norm(&DenseMatrix::from_diagonal(&[-3.0, 2.0])).unwrap(),
            3.0
        );
        let swap = DenseMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        assert!((op_norm(&swap).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn shift_sections_have_unit_norm() {
        for n in 2..=12 {
            let s = DenseMatrix::from_fn(n, n, |i, j| {
                if i == j + 1 {
                    Scalar::new(1.0, 0.0)
                } else {
                    Scalar::new(0.0, 0.0)
                }
            });
            assert!((op_norm(&s).unwrap() - 1.0).abs() < 1e-14, "N = {n}");
        }
    }

    #[test]
    fn blockwise_matches_whole() {
        let a = HermitianMatrix::from_lower_fn(5, |i, j| {
            if (i + j) % 2 == 0 {
                Scalar::new((i * 5 + j) as f64 * 0.1, if i == j { 0.0 } else { 0.3 })
            } else {
                Scalar::new(0.0, 0.0)
            }
        });
        let blocks = BlockSpectrum::new(&a).unwrap();
        assert_eq!(blocks.blocks().len(), 2);
        let whole = eigh(&a).unwrap();
        for (x, y) in blocks.eigenvalues().iter().zip(&whole.eigenvalues) {
            assert!((x - y).abs() < 1e-13);
        }
        let f = blocks.map(|l| l * l);
        let sq = a.square();
        assert!((&f.to_dense() - &sq.to_dense()).frobenius_norm() < 1e-13);
    }
}
