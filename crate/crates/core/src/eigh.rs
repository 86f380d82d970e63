//! Cyclic complex Jacobi eigensolver for Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a[p][q]` with a
//! diagonal unitary, then applies a real plane rotation that annihilates it.
//! Sweeps visit pivots in row-major order `(0,1), (0,2), …, (n-2,n-1)` until
//! the off-diagonal Frobenius norm drops to `1e-14 * ‖A‖_F`.

use crate::dense::{DenseMatrix, Scalar};
use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;

/// Relative off-diagonal target for convergence.
pub const OFF_DIAGONAL_TARGET: f64 = 1e-14;

/// Rotation cap per unit of `dim²`.
pub const ROTATIONS_PER_DIM2: usize = 30;

/// Eigenvalues in ascending order plus the unitary matrix whose columns are
/// the corresponding eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DenseMatrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    /// Largest eigenvalue modulus, i.e. the operator norm of the source.
    pub fn spectral_radius(&self) -> f64 {
        self.min_eigenvalue().abs().max(self.max_eigenvalue().abs())
    }

    /// `Q f(Λ) Q*`, assembled directly into packed Hermitian storage.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let q = &self.eigenvectors;
        let n = self.dim();
        let values: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        HermitianMatrix::from_lower_fn(n, |i, j| {
            let mut acc = Scalar::new(0.0, 0.0);
            for (k, &v) in values.iter().enumerate() {
                if v != 0.0 {
                    acc += q[(i, k)] * q[(j, k)].conj() * v;
                }
            }
            acc
        })
    }

    /// `Q Λ Q*`.
    pub fn reconstruct(&self) -> HermitianMatrix {
        self.map(|l| l)
    }

    /// `‖Q*Q − I‖_F`.
    pub fn orthogonality_defect(&self) -> f64 {
        let q = &self.eigenvectors;
        let qq = &q.adjoint() * q;
        (&qq - &DenseMatrix::identity(self.dim())).frobenius_norm()
    }
}

fn off_diagonal_norm(a: &[Scalar], n: usize) -> f64 {
    let mut acc = 0.0;
    for (i, row) in a.chunks_exact(n).enumerate() {
        for (j, z) in row.iter().enumerate() {
            if i != j {
                acc += z.norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Fails with [`Error::NoConvergence`] once `30 * dim²` rotations have been
/// applied without reaching the off-diagonal target.
pub fn eigh(matrix: &HermitianMatrix) -> Result<SpectralDecomposition> {
    let n = matrix.dim();
    if n == 0 {
        return Err(Error::Empty);
    }
    let dense = matrix.to_dense();
    let target = OFF_DIAGONAL_TARGET * dense.frobenius_norm();
    // Row-major working copies; the rotation kernel indexes them directly.
    let mut a = dense.as_slice().to_vec();
    let mut q = DenseMatrix::identity(n).as_slice().to_vec();
    let cap = ROTATIONS_PER_DIM2 * n * n;
    let mut rotations = 0usize;

    let mut off = off_diagonal_norm(&a, n);
    while off > target {
        for p in 0..n {
            for r in (p + 1)..n {
                let apr = a[p * n + r];
                let modulus = apr.norm();
                if modulus == 0.0 {
                    continue;
                }
                if rotations == cap {
                    return Err(Error::NoConvergence {
                        rotations,
                        off_diagonal: off_diagonal_norm(&a, n),
                        target,
                    });
                }
                rotations += 1;
                rotate(&mut a, &mut q, n, p, r, apr, modulus);
            }
        }
        off = off_diagonal_norm(&a, n);
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]).then(i.cmp(&j)));
    let eigenvalues = order.iter().map(|&i| diag[i]).collect();
    let eigenvectors = DenseMatrix::from_fn(n, n, |i, k| q[i * n + order[k]]);
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Applies `A ← V* A V`, `Q ← Q V` for the rotation annihilating `A[p][r]`.
fn rotate(
    a: &mut [Scalar],
    q: &mut [Scalar],
    n: usize,
    p: usize,
    r: usize,
    apr: Scalar,
    modulus: f64,
) {
    let app = a[p * n + p].re;
    let arr = a[r * n + r].re;
    // Phase that makes the pivot real and positive.
    let phase = apr.conj() / modulus;

    let theta = (arr - app) / (2.0 * modulus);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        let t = 1.0 / (theta.abs() + (theta * theta + 1.0).sqrt());
        if theta < 0.0 {
            -t
        } else {
            t
        }
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // V restricted to the (p, r) plane; V_pp = c and V_pr = s are real.
    let v_rp = phase * (-s);
    let v_rr = phase * c;

    for row in a.chunks_exact_mut(n) {
        let (xp, xr) = (row[p], row[r]);
        row[p] = xp * c + xr * v_rp;
        row[r] = xp * s + xr * v_rr;
    }
    // V* only touches rows p and r, and the result is Hermitian, so those
    // rows are the conjugates of the freshly updated columns.
    for k in 0..n {
        a[p * n + k] = a[k * n + p].conj();
        a[r * n + k] = a[k * n + r].conj();
    }
    a[p * n + r] = Scalar::new(0.0, 0.0);
    a[r * n + p] = Scalar::new(0.0, 0.0);
    a[p * n + p] = Scalar::new(app - t * modulus, 0.0);
    a[r * n + r] = Scalar::new(arr + t * modulus, 0.0);

    for row in q.chunks_exact_mut(n) {
        let (xp, xr) = (row[p], row[r]);
        row[p] = xp * c + xr * v_rp;
        row[r] = xp * s + xr * v_rr;
    }
}
