//! Shared fixtures for the criterion benchmarks.

use opseq::generators::rand_hermitian;
use opseq::{BandOperator, HermitianMatrix, Seed};

/// Seeded Hermitian input of the given dimension with unit norm.
pub fn hermitian_fixture(dim: usize) -> HermitianMatrix {
    rand_hermitian(dim, Seed(dim as u64), 1.0).expect("dim >= 1")
}

/// `Sⁿ + (Sⁿ)*`.
pub fn symmetrized_shift(n: usize) -> BandOperator {
    let s = BandOperator::shift_power(n);
    s.add(&s.adjoint())
}
