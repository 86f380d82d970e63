//! Verification laboratory for order inequalities and convergence of
//! sequences of self-adjoint operators.
//!
//! * [`hermitian`], [`eigh`], [`spectral`], [`order`], [`calculus`]: finite
//!   dimensional Hermitian spectral calculus, Loewner order, positive square
//!   root and modulus.
//! * [`band`]: exact algebra of banded operators on ℓ²(ℕ) with eventually
//!   constant diagonals (shift powers, adjoints, products).
//! * [`lab`]: residual trajectories in the norm, strong and weak topologies,
//!   verdicts, and the squeeze / dominated-product harnesses.
//! * [`generators`]: seeded random matrices, commuting families and
//!   premise-valid instances.

pub mod band;
pub mod calculus;
pub mod dense;
pub mod eigh;
pub mod error;
pub mod generators;
pub mod hermitian;
pub mod lab;
pub mod order;
pub mod spectral;

pub use band::{band_equals, BandOperator, EvSeq, FinSuppVector};
pub use calculus::{abs_op, sqrt_contraction_gap, sqrt_psd};
pub use dense::{DenseMatrix, Scalar};
pub use eigh::{eigh, SpectralDecomposition};
pub use error::{Error, Result};
pub use generators::{DecaySchedule, Seed};
pub use hermitian::HermitianMatrix;
pub use order::{is_psd, loewner_leq, OrderTolerance};
pub use spectral::{hermitian_norm, op_norm};
