//! Convergence harnesses: operator sequences, finite probe sets, residual
//! trajectories per topology, verdicts, and the squeeze checks built on them.

mod modulus;
mod products;
mod residuals;
mod sandwich;
mod weak;

pub use modulus::{modulus_squeeze, section_modulus_probe, ModulusSqueezeReport, SectionProbe};
pub use products::{
    dominated_product_check, weak_positive_product_check, DominatedProductReport, Premise,
    PremiseViolation, WeakProductReport,
};
pub use residuals::{
    classify, convergence_report, residuals, ConvergenceReport, Mode, PropertyCheck,
    ResidualTrajectory, Residuals, Verdict, DEFAULT_TOL, DEFAULT_WINDOW, STABILITY_THRESHOLD,
};
pub use sandwich::{
    check_sandwich_premises, proof_step_checks, sandwich_verify, shifted_positivity_checks,
    PremiseVerdict, ProofStepReport, SandwichInstance, SandwichReport,
};
pub use weak::{polarization_pairing, weak_quadratic_residual};

use rayon::prelude::*;

use crate::band::{BandOperator, FinSuppVector};
use crate::dense::{inner, vector_norm, DenseMatrix, Scalar};
use crate::error::{Error, Result};
use crate::generators::{unit_vector, Seed};
use crate::hermitian::HermitianMatrix;
use crate::spectral::op_norm;

/// Whether a sequence lives in a fixed finite dimension or on ℓ²(ℕ).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Dense { dim: usize },
    Band,
}

/// A bounded operator of either kind.
#[derive(Debug, Clone, PartialEq)]
pub enum Operator {
    Dense(DenseMatrix),
    Band(BandOperator),
}

impl From<DenseMatrix> for Operator {
    fn from(m: DenseMatrix) -> Self {
        Operator::Dense(m)
    }
}

impl From<&HermitianMatrix> for Operator {
    fn from(m: &HermitianMatrix) -> Self {
        Operator::Dense(m.to_dense())
    }
}

impl From<HermitianMatrix> for Operator {
    fn from(m: HermitianMatrix) -> Self {
        Operator::from(&m)
    }
}

impl From<BandOperator> for Operator {
    fn from(b: BandOperator) -> Self {
        Operator::Band(b)
    }
}

/// Operator norm together with the doubled-window comparison used for band
/// operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    /// Value on the doubled section; `None` for dense operators.
    pub doubled: Option<f64>,
    pub window: Option<usize>,
}

impl NormEstimate {
    pub fn unstable(&self) -> bool {
        self.doubled
            .is_some_and(|d| (d - self.value).abs() > STABILITY_THRESHOLD)
    }
}

/// Section size used for band norms: `max(4 · width, 16)`.
pub fn band_window(width: usize) -> usize {
    (4 * width).max(16)
}

impl Operator {
    pub fn kind(&self) -> Kind {
        match self {
            Operator::Dense(m) => Kind::Dense { dim: m.rows() },
            Operator::Band(_) => Kind::Band,
        }
    }

    pub fn is_selfadjoint(&self) -> bool {
        match self {
            Operator::Dense(m) => m.is_exactly_hermitian(),
            Operator::Band(b) => b.is_selfadjoint(),
        }
    }

    pub fn zero_like(&self) -> Operator {
        match self {
            Operator::Dense(m) => Operator::Dense(DenseMatrix::zeros(m.rows(), m.cols())),
            Operator::Band(_) => Operator::Band(BandOperator::zero()),
        }
    }

    pub fn sub(&self, other: &Operator) -> Result<Operator> {
        match (self, other) {
            (Operator::Dense(a), Operator::Dense(b)) => Ok(Operator::Dense(a.try_sub(b)?)),
            (Operator::Band(a), Operator::Band(b)) => Ok(Operator::Band(a.sub(b))),
            _ => Err(Error::KindMismatch(
                "cannot subtract dense and band operators",
            )),
        }
    }

    pub fn compose(&self, other: &Operator) -> Result<Operator> {
        match (self, other) {
            (Operator::Dense(a), Operator::Dense(b)) => Ok(Operator::Dense(a.try_mul(b)?)),
            (Operator::Band(a), Operator::Band(b)) => Ok(Operator::Band(a.compose(b))),
            _ => Err(Error::KindMismatch(
                "cannot compose dense and band operators",
            )),
        }
    }

    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        match (self, x) {
            (Operator::Dense(a), Vector::Dense(v)) => Ok(Vector::Dense(a.apply(v)?)),
            (Operator::Band(a), Vector::Sparse(v)) => Ok(Vector::Sparse(a.apply(v))),
            _ => Err(Error::KindMismatch("operator and vector kinds differ")),
        }
    }

    /// `⟨A x, y⟩`.
    pub fn pairing(&self, x: &Vector, y: &Vector) -> Result<Scalar> {
        self.apply(x)?.inner(y)
    }

    /// Operator norm; band operators use finite sections of size
    /// [`band_window`] and report the doubled-window value too.
    pub fn norm(&self) -> Result<NormEstimate> {
        match self {
            Operator::Dense(m) => Ok(NormEstimate {
                value: op_norm(m)?,
                doubled: None,
                window: None,
            }),
            Operator::Band(b) => {
                if b.is_zero() {
                    return Ok(NormEstimate {
                        value: 0.0,
                        doubled: Some(0.0),
                        window: Some(band_window(0)),
                    });
                }
                let window = band_window(b.width());
                Ok(NormEstimate {
                    value: op_norm(&b.finite_section(window))?,
                    doubled: Some(op_norm(&b.finite_section(2 * window))?),
                    window: Some(window),
                })
            }
        }
    }
}

/// A probe vector matched to the operator kind.
#[derive(Debug, Clone, PartialEq)]
pub enum Vector {
    Dense(Vec<Scalar>),
    Sparse(FinSuppVector),
}

impl Vector {
    pub fn norm(&self) -> f64 {
        match self {
            Vector::Dense(v) => vector_norm(v),
            Vector::Sparse(v) => v.norm(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Vector::Dense(v) => v.iter().all(|z| z.re == 0.0 && z.im == 0.0),
            Vector::Sparse(v) => v.is_zero(),
        }
    }

    /// `⟨self, other⟩`.
    pub fn inner(&self, other: &Vector) -> Result<Scalar> {
        match (self, other) {
            (Vector::Dense(a), Vector::Dense(b)) if a.len() == b.len() => Ok(inner(a, b)),
            (Vector::Dense(a), Vector::Dense(b)) => Err(Error::DimensionMismatch {
                expected: a.len(),
                found: b.len(),
            }),
            (Vector::Sparse(a), Vector::Sparse(b)) => Ok(a.inner(b)),
            _ => Err(Error::KindMismatch("vector kinds differ")),
        }
    }

    /// `self + c · other`.
    pub fn add_scaled(&self, c: Scalar, other: &Vector) -> Result<Vector> {
        match (self, other) {
            (Vector::Dense(a), Vector::Dense(b)) if a.len() == b.len() => Ok(Vector::Dense(
                a.iter().zip(b).map(|(x, y)| x + c * y).collect(),
            )),
            (Vector::Dense(a), Vector::Dense(b)) => Err(Error::DimensionMismatch {
                expected: a.len(),
                found: b.len(),
            }),
            (Vector::Sparse(a), Vector::Sparse(b)) => Ok(Vector::Sparse(a.add(&b.scale(c)))),
            _ => Err(Error::KindMismatch("vector kinds differ")),
        }
    }

    fn matches(&self, kind: Kind) -> bool {
        match (self, kind) {
            (Vector::Dense(v), Kind::Dense { dim }) => v.len() == dim,
            (Vector::Sparse(_), Kind::Band) => true,
            _ => false,
        }
    }
}

/// An indexed family `n ↦ A_n` for `n = 1..=horizon`.
#[derive(Debug, Clone)]
pub struct OperatorSequence {
    elements: Vec<Operator>,
    kind: Kind,
    self_adjoint: bool,
}

impl OperatorSequence {
    /// Validates a family of operators of one kind and shape.
    pub fn new(elements: Vec<Operator>) -> Result<Self> {
        let first = elements
            .first()
            .ok_or_else(|| Error::InvalidArgument("sequence horizon must be at least 1".into()))?;
        let kind = first.kind();
        for e in &elements {
            match (kind, e) {
                (Kind::Dense { dim }, Operator::Dense(m)) => {
                    if m.rows() != dim || m.cols() != dim {
                        return Err(Error::DimensionMismatch {
                            expected: dim,
                            found: m.rows().max(m.cols()),
                        });
                    }
                }
                (Kind::Band, Operator::Band(_)) => {}
                _ => {
                    return Err(Error::KindMismatch(
                        "sequence mixes dense and band elements",
                    ))
                }
            }
        }
        let self_adjoint = elements.par_iter().all(Operator::is_selfadjoint);
        Ok(Self {
            elements,
            kind,
            self_adjoint,
        })
    }

    pub fn from_hermitian(elements: impl IntoIterator<Item = HermitianMatrix>) -> Result<Self> {
        Self::new(elements.into_iter().map(Operator::from).collect())
    }

    pub fn from_dense(elements: impl IntoIterator<Item = DenseMatrix>) -> Result<Self> {
        Self::new(elements.into_iter().map(Operator::Dense).collect())
    }

    pub fn from_band(elements: impl IntoIterator<Item = BandOperator>) -> Result<Self> {
        Self::new(elements.into_iter().map(Operator::Band).collect())
    }

    /// `element(n) = f(n)` for `n = 1..=horizon`.
    pub fn from_fn(horizon: usize, f: impl Fn(usize) -> Operator) -> Result<Self> {
        Self::new((1..=horizon).map(f).collect())
    }

    pub fn horizon(&self) -> usize {
        self.elements.len()
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    /// True when every element equals its adjoint exactly.
    pub fn is_selfadjoint(&self) -> bool {
        self.self_adjoint
    }

    /// Element `n`, 1-based.
    pub fn element(&self, n: usize) -> &Operator {
        &self.elements[n - 1]
    }

    pub fn elements(&self) -> &[Operator] {
        &self.elements
    }

    /// Element `n` as a Hermitian matrix (dense kind only).
    pub fn hermitian(&self, n: usize) -> Result<HermitianMatrix> {
        match self.element(n) {
            Operator::Dense(m) => HermitianMatrix::try_from_dense(m),
            Operator::Band(_) => Err(Error::KindMismatch(
                "band element has no Hermitian matrix form",
            )),
        }
    }

    pub(crate) fn require_selfadjoint(&self) -> Result<()> {
        if self.self_adjoint {
            Ok(())
        } else {
            Err(Error::NotSelfAdjoint)
        }
    }

    pub(crate) fn require_dense(&self) -> Result<usize> {
        match self.kind {
            Kind::Dense { dim } => Ok(dim),
            Kind::Band => Err(Error::KindMismatch(
                "harness requires a finite-dimensional sequence",
            )),
        }
    }

    /// Element-wise map into a new sequence.
    pub fn map(&self, f: impl Fn(usize, &Operator) -> Result<Operator> + Sync) -> Result<Self> {
        let mapped = self
            .elements
            .par_iter()
            .enumerate()
            .map(|(i, e)| f(i + 1, e))
            .collect::<Result<Vec<_>>>()?;
        Self::new(mapped)
    }

    /// `n ↦ A_n B_n`.
    pub fn product(&self, other: &OperatorSequence) -> Result<Self> {
        if self.horizon() != other.horizon() {
            return Err(Error::DimensionMismatch {
                expected: self.horizon(),
                found: other.horizon(),
            });
        }
        self.map(|n, a| a.compose(other.element(n)))
    }
}

/// Finite probe set standing in for "every x ∈ H".
#[derive(Debug, Clone)]
pub struct TestSet {
    kind: Kind,
    vectors: Vec<Vector>,
    pairs: Vec<(usize, usize)>,
    description: String,
}

impl TestSet {
    /// Probe vectors with explicit weak-probe pairs (indices into `vectors`).
    pub fn new(
        kind: Kind,
        vectors: Vec<Vector>,
        pairs: Vec<(usize, usize)>,
        description: impl Into<String>,
    ) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::InvalidArgument(
                "test set must contain at least one vector".into(),
            ));
        }
        for v in &vectors {
            if v.is_zero() {
                return Err(Error::InvalidArgument(
                    "test vectors must be nonzero".into(),
                ));
            }
            if !v.matches(kind) {
                return Err(Error::KindMismatch(
                    "test vector does not match the sequence kind",
                ));
            }
        }
        if let Some(&(i, j)) = pairs
            .iter()
            .find(|&&(i, j)| i >= vectors.len() || j >= vectors.len())
        {
            return Err(Error::InvalidArgument(format!(
                "pair ({i}, {j}) is out of range"
            )));
        }
        Ok(Self {
            kind,
            vectors,
            pairs,
            description: description.into(),
        })
    }

    /// Weak probes over every ordered pair of vectors.
    pub fn with_all_pairs(
        kind: Kind,
        vectors: Vec<Vector>,
        description: impl Into<String>,
    ) -> Result<Self> {
        let m = vectors.len();
        let pairs = (0..m).flat_map(|i| (0..m).map(move |j| (i, j))).collect();
        Self::new(kind, vectors, pairs, description)
    }

    /// Standard basis plus 8 seeded random unit vectors.
    pub fn dense_default(dim: usize, seed: Seed) -> Result<Self> {
        let mut vectors: Vec<Vector> = (0..dim)
            .map(|i| {
                let mut e = vec![Scalar::new(0.0, 0.0); dim];
                e[i] = Scalar::new(1.0, 0.0);
                Vector::Dense(e)
            })
            .collect();
        let mut rng = seed.rng();
        vectors.extend((0..8).map(|_| Vector::Dense(unit_vector(dim, &mut rng))));
        Self::with_all_pairs(
            Kind::Dense { dim },
            vectors,
            format!(
                "standard basis of C^{dim} + 8 random unit vectors (seed {})",
                seed.0
            ),
        )
    }

    /// `e_0, …, e_8` plus two seeded random vectors supported in `[0, 16]`.
    pub fn band_default(seed: Seed) -> Result<Self> {
        let mut vectors: Vec<Vector> = (0..=8)
            .map(|i| Vector::Sparse(FinSuppVector::basis(i)))
            .collect();
        let mut rng = seed.rng();
        for _ in 0..2 {
            let v = unit_vector(17, &mut rng);
            vectors.push(Vector::Sparse(FinSuppVector::from_dense(&v)));
        }
        Self::with_all_pairs(
            Kind::Band,
            vectors,
            format!(
                "e_0..e_8 + 2 random vectors supported in [0, 16] (seed {})",
                seed.0
            ),
        )
    }

    /// Sparse probes from explicit vectors, all ordered pairs.
    pub fn band(vectors: Vec<FinSuppVector>) -> Result<Self> {
        let description = format!("{} finitely supported probes", vectors.len());
        Self::with_all_pairs(
            Kind::Band,
            vectors.into_iter().map(Vector::Sparse).collect(),
            description,
        )
    }

    /// Dense probes from explicit vectors, all ordered pairs.
    pub fn dense(dim: usize, vectors: Vec<Vec<Scalar>>) -> Result<Self> {
        let description = format!("{} dense probes in C^{dim}", vectors.len());
        Self::with_all_pairs(
            Kind::Dense { dim },
            vectors.into_iter().map(Vector::Dense).collect(),
            description,
        )
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn vectors(&self) -> &[Vector] {
        &self.vectors
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&Vector, &Vector)> {
        self.pairs
            .iter()
            .map(|&(i, j)| (&self.vectors[i], &self.vectors[j]))
    }

    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub(crate) fn require_kind(&self, kind: Kind) -> Result<()> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(Error::KindMismatch(
                "test set does not match the sequence kind",
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequences_validate_shapes() {
        let ok = OperatorSequence::from_hermitian(
            (1..=3).map(|n| HermitianMatrix::scalar(2, 1.0 / n as f64)),
        )
        .unwrap();
        assert_eq!(ok.horizon(), 3);
        assert!(ok.is_selfadjoint());
        assert_eq!(ok.kind(), Kind::Dense { dim: 2 });
        let mixed = OperatorSequence::new(vec![
            Operator::from(HermitianMatrix::identity(2)),
            Operator::Band(BandOperator::identity()),
        ]);
        assert!(matches!(mixed, Err(Error::KindMismatch(_))));
        let dims = OperatorSequence::from_hermitian([
            HermitianMatrix::identity(2),
            HermitianMatrix::identity(3),
        ]);
        assert!(matches!(dims, Err(Error::DimensionMismatch { .. })));
        assert!(OperatorSequence::new(Vec::new()).is_err());
        let shifts = OperatorSequence::from_band((1..=3).map(BandOperator::shift_power)).unwrap();
        assert!(!shifts.is_selfadjoint());
    }

    #[test]
    fn default_test_sets() {
        let d = TestSet::dense_default(4, Seed(1)).unwrap();
        assert_eq!(d.vectors().len(), 12);
        assert_eq!(d.pair_count(), 144);
        let b = TestSet::band_default(Seed(1)).unwrap();
        assert_eq!(b.vectors().len(), 11);
        for v in b.vectors() {
            if let Vector::Sparse(v) = v {
                assert!(v.max_support().unwrap() <= 16);
            }
        }
        assert!(TestSet::dense(2, vec![vec![Scalar::new(0.0, 0.0); 2]]).is_err());
        assert!(TestSet::new(
            Kind::Band,
            vec![Vector::Dense(vec![Scalar::new(1.0, 0.0)])],
            vec![],
            ""
        )
        .is_err());
    }

    #[test]
    fn band_norm_estimate_flags_drift() {
        let s = BandOperator::shift_power(2);
        let est = Operator::Band(s.adjoint()).norm().unwrap();
        assert_eq!(est.window, Some(16));
        assert!((est.value - 1.0).abs() < 1e-14);
        assert!(!est.unstable());
        let a = Operator::Band(s.add(&s.adjoint())).norm().unwrap();
        assert!(a.value <= 2.0);
    }
}
