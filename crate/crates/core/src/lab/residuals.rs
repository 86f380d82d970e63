//! Residual trajectories per topology and their finite-horizon verdicts.

use std::fmt;

use rayon::prelude::*;

use super::{Kind, Operator, OperatorSequence, TestSet};
use crate::error::{Error, Result};

/// Default verdict tolerance.
pub const DEFAULT_TOL: f64 = 1e-6;

/// Default number of trailing residuals inspected by [`classify`].
pub const DEFAULT_WINDOW: usize = 5;

/// Doubled-window drift above which a band section value is flagged.
pub const STABILITY_THRESHOLD: f64 = 1e-3;

/// Operator topology.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Norm,
    Strong,
    Weak,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Norm, Mode::Strong, Mode::Weak];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Norm => "norm",
            Mode::Strong => "strong",
            Mode::Weak => "weak",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Finite-horizon reading of "converges".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Convergent,
    Stalled,
    Undetermined,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Convergent => "convergent",
            Verdict::Stalled => "stalled",
            Verdict::Undetermined => "undetermined",
        })
    }
}

/// Residuals `r_n`, `n = 1..=horizon`, in one topology.
///
/// Norm: `‖A_n − L‖`. Strong: `max_x ‖(A_n − L)x‖`. Weak:
/// `max_{(x,y)} |⟨(A_n − L)x, y⟩|`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualTrajectory {
    pub mode: Mode,
    pub values: Vec<f64>,
    /// Per-index doubled-window instability (band norms only; otherwise all false).
    pub unstable: Vec<bool>,
}

impl ResidualTrajectory {
    pub fn new(mode: Mode, values: Vec<f64>) -> Self {
        let unstable = vec![false; values.len()];
        Self {
            mode,
            values,
            unstable,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Residual at 1-based index `n`.
    pub fn at(&self, n: usize) -> f64 {
        self.values[n - 1]
    }

    pub fn any_unstable(&self) -> bool {
        self.unstable.iter().any(|&u| u)
    }
}

/// The three trajectories of one sequence against one limit.
#[derive(Debug, Clone, PartialEq)]
pub struct Residuals {
    pub norm: ResidualTrajectory,
    pub strong: ResidualTrajectory,
    pub weak: ResidualTrajectory,
}

impl Residuals {
    pub fn get(&self, mode: Mode) -> &ResidualTrajectory {
        match mode {
            Mode::Norm => &self.norm,
            Mode::Strong => &self.strong,
            Mode::Weak => &self.weak,
        }
    }

    pub fn trajectories(&self) -> [&ResidualTrajectory; 3] {
        [&self.norm, &self.strong, &self.weak]
    }
}

fn check_limit(seq: &OperatorSequence, limit: &Operator, tests: &TestSet) -> Result<()> {
    tests.require_kind(seq.kind())?;
    match (seq.kind(), limit.kind()) {
        (Kind::Dense { dim }, Kind::Dense { dim: d }) if dim == d => Ok(()),
        (Kind::Dense { dim }, Kind::Dense { dim: d }) => Err(Error::DimensionMismatch {
            expected: dim,
            found: d,
        }),
        (Kind::Band, Kind::Band) => Ok(()),
        _ => Err(Error::KindMismatch(
            "limit does not match the sequence kind",
        )),
    }
}

/// Norm, strong and weak residuals of `seq` against `limit`, probed on `tests`.
pub fn residuals(seq: &OperatorSequence, limit: &Operator, tests: &TestSet) -> Result<Residuals> {
    check_limit(seq, limit, tests)?;
    let rows = seq
        .elements()
        .par_iter()
        .map(|a| {
            let diff = a.sub(limit)?;
            let norm = diff.norm()?;
            let mut strong: f64 = 0.0;
            for x in tests.vectors() {
                strong = strong.max(diff.apply(x)?.norm());
            }
            let mut weak: f64 = 0.0;
            for (x, y) in tests.pairs() {
                weak = weak.max(diff.pairing(x, y)?.norm());
            }
            Ok((norm.value, norm.unstable(), strong, weak))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut norm = ResidualTrajectory::new(Mode::Norm, rows.iter().map(|r| r.0).collect());
    norm.unstable = rows.iter().map(|r| r.1).collect();
    Ok(Residuals {
        norm,
        strong: ResidualTrajectory::new(Mode::Strong, rows.iter().map(|r| r.2).collect()),
        weak: ResidualTrajectory::new(Mode::Weak, rows.iter().map(|r| r.3).collect()),
    })
}

/// Verdict on the last `k` residuals: convergent if all are `≤ tol`,
/// stalled if all are `≥ 10·tol` and within a factor 2 of each other.
pub fn classify(values: &[f64], tol: f64, k: usize) -> Verdict {
    if k == 0 || k > values.len() {
        return Verdict::Undetermined;
    }
    let tail = &values[values.len() - k..];
    if tail.iter().all(|&v| v <= tol) {
        return Verdict::Convergent;
    }
    let min = tail.iter().copied().fold(f64::INFINITY, f64::min);
    let max = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if min >= 10.0 * tol && max <= 2.0 * min {
        Verdict::Stalled
    } else {
        Verdict::Undetermined
    }
}

/// Residual trajectories plus verdicts and the parameters that produced them.
#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub residuals: Residuals,
    pub tol: f64,
    pub k: usize,
    pub probes: String,
}

impl ConvergenceReport {
    pub fn verdict(&self, mode: Mode) -> Verdict {
        classify(&self.residuals.get(mode).values, self.tol, self.k)
    }

    pub fn converges(&self, mode: Mode) -> bool {
        self.verdict(mode) == Verdict::Convergent
    }
}

pub fn convergence_report(
    seq: &OperatorSequence,
    limit: &Operator,
    tests: &TestSet,
    tol: f64,
    k: usize,
) -> Result<ConvergenceReport> {
    Ok(ConvergenceReport {
        residuals: residuals(seq, limit, tests)?,
        tol,
        k,
        probes: tests.description().to_string(),
    })
}

/// One named property evaluated over a harness run.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyCheck {
    pub name: String,
    pub passed: bool,
    pub violations: usize,
    /// Smallest index (or trial) at which the property failed.
    pub first_violation: Option<usize>,
    /// Largest amount by which an inequality was exceeded.
    pub worst_excess: f64,
    /// Reported-only properties never affect the pass/fail status of a run.
    pub asserted: bool,
}

impl PropertyCheck {
    /// Folds `(index, excess)` samples; a positive excess is a violation.
    pub fn from_excess(
        name: impl Into<String>,
        samples: impl IntoIterator<Item = (usize, f64)>,
    ) -> Self {
        let mut violations = 0;
        let mut first = None;
        let mut worst: f64 = 0.0;
        for (index, excess) in samples {
            if excess > 0.0 || excess.is_nan() {
                violations += 1;
                first = Some(first.map_or(index, |f: usize| f.min(index)));
                worst = worst.max(if excess.is_nan() {
                    f64::INFINITY
                } else {
                    excess
                });
            }
        }
        Self {
            name: name.into(),
            passed: violations == 0,
            violations,
            first_violation: first,
            worst_excess: worst,
            asserted: true,
        }
    }

    /// Folds `(index, holds)` samples.
    pub fn from_flags(
        name: impl Into<String>,
        samples: impl IntoIterator<Item = (usize, bool)>,
    ) -> Self {
        Self::from_excess(
            name,
            samples
                .into_iter()
                .map(|(i, ok)| (i, if ok { 0.0 } else { 1.0 })),
        )
    }

    pub fn single(name: impl Into<String>, holds: bool) -> Self {
        Self::from_flags(name, [(0, holds)])
    }

    pub fn reported_only(mut self) -> Self {
        self.asserted = false;
        self
    }

    /// True unless this is an asserted property that failed.
    pub fn ok(&self) -> bool {
        self.passed || !self.asserted
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::band::{BandOperator, FinSuppVector};
    use crate::hermitian::HermitianMatrix;

    #[test]
    fn classify_examples() {
        let v = [1.0, 0.5, 0.1, 1e-9, 1e-9, 1e-9];
        assert_eq!(classify(&v, 1e-6, 3), Verdict::Convergent);
        assert_eq!(classify(&[1.0; 10], 1e-6, 5), Verdict::Stalled);
        // Slow but steady decay is not a plateau.
        let slow: Vec<f64> = (1..=10).map(|n| 1.0 / (n * n * n) as f64).collect();
        assert_eq!(classify(&slow, 1e-6, 8), Verdict::Undetermined);
        assert_eq!(classify(&[0.0; 3], 1e-6, 4), Verdict::Undetermined);
    }

    #[test]
    fn scalar_decay_norm_trajectory() {
        let seq = OperatorSequence::from_hermitian(
            (1..=6).map(|n| HermitianMatrix::scalar(4, 1.0 / n as f64)),
        )
        .unwrap();
        let tests = TestSet::dense_default(4, crate::generators::Seed(0)).unwrap();
        let r = residuals(&seq, &Operator::from(HermitianMatrix::zeros(4)), &tests).unwrap();
        let expected: Vec<f64> = (1..=6).map(|n| 1.0 / n as f64).collect();
        assert_eq!(r.norm.values, expected);
    }

    #[test]
    fn shift_powers_weak_but_not_strong() {
        let seq = OperatorSequence::from_band((1..=12).map(BandOperator::shift_power)).unwrap();
        let tests = TestSet::band(vec![FinSuppVector::basis(0)]).unwrap();
        let r = residuals(&seq, &Operator::Band(BandOperator::zero()), &tests).unwrap();
        assert!(r.weak.values.iter().all(|&v| v == 0.0));
        assert!(r.strong.values.iter().all(|&v| v == 1.0));
        assert_eq!(
            classify(&r.weak.values, DEFAULT_TOL, DEFAULT_WINDOW),
            Verdict::Convergent
        );
        assert_eq!(
            classify(&r.strong.values, DEFAULT_TOL, DEFAULT_WINDOW),
            Verdict::Stalled
        );
    }

    #[test]
    fn backward_shift_annihilates_supports() {
        let seq =
            OperatorSequence::from_band((1..=10).map(|n| BandOperator::shift_power(n).adjoint()))
                .unwrap();
        let probe = FinSuppVector::from_pairs(
            (0..=5).map(|i| (i, crate::dense::Scalar::new(1.0 + i as f64, 0.5))),
        );
        let tests = TestSet::band(vec![probe]).unwrap();
        let r = residuals(&seq, &Operator::Band(BandOperator::zero()), &tests).unwrap();
        for n in 6..=10 {
            assert_eq!(r.strong.at(n), 0.0);
        }
        assert!(r.strong.at(5) > 0.0);
        for n in 1..=10 {
            assert!((r.norm.at(n) - 1.0).abs() < 1e-14);
        }
        assert!(!r.norm.any_unstable());
    }

    #[test]
    fn kind_mismatch_is_rejected() {
        let seq = OperatorSequence::from_hermitian([HermitianMatrix::identity(2)]).unwrap();
        let tests = TestSet::dense_default(2, crate::generators::Seed(0)).unwrap();
        assert!(residuals(&seq, &Operator::Band(BandOperator::zero()), &tests).is_err());
        assert!(residuals(&seq, &Operator::from(HermitianMatrix::zeros(3)), &tests).is_err());
    }

    #[test]
    fn property_check_folding() {
        let c = PropertyCheck::from_excess("bound", [(1, -1.0), (4, 0.5), (2, 0.25)]);
        assert!(!c.passed);
        assert_eq!(c.violations, 2);
        assert_eq!(c.first_violation, Some(2));
        assert_eq!(c.worst_excess, 0.5);
        assert!(c.clone().reported_only().ok());
    }
}
