//! Modulus squeeze (`|A_n| → 0 ⟹ A_n → 0`) and finite-section probes of
//! `|A|` for band operators.

use rayon::prelude::*;

use super::residuals::{
    classify, convergence_report, ConvergenceReport, Mode, PropertyCheck, ResidualTrajectory,
};
use super::{band_window, Kind, Operator, OperatorSequence, TestSet, Vector};
use crate::band::{BandOperator, EvSeq, FinSuppVector};
use crate::calculus::abs_op;
use crate::dense::{inner, Scalar};
use crate::error::{Error, Result};
use crate::lab::residuals::STABILITY_THRESHOLD;

/// `⟨|P_N A P_N| x, y⟩`, evaluated block by block on the section's
/// sparsity components; only blocks meeting both supports contribute.
fn section_modulus_pairing(
    a: &BandOperator,
    window: usize,
    x: &FinSuppVector,
    y: &FinSuppVector,
) -> Result<Scalar> {
    let section = a.finite_section(window);
    let mut acc = Scalar::new(0.0, 0.0);
    for block in section.diagonal_blocks() {
        let xb: Vec<Scalar> = block.iter().map(|&i| x.get(i)).collect();
        let yb: Vec<Scalar> = block.iter().map(|&i| y.get(i)).collect();
        let zero = Scalar::new(0.0, 0.0);
        if xb.iter().all(|&z| z == zero) || yb.iter().all(|&z| z == zero) {
            continue;
        }
        let modulus = abs_op(&section.principal_submatrix(&block))?;
        acc += inner(&modulus.apply(&xb)?, &yb);
    }
    Ok(acc)
}

/// `⟨|P_N A P_N| x, x⟩` and its doubled-window counterpart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionProbe {
    pub window: usize,
    pub value: f64,
    pub doubled: f64,
}

impl SectionProbe {
    pub fn drift(&self) -> f64 {
        (self.doubled - self.value).abs()
    }

    pub fn unstable(&self) -> bool {
        self.drift() > STABILITY_THRESHOLD
    }
}

/// Quadratic form of the modulus of the `N × N` section of a self-adjoint
/// band operator. Requires `N ≥ 4 · width`.
pub fn section_modulus_probe(
    a: &BandOperator,
    window: usize,
    x: &FinSuppVector,
) -> Result<SectionProbe> {
    let required = 4 * a.width();
    if window < required || window == 0 {
        return Err(Error::WindowTooSmall {
            window,
            required: required.max(1),
        });
    }
    if !a.is_selfadjoint() {
        return Err(Error::NotSelfAdjoint);
    }
    Ok(SectionProbe {
        window,
        value: section_modulus_pairing(a, window, x, x)?.re,
        doubled: section_modulus_pairing(a, 2 * window, x, x)?.re,
    })
}

/// `|A|` as a band operator when `A*A` is diagonal with nonnegative real
/// entries; `None` otherwise.
fn exact_band_modulus(a: &BandOperator) -> Option<BandOperator> {
    let gram = a.adjoint().compose(a);
    if gram.is_zero() {
        return Some(BandOperator::zero());
    }
    if gram.width() != 0 {
        return None;
    }
    let d = gram.diagonal(0)?;
    let root = |z: &Scalar| (z.im == 0.0 && z.re >= 0.0).then(|| Scalar::new(z.re.sqrt(), 0.0));
    let head = d.head().iter().map(root).collect::<Option<Vec<_>>>()?;
    let tail = root(&d.tail())?;
    Some(BandOperator::from_diagonals([(0, EvSeq::new(head, tail))]))
}

/// Outcome of [`modulus_squeeze`].
#[derive(Debug, Clone)]
pub struct ModulusSqueezeReport {
    pub sequence: ConvergenceReport,
    /// Trajectories of `|A_n|` against 0, for the modes that could be evaluated.
    pub modulus: Vec<ResidualTrajectory>,
    /// Whether `|A_n|` was computed exactly (dense spectrally, or band via a
    /// diagonal `A_n* A_n`) rather than on finite sections.
    pub modulus_exact: bool,
    pub checks: Vec<PropertyCheck>,
}

impl ModulusSqueezeReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(PropertyCheck::ok)
    }

    pub fn modulus_trajectory(&self, mode: Mode) -> Option<&ResidualTrajectory> {
        self.modulus.iter().find(|t| t.mode == mode)
    }
}

/// Compares `|A_n| → 0` with `A_n → 0` in every evaluable mode.
///
/// The implication `|A_n| → 0 ⟹ A_n → 0` is asserted; the converse is only
/// reported. Band sequences whose moduli are not exactly representable are
/// probed in the weak mode through finite sections.
pub fn modulus_squeeze(
    seq: &OperatorSequence,
    tests: &TestSet,
    tol: f64,
    k: usize,
) -> Result<ModulusSqueezeReport> {
    tests.require_kind(seq.kind())?;
    let zero = seq.element(1).zero_like();
    let sequence = convergence_report(seq, &zero, tests, tol, k)?;

    let exact = match seq.kind() {
        Kind::Dense { .. } => Some(seq.map(|_, a| match a {
            Operator::Dense(m) => Ok(Operator::from(abs_op(m)?)),
            Operator::Band(_) => unreachable!("dense sequence"),
        })?),
        Kind::Band => {
            let moduli: Option<Vec<BandOperator>> = seq
                .elements()
                .par_iter()
                .map(|a| match a {
                    Operator::Band(b) => exact_band_modulus(b),
                    Operator::Dense(_) => None,
                })
                .collect();
            moduli.map(OperatorSequence::from_band).transpose()?
        }
    };

    let (modulus, modulus_exact) = match exact {
        Some(abs_seq) => {
            let r = convergence_report(&abs_seq, &zero, tests, tol, k)?.residuals;
            (vec![r.norm, r.strong, r.weak], true)
        }
        None => {
            seq.require_selfadjoint()?;
            let reach = tests
                .vectors()
                .iter()
                .filter_map(|v| match v {
                    Vector::Sparse(s) => s.max_support(),
                    Vector::Dense(_) => None,
                })
                .max()
                .unwrap_or(0);
            let rows = seq
                .elements()
                .par_iter()
                .map(|a| {
                    let Operator::Band(b) = a else {
                        unreachable!("band sequence")
                    };
                    let window = band_window(b.width()).max(reach + 1);
                    let mut worst: f64 = 0.0;
                    let mut drift: f64 = 0.0;
                    for (x, y) in tests.pairs() {
                        let (Vector::Sparse(x), Vector::Sparse(y)) = (x, y) else {
                            unreachable!("band probes")
                        };
                        let v = section_modulus_pairing(b, window, x, y)?;
                        let d = section_modulus_pairing(b, 2 * window, x, y)?;
                        worst = worst.max(v.norm());
                        drift = drift.max((v - d).norm());
                    }
                    Ok((worst, drift > STABILITY_THRESHOLD))
                })
                .collect::<Result<Vec<_>>>()?;
            let mut weak = ResidualTrajectory::new(Mode::Weak, rows.iter().map(|r| r.0).collect());
            weak.unstable = rows.iter().map(|r| r.1).collect();
            (vec![weak], false)
        }
    };

    let mut checks = Vec::new();
    for traj in &modulus {
        let mode = traj.mode;
        let abs_conv = classify(&traj.values, tol, k) == super::Verdict::Convergent;
        let seq_conv = sequence.converges(mode);
        checks.push(PropertyCheck::single(
            format!("modulus squeeze ({mode})"),
            !abs_conv || seq_conv,
        ));
        checks.push(
            PropertyCheck::single(format!("converse ({mode})"), !seq_conv || abs_conv)
                .reported_only(),
        );
    }
    Ok(ModulusSqueezeReport {
        sequence,
        modulus,
        modulus_exact,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{rand_hermitian, Seed};
    use crate::lab::Verdict;

    fn a_n(n: usize) -> BandOperator {
        let s = BandOperator::shift_power(n);
        s.add(&s.adjoint())
    }

    #[test]
    fn probe_examples() {
        let x = FinSuppVector::from_pairs([(0, Scalar::new(1.0, 0.0)), (2, Scalar::new(0.0, 2.0))]);
        let p = section_modulus_probe(&BandOperator::identity(), 8, &x).unwrap();
        assert!((p.value - 5.0).abs() < 1e-14);
        let minus_two = BandOperator::from_diagonals([(
            0,
            EvSeq::new(vec![Scalar::new(-2.0, 0.0)], Scalar::new(0.0, 0.0)),
        )]);
        let p = section_modulus_probe(&minus_two, 4, &FinSuppVector::basis(0)).unwrap();
        assert!((p.value - 2.0).abs() < 1e-14);
        assert!(!p.unstable());
    }

    #[test]
    fn probe_preconditions() {
        assert_eq!(
            section_modulus_probe(&a_n(3), 11, &FinSuppVector::basis(0)),
            Err(Error::WindowTooSmall {
                window: 11,
                required: 12
            })
        );
        assert_eq!(
            section_modulus_probe(&BandOperator::shift_power(1), 8, &FinSuppVector::basis(0)),
            Err(Error::NotSelfAdjoint)
        );
    }

    #[test]
    fn symmetrized_shift_probe_stays_away_from_zero() {
        for n in [1, 2, 7, 16] {
            let p = section_modulus_probe(&a_n(n), 4 * n, &FinSuppVector::basis(0)).unwrap();
            assert!(p.value >= 0.5 - 1e-6, "n = {n}: {p:?}");
        }
    }

    #[test]
    fn alternating_scalar_multiples_squeeze() {
        let h = rand_hermitian(4, Seed(6), 1.0).unwrap();
        let seq = OperatorSequence::from_hermitian((1..=60).map(|n| {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            h.scale(sign / (n * n * n * n) as f64)
        }))
        .unwrap();
        let tests = TestSet::dense_default(4, Seed(1)).unwrap();
        let r = modulus_squeeze(&seq, &tests, 1e-6, 5).unwrap();
        assert!(r.modulus_exact);
        assert!(r.passed());
        assert!(r.sequence.converges(Mode::Norm));
        assert_eq!(
            classify(&r.modulus_trajectory(Mode::Norm).unwrap().values, 1e-6, 5),
            Verdict::Convergent
        );
    }

    #[test]
    fn shift_powers_break_the_converse() {
        let seq = OperatorSequence::from_band((1..=12).map(BandOperator::shift_power)).unwrap();
        let tests = TestSet::band(vec![FinSuppVector::basis(0), FinSuppVector::basis(3)]).unwrap();
        let r = modulus_squeeze(&seq, &tests, 1e-6, 5).unwrap();
        assert!(r.modulus_exact);
        assert!(r.passed());
        let weak = r.modulus_trajectory(Mode::Weak).unwrap();
        assert!(weak.values.iter().all(|&v| v == 1.0));
        let converse = r
            .checks
            .iter()
            .find(|c| c.name == "converse (weak)")
            .unwrap();
        assert!(!converse.passed && !converse.asserted);
    }

    #[test]
    fn symmetrized_shift_modulus_via_sections() {
        let seq = OperatorSequence::from_band((1..=10).map(a_n)).unwrap();
        let tests = TestSet::band(vec![FinSuppVector::basis(0)]).unwrap();
        let r = modulus_squeeze(&seq, &tests, 1e-6, 5).unwrap();
        assert!(!r.modulus_exact);
        let weak = r.modulus_trajectory(Mode::Weak).unwrap();
        assert!(weak.values.iter().all(|&v| v >= 0.5));
        assert!(r.sequence.converges(Mode::Weak));
    }
}
