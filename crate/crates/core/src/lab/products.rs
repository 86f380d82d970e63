//! Products `A_n B_n` of sequences under domination and commutation premises.

use std::fmt;

use rayon::prelude::*;

use super::residuals::{convergence_report, ConvergenceReport, Mode, PropertyCheck};
use super::{band_window, Kind, Operator, OperatorSequence, TestSet};
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;
use crate::order::{loewner_margin, psd_margin, OrderTolerance, PsdMargin};
use crate::spectral::{hermitian_norm, op_norm, BlockSpectrum};

/// Premise of the product harnesses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Premise {
    /// `B_n ⪰ 0` (or `A_n ⪰ 0` for the positive-product check).
    Positive,
    /// `|A_n| ⪯ M`
    ModulusDominated,
    /// `A_n B_n = B_n A_n`
    Commute,
    /// `B_n M = M B_n`
    CommuteWithBound,
}

impl fmt::Display for Premise {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Premise::Positive => "positivity",
            Premise::ModulusDominated => "|A_n| <= M",
            Premise::Commute => "A_n B_n = B_n A_n",
            Premise::CommuteWithBound => "B_n M = M B_n",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PremiseViolation {
    pub n: usize,
    pub premise: Premise,
    /// Size of the defect: a negative eigenvalue or a commutator norm.
    pub amount: f64,
}

fn check_pair(a: &OperatorSequence, b: &OperatorSequence, tests: &TestSet) -> Result<()> {
    if a.kind() != b.kind() {
        return Err(Error::KindMismatch(
            "product sequences differ in kind or dimension",
        ));
    }
    if a.horizon() != b.horizon() {
        return Err(Error::DimensionMismatch {
            expected: a.horizon(),
            found: b.horizon(),
        });
    }
    tests.require_kind(a.kind())
}

/// `‖AB − BA‖`, or its Frobenius norm when that already lies below `limit`.
fn commutator_norm(a: &DenseMatrix, b: &DenseMatrix, limit: f64) -> Result<f64> {
    let gap = &(a * b) - &(b * a);
    let frobenius = gap.frobenius_norm();
    if frobenius <= limit {
        return Ok(frobenius);
    }
    op_norm(&gap)
}

/// Outcome of [`dominated_product_check`].
#[derive(Debug, Clone)]
pub struct DominatedProductReport {
    pub violations: Vec<PremiseViolation>,
    pub product: ConvergenceReport,
    pub factor: ConvergenceReport,
    /// Per-index `(‖A_n B_n‖, ‖M B_n‖)`.
    pub norms: Vec<(f64, f64)>,
    pub checks: Vec<PropertyCheck>,
}

impl DominatedProductReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.checks.iter().all(PropertyCheck::ok)
    }

    pub fn first_violation(&self) -> Option<&PremiseViolation> {
        self.violations.first()
    }
}

/// Dominated products: with `B_n ⪰ 0`, `|A_n| ⪯ M`, `A_n B_n = B_n A_n` and
/// `B_n M = M B_n` checked at every index, verifies the envelope
/// `−M B_n ⪯ A_n B_n ⪯ M B_n` and that `A_n B_n → 0` in each mode in which
/// `B_n → 0`. The `B_n M` premise is skipped when `M` is a multiple of `I`.
pub fn dominated_product_check(
    a_seq: &OperatorSequence,
    b_seq: &OperatorSequence,
    bound: &HermitianMatrix,
    tests: &TestSet,
    tol: f64,
    k: usize,
) -> Result<DominatedProductReport> {
    check_pair(a_seq, b_seq, tests)?;
    let dim = a_seq.require_dense()?;
    if bound.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: bound.dim(),
        });
    }
    a_seq.require_selfadjoint()?;
    let m = bound.to_dense();
    let scalar_bound = m.scalar_multiple_of_identity();
    let m_norm = hermitian_norm(bound)?;
    let order = OrderTolerance::default();

    struct Row {
        violations: Vec<PremiseViolation>,
        envelope_excess: f64,
        norm_excess: f64,
        norms: (f64, f64),
    }

    let rows = (1..=a_seq.horizon())
        .into_par_iter()
        .map(|n| {
            let a = a_seq.hermitian(n)?;
            let b = b_seq.hermitian(n)?;
            let (ad, bd) = (a.to_dense(), b.to_dense());
            let (a_spec, b_spec) = (BlockSpectrum::new(&a)?, BlockSpectrum::new(&b)?);
            let (a_norm, b_norm) = (a_spec.spectral_radius(), b_spec.spectral_radius());
            let mut violations = Vec::new();

            let pos = PsdMargin::of_spectrum(&b_spec, order);
            if !pos.holds() {
                violations.push(PremiseViolation {
                    n,
                    premise: Premise::Positive,
                    amount: pos.min_eigenvalue,
                });
            }
            let dom = match scalar_bound {
                // cI − |A| has eigenvalues c − |λ|.
                Some(c) => {
                    let gaps: Vec<f64> = a_spec.eigenvalues().iter().map(|l| c - l.abs()).collect();
                    let norm = gaps.iter().fold(0.0f64, |m, g| m.max(g.abs()));
                    PsdMargin {
                        min_eigenvalue: gaps.iter().copied().fold(f64::INFINITY, f64::min),
                        norm,
                        slack: order.slack(norm),
                    }
                }
                None => loewner_margin(&a_spec.map(f64::abs), bound, order)?,
            };
            if !dom.holds() {
                violations.push(PremiseViolation {
                    n,
                    premise: Premise::ModulusDominated,
                    amount: dom.min_eigenvalue,
                });
            }
            let comm_limit = 1e-10 * (a_norm * b_norm).max(1.0);
            let comm = commutator_norm(&ad, &bd, comm_limit)?;
            if comm > comm_limit {
                violations.push(PremiseViolation {
                    n,
                    premise: Premise::Commute,
                    amount: comm,
                });
            }
            if scalar_bound.is_none() {
                let limit = 1e-10 * (b_norm * m_norm).max(1.0);
                let comm = commutator_norm(&bd, &m, limit)?;
                if comm > limit {
                    violations.push(PremiseViolation {
                        n,
                        premise: Premise::CommuteWithBound,
                        amount: comm,
                    });
                }
            }

            let product = &ad * &bd;
            let envelope = &m * &bd;
            let scale = (m_norm * b_norm).max(1.0);
            let cone = OrderTolerance::absolute(1e-9 * scale);
            let upper = psd_margin(
                &HermitianMatrix::hermitian_part(&(&envelope - &product))?,
                cone,
            )?;
            let lower = psd_margin(
                &HermitianMatrix::hermitian_part(&(&envelope + &product))?,
                cone,
            )?;
            let envelope_norm = match scalar_bound {
                Some(c) => c.abs() * b_norm,
                None => op_norm(&envelope)?,
            };
            let norms = (op_norm(&product)?, envelope_norm);
            Ok(Row {
                violations,
                envelope_excess: upper.excess().max(lower.excess()),
                norm_excess: norms.0 - norms.1 - 1e-8 * scale,
                norms,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let product_seq = a_seq.product(b_seq)?;
    let zero = a_seq.element(1).zero_like();
    let product = convergence_report(&product_seq, &zero, tests, tol, k)?;
    let factor = convergence_report(b_seq, &zero, tests, tol, k)?;

    let mut checks = vec![
        PropertyCheck::from_excess(
            "envelope -MB <= AB <= MB",
            rows.iter()
                .enumerate()
                .map(|(i, r)| (i + 1, r.envelope_excess)),
        ),
        PropertyCheck::from_excess(
            "product norm bound",
            rows.iter().enumerate().map(|(i, r)| (i + 1, r.norm_excess)),
        ),
    ];
    for mode in Mode::ALL {
        checks.push(PropertyCheck::single(
            format!("product convergence ({mode})"),
            !factor.converges(mode) || product.converges(mode),
        ));
    }
    Ok(DominatedProductReport {
        violations: rows
            .iter()
            .flat_map(|r| r.violations.iter().copied())
            .collect(),
        norms: rows.iter().map(|r| r.norms).collect(),
        product,
        factor,
        checks,
    })
}

/// Outcome of [`weak_positive_product_check`].
#[derive(Debug, Clone)]
pub struct WeakProductReport {
    pub violations: Vec<PremiseViolation>,
    /// `max_n ‖A_n‖` over the horizon (dense kind), so that `0 ⪯ A_n ⪯ αI`.
    pub alpha: Option<f64>,
    pub a: ConvergenceReport,
    pub b: ConvergenceReport,
    pub product: ConvergenceReport,
    pub checks: Vec<PropertyCheck>,
}

impl WeakProductReport {
    pub fn premises_hold(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(PropertyCheck::ok)
    }
}

/// Positive commuting factors: checks `A_n, B_n ⪰ 0` and `A_n B_n = B_n A_n`,
/// then asserts `A_n B_n → 0` weakly whenever both factors do. Band factors
/// are tested for positivity on finite sections and for commutation exactly.
pub fn weak_positive_product_check(
    a_seq: &OperatorSequence,
    b_seq: &OperatorSequence,
    tests: &TestSet,
    tol: f64,
    k: usize,
) -> Result<WeakProductReport> {
    check_pair(a_seq, b_seq, tests)?;
    let order = OrderTolerance::default();
    let positivity = |op: &Operator| -> Result<f64> {
        match op {
            Operator::Dense(m) => {
                Ok(psd_margin(&HermitianMatrix::try_from_dense(m)?, order)?.min_eigenvalue)
            }
            Operator::Band(b) => {
                let section = b.hermitian_section(band_window(b.width()))?;
                Ok(psd_margin(&section, order)?.min_eigenvalue)
            }
        }
    };

    let rows = (1..=a_seq.horizon())
        .into_par_iter()
        .map(|n| {
            let (a, b) = (a_seq.element(n), b_seq.element(n));
            let mut violations = Vec::new();
            for op in [a, b] {
                let min = positivity(op)?;
                let slack = order.slack(op.norm()?.value);
                if min < -slack {
                    violations.push(PremiseViolation {
                        n,
                        premise: Premise::Positive,
                        amount: min,
                    });
                }
            }
            let (comm, scale) = match (a, b) {
                (Operator::Dense(a), Operator::Dense(b)) => {
                    let scale = (op_norm(a)? * op_norm(b)?).max(1.0);
                    (commutator_norm(a, b, 1e-10 * scale)?, scale)
                }
                (Operator::Band(a), Operator::Band(b)) => {
                    let gap = a.compose(b).sub(&b.compose(a));
                    (if gap.is_zero() { 0.0 } else { f64::INFINITY }, 1.0)
                }
                _ => unreachable!("kinds checked"),
            };
            if comm > 1e-10 * scale {
                violations.push(PremiseViolation {
                    n,
                    premise: Premise::Commute,
                    amount: comm,
                });
            }
            let a_norm = match a {
                Operator::Dense(m) => Some(op_norm(m)?),
                Operator::Band(_) => None,
            };
            Ok((violations, a_norm))
        })
        .collect::<Result<Vec<_>>>()?;

    let violations: Vec<PremiseViolation> = rows.iter().flat_map(|r| r.0.iter().copied()).collect();
    let alpha = match a_seq.kind() {
        Kind::Dense { .. } => Some(rows.iter().filter_map(|r| r.1).fold(0.0, f64::max)),
        Kind::Band => None,
    };
    let zero = a_seq.element(1).zero_like();
    let a = convergence_report(a_seq, &zero, tests, tol, k)?;
    let b = convergence_report(b_seq, &zero, tests, tol, k)?;
    let product = convergence_report(&a_seq.product(b_seq)?, &zero, tests, tol, k)?;

    let mut checks = vec![PropertyCheck::from_flags(
        "positivity and commutation premises",
        (1..=a_seq.horizon()).map(|n| (n, !violations.iter().any(|v| v.n == n))),
    )
    .reported_only()];
    let conclusion = !(violations.is_empty() && a.converges(Mode::Weak) && b.converges(Mode::Weak))
        || product.converges(Mode::Weak);
    checks.push(PropertyCheck::single(
        "weak product convergence",
        conclusion,
    ));
    Ok(WeakProductReport {
        violations,
        alpha,
        a,
        b,
        product,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::band::{BandOperator, FinSuppVector};
    use crate::generators::{CommonEigenbasis, Seed};

    #[test]
    fn vanishing_factor_gives_zero_product() {
        let basis = CommonEigenbasis::random(4, Seed(3)).unwrap();
        let a = OperatorSequence::from_hermitian(
            (0..10).map(|_| basis.compose(&[1.0, -1.0, 1.0, -1.0]).unwrap()),
        )
        .unwrap();
        let b =
            OperatorSequence::from_hermitian((0..10).map(|_| HermitianMatrix::zeros(4))).unwrap();
        let tests = TestSet::dense_default(4, Seed(0)).unwrap();
        let r = dominated_product_check(&a, &b, &HermitianMatrix::identity(4), &tests, 1e-6, 5)
            .unwrap();
        assert!(r.passed(), "{:?} {:?}", r.violations, r.checks);
        assert!(r.norms.iter().all(|&(p, _)| p == 0.0));
    }

    #[test]
    fn planted_noncommuting_factor() {
        let basis = CommonEigenbasis::random(3, Seed(8)).unwrap();
        let a: Vec<HermitianMatrix> = (0..10)
            .map(|_| basis.compose(&[1.0, -1.0, 0.5]).unwrap())
            .collect();
        let mut b: Vec<HermitianMatrix> = (1..=10)
            .map(|n| {
                basis
                    .compose(&[0.2, 0.5, 1.0])
                    .unwrap()
                    .scale(1.0 / n as f64)
            })
            .collect();
        b[6] = HermitianMatrix::from_diagonal(&[0.1, 0.2, 0.3]);
        let tests = TestSet::dense_default(3, Seed(0)).unwrap();
        let r = dominated_product_check(
            &OperatorSequence::from_hermitian(a).unwrap(),
            &OperatorSequence::from_hermitian(b).unwrap(),
            &HermitianMatrix::identity(3),
            &tests,
            1e-6,
            5,
        )
        .unwrap();
        assert!(!r.passed());
        let v = r.first_violation().unwrap();
        assert_eq!((v.n, v.premise), (7, Premise::Commute));
        assert!(r.violations.iter().all(|v| v.n == 7));
    }

    #[test]
    fn projection_products_vanish_weakly() {
        let p = HermitianMatrix::from_diagonal(&[1.0, 0.0, 1.0]);
        let seq =
            OperatorSequence::from_hermitian((1..=400).map(|n| p.scale(1.0 / n as f64))).unwrap();
        let tests = TestSet::dense_default(3, Seed(0)).unwrap();
        let r = weak_positive_product_check(&seq, &seq, &tests, 1e-2, 5).unwrap();
        assert!(r.premises_hold());
        assert_eq!(r.alpha, Some(1.0));
        assert!(r.passed());
        assert!(r.product.converges(Mode::Weak));
    }

    #[test]
    fn symmetrized_shift_fails_positivity() {
        let seq = OperatorSequence::from_band((1..=12).map(|n| {
            let s = BandOperator::shift_power(n);
            s.add(&s.adjoint())
        }))
        .unwrap();
        let tests = TestSet::band(vec![FinSuppVector::basis(0)]).unwrap();
        let r = weak_positive_product_check(&seq, &seq, &tests, 1e-6, 5).unwrap();
        assert!(!r.premises_hold());
        assert!(r.violations.iter().all(|v| v.premise == Premise::Positive));
        assert!(r.a.converges(Mode::Weak));
        assert!(r.product.residuals.weak.values.iter().all(|&v| v == 1.0));
        assert!(r.passed());
    }
}
