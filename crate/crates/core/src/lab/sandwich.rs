//! Squeeze rule harness: `C_n ⪯ A_n ⪯ B_n` with `B_n, C_n → L`.

use rayon::prelude::*;

use super::residuals::{convergence_report, ConvergenceReport, Mode, PropertyCheck};
use super::{band_window, Kind, Operator, OperatorSequence, TestSet};
use crate::calculus::{abs_op, sqrt_of_spectrum};
use crate::dense::vector_norm;
use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;
use crate::order::{loewner_margin, psd_margin, OrderTolerance, PsdMargin};
use crate::spectral::{hermitian_norm, BlockSpectrum};

/// Three aligned self-adjoint sequences and their common candidate limit.
#[derive(Debug, Clone)]
pub struct SandwichInstance {
    pub lower: OperatorSequence,
    pub middle: OperatorSequence,
    pub upper: OperatorSequence,
    pub limit: Operator,
}

impl SandwichInstance {
    pub fn new(
        lower: OperatorSequence,
        middle: OperatorSequence,
        upper: OperatorSequence,
        limit: Operator,
    ) -> Result<Self> {
        for seq in [&lower, &middle, &upper] {
            if seq.kind() != lower.kind() {
                return Err(Error::KindMismatch(
                    "sandwich sequences differ in kind or dimension",
                ));
            }
            if seq.horizon() != lower.horizon() {
                return Err(Error::DimensionMismatch {
                    expected: lower.horizon(),
                    found: seq.horizon(),
                });
            }
            seq.require_selfadjoint()?;
        }
        if limit.kind() != lower.kind() {
            return Err(Error::KindMismatch(
                "limit does not match the sandwich sequences",
            ));
        }
        if !limit.is_selfadjoint() {
            return Err(Error::NotSelfAdjoint);
        }
        Ok(Self {
            lower,
            middle,
            upper,
            limit,
        })
    }

    /// Builds a finite-dimensional instance from generated parts.
    pub fn from_parts(parts: &crate::generators::SandwichParts) -> Result<Self> {
        Self::new(
            OperatorSequence::from_hermitian(parts.lower.iter().cloned())?,
            OperatorSequence::from_hermitian(parts.middle.iter().cloned())?,
            OperatorSequence::from_hermitian(parts.upper.iter().cloned())?,
            Operator::from(&parts.limit),
        )
    }

    pub fn horizon(&self) -> usize {
        self.lower.horizon()
    }

    pub fn kind(&self) -> Kind {
        self.lower.kind()
    }
}

/// Order premises at one index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PremiseVerdict {
    pub n: usize,
    /// `C_n ⪯ A_n`
    pub lower: PsdMargin,
    /// `A_n ⪯ B_n`
    pub upper: PsdMargin,
}

impl PremiseVerdict {
    pub fn holds(&self) -> bool {
        self.lower.holds() && self.upper.holds()
    }
}

fn order_margin(small: &Operator, large: &Operator, tol: OrderTolerance) -> Result<PsdMargin> {
    match (small, large) {
        (Operator::Dense(a), Operator::Dense(b)) => loewner_margin(
            &HermitianMatrix::try_from_dense(a)?,
            &HermitianMatrix::try_from_dense(b)?,
            tol,
        ),
        (Operator::Band(a), Operator::Band(b)) => {
            let gap = b.sub(a);
            psd_margin(&gap.hermitian_section(band_window(gap.width()))?, tol)
        }
        _ => Err(Error::KindMismatch(
            "cannot order dense against band operators",
        )),
    }
}

/// `C_n ⪯ A_n` and `A_n ⪯ B_n` at every index; band operators are compared
/// on finite sections of size `max(4 · width, 16)`.
pub fn check_sandwich_premises(
    inst: &SandwichInstance,
    tol: OrderTolerance,
) -> Result<Vec<PremiseVerdict>> {
    (1..=inst.horizon())
        .into_par_iter()
        .map(|n| {
            let (c, a, b) = (
                inst.lower.element(n),
                inst.middle.element(n),
                inst.upper.element(n),
            );
            Ok(PremiseVerdict {
                n,
                lower: order_margin(c, a, tol)?,
                upper: order_margin(a, b, tol)?,
            })
        })
        .collect()
}

/// Outcome of [`sandwich_verify`].
#[derive(Debug, Clone)]
pub struct SandwichReport {
    pub premises: Vec<PremiseVerdict>,
    pub lower: ConvergenceReport,
    pub middle: ConvergenceReport,
    pub upper: ConvergenceReport,
    pub checks: Vec<PropertyCheck>,
    /// Per-index `(‖A_n − L‖, ‖B_n − L‖ + 2‖C_n − L‖)`; finite-dimensional only.
    pub bound: Option<Vec<(f64, f64)>>,
}

impl SandwichReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(PropertyCheck::ok)
    }

    pub fn check(&self, name: &str) -> Option<&PropertyCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Runs the squeeze harness.
///
/// Fails with [`Error::PremiseViolated`] at the first index where
/// `C_n ⪯ A_n ⪯ B_n` does not hold. Otherwise, in every mode where both
/// `B_n` and `C_n` are classified convergent, asserts that `A_n` is too;
/// checks the quadratic-form squeeze on the probes; and, for dense kind,
/// checks `‖A_n − L‖ ≤ ‖B_n − L‖ + 2‖C_n − L‖ + 1e-8 · max(1, ‖L‖)`.
pub fn sandwich_verify(
    inst: &SandwichInstance,
    tests: &TestSet,
    tol: f64,
    k: usize,
) -> Result<SandwichReport> {
    let premises = check_sandwich_premises(inst, OrderTolerance::default())?;
    if let Some(p) = premises.iter().find(|p| !p.holds()) {
        return Err(Error::PremiseViolated { index: p.n });
    }
    let lower = convergence_report(&inst.lower, &inst.limit, tests, tol, k)?;
    let middle = convergence_report(&inst.middle, &inst.limit, tests, tol, k)?;
    let upper = convergence_report(&inst.upper, &inst.limit, tests, tol, k)?;

    let mut checks = Vec::new();
    for mode in Mode::ALL {
        let ends = lower.converges(mode) && upper.converges(mode);
        checks.push(PropertyCheck::single(
            format!("{mode} squeeze"),
            !ends || middle.converges(mode),
        ));
    }

    let quadratic = (1..=inst.horizon())
        .into_par_iter()
        .map(|n| {
            let c = inst.lower.element(n).sub(&inst.limit)?;
            let a = inst.middle.element(n).sub(&inst.limit)?;
            let b = inst.upper.element(n).sub(&inst.limit)?;
            let mut worst = f64::NEG_INFINITY;
            for x in tests.vectors() {
                let qc = c.pairing(x, x)?.re;
                let qa = a.pairing(x, x)?.re;
                let qb = b.pairing(x, x)?.re;
                let slack = 1e-9 * qc.abs().max(qb.abs()).max(x.norm().powi(2)).max(1.0);
                worst = worst.max((qc - qa).max(qa - qb) - slack);
            }
            Ok((n, worst))
        })
        .collect::<Result<Vec<_>>>()?;
    checks.push(PropertyCheck::from_excess(
        "quadratic-form squeeze",
        quadratic,
    ));

    let bound = match inst.kind() {
        Kind::Dense { .. } => {
            let scale = 1e-8 * inst.limit.norm()?.value.max(1.0);
            let rows: Vec<(f64, f64)> = (1..=inst.horizon())
                .map(|n| {
                    let a = middle.residuals.norm.at(n);
                    let rhs = upper.residuals.norm.at(n) + 2.0 * lower.residuals.norm.at(n);
                    (a, rhs)
                })
                .collect();
            checks.push(PropertyCheck::from_excess(
                "sandwich bound",
                rows.iter()
                    .enumerate()
                    .map(|(i, &(a, rhs))| (i + 1, a - rhs - scale)),
            ));
            Some(rows)
        }
        Kind::Band => None,
    };

    Ok(SandwichReport {
        premises,
        lower,
        middle,
        upper,
        checks,
        bound,
    })
}

/// Outcome of [`proof_step_checks`].
#[derive(Debug, Clone)]
pub struct ProofStepReport {
    pub checks: Vec<PropertyCheck>,
    /// Per-index `(‖C_n‖, ‖A_n‖, ‖B_n‖)`.
    pub norms: Vec<(f64, f64, f64)>,
}

impl ProofStepReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(PropertyCheck::ok)
    }
}

/// For `L = 0` and PSD `C_n`: checks `‖√C_n x‖² ≤ ‖√A_n x‖² ≤ ‖√B_n x‖²`
/// on every probe (slack `1e-8 · max(1, ‖B_n‖) · ‖x‖²`) and
/// `‖C_n‖ ≤ ‖A_n‖ ≤ ‖B_n‖` (slack `1e-9 · max(1, ‖B_n‖)`).
pub fn proof_step_checks(inst: &SandwichInstance, tests: &TestSet) -> Result<ProofStepReport> {
    inst.lower.require_dense()?;
    tests.require_kind(inst.kind())?;
    let limit_is_zero = match &inst.limit {
        Operator::Dense(m) => m.is_zero(),
        Operator::Band(b) => b.is_zero(),
    };
    if !limit_is_zero {
        return Err(Error::InvalidArgument(
            "proof-step checks require the limit L = 0".into(),
        ));
    }
    let tol = OrderTolerance::default();
    let rows = (1..=inst.horizon())
        .into_par_iter()
        .map(|n| {
            // One decomposition per matrix serves the margin, root and norm.
            let spectra = [
                BlockSpectrum::new(&inst.lower.hermitian(n)?)?,
                BlockSpectrum::new(&inst.middle.hermitian(n)?)?,
                BlockSpectrum::new(&inst.upper.hermitian(n)?)?,
            ];
            let margin = PsdMargin::of_spectrum(&spectra[0], tol);
            if !margin.holds() {
                return Err(Error::NotPsdAt {
                    index: n,
                    min_eigenvalue: margin.min_eigenvalue,
                });
            }
            let roots = [
                sqrt_of_spectrum(&spectra[0], tol)?,
                sqrt_of_spectrum(&spectra[1], tol)?,
                sqrt_of_spectrum(&spectra[2], tol)?,
            ];
            let norms = (
                spectra[0].spectral_radius(),
                spectra[1].spectral_radius(),
                spectra[2].spectral_radius(),
            );
            let scale = norms.2.max(1.0);
            let mut chain = f64::NEG_INFINITY;
            for x in tests.vectors() {
                let x = match x {
                    super::Vector::Dense(v) => v,
                    super::Vector::Sparse(_) => unreachable!("kind checked above"),
                };
                let q: Vec<f64> = roots
                    .iter()
                    .map(|r| r.apply(x).map(|y| vector_norm(&y).powi(2)))
                    .collect::<Result<_>>()?;
                let slack = 1e-8 * scale * vector_norm(x).powi(2);
                chain = chain.max((q[0] - q[1]).max(q[1] - q[2]) - slack);
            }
            let norm_excess = (norms.0 - norms.1).max(norms.1 - norms.2) - 1e-9 * scale;
            Ok((n, chain, norm_excess, norms))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProofStepReport {
        checks: vec![
            PropertyCheck::from_excess(
                "square-root quadratic chain",
                rows.iter().map(|r| (r.0, r.1)),
            ),
            PropertyCheck::from_excess("norm chain", rows.iter().map(|r| (r.0, r.2))),
        ],
        norms: rows.iter().map(|r| r.3).collect(),
    })
}

/// Shift to the positive cone for arbitrary `C_n`: with primes denoting
/// `· − L`, checks `C′ + |C′| ⪰ 0` and
/// `C′ + |C′| ⪯ A′ + |C′| ⪯ B′ + |C′|` at every index.
pub fn shifted_positivity_checks(
    inst: &SandwichInstance,
    tol: OrderTolerance,
) -> Result<Vec<PropertyCheck>> {
    inst.lower.require_dense()?;
    let limit = match &inst.limit {
        Operator::Dense(m) => HermitianMatrix::try_from_dense(m)?,
        Operator::Band(_) => unreachable!("kind checked above"),
    };
    let rows = (1..=inst.horizon())
        .into_par_iter()
        .map(|n| {
            let c = inst.lower.hermitian(n)?.try_sub(&limit)?;
            let a = inst.middle.hermitian(n)?.try_sub(&limit)?;
            let b = inst.upper.hermitian(n)?.try_sub(&limit)?;
            let modulus = abs_op(&c.to_dense())?;
            let cm = c.try_add(&modulus)?;
            let am = a.try_add(&modulus)?;
            let bm = b.try_add(&modulus)?;
            let cone_tol = OrderTolerance::absolute(1e-9 * hermitian_norm(&c)?.max(1.0));
            Ok((
                n,
                psd_margin(&cm, cone_tol)?.excess(),
                loewner_margin(&cm, &am, tol)?.excess(),
                loewner_margin(&am, &bm, tol)?.excess(),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(vec![
        PropertyCheck::from_excess("C + |C| is positive", rows.iter().map(|r| (r.0, r.1))),
        PropertyCheck::from_excess("C + |C| <= A + |C|", rows.iter().map(|r| (r.0, r.2))),
        PropertyCheck::from_excess("A + |C| <= B + |C|", rows.iter().map(|r| (r.0, r.3))),
    ])
}
