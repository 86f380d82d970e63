//! Loewner-order predicates with explicit numerical slack.

use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;
use crate::spectral::BlockSpectrum;

/// Slack applied to "≥ 0": the minimum eigenvalue may dip to
/// `-(eps + rel * ‖A‖)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderTolerance {
    pub eps: f64,
    pub rel: f64,
}

impl Default for OrderTolerance {
    fn default() -> Self {
        Self {
            eps: 1e-10,
            rel: 1e-12,
        }
    }
}

impl OrderTolerance {
    pub fn new(eps: f64, rel: f64) -> Result<Self> {
        if !(eps >= 0.0 && rel >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "order tolerance must be nonnegative (eps = {eps}, rel = {rel})"
            )));
        }
        Ok(Self { eps, rel })
    }

    /// Pure absolute slack.
    pub fn absolute(eps: f64) -> Self {
        Self { eps, rel: 0.0 }
    }

    /// No slack at all.
    pub fn exact() -> Self {
        Self { eps: 0.0, rel: 0.0 }
    }

    pub fn slack(&self, norm: f64) -> f64 {
        self.eps + self.rel * norm
    }
}

/// Outcome of a positivity test, kept for reporting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdMargin {
    pub min_eigenvalue: f64,
    pub norm: f64,
    pub slack: f64,
}

impl PsdMargin {
    pub fn holds(&self) -> bool {
        self.min_eigenvalue >= -self.slack
    }

    /// How far below the admissible floor the spectrum reaches (0 if it holds).
    pub fn excess(&self) -> f64 {
        (-self.slack - self.min_eigenvalue).max(0.0)
    }
}

pub fn psd_margin(a: &HermitianMatrix, tol: OrderTolerance) -> Result<PsdMargin> {
    Ok(PsdMargin::of_spectrum(&BlockSpectrum::new(a)?, tol))
}

impl PsdMargin {
    pub(crate) fn of_spectrum(spectrum: &BlockSpectrum, tol: OrderTolerance) -> Self {
        let norm = spectrum.spectral_radius();
        PsdMargin {
            min_eigenvalue: spectrum.min_eigenvalue(),
            norm,
            slack: tol.slack(norm),
        }
    }
}

/// `A ⪰ 0`: minimum eigenvalue at least `-(eps + rel * ‖A‖)`.
pub fn is_psd(a: &HermitianMatrix, tol: OrderTolerance) -> Result<bool> {
    Ok(psd_margin(a, tol)?.holds())
}

/// `A ⪯ B`, i.e. `B − A ⪰ 0`.
pub fn loewner_leq(a: &HermitianMatrix, b: &HermitianMatrix, tol: OrderTolerance) -> Result<bool> {
    Ok(loewner_margin(a, b, tol)?.holds())
}

pub fn loewner_margin(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    tol: OrderTolerance,
) -> Result<PsdMargin> {
    psd_margin(&b.try_sub(a)?, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::DenseMatrix;

    fn herm(rows: &[&[f64]]) -> HermitianMatrix {
        HermitianMatrix::try_from_dense(&DenseMatrix::from_real_rows(rows).unwrap()).unwrap()
    }

    #[test]
    fn cone_membership() {
        let tol = OrderTolerance::default();
        assert!(is_psd(&HermitianMatrix::identity(3), tol).unwrap());
        assert!(is_psd(&HermitianMatrix::zeros(3), tol).unwrap());
        let m = psd_margin(&herm(&[&[1.0, 2.0], &[2.0, 1.0]]), tol).unwrap();
        assert!(!m.holds());
        assert!((m.min_eigenvalue + 1.0).abs() < 1e-14);
    }

    #[test]
    fn order_examples() {
        let tol = OrderTolerance::default();
        let a = HermitianMatrix::from_diagonal(&[1.0, 1.0]);
        let b = HermitianMatrix::from_diagonal(&[2.0, 3.0]);
        assert!(loewner_leq(&a, &b, tol).unwrap());
        assert!(!loewner_leq(&b, &a, tol).unwrap());
        assert!(loewner_leq(&b, &b, OrderTolerance::exact()).unwrap());
        assert!(matches!(
            loewner_leq(&a, &HermitianMatrix::identity(3), tol),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn interval_does_not_imply_modulus_bound() {
        let tol = OrderTolerance::default();
        let a = HermitianMatrix::from_diagonal(&[1.0, -1.0]);
        let b = herm(&[&[1.1, 0.4], &[0.4, 1.1]]);
        assert!(loewner_leq(&b.neg(), &a, tol).unwrap());
        assert!(loewner_leq(&a, &b, tol).unwrap());
        // |A| = I, and B − I has eigenvalues 0.1 ± 0.4.
        let m = loewner_margin(&HermitianMatrix::identity(2), &b, tol).unwrap();
        assert!((m.min_eigenvalue + 0.3).abs() < 1e-12);
    }

    #[test]
    fn slack_scales_with_norm() {
        let tol = OrderTolerance::new(0.0, 1e-3).unwrap();
        assert!(is_psd(&HermitianMatrix::from_diagonal(&[1000.0, -0.5]), tol).unwrap());
        assert!(!is_psd(&HermitianMatrix::from_diagonal(&[1.0, -0.5]), tol).unwrap());
        assert!(OrderTolerance::new(-1.0, 0.0).is_err());
    }
}
