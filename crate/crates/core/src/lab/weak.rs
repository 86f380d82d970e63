//! Quadratic-form probes for weak convergence.

use super::{Operator, Vector};
use crate::dense::Scalar;
use crate::error::Result;

/// `|⟨A x, x⟩|`.
pub fn weak_quadratic_residual(a: &Operator, x: &Vector) -> Result<f64> {
    Ok(a.pairing(x, x)?.norm())
}

/// `⟨A x, y⟩` rebuilt from four quadratic forms:
/// `¼ Σ_{k=0}^{3} iᵏ ⟨A(x + iᵏ y), x + iᵏ y⟩`.
pub fn polarization_pairing(a: &Operator, x: &Vector, y: &Vector) -> Result<Scalar> {
    let mut acc = Scalar::new(0.0, 0.0);
    let mut unit = Scalar::new(1.0, 0.0);
    for _ in 0..4 {
        let v = x.add_scaled(unit, y)?;
        acc += unit * a.pairing(&v, &v)?;
        unit *= Scalar::new(0.0, 1.0);
    }
    Ok(acc * 0.25)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::band::{BandOperator, FinSuppVector};
    use crate::generators::{gaussian_matrix, rand_hermitian, unit_vector, Seed};

    #[test]
    fn hermitian_quadratic_forms_are_real() {
        let a = Operator::from(rand_hermitian(6, Seed(8), 3.0).unwrap());
        let mut rng = Seed(9).rng();
        for _ in 0..10 {
            let x = Vector::Dense(unit_vector(6, &mut rng));
            let q = a.pairing(&x, &x).unwrap();
            assert!(q.im.abs() <= 1e-12 * 3.0);
        }
    }

    #[test]
    fn polarization_matches_direct_pairing() {
        let mut rng = Seed(21).rng();
        let a = Operator::Dense(gaussian_matrix(8, 8, &mut rng));
        let x = Vector::Dense(unit_vector(8, &mut rng));
        let y = Vector::Dense(unit_vector(8, &mut rng));
        let direct = a.pairing(&x, &y).unwrap();
        let polar = polarization_pairing(&a, &x, &y).unwrap();
        let scale = a.norm().unwrap().value.max(1.0);
        assert!((direct - polar).norm() <= 1e-10 * scale);
    }

    #[test]
    fn symmetrized_shift_forms_vanish_exactly() {
        let x = Vector::Sparse(FinSuppVector::from_pairs([
            (0, Scalar::new(1.0, 0.0)),
            (3, Scalar::new(-2.0, 0.5)),
            (5, Scalar::new(0.25, 1.0)),
        ]));
        for n in 11..=40 {
            let s = BandOperator::shift_power(n);
            let a = Operator::Band(s.add(&s.adjoint()));
            assert_eq!(weak_quadratic_residual(&a, &x).unwrap(), 0.0);
        }
    }
}
