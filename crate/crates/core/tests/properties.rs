use num_complex::Complex64;
use opseq::generators::{rand_commuting_family_with, rand_hermitian, rand_psd, SpectrumKind};
use opseq::lab::{classify, Mode, OperatorSequence, TestSet, Verdict};
use opseq::{
    abs_op, band_equals, eigh, hermitian_norm, is_psd, loewner_leq, op_norm, sqrt_contraction_gap,
    sqrt_psd, BandOperator, EvSeq, FinSuppVector, OrderTolerance, Seed,
};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn loose(norm: f64) -> OrderTolerance {
    OrderTolerance::absolute(1e-9 * norm.max(1.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sqrt_is_norm_contractive(dim in 1usize..=10, s in any::<u64>(), scale in 0.01f64..10.0) {
        let b = rand_psd(dim, Seed(s), scale).unwrap();
        let cm = rand_psd(dim, Seed(s ^ 0x5555), scale * 0.5).unwrap();
        let (lhs, rhs) = sqrt_contraction_gap(&b, &cm, OrderTolerance::default()).unwrap();
        prop_assert!(lhs <= rhs + 1e-8 * rhs.max(1.0), "{lhs} > {rhs}");
    }

    #[test]
    fn modulus_brackets_the_matrix(dim in 1usize..=10, s in any::<u64>(), scale in 0.01f64..10.0) {
        let a = rand_hermitian(dim, Seed(s), scale).unwrap();
        let m = abs_op(&a.to_dense()).unwrap();
        let tol = loose(scale);
        prop_assert!(loewner_leq(&a, &m, tol).unwrap());
        prop_assert!(loewner_leq(&a.neg(), &m, tol).unwrap());
    }

    #[test]
    fn modulus_dominates_in_norm(dim in 1usize..=10, s in any::<u64>()) {
        let a = rand_hermitian(dim, Seed(s), 2.0).unwrap();
        let m = abs_op(&a.to_dense()).unwrap();
        let (na, nm) = (hermitian_norm(&a).unwrap(), hermitian_norm(&m).unwrap());
        prop_assert!((na - nm).abs() <= 1e-10 * na.max(1.0));
    }

    #[test]
    fn sqrt_is_operator_monotone(dim in 1usize..=8, s in any::<u64>()) {
        let lo = rand_psd(dim, Seed(s), 1.0).unwrap();
        let hi = lo.try_add(&rand_psd(dim, Seed(s.wrapping_add(1)), 0.7).unwrap()).unwrap();
        let r_lo = sqrt_psd(&lo, OrderTolerance::default()).unwrap();
        let r_hi = sqrt_psd(&hi, OrderTolerance::default()).unwrap();
        prop_assert!(loewner_leq(&r_lo, &r_hi, OrderTolerance::absolute(1e-8)).unwrap());
    }

    #[test]
    fn sqrt_squares_back(dim in 1usize..=10, s in any::<u64>(), scale in 0.01f64..10.0) {
        let a = rand_psd(dim, Seed(s), scale).unwrap();
        let r = sqrt_psd(&a, OrderTolerance::default()).unwrap();
        prop_assert!(is_psd(&r, OrderTolerance::default()).unwrap());
        let gap = r.square().try_sub(&a).unwrap();
        prop_assert!(hermitian_norm(&gap).unwrap() <= 1e-10 * scale.max(1.0));
    }

    #[test]
    fn commuting_moduli_are_subadditive(dim in 1usize..=8, s in any::<u64>()) {
        let fam = rand_commuting_family_with(dim, 2, Seed(s), SpectrumKind::Signed).unwrap();
        let sum = fam[0].try_add(&fam[1]).unwrap();
        let lhs = abs_op(&sum.to_dense()).unwrap();
        let rhs = abs_op(&fam[0].to_dense()).unwrap().try_add(&abs_op(&fam[1].to_dense()).unwrap()).unwrap();
        prop_assert!(loewner_leq(&lhs, &rhs, OrderTolerance::absolute(1e-9)).unwrap());
    }

    #[test]
    fn square_over_norm_below_modulus(dim in 1usize..=10, s in any::<u64>()) {
        let t = rand_hermitian(dim, Seed(s), 1.0).unwrap();
        let norm = hermitian_norm(&t).unwrap();
        prop_assume!(norm > 1e-6);
        let lhs = t.square().scale(1.0 / norm);
        let rhs = abs_op(&t.to_dense()).unwrap();
        prop_assert!(loewner_leq(&lhs, &rhs, OrderTolerance::absolute(1e-9)).unwrap());
    }

    #[test]
    fn eigh_is_deterministic_and_accurate(dim in 1usize..=16, s in any::<u64>()) {
        let a = rand_hermitian(dim, Seed(s), 1.0).unwrap();
        let first = eigh(&a).unwrap();
        let second = eigh(&a).unwrap();
        prop_assert_eq!(&first.eigenvalues, &second.eigenvalues);
        prop_assert_eq!(first.eigenvectors.as_slice(), second.eigenvectors.as_slice());
        let fro = a.frobenius_norm();
        let rec = first.reconstruct().try_sub(&a).unwrap().frobenius_norm();
        prop_assert!(rec <= 1e-10 * fro.max(1e-300));
        prop_assert!(first.orthogonality_defect() <= 1e-10 * dim as f64);
        prop_assert!(first.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn band_adjunction(n in 0usize..6, x0 in -3.0f64..3.0, y1 in -3.0f64..3.0, j in 0usize..8) {
        let s = BandOperator::shift_power(n);
        let d = BandOperator::from_diagonals([(0, EvSeq::new(vec![c(x0, 1.0), c(0.5, 0.0)], c(2.0, 0.0)))]);
        let a = s.compose(&d).add(&BandOperator::identity().scale(c(y1, 0.0)));
        let x = FinSuppVector::from_pairs([(0, c(1.0, 0.5)), (j, c(-0.25, 2.0))]);
        let y = FinSuppVector::from_pairs([(j + n, c(0.3, -1.0)), (1, c(1.0, 0.0))]);
        let lhs = a.pairing(&x, &y);
        let rhs = a.adjoint().pairing(&y, &x).conj();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
    }

    #[test]
    fn band_composition_matches_sections(m in 0usize..4, n in 0usize..4, big in 12usize..20) {
        let d = BandOperator::from_diagonals([(0, EvSeq::new(vec![c(1.0, 0.0), c(-2.0, 1.0), c(0.5, 0.0)], c(3.0, 0.0)))]);
        let a = BandOperator::shift_power(m).compose(&d);
        let b = d.compose(&BandOperator::shift_power(n).adjoint());
        let ab = a.compose(&b);
        // P_N A B P_N equals (P_{N+r} A P_{N+r})(P_{N+r} B P_{N+r}) restricted to N.
        let r = a.width().max(b.width());
        let wide = &a.finite_section(big + r) * &b.finite_section(big + r);
        let exact = ab.finite_section(big);
        for i in 0..big {
            for jj in 0..big {
                prop_assert!((wide[(i, jj)] - exact[(i, jj)]).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn shift_powers_are_isometries(n in 0usize..=12) {
        let s = BandOperator::shift_power(n);
        prop_assert!(band_equals(&s.adjoint().compose(&s), &BandOperator::identity()));
    }

    #[test]
    fn norm_convergence_implies_weaker_modes(dim in 1usize..=6, s in any::<u64>()) {
        let h = rand_hermitian(dim, Seed(s), 1.0).unwrap();
        let seq = OperatorSequence::from_hermitian((1..=40).map(|n| h.scale(1.0 / (n * n * n * n) as f64))).unwrap();
        let tests = TestSet::dense_default(dim, Seed(s)).unwrap();
        let zero = seq.element(1).zero_like();
        let r = opseq::lab::convergence_report(&seq, &zero, &tests, 1e-5, 5).unwrap();
        for n in 1..=40 {
            let (nv, sv, wv) = (r.residuals.norm.at(n), r.residuals.strong.at(n), r.residuals.weak.at(n));
            prop_assert!(sv <= nv * (1.0 + 1e-12) + 1e-15);
            prop_assert!(wv <= nv * (1.0 + 1e-12) + 1e-15);
        }
        if r.converges(Mode::Norm) {
            prop_assert!(r.converges(Mode::Strong) && r.converges(Mode::Weak));
        }
    }

    #[test]
    fn sqrt_is_norm_continuous(dim in 1usize..=8, s in any::<u64>()) {
        let a = rand_psd(dim, Seed(s), 1.0).unwrap();
        let p = rand_psd(dim, Seed(s.wrapping_add(17)), 1.0).unwrap();
        let root = sqrt_psd(&a, OrderTolerance::default()).unwrap();
        let pn = hermitian_norm(&p).unwrap();
        for n in [1usize, 3, 10, 50, 200] {
            let an = a.try_add(&p.scale(1.0 / n as f64)).unwrap();
            let gap = op_norm(&(&sqrt_psd(&an, OrderTolerance::default()).unwrap().to_dense() - &root.to_dense())).unwrap();
            prop_assert!(gap <= (pn / n as f64).sqrt() + 1e-8);
        }
    }
}

#[test]
fn constant_sequence_is_stalled_not_convergent() {
    assert_eq!(classify(&[1.0; 20], 1e-6, 5), Verdict::Stalled);
    assert_eq!(classify(&[1e-7; 20], 1e-6, 5), Verdict::Convergent);
}
