//! Dispatch from a configuration to one harness and its report.

use rand::Rng;

use opseq::generators::{
    check_interval_pair, interval_trial, make_sandwich_parts, rand_hermitian, rand_psd,
    search_interval_counterexample, stored_interval_witness, CommonEigenbasis, PRNG_IDENTITY,
};
use opseq::lab::{
    check_sandwich_premises, convergence_report, dominated_product_check, residuals,
    sandwich_verify, section_modulus_probe, ConvergenceReport, Mode, Operator, OperatorSequence,
    PropertyCheck, Residuals, SandwichInstance, TestSet,
};
use opseq::{
    abs_op, hermitian_norm, sqrt_contraction_gap, BandOperator, FinSuppVector, HermitianMatrix,
    OrderTolerance, Result, Scalar, Seed,
};

use crate::config::{Experiment, ExperimentConfig};
use crate::report::{ReportBundle, Row, Summary};

pub fn header(cfg: &ExperimentConfig) -> Vec<String> {
    let mut h = vec![
        format!("opseq {}", env!("CARGO_PKG_VERSION")),
        format!("prng: {PRNG_IDENTITY}"),
    ];
    h.extend(cfg.echo().into_iter().map(|l| format!("config: {l}")));
    h
}

/// Runs the configured experiment. Harness assertion failures end up in the
/// summary; only invalid inputs produce an error.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ReportBundle> {
    let (rows, summary) = match cfg.experiment {
        Experiment::LemmaFuzz => lemma_fuzz(cfg)?,
        Experiment::Sandwich => sandwich(cfg)?,
        Experiment::ShiftDemo => shift_demo(cfg)?,
        Experiment::Classify => classify(cfg)?,
        Experiment::DominatedProduct => dominated_product(cfg)?,
        Experiment::IntervalCounterexample => interval_counterexample(cfg)?,
    };
    Ok(ReportBundle {
        header: header(cfg),
        rows,
        summary,
    })
}

fn residual_rows(r: &Residuals, flag: impl Fn(usize) -> String) -> Vec<Row> {
    (1..=r.norm.len())
        .map(|n| Row {
            n,
            norm: r.norm.at(n),
            strong: r.strong.at(n),
            weak: r.weak.at(n),
            flag: flag(n),
        })
        .collect()
}

fn verdict_note(label: &str, report: &ConvergenceReport) -> String {
    let verdicts: Vec<String> = Mode::ALL
        .iter()
        .map(|&m| format!("{m} {}", report.verdict(m)))
        .collect();
    format!(
        "{label} verdicts (tol {:e}, k {}): {}",
        report.tol,
        report.k,
        verdicts.join(", ")
    )
}

type Outcome = (Vec<Row>, Summary);

/// `‖√B − √C‖ ≤ √‖B − C‖` on random PSD pairs; dimensions cycle through
/// `1..=dim`, and every third pair is a small perturbation.
fn lemma_fuzz(cfg: &ExperimentConfig) -> Result<Outcome> {
    let seed = Seed(cfg.seed);
    let mut rows = Vec::with_capacity(cfg.trials);
    let mut excess = Vec::with_capacity(cfg.trials);
    for t in 1..=cfg.trials {
        let dim = 1 + (t - 1) % cfg.dim;
        let mut rng = seed.derive(t as u64).rng();
        let scale = 10f64.powf(rng.random_range(-2.0..2.0));
        let b = rand_psd(dim, Seed(rng.random()), scale)?;
        let c = if t % 3 == 0 {
            b.try_add(&rand_psd(dim, Seed(rng.random()), 1e-3 * scale)?)?
        } else {
            rand_psd(dim, Seed(rng.random()), scale)?
        };
        let (lhs, rhs) = sqrt_contraction_gap(&b, &c, OrderTolerance::default())?;
        let over = lhs - rhs - 1e-8 * rhs.max(1.0);
        excess.push((t, over));
        rows.push(Row {
            n: t,
            norm: lhs,
            strong: rhs,
            weak: rhs - lhs,
            flag: if over > 0.0 { "violation" } else { "ok" }.into(),
        });
    }
    let check = PropertyCheck::from_excess("square-root contraction", excess);
    let notes = vec![
        format!("trials: {}", cfg.trials),
        format!("violations: {}", check.violations),
        "columns: norm_residual = |sqrt B - sqrt C|, strong_residual_max = sqrt|B - C|, weak_residual_max = margin".into(),
    ];
    Ok((
        rows,
        Summary {
            checks: vec![check],
            notes,
        },
    ))
}

fn sandwich(cfg: &ExperimentConfig) -> Result<Outcome> {
    let seed = Seed(cfg.seed);
    let limit = rand_hermitian(cfg.dim, seed.derive(u64::MAX), 1.0)?;
    let mut parts = make_sandwich_parts(&limit, &cfg.rate, cfg.n_max, seed)?;
    if let Some(n) = cfg.plant_defect {
        // Push A_n above B_n.
        parts.middle[n - 1] = parts.upper[n - 1].shift_diagonal(cfg.rate.value(n).max(1e-3));
    }
    let inst = SandwichInstance::from_parts(&parts)?;
    let tests = TestSet::dense_default(cfg.dim, seed)?;
    let premises = check_sandwich_premises(&inst, OrderTolerance::default())?;
    let premise_check = PropertyCheck::from_excess(
        "premises C_n <= A_n <= B_n",
        premises
            .iter()
            .map(|p| (p.n, p.lower.excess().max(p.upper.excess()))),
    );
    let ok_at: Vec<bool> = premises.iter().map(|p| p.holds()).collect();
    let flag = |n: usize| {
        if ok_at[n - 1] {
            "ok"
        } else {
            "premise-violation"
        }
        .to_string()
    };

    let mut summary = Summary::default();
    let middle = if premise_check.passed {
        let report = sandwich_verify(&inst, &tests, cfg.tol, cfg.k)?;
        summary.checks.push(premise_check);
        summary.checks.extend(report.checks.iter().cloned());
        summary.notes.push(verdict_note("lower", &report.lower));
        summary.notes.push(verdict_note("upper", &report.upper));
        report.middle
    } else {
        summary.checks.push(premise_check);
        convergence_report(&inst.middle, &inst.limit, &tests, cfg.tol, cfg.k)?
    };
    summary.notes.push(verdict_note("middle", &middle));
    Ok((residual_rows(&middle.residuals, flag), summary))
}

fn sym_shift(n: usize) -> BandOperator {
    let s = BandOperator::shift_power(n);
    s.add(&s.adjoint())
}

/// `A_n = Sⁿ + (Sⁿ)*` probed at `e_0`.
fn shift_demo(cfg: &ExperimentConfig) -> Result<Outcome> {
    let seq = OperatorSequence::from_band((1..=cfg.n_max).map(sym_shift))?;
    let e0 = FinSuppVector::basis(0);
    let tests = TestSet::band(vec![e0.clone()])?;
    let zero = Operator::Band(BandOperator::zero());
    let r = residuals(&seq, &zero, &tests)?;
    let probes = (1..=cfg.n_max)
        .map(|n| section_modulus_probe(&sym_shift(n), 4 * n, &e0))
        .collect::<Result<Vec<_>>>()?;
    let squares: Vec<Scalar> = (1..=cfg.n_max)
        .map(|n| {
            let a = sym_shift(n);
            a.compose(&a).pairing(&e0, &e0)
        })
        .collect();

    let rows = residual_rows(&r, |n| {
        let p = &probes[n - 1];
        format!("probe={:.16e};drift={:.16e}", p.value, p.drift())
    });
    let idx = 1..=cfg.n_max;
    let checks = vec![
        PropertyCheck::from_flags(
            "weak residual at e_0 is 0",
            idx.clone().map(|n| (n, r.weak.at(n) == 0.0)),
        ),
        PropertyCheck::from_flags(
            "strong residual at e_0 is 1",
            idx.clone().map(|n| (n, r.strong.at(n) == 1.0)),
        ),
        PropertyCheck::from_flags(
            "<A_n^2 e_0, e_0> = 1",
            idx.clone()
                .map(|n| (n, squares[n - 1] == Scalar::new(1.0, 0.0))),
        ),
        PropertyCheck::from_excess(
            "section norm <= 2",
            idx.clone().map(|n| (n, r.norm.at(n) - 2.0 - 1e-9)),
        ),
        PropertyCheck::from_excess(
            "section modulus probe >= 0.5",
            idx.clone().map(|n| (n, 0.5 - 1e-6 - probes[n - 1].value)),
        ),
        PropertyCheck::from_excess(
            "section modulus probe drift <= 1e-3",
            idx.map(|n| (n, probes[n - 1].drift() - 1e-3)),
        )
        .reported_only(),
    ];
    let min_probe = probes.iter().map(|p| p.value).fold(f64::INFINITY, f64::min);
    let notes = vec![
        format!("min section modulus probe: {min_probe:.16e}"),
        "columns: norm_residual = section norm estimate, strong/weak residuals at e_0".into(),
    ];
    Ok((rows, Summary { checks, notes }))
}

/// `A_n = L + rate(n) H` with `‖H‖ = 1`, classified in every mode.
fn classify(cfg: &ExperimentConfig) -> Result<Outcome> {
    let seed = Seed(cfg.seed);
    let limit = rand_hermitian(cfg.dim, seed.derive(1), 1.0)?;
    let h = rand_hermitian(cfg.dim, seed.derive(2), 1.0)?;
    let h_norm = hermitian_norm(&h)?;
    let h = if h_norm > 0.0 {
        h.scale(1.0 / h_norm)
    } else {
        h
    };
    let elements = (1..=cfg.n_max)
        .map(|n| limit.try_add(&h.scale(cfg.rate.value(n))))
        .collect::<Result<Vec<HermitianMatrix>>>()?;
    let seq = OperatorSequence::from_hermitian(elements)?;
    let tests = TestSet::dense_default(cfg.dim, seed)?;
    let report = convergence_report(&seq, &Operator::from(&limit), &tests, cfg.tol, cfg.k)?;
    let r = &report.residuals;
    let check = PropertyCheck::from_excess(
        "norm residual dominates strong and weak",
        (1..=cfg.n_max).map(|n| {
            let slack = 1e-12 * r.norm.at(n).max(1.0);
            (n, r.strong.at(n).max(r.weak.at(n)) - r.norm.at(n) - slack)
        }),
    );
    let rows = residual_rows(r, |_| "ok".into());
    Ok((
        rows,
        Summary {
            checks: vec![check],
            notes: vec![verdict_note("sequence", &report)],
        },
    ))
}

/// Commuting `A_n` with `|A_n| ⪯ I` and positive `B_n` of norm `rate(n)`;
/// a planted defect flips the sign of `B_n`.
fn dominated_product(cfg: &ExperimentConfig) -> Result<Outcome> {
    let seed = Seed(cfg.seed);
    let basis = CommonEigenbasis::random(cfg.dim, seed)?;
    let mut rng = seed.derive(1).rng();
    let (mut a, mut b) = (Vec::with_capacity(cfg.n_max), Vec::with_capacity(cfg.n_max));
    for n in 1..=cfg.n_max {
        let spec_a: Vec<f64> = (0..cfg.dim).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let mut spec_b: Vec<f64> = (0..cfg.dim).map(|_| rng.random_range(0.0..=1.0)).collect();
        spec_b[0] = 1.0;
        let rate = cfg.rate.value(n);
        a.push(basis.compose(&spec_a)?);
        let bn = basis.compose(&spec_b)?.scale(rate);
        b.push(if cfg.plant_defect == Some(n) {
            bn.neg()
        } else {
            bn
        });
    }
    let (a, b) = (
        OperatorSequence::from_hermitian(a)?,
        OperatorSequence::from_hermitian(b)?,
    );
    let tests = TestSet::dense_default(cfg.dim, seed)?;
    let report = dominated_product_check(
        &a,
        &b,
        &HermitianMatrix::identity(cfg.dim),
        &tests,
        cfg.tol,
        cfg.k,
    )?;

    let premises = PropertyCheck::from_flags(
        "product premises",
        (1..=cfg.n_max).map(|n| (n, !report.violations.iter().any(|v| v.n == n))),
    );
    let mut notes: Vec<String> = report
        .violations
        .iter()
        .map(|v| {
            format!(
                "premise violated at n = {}: {} ({:.16e})",
                v.n, v.premise, v.amount
            )
        })
        .collect();
    notes.push(verdict_note("factor B", &report.factor));
    notes.push(verdict_note("product AB", &report.product));
    let flag = |n: usize| {
        let names: Vec<String> = report
            .violations
            .iter()
            .filter(|v| v.n == n)
            .map(|v| v.premise.to_string())
            .collect();
        if names.is_empty() {
            "ok".to_string()
        } else {
            format!("premise-violation: {}", names.join("; "))
        }
    };
    let rows = residual_rows(&report.product.residuals, flag);
    let mut checks = vec![premises];
    checks.extend(report.checks.iter().cloned());
    Ok((rows, Summary { checks, notes }))
}

/// Seeded search for `−B ⪯ A ⪯ B` with `|A| ⪯̸ B`; one row per trial.
fn interval_counterexample(cfg: &ExperimentConfig) -> Result<Outcome> {
    let seed = Seed(cfg.seed);
    let tol = OrderTolerance::default();
    let mut rows = Vec::with_capacity(cfg.trials);
    let mut recheck = Vec::new();
    for t in 0..cfg.trials as u64 {
        let trial = interval_trial(cfg.dim, seed, t)?;
        if trial.is_witness {
            recheck.push((t as usize, check_interval_pair(&trial.a, &trial.b, tol)?.3));
        }
        rows.push(Row {
            n: t as usize,
            norm: trial.lower_margin,
            strong: trial.upper_margin,
            weak: trial.modulus_margin,
            flag: if trial.is_witness { "witness" } else { "-" }.into(),
        });
    }
    let found = search_interval_counterexample(cfg.dim, cfg.trials as u64, seed)?;

    let (a, b) = stored_interval_witness();
    let (lo, up, modulus, witness) = check_interval_pair(&a, &b, tol)?;
    let gap = b.try_sub(&abs_op(&a.to_dense())?)?;
    let stored_ok = witness
        && lo >= 0.0 - 1e-9
        && up >= -1e-9
        && (modulus + 0.3).abs() <= 1e-9
        && gap.dim() == 2;

    let mut checks = vec![
        PropertyCheck::single("stored witness verifies", stored_ok),
        PropertyCheck::from_flags("witness re-verification", recheck),
    ];
    if cfg.dim == 1 {
        checks.push(PropertyCheck::single(
            "no witness in dimension 1",
            found.is_none(),
        ));
    }
    let first = rows.iter().find(|r| r.flag == "witness").map(|r| r.n);
    let notes = vec![
        match first {
            Some(t) => format!("first witness at trial {t}"),
            None => format!("no witness in {} trials", cfg.trials),
        },
        format!(
            "witnesses: {}",
            rows.iter().filter(|r| r.flag == "witness").count()
        ),
        "columns: n = trial, norm/strong/weak = min eig of A + B, B - A, B - |A|".into(),
    ];
    Ok((rows, Summary { checks, notes }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    fn run(text: &str) -> ReportBundle {
        run_experiment(&parse_config(text).unwrap()).unwrap()
    }

    #[test]
    fn sandwich_seed_3() {
        let b = run("experiment = sandwich\ndim = 8\nn_max = 200\nseed = 3\n");
        assert_eq!(b.rows.len(), 200);
        assert!(b.summary.passed());
        let bound = b
            .summary
            .checks
            .iter()
            .find(|c| c.name == "sandwich bound")
            .unwrap();
        assert!(bound.passed);
    }

    #[test]
    fn planted_sandwich_defect_is_located() {
        let b = run("experiment = sandwich\ndim = 4\nn_max = 30\nplant_defect = 17\n");
        assert!(!b.summary.passed());
        let c = b.summary.failed_checks().next().unwrap();
        assert_eq!(c.name, "premises C_n <= A_n <= B_n");
        assert_eq!(c.first_violation, Some(17));
        assert_eq!(c.violations, 1);
        assert_eq!(b.rows[16].flag, "premise-violation");
    }

    #[test]
    fn shift_demo_rows() {
        let b = run("experiment = shift-demo\nn_max = 64\n");
        assert_eq!(b.rows.len(), 64);
        assert!(b.rows.iter().all(|r| r.weak == 0.0 && r.strong == 1.0));
        assert!(b.summary.passed());
    }

    #[test]
    fn lemma_fuzz_is_clean() {
        let b = run("experiment = lemma-fuzz\ndim = 16\ntrials = 300\n");
        assert!(b.summary.passed());
        assert!(b.summary.notes.contains(&"violations: 0".to_string()));
    }

    #[test]
    fn dominated_product_defect_index() {
        let b = run("experiment = dominated-product\nn_max = 40\nplant_defect = 23\n");
        assert!(!b.summary.passed());
        let c = &b.summary.checks[0];
        assert_eq!((c.first_violation, c.violations), (Some(23), 1));
    }

    #[test]
    fn interval_search_dims() {
        let b = run("experiment = interval-counterexample\ndim = 2\ntrials = 200\n");
        assert!(b.summary.passed());
        assert!(b.rows.iter().any(|r| r.flag == "witness"));
        let b = run("experiment = interval-counterexample\ndim = 1\ntrials = 50\n");
        assert!(b.summary.passed());
        assert!(b.rows.iter().all(|r| r.flag == "-"));
    }

    #[test]
    fn classify_reports_verdicts() {
        let b = run("experiment = classify\ndim = 4\nn_max = 60\nrate = geometric 1 0.5\n");
        assert!(b.summary.passed());
        assert!(
            b.summary.notes[0].contains("norm convergent"),
            "{:?}",
            b.summary.notes
        );
    }
}
