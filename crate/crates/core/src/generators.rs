//! Seeded generation of test matrices, commuting families, sandwich
//! instances and order counterexamples.
//!
//! Every generator is a pure function of its parameters and seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::calculus::abs_op;
use crate::dense::{DenseMatrix, Scalar};
use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;
use crate::lab::SandwichInstance;
use crate::order::{loewner_margin, OrderTolerance};
use crate::spectral::hermitian_norm;

/// Identity of the generator recorded in report headers.
pub const PRNG_IDENTITY: &str = "ChaCha8Rng (rand_chacha 0.9, seed_from_u64)";

/// A 64-bit generator seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Seed(pub u64);

impl Seed {
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// Independent child seed for stream `index`.
    pub fn derive(self, index: u64) -> Seed {
        Seed(self.0.wrapping_add(index))
    }
}

impl From<u64> for Seed {
    fn from(v: u64) -> Self {
        Seed(v)
    }
}

/// Positive, nonincreasing decay rates `n ↦ schedule(n)` for `n ≥ 1`.
#[derive(Debug, Clone, PartialEq)]
pub enum DecaySchedule {
    /// `K / n`
    Harmonic { k: f64 },
    /// `K · rⁿ`
    Geometric { k: f64, r: f64 },
    /// Explicit values for `n = 1, 2, …`; the last value repeats.
    Table(Vec<f64>),
}

impl Default for DecaySchedule {
    fn default() -> Self {
        DecaySchedule::Harmonic { k: 1.0 }
    }
}

impl DecaySchedule {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        match self {
            DecaySchedule::Harmonic { k } if !(*k > 0.0 && k.is_finite()) => {
                bad(format!("harmonic K must be positive, got {k}"))
            }
            DecaySchedule::Geometric { k, .. } if !(*k > 0.0 && k.is_finite()) => {
                bad(format!("geometric K must be positive, got {k}"))
            }
            DecaySchedule::Geometric { r, .. } if !(*r > 0.0 && *r < 1.0) => {
                bad(format!("geometric ratio must lie in (0, 1), got {r}"))
            }
            DecaySchedule::Table(values) => {
                if values.is_empty() {
                    return bad("schedule table is empty".into());
                }
                if values.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                    return bad("schedule table values must be positive".into());
                }
                if values.windows(2).any(|w| w[1] > w[0]) {
                    return bad("schedule table must be nonincreasing".into());
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Value at index `n ≥ 1`.
    pub fn value(&self, n: usize) -> f64 {
        let n = n.max(1);
        match self {
            DecaySchedule::Harmonic { k } => k / n as f64,
            DecaySchedule::Geometric { k, r } => k * r.powi(n as i32),
            DecaySchedule::Table(values) => values[(n - 1).min(values.len() - 1)],
        }
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> Scalar {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Scalar::new(re, im)
}

/// Complex Gaussian matrix with independent standard normal parts.
pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Random unit vector (normalized complex Gaussian).
pub fn unit_vector(dim: usize, rng: &mut ChaCha8Rng) -> Vec<Scalar> {
    loop {
        let v: Vec<Scalar> = (0..dim).map(|_| gaussian(rng)).collect();
        let norm = crate::dense::vector_norm(&v);
        if norm > 0.0 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

fn require_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        Err(Error::InvalidArgument(
            "dimension must be at least 1".into(),
        ))
    } else {
        Ok(())
    }
}

fn require_scale(scale: f64) -> Result<()> {
    if scale > 0.0 && scale.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "scale must be positive, got {scale}"
        )))
    }
}

/// Random Hermitian matrix `(G + G*)/2`, rescaled to operator norm `scale`.
pub fn rand_hermitian(dim: usize, seed: Seed, scale: f64) -> Result<HermitianMatrix> {
    require_dim(dim)?;
    require_scale(scale)?;
    let mut rng = seed.rng();
    let g = gaussian_matrix(dim, dim, &mut rng);
    let h = HermitianMatrix::hermitian_part(&g)?;
    let norm = hermitian_norm(&h)?;
    Ok(h.scale(scale / norm))
}

/// Random PSD matrix `G*G`, rescaled to operator norm `scale`.
pub fn rand_psd(dim: usize, seed: Seed, scale: f64) -> Result<HermitianMatrix> {
    require_dim(dim)?;
    require_scale(scale)?;
    let mut rng = seed.rng();
    let g = gaussian_matrix(dim, dim, &mut rng);
    let gram = HermitianMatrix::hermitian_part(&(&g.adjoint() * &g))?;
    let norm = hermitian_norm(&gram)?;
    Ok(gram.scale(scale / norm))
}

/// A random unitary from modified Gram–Schmidt on a complex Gaussian matrix.
pub fn rand_unitary(dim: usize, seed: Seed) -> Result<DenseMatrix> {
    require_dim(dim)?;
    let mut rng = seed.rng();
    loop {
        let g = gaussian_matrix(dim, dim, &mut rng);
        let mut cols: Vec<Vec<Scalar>> = (0..dim)
            .map(|j| (0..dim).map(|i| g[(i, j)]).collect())
            .collect();
        let mut ok = true;
        for j in 0..dim {
            for prev in 0..j {
                let (done, rest) = cols.split_at_mut(j);
                let proj = crate::dense::inner(&rest[0], &done[prev]);
                for (x, q) in rest[0].iter_mut().zip(&done[prev]) {
                    *x -= proj * q;
                }
            }
            let norm = crate::dense::vector_norm(&cols[j]);
            if norm < 1e-8 {
                ok = false;
                break;
            }
            for x in cols[j].iter_mut() {
                *x /= norm;
            }
        }
        if ok {
            return Ok(DenseMatrix::from_fn(dim, dim, |i, j| cols[j][i]));
        }
    }
}

/// A fixed unitary eigenbasis from which commuting Hermitian matrices are
/// assembled as `U diag(λ) U*`.
#[derive(Debug, Clone)]
pub struct CommonEigenbasis {
    unitary: DenseMatrix,
}

impl CommonEigenbasis {
    pub fn random(dim: usize, seed: Seed) -> Result<Self> {
        Ok(Self {
            unitary: rand_unitary(dim, seed)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.unitary.rows()
    }

    pub fn unitary(&self) -> &DenseMatrix {
        &self.unitary
    }

    pub fn compose(&self, spectrum: &[f64]) -> Result<HermitianMatrix> {
        if spectrum.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: spectrum.len(),
            });
        }
        let u = &self.unitary;
        Ok(HermitianMatrix::from_lower_fn(self.dim(), |i, j| {
            spectrum
                .iter()
                .enumerate()
                .map(|(k, &l)| u[(i, k)] * u[(j, k)].conj() * l)
                .sum()
        }))
    }
}

/// Spectra drawn for commuting families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumKind {
    /// Uniform on `[-1, 1]`.
    Signed,
    /// Uniform on `[0.1, 1]`.
    Positive,
}

impl SpectrumKind {
    fn draw(self, dim: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
        (0..dim)
            .map(|_| match self {
                SpectrumKind::Signed => rng.random_range(-1.0..=1.0),
                SpectrumKind::Positive => rng.random_range(0.1..=1.0),
            })
            .collect()
    }
}

/// `count` pairwise-commuting Hermitian matrices sharing one random eigenbasis.
pub fn rand_commuting_family(dim: usize, count: usize, seed: Seed) -> Result<Vec<HermitianMatrix>> {
    rand_commuting_family_with(dim, count, seed, SpectrumKind::Signed)
}

pub fn rand_commuting_family_with(
    dim: usize,
    count: usize,
    seed: Seed,
    kind: SpectrumKind,
) -> Result<Vec<HermitianMatrix>> {
    if count == 0 {
        return Err(Error::InvalidArgument(
            "family size must be at least 1".into(),
        ));
    }
    let basis = CommonEigenbasis::random(dim, seed)?;
    let mut rng = seed.derive(0x5eed).rng();
    (0..count)
        .map(|_| basis.compose(&kind.draw(dim, &mut rng)))
        .collect()
}

/// Three index-aligned sequences `C_n ⪯ A_n ⪯ B_n` (stored for `n = 1..=n_max`)
/// with a common limit.
#[derive(Debug, Clone)]
pub struct SandwichParts {
    pub lower: Vec<HermitianMatrix>,
    pub middle: Vec<HermitianMatrix>,
    pub upper: Vec<HermitianMatrix>,
    pub limit: HermitianMatrix,
    /// Convex weights `t_n` with `A_n = C_n + t_n (B_n − C_n)`.
    pub weights: Vec<f64>,
}

/// Premise-valid sandwich around `limit`:
/// `C_n = L − D_n`, `B_n = L + E_n` with `‖D_n‖ = ‖E_n‖ = schedule(n)`, and
/// `A_n` a seeded convex combination of the two.
pub fn make_sandwich_parts(
    limit: &HermitianMatrix,
    schedule: &DecaySchedule,
    n_max: usize,
    seed: Seed,
) -> Result<SandwichParts> {
    make_sandwich_parts_with(limit, schedule, n_max, seed, |rng| {
        rng.random_range(0.0..=1.0)
    })
}

/// As [`make_sandwich_parts`] with a caller-supplied weight draw.
pub fn make_sandwich_parts_with(
    limit: &HermitianMatrix,
    schedule: &DecaySchedule,
    n_max: usize,
    seed: Seed,
    mut weight: impl FnMut(&mut ChaCha8Rng) -> f64,
) -> Result<SandwichParts> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    schedule.validate()?;
    let dim = limit.dim();
    let mut rng = seed.rng();
    let mut parts = SandwichParts {
        lower: Vec::with_capacity(n_max),
        middle: Vec::with_capacity(n_max),
        upper: Vec::with_capacity(n_max),
        limit: limit.clone(),
        weights: Vec::with_capacity(n_max),
    };
    for n in 1..=n_max {
        let rate = schedule.value(n);
        let d = rand_psd(dim, Seed(rng.random()), rate)?;
        let e = rand_psd(dim, Seed(rng.random()), rate)?;
        let t = weight(&mut rng).clamp(0.0, 1.0);
        let lower = limit.try_sub(&d)?;
        let upper = limit.try_add(&e)?;
        let middle = lower.try_add(&upper.try_sub(&lower)?.scale(t))?;
        parts.lower.push(lower);
        parts.middle.push(middle);
        parts.upper.push(upper);
        parts.weights.push(t);
    }
    Ok(parts)
}

/// [`make_sandwich_parts`] packaged as a lab instance.
pub fn make_sandwich_instance(
    limit: &HermitianMatrix,
    schedule: &DecaySchedule,
    n_max: usize,
    seed: Seed,
) -> Result<SandwichInstance> {
    SandwichInstance::from_parts(&make_sandwich_parts(limit, schedule, n_max, seed)?)
}

/// Sandwich with limit 0 and PSD lower sequence: `C_n = D_n`,
/// `B_n = D_n + E_n`, `A_n` between them.
pub fn make_positive_sandwich_parts(
    dim: usize,
    schedule: &DecaySchedule,
    n_max: usize,
    seed: Seed,
) -> Result<SandwichParts> {
    require_dim(dim)?;
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    schedule.validate()?;
    let mut rng = seed.rng();
    let mut parts = SandwichParts {
        lower: Vec::with_capacity(n_max),
        middle: Vec::with_capacity(n_max),
        upper: Vec::with_capacity(n_max),
        limit: HermitianMatrix::zeros(dim),
        weights: Vec::with_capacity(n_max),
    };
    for n in 1..=n_max {
        let rate = schedule.value(n);
        let d = rand_psd(dim, Seed(rng.random()), rate)?;
        let e = rand_psd(dim, Seed(rng.random()), rate)?;
        let t: f64 = rng.random_range(0.0..=1.0);
        let upper = d.try_add(&e)?;
        let middle = d.try_add(&e.scale(t))?;
        parts.lower.push(d);
        parts.middle.push(middle);
        parts.upper.push(upper);
        parts.weights.push(t);
    }
    Ok(parts)
}

/// The 2×2 pair with `−B ⪯ A ⪯ B` but not `|A| ⪯ B`.
pub fn stored_interval_witness() -> (HermitianMatrix, HermitianMatrix) {
    let a = HermitianMatrix::from_diagonal(&[1.0, -1.0]);
    let b =
        HermitianMatrix::from_lower_fn(2, |i, j| Scalar::new(if i == j { 1.1 } else { 0.4 }, 0.0));
    (a, b)
}

/// Order margins of one candidate pair.
#[derive(Debug, Clone)]
pub struct IntervalTrial {
    pub trial: u64,
    pub a: HermitianMatrix,
    pub b: HermitianMatrix,
    /// Minimum eigenvalue of `B + A`.
    pub lower_margin: f64,
    /// Minimum eigenvalue of `B − A`.
    pub upper_margin: f64,
    /// Minimum eigenvalue of `B − |A|`.
    pub modulus_margin: f64,
    pub is_witness: bool,
}

/// Tests a pair for `−B ⪯ A ⪯ B` together with `|A| ⪯̸ B`.
pub fn check_interval_pair(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    tol: OrderTolerance,
) -> Result<(f64, f64, f64, bool)> {
    let lower = loewner_margin(&b.neg(), a, tol)?;
    let upper = loewner_margin(a, b, tol)?;
    let modulus = loewner_margin(&abs_op(&a.to_dense())?, b, tol)?;
    let witness = lower.holds() && upper.holds() && !modulus.holds();
    Ok((
        lower.min_eigenvalue,
        upper.min_eigenvalue,
        modulus.min_eigenvalue,
        witness,
    ))
}

/// Candidate `trial` of the interval search: `A` a random ±1 diagonal and
/// `B = (1 + ε) I + δ W` with `W` a random symmetric off-diagonal pattern.
pub fn interval_trial(dim: usize, seed: Seed, trial: u64) -> Result<IntervalTrial> {
    require_dim(dim)?;
    let mut rng = seed.derive(trial).rng();
    let signs: Vec<f64> = (0..dim)
        .map(|_| if rng.random_bool(0.5) { 1.0 } else { -1.0 })
        .collect();
    let eps: f64 = rng.random_range(0.0..0.5);
    let delta: f64 = rng.random_range(0.0..1.0);
    let mut pattern = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in 0..i {
            let w: f64 = rng.random_range(-1.0..=1.0);
            pattern[i * dim + j] = w;
        }
    }
    let a = HermitianMatrix::from_diagonal(&signs);
    let b = HermitianMatrix::from_lower_fn(dim, |i, j| {
        Scalar::new(
            if i == j {
                1.0 + eps
            } else {
                delta * pattern[i * dim + j]
            },
            0.0,
        )
    });
    let (lower_margin, upper_margin, modulus_margin, is_witness) =
        check_interval_pair(&a, &b, OrderTolerance::default())?;
    Ok(IntervalTrial {
        trial,
        a,
        b,
        lower_margin,
        upper_margin,
        modulus_margin,
        is_witness,
    })
}

/// Seeded search for a pair with `−B ⪯ A ⪯ B` and `|A| ⪯̸ B`. Returns the
/// witness with the smallest trial index; in dimension 1 none exists.
pub fn search_interval_counterexample(
    dim: usize,
    trials: u64,
    seed: Seed,
) -> Result<Option<(HermitianMatrix, HermitianMatrix)>> {
    require_dim(dim)?;
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    if dim == 1 {
        return Ok(None);
    }
    for trial in 0..trials {
        let t = interval_trial(dim, seed, trial)?;
        if t.is_witness {
            // Re-verify from scratch before handing it out.
            let (_, _, _, again) = check_interval_pair(&t.a, &t.b, OrderTolerance::default())?;
            if again {
                return Ok(Some((t.a, t.b)));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::{is_psd, loewner_leq};
    use crate::spectral::op_norm;

    #[test]
    fn hermitian_generator_is_deterministic_and_normalized() {
        let a = rand_hermitian(4, Seed(42), 1.0).unwrap();
        assert_eq!(a, rand_hermitian(4, Seed(42), 1.0).unwrap());
        assert!(a.to_dense().is_exactly_hermitian());
        assert!((hermitian_norm(&a).unwrap() - 1.0).abs() < 1e-10);
        assert_ne!(a, rand_hermitian(4, Seed(43), 1.0).unwrap());
    }

    #[test]
    fn psd_generator() {
        let tol = OrderTolerance::default();
        let a = rand_psd(6, Seed(9), 2.5).unwrap();
        assert!(is_psd(&a, tol).unwrap());
        assert!((hermitian_norm(&a).unwrap() - 2.5).abs() < 1e-10);
        let m = abs_op(&a.to_dense()).unwrap();
        assert!((&m.to_dense() - &a.to_dense()).frobenius_norm() <= 1e-9 * 2.5);
    }

    #[test]
    fn unitary_is_orthonormal() {
        let u = rand_unitary(7, Seed(1)).unwrap();
        let defect = (&(&u.adjoint() * &u) - &DenseMatrix::identity(7)).frobenius_norm();
        assert!(defect < 1e-13);
    }

    #[test]
    fn commuting_family_commutes() {
        let fam = rand_commuting_family(5, 4, Seed(13)).unwrap();
        for a in &fam {
            for b in &fam {
                let (a, b) = (a.to_dense(), b.to_dense());
                let comm = &(&a * &b) - &(&b * &a);
                assert!(op_norm(&comm).unwrap() <= 1e-10);
            }
        }
        assert_eq!(rand_commuting_family(3, 1, Seed(0)).unwrap().len(), 1);
        let pos = rand_commuting_family_with(4, 3, Seed(2), SpectrumKind::Positive).unwrap();
        assert!(pos
            .iter()
            .all(|m| is_psd(m, OrderTolerance::default()).unwrap()));
    }

    #[test]
    fn schedules() {
        assert_eq!(DecaySchedule::Harmonic { k: 2.0 }.value(4), 0.5);
        assert!((DecaySchedule::Geometric { k: 1.0, r: 0.5 }.value(3) - 0.125).abs() < 1e-16);
        assert_eq!(DecaySchedule::Table(vec![3.0, 2.0]).value(10), 2.0);
        assert!(DecaySchedule::Geometric { k: 1.0, r: 1.0 }
            .validate()
            .is_err());
        assert!(DecaySchedule::Table(vec![1.0, 2.0]).validate().is_err());
        assert!(DecaySchedule::Harmonic { k: 0.0 }.validate().is_err());
    }

    #[test]
    fn sandwich_parts_are_ordered() {
        let tol = OrderTolerance::default();
        let limit = rand_hermitian(4, Seed(5), 1.0).unwrap();
        let sched = DecaySchedule::Harmonic { k: 1.0 };
        let p = make_sandwich_parts(&limit, &sched, 12, Seed(3)).unwrap();
        for n in 0..12 {
            assert!(loewner_leq(&p.lower[n], &p.middle[n], tol).unwrap());
            assert!(loewner_leq(&p.middle[n], &p.upper[n], tol).unwrap());
            let e = hermitian_norm(&p.upper[n].try_sub(&limit).unwrap()).unwrap();
            assert!((e - sched.value(n + 1)).abs() < 1e-10);
        }
        let degenerate = make_sandwich_parts_with(&limit, &sched, 3, Seed(3), |_| 0.0).unwrap();
        assert_eq!(degenerate.middle, degenerate.lower);
    }

    #[test]
    fn interval_search() {
        assert_eq!(
            search_interval_counterexample(1, 100, Seed(1)).unwrap(),
            None
        );
        let (a, b) = search_interval_counterexample(2, 10_000, Seed(1))
            .unwrap()
            .expect("witness");
        let (_, _, _, ok) = check_interval_pair(&a, &b, OrderTolerance::default()).unwrap();
        assert!(ok);
        let (a, b) = stored_interval_witness();
        let (lo, up, modulus, ok) = check_interval_pair(&a, &b, OrderTolerance::default()).unwrap();
        assert!(ok && lo > 0.0 && up > 0.0);
        assert!((modulus + 0.3).abs() < 1e-9);
    }
}
