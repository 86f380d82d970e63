//! Banded operators on ℓ²(ℕ) with eventually-constant diagonals.
//!
//! Indices start at 0. The diagonal at offset `k` holds the entries
//! `A[t + max(k, 0), t + max(-k, 0)]` for `t ≥ 0`, so positive offsets sit
//! below the main diagonal. The forward shift `S e_j = e_{j+1}` is the
//! all-ones diagonal at offset `+1`.
//!
//! Sums, scalings, adjoints and products of such operators stay in the class,
//! and every operation here works on finitely many stored values. Equality is
//! equality on all of ℓ²(ℕ), not on a window.

use std::collections::BTreeMap;

use crate::dense::{DenseMatrix, Scalar};
use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;

const ZERO: Scalar = Scalar::new(0.0, 0.0);
const ONE: Scalar = Scalar::new(1.0, 0.0);

/// An eventually-constant sequence: `head` followed by `tail` forever.
///
/// Canonical form: the last head entry differs from `tail`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvSeq {
    head: Vec<Scalar>,
    tail: Scalar,
}

impl EvSeq {
    pub fn new(mut head: Vec<Scalar>, tail: Scalar) -> Self {
        while head.last() == Some(&tail) {
            head.pop();
        }
        Self { head, tail }
    }

    pub fn constant(value: Scalar) -> Self {
        Self::new(Vec::new(), value)
    }

    pub fn zero() -> Self {
        Self::constant(ZERO)
    }

    pub fn head(&self) -> &[Scalar] {
        &self.head
    }

    pub fn tail(&self) -> Scalar {
        self.tail
    }

    pub fn get(&self, t: usize) -> Scalar {
        self.head.get(t).copied().unwrap_or(self.tail)
    }

    pub fn is_zero(&self) -> bool {
        self.head.is_empty() && self.tail == ZERO
    }

    /// Sequence `t ↦ f(t)` that is known to equal `tail` for all `t ≥ len`.
    fn tabulate(len: usize, tail: Scalar, f: impl Fn(usize) -> Scalar) -> Self {
        Self::new((0..len).map(f).collect(), tail)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Scalar, Scalar) -> Scalar) -> Self {
        let len = self.head.len().max(other.head.len());
        Self::tabulate(len, f(self.tail, other.tail), |t| {
            f(self.get(t), other.get(t))
        })
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn scale(&self, c: Scalar) -> Self {
        Self::new(self.head.iter().map(|&z| z * c).collect(), self.tail * c)
    }

    pub fn conj(&self) -> Self {
        Self::new(
            self.head.iter().map(|z| z.conj()).collect(),
            self.tail.conj(),
        )
    }
}

/// A banded operator on ℓ²(ℕ); only nonzero diagonals are stored.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BandOperator {
    diagonals: BTreeMap<i64, EvSeq>,
}

/// Position of entry `(i, j)` on its diagonal: `(offset, t)`.
#[inline]
fn locate(i: usize, j: usize) -> (i64, usize) {
    (i as i64 - j as i64, i.min(j))
}

/// Entry coordinates of position `t` on diagonal `k`.
#[inline]
fn coordinates(k: i64, t: usize) -> (usize, usize) {
    if k >= 0 {
        (t + k as usize, t)
    } else {
        (t, t + k.unsigned_abs() as usize)
    }
}

impl BandOperator {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        Self::from_diagonals([(0, EvSeq::constant(ONE))])
    }

    /// Builds from `(offset, diagonal)` pairs; zero diagonals are dropped and
    /// repeated offsets are summed.
    pub fn from_diagonals(diagonals: impl IntoIterator<Item = (i64, EvSeq)>) -> Self {
        let mut out = BTreeMap::<i64, EvSeq>::new();
        for (k, d) in diagonals {
            let merged = match out.remove(&k) {
                Some(prev) => prev.add(&d),
                None => d,
            };
            if !merged.is_zero() {
                out.insert(k, merged);
            }
        }
        Self { diagonals: out }
    }

    pub fn diagonal(&self, offset: i64) -> Option<&EvSeq> {
        self.diagonals.get(&offset)
    }

    pub fn diagonals(&self) -> impl Iterator<Item = (i64, &EvSeq)> {
        self.diagonals.iter().map(|(&k, d)| (k, d))
    }

    /// Largest `|offset|` among nonzero diagonals.
    pub fn width(&self) -> usize {
        self.diagonals
            .keys()
            .map(|k| k.unsigned_abs() as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.diagonals.is_empty()
    }

    pub fn entry(&self, i: usize, j: usize) -> Scalar {
        let (k, t) = locate(i, j);
        self.diagonals.get(&k).map_or(ZERO, |d| d.get(t))
    }

    fn max_head(&self) -> usize {
        self.diagonals
            .values()
            .map(|d| d.head.len())
            .max()
            .unwrap_or(0)
    }

    /// `S^n`, the `n`-th power of the forward shift.
    pub fn shift_power(n: usize) -> Self {
        Self::from_diagonals([(n as i64, EvSeq::constant(ONE))])
    }

    /// `(A*)[i, j] = conj(A[j, i])`.
    pub fn adjoint(&self) -> Self {
        Self {
            diagonals: self
                .diagonals
                .iter()
                .map(|(&k, d)| (-k, d.conj()))
                .collect(),
        }
    }

    pub fn is_selfadjoint(&self) -> bool {
        *self == self.adjoint()
    }

    /// Exact operator product `A B`.
    pub fn compose(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let reach = (self.width() + other.width()) as i64;
        // Beyond this position every factor sits in its tail and no index
        // clipping at 0 remains.
        let len = self.max_head() + other.max_head() + 2 * reach as usize + 1;
        let mut out = Vec::new();
        for k in -reach..=reach {
            let mut tail = ZERO;
            for (&p, dp) in &self.diagonals {
                if other.diagonals.contains_key(&(k - p)) {
                    tail += dp.tail * other.diagonals[&(k - p)].tail;
                }
            }
            let seq = EvSeq::tabulate(len, tail, |t| {
                let (i, j) = coordinates(k, t);
                self.diagonals
                    .keys()
                    .filter_map(|&p| {
                        let m = i as i64 - p;
                        if m < 0 || !other.diagonals.contains_key(&(k - p)) {
                            return None;
                        }
                        let m = m as usize;
                        Some(self.entry(i, m) * other.entry(m, j))
                    })
                    .sum()
            });
            out.push((k, seq));
        }
        Self::from_diagonals(out)
    }

    /// Exact linear combination `Σ c_i A_i`.
    pub fn linear_comb<'a>(terms: impl IntoIterator<Item = (Scalar, &'a BandOperator)>) -> Self {
        Self::from_diagonals(
            terms
                .into_iter()
                .flat_map(|(c, a)| a.diagonals.iter().map(move |(&k, d)| (k, d.scale(c))))
                .collect::<Vec<_>>(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::linear_comb([(ONE, self), (ONE, other)])
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::linear_comb([(ONE, self), (-ONE, other)])
    }

    pub fn scale(&self, c: Scalar) -> Self {
        Self::linear_comb([(c, self)])
    }

    /// Exact image `A x`.
    pub fn apply(&self, x: &FinSuppVector) -> FinSuppVector {
        let mut out = BTreeMap::<usize, Scalar>::new();
        for (&j, &xj) in &x.coeffs {
            for (&k, d) in &self.diagonals {
                let i = j as i64 + k;
                if i < 0 {
                    continue;
                }
                let i = i as usize;
                let a = d.get(i.min(j));
                if a != ZERO {
                    *out.entry(i).or_insert(ZERO) += a * xj;
                }
            }
        }
        FinSuppVector::from_map(out)
    }

    /// `⟨A x, y⟩`.
    pub fn pairing(&self, x: &FinSuppVector, y: &FinSuppVector) -> Scalar {
        self.apply(x).inner(y)
    }

    /// The upper-left `N × N` corner `P_N A P_N`.
    pub fn finite_section(&self, n: usize) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(n, n);
        for (&k, d) in &self.diagonals {
            let span = k.unsigned_abs() as usize;
            for t in 0..n.saturating_sub(span) {
                let (i, j) = coordinates(k, t);
                m[(i, j)] = d.get(t);
            }
        }
        m
    }

    /// Finite section typed as Hermitian; fails unless the band is
    /// self-adjoint.
    pub fn hermitian_section(&self, n: usize) -> Result<HermitianMatrix> {
        if !self.is_selfadjoint() {
            return Err(Error::NotSelfAdjoint);
        }
        HermitianMatrix::try_from_dense(&self.finite_section(n))
    }
}

/// `A = B` as operators on all of ℓ²(ℕ).
pub fn band_equals(a: &BandOperator, b: &BandOperator) -> bool {
    a == b
}

/// A finitely supported vector in ℓ²(ℕ); zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FinSuppVector {
    coeffs: BTreeMap<usize, Scalar>,
}

impl FinSuppVector {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Standard basis vector `e_i`.
    pub fn basis(i: usize) -> Self {
        Self::from_map(BTreeMap::from([(i, ONE)]))
    }

    pub fn from_map(mut coeffs: BTreeMap<usize, Scalar>) -> Self {
        coeffs.retain(|_, z| *z != ZERO);
        Self { coeffs }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, Scalar)>) -> Self {
        let mut coeffs = BTreeMap::new();
        for (i, z) in pairs {
            *coeffs.entry(i).or_insert(ZERO) += z;
        }
        Self::from_map(coeffs)
    }

    pub fn from_dense(values: &[Scalar]) -> Self {
        Self::from_pairs(values.iter().copied().enumerate())
    }

    pub fn get(&self, i: usize) -> Scalar {
        self.coeffs.get(&i).copied().unwrap_or(ZERO)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, Scalar)> + '_ {
        self.coeffs.iter().map(|(&i, &z)| (i, z))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn max_support(&self) -> Option<usize> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn min_support(&self) -> Option<usize> {
        self.coeffs.keys().next().copied()
    }

    pub fn norm(&self) -> f64 {
        self.coeffs
            .values()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `⟨self, other⟩`, conjugate-linear in `other`.
    pub fn inner(&self, other: &Self) -> Scalar {
        self.coeffs
            .iter()
            .filter_map(|(i, a)| other.coeffs.get(i).map(|b| a * b.conj()))
            .sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_pairs(self.iter().chain(other.iter()))
    }

    pub fn scale(&self, c: Scalar) -> Self {
        Self::from_pairs(self.iter().map(|(i, z)| (i, z * c)))
    }

    /// Dense copy of the first `n` coordinates.
    pub fn truncate_dense(&self, n: usize) -> Vec<Scalar> {
        (0..n).map(|i| self.get(i)).collect()
    }
}
