use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use opseq::generators::rand_psd;
use opseq::lab::section_modulus_probe;
use opseq::{abs_op, eigh, op_norm, sqrt_psd, FinSuppVector, OrderTolerance, Seed};
use opseq_bench::{hermitian_fixture, symmetrized_shift};

fn bench_eigh(c: &mut Criterion) {
    let mut group = c.benchmark_group("eigh");
    for dim in [4usize, 16, 64] {
        let a = hermitian_fixture(dim);
        group.bench_with_input(BenchmarkId::from_parameter(dim), &a, |b, a| {
            b.iter(|| eigh(black_box(a)))
        });
    }
    group.finish();
}

fn bench_calculus(c: &mut Criterion) {
    let mut group = c.benchmark_group("calculus");
    for dim in [8usize, 32] {
        let p = rand_psd(dim, Seed(7), 1.0).unwrap();
        group.bench_with_input(BenchmarkId::new("sqrt_psd", dim), &p, |b, p| {
            b.iter(|| sqrt_psd(black_box(p), OrderTolerance::default()))
        });
        let m = hermitian_fixture(dim).to_dense();
        group.bench_with_input(BenchmarkId::new("abs_op", dim), &m, |b, m| {
            b.iter(|| abs_op(black_box(m)))
        });
        group.bench_with_input(BenchmarkId::new("op_norm", dim), &m, |b, m| {
            b.iter(|| op_norm(black_box(m)))
        });
    }
    group.finish();
}

fn bench_band(c: &mut Criterion) {
    let mut group = c.benchmark_group("band");
    for n in [4usize, 32] {
        let a = symmetrized_shift(n);
        group.bench_with_input(BenchmarkId::new("compose", n), &a, |b, a| {
            b.iter(|| black_box(a).compose(a))
        });
        let e0 = FinSuppVector::basis(0);
        group.bench_with_input(BenchmarkId::new("section_probe", n), &a, |b, a| {
            b.iter(|| section_modulus_probe(black_box(a), 4 * n, &e0))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_eigh, bench_calculus, bench_band);
criterion_main!(benches);
