use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lclab_bench::{law, sampler_catalog};
use lclab_core::monge::{solve_primal, TransportInstance};
use lclab_core::onedim::spectral_gap_fd;
use lclab_core::slicing::knn_entropy;
use lclab_core::{mc, LogConcaveMeasure as M, Method};
use std::hint::black_box;

fn samplers(c: &mut Criterion) {
    let mut g = c.benchmark_group("sample_10k");
    for (name, m) in sampler_catalog() {
        g.bench_function(name, |b| b.iter(|| mc::sample(&m, 10_000, 1, Method::Direct).unwrap()));
    }
    let gauss = M::std_gaussian(8);
    g.bench_function("mala_gaussian_d8", |b| {
        b.iter(|| mc::sample(&gauss, 10_000, 1, Method::Mala { step: 0.5, burn_in: 500 }).unwrap())
    });
    g.finish();
}

fn fd_gap(c: &mut Criterion) {
    let mut g = c.benchmark_group("spectral_gap_fd");
    let l = law(&M::ShiftedExponential);
    for n in [1_000, 10_000] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| b.iter(|| spectral_gap_fd(&l, n).unwrap()));
    }
    g.finish();
}

fn monge(c: &mut Criterion) {
    let mut g = c.benchmark_group("transport_primal");
    for n in [6, 20] {
        let inst = TransportInstance::random_uniform(n, n, 2, 3);
        g.bench_with_input(BenchmarkId::from_parameter(n), &inst, |b, inst| b.iter(|| solve_primal(inst).unwrap()));
    }
    g.finish();
}

fn entropy(c: &mut Criterion) {
    let mut g = c.benchmark_group("knn_entropy");
    for n in [2_000, 20_000] {
        let pts = mc::sample(&M::std_gaussian(3), n, 5, Method::Direct).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &pts.data, |b, data| b.iter(|| knn_entropy(black_box(data), 3, false)));
    }
    g.finish();
}

criterion_group!(benches, samplers, fd_gap, monge, entropy);
criterion_main!(benches);
