use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qmetro::numerics::hermitian_eigendecompose;
use qmetro::spin::jz;
use qmetro::states::squeezed_ground_state;
use qmetro::{qfi, SqueezingSpec};
use qmetro_bench::{random_density, random_hermitian};

fn eigendecomposition(c: &mut Criterion) {
    let mut group = c.benchmark_group("hermitian_eigendecompose");
    for dim in [16, 64, 256] {
        let m = random_hermitian(dim);
        group.bench_with_input(BenchmarkId::from_parameter(dim), &m, |b, m| {
            b.iter(|| hermitian_eigendecompose(black_box(m)).unwrap())
        });
    }
    group.finish();
}

fn fisher_information(c: &mut Criterion) {
    let mut group = c.benchmark_group("qfi_mixed");
    group.sample_size(20);
    for n in [4, 6, 8] {
        let state = random_density(n);
        let gen = jz(state.rep()).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &state, |b, s| {
            b.iter(|| qfi(black_box(s), &gen).unwrap().value)
        });
    }
    group.finish();
}

fn squeezed_states(c: &mut Criterion) {
    let mut group = c.benchmark_group("squeezed_ground_state");
    for n in [100, 1000] {
        let spec = SqueezingSpec::new(n, 0.05 * n as f64).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &spec, |b, spec| {
            b.iter(|| squeezed_ground_state(black_box(*spec)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, eigendecomposition, fisher_information, squeezed_states);
criterion_main!(benches);
