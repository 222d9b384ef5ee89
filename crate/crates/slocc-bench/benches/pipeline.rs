use criterion::{criterion_group, criterion_main, Criterion};
use slocc_core::canonical::classify;
use slocc_core::state::MatrixPair;
use slocc_core::verify::{pencil_invariants_oracle, random_ilo, stabilizer_dimension};
use slocc_core::{enumerate_families, instantiate, Seed};

fn moved_instance(m: usize, n: usize, family: usize, seed: u64) -> MatrixPair {
    let fams = enumerate_families(m, n, true).unwrap();
    let fam = &fams[family % fams.len()];
    let member = instantiate(fam, &fam.default_params()).unwrap();
    random_ilo(m, n, Seed(seed)).apply(&member)
}

fn bench_classify(c: &mut Criterion) {
    let mut group = c.benchmark_group("classify");
    group.sample_size(20);
    let ghz = MatrixPair::ghz();
    group.bench_function("ghz", |b| b.iter(|| classify(&ghz).unwrap()));
    let s46 = moved_instance(4, 6, 0, 7);
    group.bench_function("moved_4x6", |b| b.iter(|| classify(&s46).unwrap()));
    let s67 = moved_instance(6, 7, 5, 9);
    group.bench_function("moved_6x7", |b| b.iter(|| classify(&s67).unwrap()));
    group.finish();
}

fn bench_enumerate(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate");
    group.sample_size(20);
    group.bench_function("families_6x7", |b| {
        b.iter(|| enumerate_families(6, 7, true).unwrap().len())
    });
    group.finish();
}

fn bench_oracles(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracles");
    group.sample_size(10);
    let s55 = moved_instance(5, 5, 3, 21);
    group.bench_function("pencil_invariants_5x5", |b| {
        b.iter(|| pencil_invariants_oracle(&s55).unwrap())
    });
    group.bench_function("stabilizer_5x5", |b| b.iter(|| stabilizer_dimension(&s55)));
    let s67 = moved_instance(6, 7, 11, 23);
    group.bench_function("stabilizer_6x7", |b| b.iter(|| stabilizer_dimension(&s67)));
    group.finish();
}

criterion_group!(benches, bench_classify, bench_enumerate, bench_oracles);
criterion_main!(benches);
