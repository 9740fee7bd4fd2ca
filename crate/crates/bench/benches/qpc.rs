use criterion::{black_box, criterion_group, criterion_main, Criterion};
use qpc_core::{optimize, sample_bm, BellIndex, ChainConfig, CodeParams, PMuTable, SearchSpace};

fn pmu(c: &mut Criterion) {
    let code = CodeParams::new(23, 5).unwrap();
    c.bench_function("p_mu table (23,5)", |b| b.iter(|| PMuTable::compute(black_box(code))));
}

fn chain(c: &mut Criterion) {
    let base = ChainConfig::new(1000.0, 2.0).unwrap();
    let space = SearchSpace::default();
    let mut group = c.benchmark_group("optimize");
    group.sample_size(10);
    group.bench_function("1000 km full grid", |b| b.iter(|| optimize(1000.0, &space, &base).unwrap()));
    group.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let code = CodeParams::new(6, 5).unwrap();
    let mut group = c.benchmark_group("sample_bm");
    group.sample_size(10);
    group.bench_function("(6,5) 10k trials", |b| {
        b.iter(|| sample_bm(code, BellIndex::new(0, 0), 0.9, 10_000, 7).unwrap())
    });
    group.finish();
}

criterion_group!(benches, pmu, chain, monte_carlo);
criterion_main!(benches);
