use combing::{build_region, build_table, rate_lower_bound};
use combing_bench::fixtures;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

fn table(c: &mut Criterion) {
    let mut group = c.benchmark_group("build_table");
    for (name, state) in fixtures(&[3, 5, 7]) {
        group.bench_with_input(BenchmarkId::from_parameter(name), &state, |b, s| {
            b.iter(|| build_table(black_box(s)).unwrap())
        });
    }
    group.finish();
}

fn region(c: &mut Criterion) {
    let mut group = c.benchmark_group("build_region");
    for (name, state) in fixtures(&[3, 4, 5]) {
        let t = build_table(&state).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(name), &t, |b, t| {
            b.iter(|| build_region(black_box(t)).unwrap())
        });
    }
    group.finish();
}

fn volume(c: &mut Criterion) {
    let mut group = c.benchmark_group("volume");
    for (name, state) in fixtures(&[3, 4]) {
        let r = build_region(&build_table(&state).unwrap()).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(name), &r, |b, r| {
            b.iter(|| black_box(r).volume())
        });
    }
    group.finish();
}

fn rate(c: &mut Criterion) {
    let states = fixtures(&[3]);
    let (source, target) = (&states[1].1, &states[0].1);
    c.bench_function("rate_lower_bound/haar3_to_ghz3", |b| {
        b.iter(|| rate_lower_bound(black_box(source), black_box(target), 0).unwrap())
    });
}

criterion_group!(benches, table, region, volume, rate);
criterion_main!(benches);
