use criterion::{criterion_group, criterion_main, Criterion};
use fcl_dvr_core::scenario::presets;
use fcl_dvr_core::run_scenario;
use std::hint::black_box;

fn simulation(c: &mut Criterion) {
    let mut group = c.benchmark_group("simulate");
    group.sample_size(20);
    let quiet = presets::table2();
    group.bench_function("table2_quiet_400ms", |b| b.iter(|| run_scenario(black_box(&quiet)).unwrap()));
    let eventful = presets::table2_sag_fault();
    group.bench_function("table2_sag_fault_400ms", |b| b.iter(|| run_scenario(black_box(&eventful)).unwrap()));
    let filtered = presets::table3();
    group.bench_function("table3_400ms", |b| b.iter(|| run_scenario(black_box(&filtered)).unwrap()));
    group.finish();
}

criterion_group!(benches, simulation);
criterion_main!(benches);
