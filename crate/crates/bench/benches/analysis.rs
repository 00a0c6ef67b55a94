use criterion::{criterion_group, criterion_main, Criterion};
use fcl_dvr_core::analysis::{fit_fundamental, sliding_rms, thd, DEFAULT_HARMONIC_CAP};
use fcl_dvr_core::io::{read_trace, write_trace};
use fcl_dvr_core::run_scenario;
use fcl_dvr_core::scenario::presets;
use std::f64::consts::PI;
use std::hint::black_box;

const DT: f64 = 1e-5;

fn distorted(periods: usize) -> Vec<f64> {
    (0..periods * 2000)
        .map(|k| {
            let w = 2.0 * PI * 50.0 * k as f64 * DT;
            311.0 * w.sin() + 25.0 * (5.0 * w).sin() + 15.0 * (7.0 * w).sin()
        })
        .collect()
}

fn analysis(c: &mut Criterion) {
    let one = distorted(1);
    let ten = distorted(10);
    c.bench_function("thd_1_period_h50", |b| b.iter(|| thd(black_box(&one), DT, 50.0, DEFAULT_HARMONIC_CAP)));
    c.bench_function("sliding_rms_10_periods", |b| b.iter(|| sliding_rms(black_box(&ten), 2000)));
    c.bench_function("fit_fundamental_1_period", |b| {
        b.iter(|| fit_fundamental(black_box(&one), 0.0, DT, 2.0 * PI * 50.0))
    });

    let trace = run_scenario(&presets::table2_sag_fault()).unwrap().trace;
    let mut csv = Vec::new();
    write_trace(&trace, &mut csv).unwrap();
    let mut group = c.benchmark_group("trace_csv");
    group.sample_size(20);
    group.bench_function("write_40001_rows", |b| {
        b.iter(|| {
            let mut out = Vec::with_capacity(csv.len());
            write_trace(black_box(&trace), &mut out).unwrap();
            out
        })
    });
    group.bench_function("read_40001_rows", |b| b.iter(|| read_trace(black_box(csv.as_slice())).unwrap()));
    group.finish();
}

criterion_group!(benches, analysis);
criterion_main!(benches);
