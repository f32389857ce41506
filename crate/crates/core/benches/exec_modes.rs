use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use loo_witness::criteria::BoundKind;
use loo_witness::oracle::sampled_max_trace;
use loo_witness::qstate::upb_state;
use loo_witness::scan::{run_scan, Family, ScanSpec, ScoreKind};
use loo_witness::witness::correlation_matrix;
use loo_witness::{loo, ExecMode};

const MODES: [(&str, ExecMode); 2] = [("sequential", ExecMode::Sequential), ("parallel", ExecMode::Parallel)];

fn bench_scan(c: &mut Criterion) {
    let mut group = c.benchmark_group("upb_bound_scan");
    let mut spec = ScanSpec::new(Family::UpbNoise, ScoreKind::Bound(BoundKind::Lmax));
    spec.start = 0.85;
    spec.step = 0.005;
    for (name, mode) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &mode, |b, &mode| {
            b.iter(|| run_scan(black_box(&spec), mode).unwrap())
        });
    }
    group.finish();
}

fn bench_oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle_sampling_9x9");
    let g = loo::gell_mann_basis(3).unwrap();
    let mu = correlation_matrix(&upb_state(), &g, &g).unwrap().matrix;
    for (name, mode) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &mode, |b, &mode| {
            b.iter(|| sampled_max_trace(black_box(&mu), 4096, 7, mode).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_scan, bench_oracle);
criterion_main!(benches);
