use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use onebit_core::complexity::{gaussian_width_with, lambda_monte_carlo};
use onebit_core::harness::{run_sweep, ExperimentSpec};
use onebit_core::{Execution, Quantizer, SignalSet, SolverConfig};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn width(c: &mut Criterion) {
    let set = SignalSet::eff_sparse(256, 8).unwrap();
    let mut group = c.benchmark_group("gaussian_width/eff_sparse_256_8");
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| gaussian_width_with(black_box(&set), 20_000, 1, exec).unwrap())
        });
    }
    group.finish();
}

fn lambda(c: &mut Criterion) {
    let q = Quantizer::AdditiveGaussian { sigma: 1.0 };
    let mut group = c.benchmark_group("lambda_monte_carlo/1e5");
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| lambda_monte_carlo(black_box(&q), 100_000, 1, exec).unwrap())
        });
    }
    group.finish();
}

fn sweep(c: &mut Criterion) {
    let spec = ExperimentSpec {
        n: 64,
        s: 4,
        set: SignalSet::eff_sparse(64, 4).unwrap(),
        quantizer: Quantizer::Sign,
        signal: None,
        m_grid: vec![100, 200, 400],
        trials_per_m: 8,
        mu_grid: None,
        mu_sweep_constant: 2.0,
        solver: SolverConfig::default(),
        base_seed: 1,
        record_timing: false,
    };
    let mut group = c.benchmark_group("run_sweep/n64_s4");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| run_sweep(black_box(&spec), exec).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, width, lambda, sweep);
criterion_main!(benches);
