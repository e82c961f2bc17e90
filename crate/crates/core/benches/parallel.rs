//! Sequential vs rayon execution of the data-parallel kernels.
//!
//! Without the `parallel` feature both variants run sequentially.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dmftq::dmft::{sweep, DmftConfig};
use dmftq::greens::{fit_series_with, measure_series, FitOptions, MeasureConfig};
use dmftq::model::SiamParams;
use dmftq::noise::{infidelity_map, NoiseParams};
use dmftq::par::Exec;

const MODES: [(Exec, &str); 2] = [(Exec::Sequential, "sequential"), (Exec::Parallel, "parallel")];

fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64)).collect()
}

fn bench_fidelity_map(c: &mut Criterion) {
    let (taus, lambdas) = (logspace(-5.0, 0.0, 12), logspace(-6.0, -2.0, 12));
    let mut g = c.benchmark_group("infidelity_map_12x12");
    for (exec, name) in MODES {
        g.bench_function(name, |b| b.iter(|| infidelity_map(black_box(&taus), &lambdas, &NoiseParams::ideal(), exec).unwrap()));
    }
    g.finish();
}

fn bench_density_series(c: &mut Criterion) {
    let p = SiamParams::half_filled(4.0, 0.63);
    let noise = NoiseParams::new(1.1e-3, 4e-4).unwrap();
    let mut g = c.benchmark_group("density_series_24_steps");
    g.sample_size(10);
    for (exec, name) in MODES {
        let cfg = MeasureConfig { exec, ..MeasureConfig::density(noise, 75_000, 1) };
        g.bench_function(name, |b| b.iter(|| measure_series(black_box(&p), 0.5, 24, &cfg).unwrap()));
    }
    g.finish();
}

fn bench_fit(c: &mut Criterion) {
    let p = SiamParams::half_filled(4.0, 0.63);
    let series = measure_series(&p, 0.25, 48, &MeasureConfig::statevector()).unwrap();
    let mut g = c.benchmark_group("fit_multistart_48_points");
    for (exec, name) in MODES {
        let opts = FitOptions { exec, ..FitOptions::default() };
        g.bench_function(name, |b| b.iter(|| fit_series_with(black_box(&series), &opts).unwrap()));
    }
    g.finish();
}

fn bench_sweep(c: &mut Criterion) {
    let us = [1.0, 2.0, 3.0, 4.0, 5.0, 5.5];
    let mut g = c.benchmark_group("statevector_sweep");
    g.sample_size(10);
    for (exec, name) in MODES {
        let mut base = DmftConfig::new(0.0);
        base.measure.exec = exec;
        base.fit.exec = exec;
        g.bench_with_input(BenchmarkId::new(name, us.len()), &us, |b, us| {
            b.iter(|| sweep(us, &base, exec).into_iter().collect::<Result<Vec<_>, _>>().unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, bench_fidelity_map, bench_density_series, bench_fit, bench_sweep);
criterion_main!(benches);
