use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use misobc_core::capacity::{ratio_sweep, PowerGrid};
use misobc_core::regions::gap_sweep;
use misobc_core::scheme::run_scheme;
use misobc_core::{c21, sample_cn01, Complex, DitheredQuantizer, SamplingConfig, SchemeConfig, SeededRng};

fn estimators(c: &mut Criterion) {
    let mut group = c.benchmark_group("estimators");
    group.sample_size(10);
    for samples in [100_000u64, 1_000_000] {
        let mc = SamplingConfig::new(samples, 1);
        group.bench_with_input(BenchmarkId::new("c21", samples), &mc, |b, mc| {
            b.iter(|| c21(10.0, mc).unwrap())
        });
    }
    let grid = PowerGrid::default();
    let mc = SamplingConfig::new(100_000, 1);
    group.bench_function("ratio_sweep_default_grid_1e5", |b| {
        b.iter(|| ratio_sweep(4.0, &grid, &mc).unwrap())
    });
    for workers in [1usize, 4] {
        let mc = SamplingConfig::new(1_000_000, 1).with_workers(workers);
        group.bench_with_input(BenchmarkId::new("c21_workers", workers), &mc, |b, mc| {
            b.iter(|| c21(10.0, mc).unwrap())
        });
    }
    group.finish();
}

fn quantizer(c: &mut Criterion) {
    let mut rng = SeededRng::new(3, 0);
    let x: Vec<Complex> = (0..65_536).map(|_| sample_cn01(&mut rng) * 2.0).collect();
    c.bench_function("quantize_64k", |b| {
        b.iter(|| {
            let mut q = DitheredQuantizer::for_distortion(4.0, 5).unwrap();
            q.quantize(&x).unwrap()
        })
    });
}

fn regions_and_scheme(c: &mut Criterion) {
    let mut group = c.benchmark_group("pipeline");
    group.sample_size(10);
    let grid = PowerGrid::default();
    let mc = SamplingConfig::new(100_000, 1);
    group.bench_function("gap_sweep_default_grid_1e5", |b| b.iter(|| gap_sweep(4.0, &grid, &mc).unwrap()));
    let cfg = SchemeConfig {
        reference_samples: 100_000,
        ..SchemeConfig::new(128, 10.0)
    };
    group.bench_function("scheme_n128", |b| b.iter(|| run_scheme(&cfg).unwrap()));
    group.finish();
}

criterion_group!(benches, estimators, quantizer, regions_and_scheme);
criterion_main!(benches);
