use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use isospec::base::harmonic_oscillator;
use isospec::closed_form::closed_potential;
use isospec::grid::make_grid;
use isospec::spectral::{discretize_with, lowest_eigenvalues_with, Scheme};
use isospec::sweep::{family, mode_surface};
use isospec::Execution;

const STRATEGIES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| a + (b - a) * k as f64 / (n - 1) as f64)
        .collect()
}

fn bench_family(c: &mut Criterion) {
    let bp = harmonic_oscillator(&make_grid(-10.0, 10.0, 4001).unwrap()).unwrap();
    let tuples: Vec<Vec<f64>> = linspace(0.1, 5.0, 50)
        .into_iter()
        .map(|l| vec![l, 0.2])
        .collect();
    let mut group = c.benchmark_group("family_50x4001");
    for (name, exec) in STRATEGIES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| family(black_box(&bp), black_box(&tuples), exec).unwrap())
        });
    }
    group.finish();
}

fn bench_surface(c: &mut Criterion) {
    let bp = harmonic_oscillator(&make_grid(-10.0, 10.0, 4001).unwrap()).unwrap();
    let axis = linspace(0.1, 5.0, 50);
    let k = bp.grid().node_index(-1.4).unwrap();
    let mut group = c.benchmark_group("mode_surface_50x50");
    for (name, exec) in STRATEGIES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| mode_surface(black_box(&bp), &axis, &axis, k, exec).unwrap())
        });
    }
    group.finish();
}

fn bench_levels(c: &mut Criterion) {
    let bp = harmonic_oscillator(&make_grid(-10.0, 10.0, 4001).unwrap()).unwrap();
    let deformed = closed_potential(&bp, &[0.1, 0.2]).unwrap();
    let mut group = c.benchmark_group("lowest_12_levels_4001");
    group.sample_size(20);
    for scheme in [Scheme::ThreePoint, Scheme::Numerov] {
        let h = discretize_with(&deformed, 0.5, scheme);
        for (name, exec) in STRATEGIES {
            group.bench_function(BenchmarkId::new(format!("{scheme:?}"), name), |b| {
                b.iter(|| lowest_eigenvalues_with(black_box(&h), 12, exec).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, bench_family, bench_surface, bench_levels);
criterion_main!(benches);
