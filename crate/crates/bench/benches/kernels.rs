use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use grisom::analysis::{Spaces, SweepConfig, SweepSetup, DEFAULT_DISK_RADIUS_FACTOR};
use grisom::sampling::{Distribution, Sampler};
use grisom::som::NeighborhoodKind;
use grisom::tessellation::{euclidean_grid, hyperbolic_tiling, SchlaefliSymbol};
use grisom::{Point, Space};

fn setup(spaces: Spaces, p: u32, q: u32, size: usize) -> SweepSetup {
    let config = SweepConfig {
        spaces,
        schlaefli: SchlaefliSymbol::new(p, q).unwrap(),
        neighborhood: NeighborhoodKind::NN,
        sigma: 0.0,
        epsilon: 0.01,
        s_start: 0.05,
        s_step: 0.01,
        s_count: 1,
        measurements_per_s: 1,
        adapt_interval: 1,
        size,
        seed: 1,
        disk_radius_factor: DEFAULT_DISK_RADIUS_FACTOR,
    };
    SweepSetup::new(&config).unwrap()
}

fn som_kernels(c: &mut Criterion) {
    let mut group = c.benchmark_group("som");
    for (name, spaces, p, q, size) in [
        ("periodic_6x3_16", Spaces::EUCL_EUCL_PERIODIC, 6, 3, 16),
        ("disk_7x3_3", Spaces::DISK_DISK, 7, 3, 3),
        ("eucl_disk_3x7_4", Spaces::EUCL_DISK, 3, 7, 4),
    ] {
        let setup = setup(spaces, p, q, size);
        let mut state = setup.initial_state().unwrap();
        let dist = setup.distribution(spaces, 0.05).unwrap();
        let mut sampler = Sampler::new(dist, 7).unwrap();
        let mut inputs = vec![0.0; 3 * 1024];
        for chunk in inputs.chunks_mut(3) {
            sampler.sample_into(chunk).unwrap();
        }
        group.bench_function(BenchmarkId::new("find_winner", name), |b| {
            let mut k = 0;
            b.iter(|| {
                k = (k + 1) % 1024;
                black_box(state.find_winner(&inputs[3 * k..3 * k + 3]))
            })
        });
        group.bench_function(BenchmarkId::new("adapt", name), |b| {
            let mut k = 0;
            b.iter(|| {
                k = (k + 1) % 1024;
                black_box(state.adapt(&inputs[3 * k..3 * k + 3], 0.001).unwrap())
            })
        });
    }
    group.finish();
}

fn geodesics(c: &mut Criterion) {
    let ball = Space::poincare_ball(3).unwrap();
    let a = Point::poincare(vec![0.3, -0.2, 0.1]).unwrap();
    let b = Point::poincare(vec![-0.5, 0.4, 0.2]).unwrap();
    c.bench_function("ball_geodesic_point", |bench| {
        bench.iter(|| black_box(ball.geodesic_point(black_box(&a), black_box(&b), 0.3).unwrap()))
    });
    c.bench_function("ball_distance", |bench| bench.iter(|| black_box(ball.distance(black_box(&a), black_box(&b)).unwrap())));
}

fn samplers(c: &mut Criterion) {
    let mut group = c.benchmark_group("sampler");
    for (name, dist) in [
        ("hyp_slab_R2_s1", Distribution::hyp_slab(2.0, 1.0).unwrap()),
        ("hyp_slab_R2_s0.05", Distribution::hyp_slab(2.0, 0.05).unwrap()),
        ("hyp_disk_strip_R2_s0.5", Distribution::hyp_disk_strip(2.0, 0.5).unwrap()),
    ] {
        let mut sampler = Sampler::new(dist, 3).unwrap();
        let mut out = [0.0; 3];
        group.bench_function(name, |b| {
            b.iter(|| {
                sampler.sample_into(&mut out).unwrap();
                black_box(out)
            })
        });
    }
    group.finish();
}

fn tilings(c: &mut Criterion) {
    let mut group = c.benchmark_group("tiling");
    group.sample_size(20);
    for levels in [3, 4, 5] {
        let sym = SchlaefliSymbol::new(3, 7).unwrap();
        group.bench_with_input(BenchmarkId::new("hyperbolic_3_7", levels), &levels, |b, &l| {
            b.iter(|| black_box(hyperbolic_tiling(sym, l).unwrap()))
        });
    }
    let hex = SchlaefliSymbol::new(6, 3).unwrap();
    group.bench_function("periodic_grid_6_3_16", |b| b.iter(|| black_box(euclidean_grid(hex, 16, true, true).unwrap())));
    group.finish();
}

criterion_group!(benches, som_kernels, geodesics, samplers, tilings);
criterion_main!(benches);
