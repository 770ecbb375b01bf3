use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use shapesum::{
    g2_ref, residual_integral, shape_partial_sum, wp_ref, Complex64, EisensteinTerm, QuadratureConfig, ShapeSpec,
    SumConfig, TauPoint,
};

fn tau() -> TauPoint {
    TauPoint::from_parts(0.3, 1.2).unwrap()
}

fn partial_sums(c: &mut Criterion) {
    let mut group = c.benchmark_group("shape_partial_sum");
    group.sample_size(10);
    let term = EisensteinTerm::new(tau());
    let cfg = SumConfig { parallel: false, ..SumConfig::default() };
    for lambda in [100u64, 250, 500] {
        for (name, shape) in [("disk", ShapeSpec::Disk), ("diamond", ShapeSpec::Diamond)] {
            group.bench_with_input(BenchmarkId::new(name, lambda), &lambda, |b, &l| {
                b.iter(|| shape_partial_sum(&shape, &term, black_box(l), &cfg))
            });
        }
    }
    group.finish();
}

fn residual(c: &mut Criterion) {
    let q = QuadratureConfig::default();
    let custom = ShapeSpec::custom(vec![[0.0, 1.0], [0.5, 0.9], [1.0, 0.0]]).unwrap();
    let mut group = c.benchmark_group("residual_integral");
    for (name, shape) in [("disk", ShapeSpec::Disk), ("rect", ShapeSpec::Rectangle { c: 2.0 }), ("custom", custom)] {
        group.bench_function(name, |b| b.iter(|| residual_integral(&shape, black_box(tau()), &q)));
    }
    group.finish();
}

fn references(c: &mut Criterion) {
    c.bench_function("g2_ref", |b| b.iter(|| g2_ref(black_box(tau()), 1e-14)));
    let z = Complex64::new(0.21, 0.37);
    c.bench_function("wp_ref", |b| b.iter(|| wp_ref(black_box(z), tau(), 1e-14)));
}

criterion_group!(benches, partial_sums, residual, references);
criterion_main!(benches);
